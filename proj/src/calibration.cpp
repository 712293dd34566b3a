#include "gazeqc/calibration.hpp"

#include <algorithm>

namespace gazeqc {

std::optional<int> count_points(const std::string& model) {
    if (model == "H3" || model == "HV3") return 3;
    if (model == "HV5") return 5;
    if (model == "HV9") return 9;
    if (model == "HV13") return 13;
    return std::nullopt;
}

namespace {

EyeValidationSummary summarize_eye(Eye eye, const std::vector<ValidationRecord>& validations) {
    EyeValidationSummary s;
    s.eye = eye;
    double avg_sum = 0.0;
    for (const ValidationRecord& v : validations) {
        if (v.eye != eye) continue;
        ++s.num_validations;
        ++s.label_histogram[v.error_label];
        if (!v.has_scores()) continue;  // e.g. ABORTED: counted, never averaged
        ++s.num_scored;
        avg_sum += *v.avg_error_deg;
        if (!s.worst_max_error_deg || *v.max_error_deg > *s.worst_max_error_deg)
            s.worst_max_error_deg = *v.max_error_deg;
    }
    if (s.num_scored > 0) s.mean_avg_error_deg = avg_sum / s.num_scored;
    return s;
}

}  // namespace

CalibrationSummary summarize_calibration(const std::vector<CalibrationRecord>& calibrations,
                                         const std::vector<ValidationRecord>& validations,
                                         std::optional<TrackedEye> tracked_eye) {
    CalibrationSummary out;
    out.tracked_eye = tracked_eye;
    out.num_calibrations = static_cast<int>(calibrations.size());
    out.num_validations = static_cast<int>(validations.size());

    for (const CalibrationRecord& c : calibrations) out.calibration_timestamps.push_back(c.time_ms);
    for (const ValidationRecord& v : validations) out.validation_timestamps.push_back(v.time_ms);
    std::sort(out.calibration_timestamps.begin(), out.calibration_timestamps.end());
    std::sort(out.validation_timestamps.begin(), out.validation_timestamps.end());

    for (Eye eye : {Eye::Left, Eye::Right}) {
        EyeValidationSummary s = summarize_eye(eye, validations);
        if (s.num_validations > 0) out.per_eye.push_back(std::move(s));
    }

    int scored = 0;
    double avg_sum = 0.0;
    for (const ValidationRecord& v : validations) {
        ++out.label_histogram[v.error_label];
        if (!v.has_scores()) continue;
        ++scored;
        avg_sum += *v.avg_error_deg;
        if (!out.worst_max_error_deg || *v.max_error_deg > *out.worst_max_error_deg)
            out.worst_max_error_deg = *v.max_error_deg;
    }
    if (scored > 0) out.mean_avg_error_deg = avg_sum / scored;

    if (validations.empty()) out.warnings.push_back("no validation performed");
    return out;
}

}  // namespace gazeqc
