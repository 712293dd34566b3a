// Calibration and validation records plus their per-session summary.

#ifndef GAZEQC_CALIBRATION_HPP
#define GAZEQC_CALIBRATION_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gazeqc/types.hpp"

namespace gazeqc {

struct CalibrationRecord {
    double time_ms = 0.0;
    std::string model;  // H3, HV3, HV5, HV9, HV13
    Eye eye = Eye::Right;
    std::optional<int> num_points;  // absent for unknown models
};

struct ValidationRecord {
    double time_ms = 0.0;
    std::string model;
    Eye eye = Eye::Right;
    std::string error_label;  // GOOD, FAIR, POOR, ABORTED, or verbatim
    std::optional<double> avg_error_deg;
    std::optional<double> max_error_deg;
    std::optional<double> offset_deg;
    std::optional<std::pair<double, double>> offset_pix;

    bool has_scores() const { return avg_error_deg && max_error_deg; }
};

struct EyeValidationSummary {
    Eye eye = Eye::Right;
    int num_validations = 0;
    int num_scored = 0;  // validations contributing to the means
    std::optional<double> mean_avg_error_deg;
    std::optional<double> worst_max_error_deg;
    std::map<std::string, int> label_histogram;
};

struct CalibrationSummary {
    int num_calibrations = 0;
    int num_validations = 0;
    std::vector<double> calibration_timestamps;  // sorted ascending
    std::vector<double> validation_timestamps;   // sorted ascending
    std::vector<EyeValidationSummary> per_eye;   // Left before Right
    std::map<std::string, int> label_histogram;  // over all validations
    std::optional<double> mean_avg_error_deg;    // across eyes, scored only
    std::optional<double> worst_max_error_deg;
    std::optional<TrackedEye> tracked_eye;       // echoed from metadata
    std::vector<std::string> warnings;
};

// Number of targets for a calibration model token; absent for unknown models.
std::optional<int> count_points(const std::string& model);

CalibrationSummary summarize_calibration(const std::vector<CalibrationRecord>& calibrations,
                                         const std::vector<ValidationRecord>& validations,
                                         std::optional<TrackedEye> tracked_eye = std::nullopt);

}  // namespace gazeqc

#endif  // GAZEQC_CALIBRATION_HPP
