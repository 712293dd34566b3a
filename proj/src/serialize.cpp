// Deterministic serialization of quality reports. Key order follows the
// report schema; absent values are emitted as null, never as zero.

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gazeqc/report.hpp"

namespace gazeqc {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1.0";

// Ratios, correlations, and derived rates carry at most 6 significant digits.
double round_sig(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    const double mag = std::pow(10.0, 5 - std::floor(std::log10(std::fabs(v))));
    return std::round(v * mag) / mag;
}

Json num(std::optional<double> v) {
    if (!v) return nullptr;
    return round_sig(*v);
}

Json raw(std::optional<double> v) {
    if (!v) return nullptr;
    return *v;
}

template <typename T>
Json opt(const std::optional<T>& v) {
    if (!v) return nullptr;
    return *v;
}

Json warning_text(const ParseWarning& w) {
    if (w.line == 0) return w.message;
    return "line " + std::to_string(w.line) + ": " + w.message;
}

Json json_histogram(const std::map<std::string, int>& hist) {
    Json j = Json::object();
    for (const auto& [label, count] : hist) j[label] = count;
    return j;
}

Json json_metadata(const SessionMetadata& md) {
    Json j = Json::object();
    j["sampling_rate_hz"] = raw(md.sampling_rate_hz);
    j["sampling_rates_hz"] = md.sampling_rates_hz;
    j["mixed_rate"] = md.mixed_rate;
    j["tracked_eye"] = md.tracked_eye ? Json(to_string(*md.tracked_eye)) : Json(nullptr);
    j["sample_filter_level"] = opt(md.sample_filter_level);
    j["event_filter_level"] = opt(md.event_filter_level);
    j["tracking_mode"] = opt(md.tracking_mode);
    j["recording_datetime"] = opt(md.recording_datetime);
    j["total_recording_duration_ms"] = md.total_recording_duration_ms;
    j["tracker_model"] = opt(md.tracker_model);
    j["tracker_version"] = opt(md.tracker_version);
    j["display_width_px"] = opt(md.display_width_px);
    j["display_height_px"] = opt(md.display_height_px);
    j["calibration_model"] = opt(md.calibration_model);
    j["completeness_warnings"] = md.completeness_warnings;
    return j;
}

Json json_calibration(const CalibrationSummary& cal) {
    Json j = Json::object();
    j["num_calibrations"] = cal.num_calibrations;
    j["num_validations"] = cal.num_validations;
    j["calibration_timestamps"] = cal.calibration_timestamps;
    j["validation_timestamps"] = cal.validation_timestamps;
    j["tracked_eye"] = cal.tracked_eye ? Json(to_string(*cal.tracked_eye)) : Json(nullptr);
    j["mean_avg_error_deg"] = num(cal.mean_avg_error_deg);
    j["worst_max_error_deg"] = num(cal.worst_max_error_deg);
    j["label_histogram"] = json_histogram(cal.label_histogram);
    Json eyes = Json::array();
    for (const EyeValidationSummary& e : cal.per_eye) {
        Json je = Json::object();
        je["eye"] = to_string(e.eye);
        je["num_validations"] = e.num_validations;
        je["num_scored"] = e.num_scored;
        je["mean_avg_error_deg"] = num(e.mean_avg_error_deg);
        je["worst_max_error_deg"] = num(e.worst_max_error_deg);
        je["label_histogram"] = json_histogram(e.label_histogram);
        eyes.push_back(std::move(je));
    }
    j["per_eye"] = std::move(eyes);
    j["warnings"] = cal.warnings;
    return j;
}

Json json_data_loss(const DataLossReport& d) {
    Json j = Json::object();
    j["eye"] = to_string(d.eye);
    j["sampling_rate_hz"] = d.sampling_rate_hz;
    j["expected_samples"] = d.expected_samples;
    j["recorded_samples"] = d.recorded_samples;
    j["valid_samples"] = d.valid_samples;
    j["blink_samples"] = d.blink_samples;
    j["loss_ratio_total"] = round_sig(d.loss_ratio_total);
    j["loss_ratio_blink"] = round_sig(d.loss_ratio_blink);
    j["loss_ratio_unknown"] = round_sig(d.loss_ratio_unknown);
    j["blink_count"] = d.blink_count;
    j["blink_ratio_per_min"] = round_sig(d.blink_ratio_per_min);
    Json blinks = Json::array();
    for (const BlinkStat& b : d.blinks) {
        Json jb = Json::object();
        jb["start_ms"] = b.start_ms;
        jb["end_ms"] = b.end_ms;
        jb["duration_ms"] = b.duration_ms;
        jb["num_samples"] = b.num_samples;
        blinks.push_back(std::move(jb));
    }
    j["blinks"] = std::move(blinks);
    j["warnings"] = d.warnings;
    return j;
}

Json json_stimulus(const StimulusMetricsReport& m) {
    Json j = Json::object();
    j["stimulus_id"] = m.stimulus_id;
    j["fixation_stage"] = to_string(m.fixation_stage);
    j["fixation_count"] = m.fixation_count;
    j["word_skip_rate"] = round_sig(m.word_skip_rate);
    j["background_dwell_ms"] = m.background_dwell_ms;
    j["background_dwell_ratio"] = round_sig(m.background_dwell_ratio);
    j["multi_line_jump_ratio"] = num(m.multi_line_jump_ratio);
    j["word_length_duration_corr"] = num(m.word_length_duration_corr);
    j["reading_speed_wpm"] = round_sig(m.reading_speed_wpm);
    j["warnings"] = m.warnings;
    return j;
}

Json json_trial(const TrialQualityReport& t) {
    Json j = Json::object();
    j["trial_id"] = t.window.trial_id;
    Json w = Json::object();
    w["start_ms"] = t.window.start_ms;
    w["end_ms"] = t.window.end_ms;
    w["source"] = t.window.source == TrialWindow::Source::Markers ? "markers" : "whole_session";
    j["window"] = std::move(w);
    Json losses = Json::array();
    for (const DataLossReport& d : t.data_loss) losses.push_back(json_data_loss(d));
    j["data_loss"] = std::move(losses);
    j["stimulus_metrics"] = t.stimulus_metrics ? json_stimulus(*t.stimulus_metrics) : Json(nullptr);
    j["warnings"] = t.warnings;
    return j;
}

Json json_parameters(const ReportParameters& p) {
    Json j = Json::object();
    j["trial_start"] = p.trial_start_prefix;
    j["trial_end"] = p.trial_end_prefix;
    j["dispersion_px"] = p.idt.dispersion_threshold_px;
    j["min_fix_ms"] = p.idt.min_duration_ms;
    j["metrics_eye"] = to_string(p.metrics_eye);
    j["stimulus"] = opt(p.stimulus_path);
    j["stimulus_map"] = opt(p.stimulus_map_path);
    return j;
}

Json json_session(const SessionQualityReport& r) {
    Json j = Json::object();
    j["schema_version"] = kSchemaVersion;
    Json source = Json::object();
    source["path"] = r.source_path;
    source["digest"] = r.source_digest;
    j["source"] = std::move(source);
    j["metadata"] = json_metadata(r.metadata);
    j["calibration"] = json_calibration(r.calibration);
    Json trials = Json::array();
    for (const TrialQualityReport& t : r.trials) trials.push_back(json_trial(t));
    j["trials"] = std::move(trials);
    Json warnings = Json::array();
    for (const ParseWarning& w : r.warnings) warnings.push_back(warning_text(w));
    j["warnings"] = std::move(warnings);
    j["parameters"] = json_parameters(r.parameters);
    return j;
}

std::string fmt(const Json& v) {
    if (v.is_null()) return "null";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string markdown_session(const SessionQualityReport& r) {
    std::ostringstream md;
    md << "# Eye-Tracking Data Quality Report\n\n";
    md << "- source: " << r.source_path << "\n";
    md << "- digest: " << r.source_digest << "\n";
    md << "- schema_version: " << kSchemaVersion << "\n\n";

    md << "## Metadata\n\n| field | value |\n|---|---|\n";
    const Json metadata = json_metadata(r.metadata);
    for (const auto& [key, value] : metadata.items())
        md << "| " << key << " | " << fmt(value) << " |\n";

    md << "\n## Calibration & Validation\n\n| field | value |\n|---|---|\n";
    const Json cal = json_calibration(r.calibration);
    for (const auto& [key, value] : cal.items())
        if (key != "per_eye") md << "| " << key << " | " << fmt(value) << " |\n";

    md << "\n## Data Loss\n\n";
    md << "| trial | eye | expected | valid | loss_total | loss_blink | loss_unknown | blinks |\n";
    md << "|---|---|---|---|---|---|---|---|\n";
    for (const TrialQualityReport& t : r.trials)
        for (const DataLossReport& d : t.data_loss) {
            Json jd = json_data_loss(d);
            md << "| " << t.window.trial_id << " | " << to_string(d.eye) << " | "
               << d.expected_samples << " | " << d.valid_samples << " | "
               << fmt(jd["loss_ratio_total"]) << " | " << fmt(jd["loss_ratio_blink"]) << " | "
               << fmt(jd["loss_ratio_unknown"]) << " | " << d.blink_count << " |\n";
        }

    md << "\n## Stimulus Metrics\n\n";
    md << "| trial | stage | skip_rate | bg_dwell_ms | bg_ratio | multi_line_jumps | "
          "word_length_corr | wpm |\n";
    md << "|---|---|---|---|---|---|---|---|\n";
    for (const TrialQualityReport& t : r.trials) {
        if (!t.stimulus_metrics) continue;
        Json jm = json_stimulus(*t.stimulus_metrics);
        md << "| " << t.window.trial_id << " | " << fmt(jm["fixation_stage"]) << " | "
           << fmt(jm["word_skip_rate"]) << " | " << fmt(jm["background_dwell_ms"]) << " | "
           << fmt(jm["background_dwell_ratio"]) << " | " << fmt(jm["multi_line_jump_ratio"])
           << " | " << fmt(jm["word_length_duration_corr"]) << " | "
           << fmt(jm["reading_speed_wpm"]) << " |\n";
    }

    md << "\n## Warnings\n\n";
    std::size_t listed = 0;
    for (const ParseWarning& w : r.warnings) {
        md << "- " << warning_text(w).get<std::string>() << "\n";
        ++listed;
    }
    for (const TrialQualityReport& t : r.trials)
        for (const std::string& w : t.warnings) {
            md << "- trial " << t.window.trial_id << ": " << w << "\n";
            ++listed;
        }
    if (listed == 0) md << "(none)\n";

    md << "\n## Parameters\n\n| parameter | value |\n|---|---|\n";
    const Json params = json_parameters(r.parameters);
    for (const auto& [key, value] : params.items())
        md << "| " << key << " | " << fmt(value) << " |\n";
    return std::move(md).str();
}

Json json_dataset(const DatasetQualityReport& r) {
    Json j = Json::object();
    j["schema_version"] = kSchemaVersion;
    j["num_sessions"] = r.session_ids.size();
    j["sessions"] = r.session_ids;
    Json metrics = Json::object();
    for (const auto& [name, summary] : r.metrics) {
        Json jm = Json::object();
        jm["n"] = summary.n;
        jm["mean"] = num(summary.mean);
        jm["sd"] = num(summary.sd);
        jm["median"] = num(summary.median);
        jm["min"] = num(summary.min);
        jm["max"] = num(summary.max);
        Json per = Json::object();
        for (const auto& [id, v] : summary.per_session) per[id] = round_sig(v);
        jm["per_session"] = std::move(per);
        metrics[name] = std::move(jm);
    }
    j["metrics"] = std::move(metrics);
    return j;
}

std::string markdown_dataset(const DatasetQualityReport& r) {
    std::ostringstream md;
    md << "# Dataset Quality Report\n\n";
    md << "- sessions: " << r.session_ids.size() << "\n\n";
    md << "| metric | n | mean | sd | median | min | max |\n|---|---|---|---|---|---|---|\n";
    for (const auto& [name, s] : r.metrics) {
        md << "| " << name << " | " << s.n << " | " << fmt(num(s.mean)) << " | "
           << fmt(num(s.sd)) << " | " << fmt(num(s.median)) << " | " << fmt(num(s.min)) << " | "
           << fmt(num(s.max)) << " |\n";
    }
    return std::move(md).str();
}

}  // namespace

std::string serialize_report(const SessionQualityReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) return json_session(report).dump(2) + "\n";
    return markdown_session(report);
}

std::string serialize_report(const DatasetQualityReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) return json_dataset(report).dump(2) + "\n";
    return markdown_dataset(report);
}

}  // namespace gazeqc
