// Trial/session/dataset quality report assembly, aggregation, and
// deterministic serialization.

#ifndef GAZEQC_REPORT_HPP
#define GAZEQC_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazeqc/calibration.hpp"
#include "gazeqc/data_loss.hpp"
#include "gazeqc/event_detection.hpp"
#include "gazeqc/metadata.hpp"
#include "gazeqc/stimulus.hpp"
#include "gazeqc/types.hpp"

namespace gazeqc {

struct TrialQualityReport {
    TrialWindow window;
    std::vector<DataLossReport> data_loss;  // one per tracked eye
    std::optional<StimulusMetricsReport> stimulus_metrics;
    std::vector<std::string> warnings;
};

// Every configurable that feeds a computation; echoed verbatim into the
// report so a result is interpretable without the invoking shell history.
struct ReportParameters {
    std::string trial_start_prefix = "TRIALID";
    std::string trial_end_prefix = "TRIAL_RESULT";
    IdtParams idt;
    Eye metrics_eye = Eye::Right;  // eye used for stimulus metrics in binocular sessions
    std::optional<std::string> stimulus_path;
    std::optional<std::string> stimulus_map_path;
};

struct SessionQualityReport {
    std::string source_path;
    std::string source_digest;  // sha256 over the raw file bytes
    SessionMetadata metadata;
    CalibrationSummary calibration;
    std::vector<TrialQualityReport> trials;
    std::vector<ParseWarning> warnings;  // session-level, in parse order
    ReportParameters parameters;

    std::size_t total_warning_count() const;
};

struct SessionConfig {
    std::string trial_start_prefix = "TRIALID";
    std::string trial_end_prefix = "TRIAL_RESULT";
    IdtParams idt;
    Eye metrics_eye = Eye::Right;
    // One layout for every trial, or a per-trial binding; the map wins when
    // both carry an entry for a trial.
    std::optional<StimulusLayout> stimulus_for_all;
    std::map<std::string, StimulusLayout> stimulus_by_trial;
    std::optional<std::string> stimulus_path;      // echo only
    std::optional<std::string> stimulus_map_path;  // echo only
};

struct MetricSummary {
    int n = 0;
    std::optional<double> mean;
    std::optional<double> sd;  // sample sd, null for n < 2
    std::optional<double> median;
    std::optional<double> min;
    std::optional<double> max;
    // Sorted by session id; sessions without a defined value are absent.
    std::vector<std::pair<std::string, double>> per_session;
};

struct DatasetQualityReport {
    std::vector<std::string> session_ids;  // sorted
    // Keyed by metric name, fixed insertion order (see kDatasetMetrics).
    std::vector<std::pair<std::string, MetricSummary>> metrics;
};

class ReportError : public Error {
public:
    enum class Code { EmptyInput, UnknownFormat };

    ReportError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

enum class ReportFormat { Json, Markdown };

// Throws ReportError{UnknownFormat} for anything but "json"/"markdown".
ReportFormat parse_report_format(const std::string& name);

SessionQualityReport build_session_report(const Recording& rec,
                                          const std::vector<TrialWindow>& trials,
                                          const SessionConfig& config,
                                          std::string source_path = "",
                                          std::string source_digest = "");

// Convenience: parse text, segment trials, build the report.
SessionQualityReport build_session_report_from_text(std::string_view asc_text,
                                                    const SessionConfig& config,
                                                    std::string source_path = "");

DatasetQualityReport aggregate_dataset(const std::vector<SessionQualityReport>& sessions);

std::string serialize_report(const SessionQualityReport& report, ReportFormat format);
std::string serialize_report(const DatasetQualityReport& report, ReportFormat format);

// Session-level scalar used for dataset aggregation; null when the session
// defines no value for the metric.
std::optional<double> session_metric_value(const SessionQualityReport& report,
                                           const std::string& metric);

extern const std::vector<std::string> kDatasetMetrics;

}  // namespace gazeqc

#endif  // GAZEQC_REPORT_HPP
