#include "gazeqc/report.hpp"

#include <algorithm>
#include <cmath>

#include "gazeqc/asc_parser.hpp"
#include "gazeqc/digest.hpp"

namespace gazeqc {

const std::vector<std::string> kDatasetMetrics = {
    "loss_ratio_total",     "loss_ratio_blink",
    "loss_ratio_unknown",   "blink_ratio",
    "validation_avg_error", "validation_max_error",
    "word_skip_rate",       "background_dwell_ratio",
    "multi_line_jump_ratio", "reading_speed_wpm",
};

std::size_t SessionQualityReport::total_warning_count() const {
    std::size_t n = warnings.size();
    n += metadata.completeness_warnings.size();
    n += calibration.warnings.size();
    for (const TrialQualityReport& t : trials) {
        n += t.warnings.size();
        for (const DataLossReport& d : t.data_loss) n += d.warnings.size();
        if (t.stimulus_metrics) n += t.stimulus_metrics->warnings.size();
    }
    return n;
}

namespace {

std::vector<Eye> tracked_eyes(const SessionMetadata& md, const Recording& rec) {
    if (md.tracked_eye) {
        switch (*md.tracked_eye) {
        case TrackedEye::Left: return {Eye::Left};
        case TrackedEye::Right: return {Eye::Right};
        case TrackedEye::Binocular: return {Eye::Left, Eye::Right};
        }
    }
    // No declaration: infer from the sample lines themselves.
    for (const GazeSample& s : rec.samples) {
        std::vector<Eye> eyes;
        if (s.left_present) eyes.push_back(Eye::Left);
        if (s.right_present) eyes.push_back(Eye::Right);
        if (!eyes.empty()) return eyes;
    }
    return {};
}

// Samples are time-sorted coming out of the parser (malformed exceptions get
// a parse warning); a binary slice keeps per-trial work proportional to the
// trial, not the session.
std::span<const GazeSample> window_slice(const std::vector<GazeSample>& samples,
                                         const TrialWindow& w) {
    auto lo = std::lower_bound(samples.begin(), samples.end(), w.start_ms,
                               [](const GazeSample& s, double t) { return s.time_ms < t; });
    auto hi = std::upper_bound(samples.begin(), samples.end(), w.end_ms,
                               [](double t, const GazeSample& s) { return t < s.time_ms; });
    if (lo >= hi) return {};
    return {&*lo, static_cast<std::size_t>(hi - lo)};
}

bool overlaps(const EyeEvent& ev, const TrialWindow& w) {
    return ev.start_ms <= w.end_ms && ev.end_ms >= w.start_ms;
}

const StimulusLayout* layout_for_trial(const SessionConfig& config, const std::string& trial_id) {
    auto it = config.stimulus_by_trial.find(trial_id);
    if (it != config.stimulus_by_trial.end()) return &it->second;
    if (config.stimulus_for_all) return &*config.stimulus_for_all;
    return nullptr;
}

std::optional<double> mean_of(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "markdown") return ReportFormat::Markdown;
    throw ReportError(ReportError::Code::UnknownFormat, "unknown report format '" + name + "'");
}

SessionQualityReport build_session_report(const Recording& rec,
                                          const std::vector<TrialWindow>& trials,
                                          const SessionConfig& config, std::string source_path,
                                          std::string source_digest) {
    SessionQualityReport report;
    report.source_path = std::move(source_path);
    report.source_digest = std::move(source_digest);
    report.parameters = {config.trial_start_prefix, config.trial_end_prefix, config.idt,
                         config.metrics_eye,        config.stimulus_path,    config.stimulus_map_path};
    report.warnings = rec.warnings;

    report.metadata = extract_metadata(rec);

    CalibrationEvents cal = collect_calibration_events(rec);
    for (const ParseWarning& w : cal.warnings) report.warnings.push_back(w);
    report.calibration =
        summarize_calibration(cal.calibrations, cal.validations, report.metadata.tracked_eye);

    const std::vector<Eye> eyes = tracked_eyes(report.metadata, rec);
    if (eyes.empty() && !rec.samples.empty())
        report.warnings.push_back({0, "tracked eye undeterminable; data loss not computed"});

    std::optional<double> rate = report.metadata.sampling_rate_hz;
    if (!rate && !report.metadata.sampling_rates_hz.empty())
        rate = report.metadata.sampling_rates_hz.front();  // mixed-rate session
    if (!rate || *rate <= 0.0) {
        report.warnings.push_back({0, "sampling rate unknown; data loss not computed"});
        rate.reset();
    }

    Eye metrics_eye = config.metrics_eye;
    if (report.metadata.tracked_eye == TrackedEye::Left) metrics_eye = Eye::Left;
    if (report.metadata.tracked_eye == TrackedEye::Right) metrics_eye = Eye::Right;
    report.parameters.metrics_eye = metrics_eye;

    for (const TrialWindow& window : trials) {
        TrialQualityReport trial;
        trial.window = window;
        auto samples = window_slice(rec.samples, window);

        if (rate) {
            for (Eye eye : eyes) {
                try {
                    trial.data_loss.push_back(
                        compute_data_loss(samples, rec.events, window, *rate, eye));
                } catch (const DataLossError& e) {
                    trial.warnings.push_back(std::string("data loss not computed: ") + e.what());
                }
            }
        }

        // Manufacturer fixations are preferred; the fallback detector runs
        // only when the trial has none, and the stage tag says so.
        std::vector<EyeEvent> fixations;
        for (const EyeEvent& ev : rec.events)
            if (ev.kind == EventKind::Fixation && ev.eye == metrics_eye && overlaps(ev, window))
                fixations.push_back(ev);
        Stage stage = Stage::Manufacturer;
        if (fixations.empty()) {
            fixations = detect_fixations_idt(samples, metrics_eye, config.idt);
            stage = Stage::Fallback;
        }
        std::size_t no_centroid = 0;
        std::erase_if(fixations, [&](const EyeEvent& ev) {
            bool drop = !ev.fix_x_px || !ev.fix_y_px;
            if (drop) ++no_centroid;
            return drop;
        });
        if (no_centroid > 0)
            trial.warnings.push_back(std::to_string(no_centroid) +
                                     " fixation(s) without centroid excluded from stimulus metrics");

        if (const StimulusLayout* layout = layout_for_trial(config, window.trial_id)) {
            try {
                trial.stimulus_metrics =
                    compute_stimulus_metrics(fixations, *layout, window, stage);
            } catch (const MetricError& e) {
                trial.warnings.push_back(std::string("stimulus metrics not computed: ") + e.what());
            }
        } else {
            trial.warnings.push_back("no AOI layout bound");
        }
        report.trials.push_back(std::move(trial));
    }
    return report;
}

SessionQualityReport build_session_report_from_text(std::string_view asc_text,
                                                    const SessionConfig& config,
                                                    std::string source_path) {
    Recording rec = parse_asc(asc_text);
    std::vector<ParseWarning> seg_warnings;
    auto trials =
        segment_trials(rec, config.trial_start_prefix, config.trial_end_prefix, &seg_warnings);
    for (ParseWarning& w : seg_warnings) rec.warnings.push_back(std::move(w));
    return build_session_report(rec, trials, config, std::move(source_path),
                                sha256_digest(asc_text));
}

std::optional<double> session_metric_value(const SessionQualityReport& report,
                                           const std::string& metric) {
    std::vector<double> values;
    if (metric == "loss_ratio_total" || metric == "loss_ratio_blink" ||
        metric == "loss_ratio_unknown" || metric == "blink_ratio") {
        for (const TrialQualityReport& t : report.trials)
            for (const DataLossReport& d : t.data_loss) {
                if (metric == "loss_ratio_total") values.push_back(d.loss_ratio_total);
                if (metric == "loss_ratio_blink") values.push_back(d.loss_ratio_blink);
                if (metric == "loss_ratio_unknown") values.push_back(d.loss_ratio_unknown);
                if (metric == "blink_ratio") values.push_back(d.blink_ratio_per_min);
            }
        return mean_of(values);
    }
    if (metric == "validation_avg_error") return report.calibration.mean_avg_error_deg;
    if (metric == "validation_max_error") return report.calibration.worst_max_error_deg;
    for (const TrialQualityReport& t : report.trials) {
        if (!t.stimulus_metrics) continue;
        const StimulusMetricsReport& m = *t.stimulus_metrics;
        if (metric == "word_skip_rate") values.push_back(m.word_skip_rate);
        if (metric == "background_dwell_ratio") values.push_back(m.background_dwell_ratio);
        if (metric == "reading_speed_wpm") values.push_back(m.reading_speed_wpm);
        if (metric == "multi_line_jump_ratio" && m.multi_line_jump_ratio)
            values.push_back(*m.multi_line_jump_ratio);
    }
    return mean_of(values);
}

DatasetQualityReport aggregate_dataset(const std::vector<SessionQualityReport>& sessions) {
    if (sessions.empty())
        throw ReportError(ReportError::Code::EmptyInput, "no session reports to aggregate");

    DatasetQualityReport out;
    // Session order must not leak into the output: operate in id order.
    std::vector<const SessionQualityReport*> sorted;
    sorted.reserve(sessions.size());
    for (const SessionQualityReport& s : sessions) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(),
              [](const SessionQualityReport* a, const SessionQualityReport* b) {
                  return a->source_path < b->source_path;
              });
    for (const SessionQualityReport* s : sorted) out.session_ids.push_back(s->source_path);

    for (const std::string& metric : kDatasetMetrics) {
        MetricSummary summary;
        for (const SessionQualityReport* s : sorted) {
            if (auto v = session_metric_value(*s, metric))
                summary.per_session.emplace_back(s->source_path, *v);
        }
        summary.n = static_cast<int>(summary.per_session.size());
        if (summary.n > 0) {
            std::vector<double> values;
            values.reserve(summary.per_session.size());
            for (const auto& [id, v] : summary.per_session) values.push_back(v);
            double sum = 0.0;
            for (double v : values) sum += v;
            const double mean = sum / static_cast<double>(summary.n);
            summary.mean = mean;
            std::vector<double> ordered = values;
            std::sort(ordered.begin(), ordered.end());
            summary.min = ordered.front();
            summary.max = ordered.back();
            const std::size_t mid = ordered.size() / 2;
            summary.median = ordered.size() % 2 == 1
                                 ? ordered[mid]
                                 : (ordered[mid - 1] + ordered[mid]) / 2.0;
            if (summary.n >= 2) {
                double ss = 0.0;
                for (double v : values) ss += (v - mean) * (v - mean);
                summary.sd = std::sqrt(ss / static_cast<double>(summary.n - 1));
            }
        }
        out.metrics.emplace_back(metric, std::move(summary));
    }
    return out;
}

}  // namespace gazeqc
