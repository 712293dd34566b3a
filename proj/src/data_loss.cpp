#include "gazeqc/data_loss.hpp"

#include <algorithm>
#include <cmath>

namespace gazeqc {

namespace {

// Expected sample ticks lie at window.start + k * period for
// k = 0 .. expected - 1; the grid includes both window endpoints.
struct TickGrid {
    double start_ms;
    double period_ms;
    std::int64_t count;

    double tick_time(std::int64_t k) const { return start_ms + static_cast<double>(k) * period_ms; }

    // Number of ticks inside [a, b], clipped to the grid. The epsilon absorbs
    // the rounding of tick positions computed in floating point.
    std::int64_t ticks_in(double a, double b) const {
        if (b < a) return 0;
        constexpr double eps = 1e-6;
        auto lo = static_cast<std::int64_t>(std::ceil((a - start_ms) / period_ms - eps));
        auto hi = static_cast<std::int64_t>(std::floor((b - start_ms) / period_ms + eps));
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min<std::int64_t>(hi, count - 1);
        return hi >= lo ? hi - lo + 1 : 0;
    }
};

TickGrid make_grid(const TrialWindow& window, double rate_hz) {
    if (rate_hz <= 0.0)
        throw DataLossError(DataLossError::Code::ZeroRate,
                            "sampling rate absent or not positive");
    if (window.end_ms <= window.start_ms)
        throw DataLossError(DataLossError::Code::EmptyWindow,
                            "trial window '" + window.trial_id + "' has no duration");
    const double period = 1000.0 / rate_hz;
    const auto expected =
        static_cast<std::int64_t>(std::floor((window.end_ms - window.start_ms) * rate_hz / 1000.0 +
                                             1e-6)) + 1;
    return TickGrid{window.start_ms, period, expected};
}

struct Interval {
    double start, end;
};

std::vector<Interval> merged_blink_intervals(std::span<const EyeEvent> blinks,
                                             const TrialWindow& window, Eye eye) {
    std::vector<Interval> clipped;
    for (const EyeEvent& b : blinks) {
        if (b.kind != EventKind::Blink || b.eye != eye) continue;
        double s = std::max(b.start_ms, window.start_ms);
        double e = std::min(b.end_ms, window.end_ms);
        if (e >= s) clipped.push_back({s, e});
    }
    std::sort(clipped.begin(), clipped.end(),
              [](const Interval& a, const Interval& b) { return a.start < b.start; });
    std::vector<Interval> merged;
    for (const Interval& iv : clipped) {
        if (!merged.empty() && iv.start <= merged.back().end)
            merged.back().end = std::max(merged.back().end, iv.end);
        else
            merged.push_back(iv);
    }
    return merged;
}

}  // namespace

DataLossReport compute_data_loss(std::span<const GazeSample> samples,
                                 std::span<const EyeEvent> blinks, const TrialWindow& window,
                                 double rate_hz, Eye eye) {
    const TickGrid grid = make_grid(window, rate_hz);

    DataLossReport report;
    report.window = window;
    report.eye = eye;
    report.sampling_rate_hz = rate_hz;
    report.expected_samples = grid.count;

    for (const GazeSample& s : samples) {
        if (s.time_ms < window.start_ms || s.time_ms > window.end_ms) continue;
        const EyeChannel* ch = s.channel(eye);
        if (!ch) continue;
        ++report.recorded_samples;
        if (ch->has_position()) ++report.valid_samples;
    }

    const auto merged = merged_blink_intervals(blinks, window, eye);
    for (const Interval& iv : merged) report.blink_samples += grid.ticks_in(iv.start, iv.end);

    for (const EyeEvent& b : blinks) {
        if (b.kind != EventKind::Blink || b.eye != eye) continue;
        double s = std::max(b.start_ms, window.start_ms);
        double e = std::min(b.end_ms, window.end_ms);
        if (e < s) continue;
        BlinkStat stat;
        stat.eye = eye;
        stat.start_ms = s;
        stat.end_ms = e;
        stat.duration_ms = e - s;
        stat.num_samples = grid.ticks_in(s, e);
        report.blinks.push_back(stat);
    }
    std::sort(report.blinks.begin(), report.blinks.end(),
              [](const BlinkStat& a, const BlinkStat& b) { return a.start_ms < b.start_ms; });
    report.blink_count = static_cast<int>(report.blinks.size());
    report.blink_ratio_per_min =
        report.blink_count / (window.duration_ms() / 60000.0);

    // All three ratios share the expected-tick denominator, so they are
    // computed from integer numerators and stay exact.
    const double expected = static_cast<double>(report.expected_samples);
    std::int64_t missing = report.expected_samples - report.valid_samples;
    if (missing < 0) {
        report.warnings.push_back("duplicate samples: more valid samples than expected ticks");
        missing = 0;
    }
    report.loss_ratio_total = static_cast<double>(missing) / expected;
    report.loss_ratio_blink = static_cast<double>(report.blink_samples) / expected;

    std::int64_t unknown = missing - report.blink_samples;
    if (unknown < 0) {
        // Blink intervals covered ticks that still carry valid samples. A
        // negative difference is a device inconsistency, not a measurement.
        if (report.blink_samples > 0)
            report.warnings.push_back("blink intervals overlap valid samples; unknown-loss floored at 0");
        unknown = 0;
    }
    report.loss_ratio_unknown = static_cast<double>(unknown) / expected;
    return report;
}

std::vector<GapInfo> detect_gaps(std::span<const GazeSample> samples, const TrialWindow& window,
                                 double rate_hz, double min_gap_ms) {
    const TickGrid grid = make_grid(window, rate_hz);
    const double half_period = grid.period_ms / 2.0 + 1e-9;
    const auto min_missing = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(min_gap_ms * rate_hz / 1000.0 - 1e-9)));

    // One pass over ticks and time-sorted samples in lockstep.
    std::vector<GapInfo> gaps;
    std::size_t si = 0;
    std::int64_t run_start = -1;
    std::int64_t run_len = 0;
    auto close_run = [&](std::int64_t next_tick) {
        if (run_len >= min_missing)
            gaps.push_back({grid.tick_time(run_start), grid.tick_time(next_tick - 1), run_len});
        run_start = -1;
        run_len = 0;
    };

    for (std::int64_t k = 0; k < grid.count; ++k) {
        const double t = grid.tick_time(k);
        while (si < samples.size() && samples[si].time_ms < t - half_period) ++si;
        const bool covered = si < samples.size() && samples[si].time_ms <= t + half_period;
        if (covered) {
            if (run_len > 0) close_run(k);
        } else {
            if (run_len == 0) run_start = k;
            ++run_len;
        }
    }
    if (run_len > 0) close_run(grid.count);
    return gaps;
}

}  // namespace gazeqc
