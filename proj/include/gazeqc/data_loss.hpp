// Per-trial data-loss decomposition: total loss, blink-caused loss, and the
// unknown-cause residual, computed on the expected sample tick grid.

#ifndef GAZEQC_DATA_LOSS_HPP
#define GAZEQC_DATA_LOSS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gazeqc/types.hpp"

namespace gazeqc {

struct BlinkStat {
    Eye eye = Eye::Right;
    double start_ms = 0.0;  // clipped to the trial window
    double end_ms = 0.0;
    double duration_ms = 0.0;
    std::int64_t num_samples = 0;  // expected ticks covered by the interval
};

struct DataLossReport {
    TrialWindow window;
    Eye eye = Eye::Right;
    double sampling_rate_hz = 0.0;
    std::int64_t expected_samples = 0;
    std::int64_t recorded_samples = 0;
    std::int64_t valid_samples = 0;
    std::int64_t blink_samples = 0;  // ticks covered by merged blink intervals
    double loss_ratio_total = 0.0;
    double loss_ratio_blink = 0.0;
    double loss_ratio_unknown = 0.0;
    int blink_count = 0;
    double blink_ratio_per_min = 0.0;
    std::vector<BlinkStat> blinks;
    std::vector<std::string> warnings;
};

struct GapInfo {
    double start_ms = 0.0;  // first missing tick
    double end_ms = 0.0;    // last missing tick
    std::int64_t num_missing = 0;
};

class DataLossError : public Error {
public:
    enum class Code { ZeroRate, EmptyWindow };

    DataLossError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

// samples: time-sorted, already restricted to nothing in particular (the
// window filter happens here); blinks: manufacturer blink events for `eye`.
DataLossReport compute_data_loss(std::span<const GazeSample> samples,
                                 std::span<const EyeEvent> blinks,
                                 const TrialWindow& window, double rate_hz, Eye eye);

// Maximal runs of missing expected ticks (no sample line within half a sample
// period of the tick) lasting at least min_gap_ms, sorted by start time.
std::vector<GapInfo> detect_gaps(std::span<const GazeSample> samples,
                                 const TrialWindow& window, double rate_hz,
                                 double min_gap_ms);

}  // namespace gazeqc

#endif  // GAZEQC_DATA_LOSS_HPP
