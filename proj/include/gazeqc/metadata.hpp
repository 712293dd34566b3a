// Standardized session-level metadata extracted from a parsed recording.

#ifndef GAZEQC_METADATA_HPP
#define GAZEQC_METADATA_HPP

#include <optional>
#include <string>
#include <vector>

#include "gazeqc/types.hpp"

namespace gazeqc {

struct SessionMetadata {
    std::optional<double> sampling_rate_hz;   // set only when a single rate was declared
    std::vector<double> sampling_rates_hz;    // all distinct declared rates, in order
    bool mixed_rate = false;
    std::optional<TrackedEye> tracked_eye;
    std::optional<int> sample_filter_level;
    std::optional<int> event_filter_level;
    std::optional<std::string> tracking_mode;
    std::optional<std::string> recording_datetime;  // verbatim "** DATE:" value
    double total_recording_duration_ms = 0.0;       // sum of block durations
    std::optional<std::string> tracker_model;
    std::optional<std::string> tracker_version;
    std::optional<int> display_width_px;
    std::optional<int> display_height_px;
    std::optional<std::string> calibration_model;

    // One entry per absent field; absence is reported, never an error.
    std::vector<std::string> completeness_warnings;
};

SessionMetadata extract_metadata(const Recording& rec);

}  // namespace gazeqc

#endif  // GAZEQC_METADATA_HPP
