#include "gazeqc/metadata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>

#include "gazeqc/asc_parser.hpp"

namespace gazeqc {

namespace {

bool parse_int_token(std::string_view tok, long& out) {
    const char* first = tok.data();
    const char* last = first + tok.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last;
}

// "DISPLAY_COORDS 0 0 1023 767" -> inclusive pixel bounds, so the resolution
// is max - min + 1 in each dimension.
bool parse_display_coords(std::string_view text, int& width, int& height) {
    std::string_view rest = text;
    auto next_token = [&]() {
        while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
        std::size_t i = 0;
        while (i < rest.size() && rest[i] != ' ' && rest[i] != '\t') ++i;
        std::string_view tok = rest.substr(0, i);
        rest.remove_prefix(i);
        return tok;
    };
    if (next_token() != "DISPLAY_COORDS") return false;
    long v[4];
    for (long& x : v)
        if (!parse_int_token(next_token(), x)) return false;
    long w = v[2] - v[0] + 1;
    long h = v[3] - v[1] + 1;
    if (w <= 0 || h <= 0) return false;
    width = static_cast<int>(w);
    height = static_cast<int>(h);
    return true;
}

// Model name = the leading non-numeric tokens of the VERSION value,
// e.g. "EYELINK II 1" -> "EYELINK II".
std::optional<std::string> model_from_version(const std::string& version) {
    std::string model;
    std::size_t pos = 0;
    while (pos < version.size()) {
        std::size_t end = version.find(' ', pos);
        if (end == std::string::npos) end = version.size();
        std::string_view tok(version.data() + pos, end - pos);
        bool numeric = !tok.empty() &&
                       tok.find_first_not_of("0123456789.") == std::string_view::npos;
        if (numeric || tok.empty()) break;
        if (!model.empty()) model += ' ';
        model += tok;
        pos = end == version.size() ? end : end + 1;
    }
    if (model.empty()) return std::nullopt;
    return model;
}

}  // namespace

SessionMetadata extract_metadata(const Recording& rec) {
    SessionMetadata md;

    for (const StreamDecl& decl : rec.declarations) {
        if (decl.kind == StreamDecl::Kind::Samples) {
            if (decl.rate_hz &&
                std::find(md.sampling_rates_hz.begin(), md.sampling_rates_hz.end(),
                          *decl.rate_hz) == md.sampling_rates_hz.end())
                md.sampling_rates_hz.push_back(*decl.rate_hz);
            if (!md.tracked_eye && decl.eyes) md.tracked_eye = decl.eyes;
            if (!md.sample_filter_level && decl.filter_level)
                md.sample_filter_level = decl.filter_level;
            if (!md.tracking_mode && decl.tracking_mode) md.tracking_mode = decl.tracking_mode;
        } else {
            if (!md.event_filter_level && decl.filter_level)
                md.event_filter_level = decl.filter_level;
        }
    }
    if (md.sampling_rates_hz.size() == 1) {
        md.sampling_rate_hz = md.sampling_rates_hz.front();
    } else if (md.sampling_rates_hz.size() > 1) {
        md.mixed_rate = true;  // all rates listed, none chosen as "the" rate
    }

    for (const HeaderLine& h : rec.header) {
        if (h.key == "DATE" && !md.recording_datetime) md.recording_datetime = h.value;
        if (h.key == "VERSION" && !md.tracker_version) {
            md.tracker_version = h.value;
            md.tracker_model = model_from_version(h.value);
        }
    }

    for (const Message& msg : rec.messages) {
        int w, h;
        if (!md.display_width_px && parse_display_coords(msg.text, w, h)) {
            md.display_width_px = w;
            md.display_height_px = h;
        }
    }

    // Last calibration wins: it is the one in effect for the recorded data.
    CalibrationEvents cal = collect_calibration_events(rec);
    if (!cal.calibrations.empty()) md.calibration_model = cal.calibrations.back().model;

    for (const RecordingBlock& b : rec.blocks)
        md.total_recording_duration_ms += b.end_ms - b.start_ms;

    auto note_missing = [&](bool present, const char* field) {
        if (!present) md.completeness_warnings.push_back(std::string(field) + " missing");
    };
    note_missing(md.sampling_rate_hz.has_value() || md.mixed_rate, "sampling_rate");
    note_missing(md.tracked_eye.has_value(), "tracked_eye");
    note_missing(md.sample_filter_level.has_value(), "sample_filter_level");
    note_missing(md.event_filter_level.has_value(), "event_filter_level");
    note_missing(md.tracking_mode.has_value(), "tracking_mode");
    note_missing(md.recording_datetime.has_value(), "recording_datetime");
    note_missing(md.tracker_model.has_value(), "tracker_model");
    note_missing(md.tracker_version.has_value(), "tracker_version");
    note_missing(md.display_width_px.has_value(), "display_resolution");
    note_missing(md.calibration_model.has_value(), "calibration_model");
    if (md.mixed_rate) md.completeness_warnings.push_back("mixed sampling rates declared");
    return md;
}

}  // namespace gazeqc
