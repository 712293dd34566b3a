// Core domain types shared by the parsing and reporting modules.

#ifndef GAZEQC_TYPES_HPP
#define GAZEQC_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gazeqc {

enum class Eye { Left, Right };

enum class TrackedEye { Left, Right, Binocular };

inline const char* to_string(Eye eye) {
    return eye == Eye::Left ? "left" : "right";
}

inline const char* to_string(TrackedEye eye) {
    switch (eye) {
    case TrackedEye::Left: return "left";
    case TrackedEye::Right: return "right";
    default: return "binocular";
    }
}

// Missing coordinates are stored as NaN so a sample stays trivially copyable.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

struct EyeChannel {
    double x_px = kMissing;
    double y_px = kMissing;
    double pupil = kMissing;

    bool has_position() const { return !is_missing(x_px) && !is_missing(y_px); }
    bool has_pupil() const { return !is_missing(pupil); }
};

struct GazeSample {
    double time_ms = 0.0;
    EyeChannel left;
    EyeChannel right;
    // Which channels the sample line actually declared (a declared channel may
    // still carry missing coordinates, e.g. during a blink).
    bool left_present = false;
    bool right_present = false;
    // Set when the sample's timestamp fell outside every recording block.
    bool out_of_block = false;

    const EyeChannel* channel(Eye eye) const {
        if (eye == Eye::Left) return left_present ? &left : nullptr;
        return right_present ? &right : nullptr;
    }
};

enum class EventKind { Fixation, Saccade, Blink };

// Pre-processing stage an event came from: parsed from the device output, or
// derived by the fallback detector in this library.
enum class Stage { Manufacturer, Fallback };

inline const char* to_string(Stage s) {
    return s == Stage::Manufacturer ? "manufacturer" : "fallback";
}

struct EyeEvent {
    EventKind kind = EventKind::Fixation;
    Eye eye = Eye::Right;
    double start_ms = 0.0;
    double end_ms = 0.0;
    double duration_ms = 0.0;
    Stage stage = Stage::Manufacturer;

    // Fixation payload.
    std::optional<double> fix_x_px;
    std::optional<double> fix_y_px;
    std::optional<double> fix_pupil;

    // Saccade payload.
    std::optional<double> sacc_start_x_px;
    std::optional<double> sacc_start_y_px;
    std::optional<double> sacc_end_x_px;
    std::optional<double> sacc_end_y_px;
    std::optional<double> amplitude_deg;
    std::optional<double> peak_velocity_deg_s;
};

struct Message {
    double time_ms = 0.0;
    std::string text;
};

struct ParseWarning {
    std::size_t line = 0;  // 1-based source line, 0 when not tied to a line
    std::string message;
};

struct HeaderLine {
    std::string key;
    std::string value;
};

struct StreamDecl {
    enum class Kind { Samples, Events };
    Kind kind = Kind::Samples;
    std::optional<TrackedEye> eyes;
    std::optional<double> rate_hz;
    std::optional<std::string> tracking_mode;
    std::optional<int> filter_level;
};

struct RecordingBlock {
    double start_ms = 0.0;
    double end_ms = 0.0;
    bool synthetic = false;  // fabricated when the file has no START line
};

struct Recording {
    std::vector<HeaderLine> header;
    std::vector<StreamDecl> declarations;
    std::vector<RecordingBlock> blocks;
    std::vector<GazeSample> samples;
    std::vector<EyeEvent> events;
    std::vector<Message> messages;
    std::vector<ParseWarning> warnings;
};

struct TrialWindow {
    enum class Source { Markers, WholeSession };

    std::string trial_id;
    double start_ms = 0.0;
    double end_ms = 0.0;
    Source source = Source::Markers;

    double duration_ms() const { return end_ms - start_ms; }
};

// Base class for all hard errors raised by this library. Anything tolerable
// becomes a warning instead; see the per-module warning lists.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
public:
    enum class Code { EmptyInput, NoRecordingBlock };

    ParseError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

}  // namespace gazeqc

#endif  // GAZEQC_TYPES_HPP
