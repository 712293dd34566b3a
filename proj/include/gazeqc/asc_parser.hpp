// Tolerant line-oriented parser for the EyeLink ASC text export.
//
// The parser is total: any input yields either a Recording or one of the two
// hard errors (EmptyInput, NoRecordingBlock). Malformed interior lines are
// skipped with one warning each and never abort the parse.

#ifndef GAZEQC_ASC_PARSER_HPP
#define GAZEQC_ASC_PARSER_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gazeqc/calibration.hpp"
#include "gazeqc/types.hpp"

namespace gazeqc {

// Which eye channels a sample line is expected to carry, normally taken from
// the SAMPLES declaration or the START line flags.
struct SampleLayout {
    bool left = false;
    bool right = true;

    int channel_count() const { return (left ? 1 : 0) + (right ? 1 : 0); }
};

Recording parse_asc(std::string_view text);

// One raw sample line. Returns nullopt for a malformed line and, when given a
// sink, appends the reason. The "." marker (or any unparseable coordinate)
// yields missing x/y; pupil 0.0 yields a missing pupil.
std::optional<GazeSample> parse_sample_line(std::string_view line, SampleLayout layout,
                                            std::string* error = nullptr);

// "!CAL VALIDATION ..." messages. Returns nullopt both for messages that are
// not validations and for malformed ones; the latter add a warning.
std::optional<ValidationRecord> parse_validation_message(const Message& msg,
                                                         std::vector<ParseWarning>* warnings = nullptr);

// "!CAL CALIBRATION ..." messages, same contract as above.
std::optional<CalibrationRecord> parse_calibration_message(const Message& msg,
                                                           std::vector<ParseWarning>* warnings = nullptr);

// All calibration/validation attempts found in a recording's message stream.
struct CalibrationEvents {
    std::vector<CalibrationRecord> calibrations;
    std::vector<ValidationRecord> validations;
    std::vector<ParseWarning> warnings;
};

CalibrationEvents collect_calibration_events(const Recording& rec);

// Splits a recording into trial windows using literal message-prefix markers.
// A start marker opens a trial that closes at the next end marker, the next
// start marker, or the end of the enclosing block, whichever comes first.
// Without any start markers the whole session becomes one window.
std::vector<TrialWindow> segment_trials(const Recording& rec,
                                        std::string_view start_prefix = "TRIALID",
                                        std::string_view end_prefix = "TRIAL_RESULT",
                                        std::vector<ParseWarning>* warnings = nullptr);

}  // namespace gazeqc

#endif  // GAZEQC_ASC_PARSER_HPP
