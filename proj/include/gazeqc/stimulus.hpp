// Word-level AOI layouts and the stimulus-dependent quality metrics:
// word-skipping rate, background dwell, multi-line jump ratio, word-length
// effect, reading speed.

#ifndef GAZEQC_STIMULUS_HPP
#define GAZEQC_STIMULUS_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gazeqc/types.hpp"

namespace gazeqc {

struct AoiWord {
    int word_index = 0;  // unique within a layout
    int line_index = 0;
    std::string text;
    double x_min = 0.0, y_min = 0.0;
    double x_max = 0.0, y_max = 0.0;

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
};

struct StimulusLayout {
    std::string stimulus_id;
    std::vector<AoiWord> words;  // sorted by word_index
    int line_count = 0;
};

// Where one fixation landed: a word index, or the background.
struct FixationAssignment {
    std::size_t fixation = 0;  // index into the trial's fixation list
    std::optional<int> word_index;  // nullopt = background

    bool background() const { return !word_index.has_value(); }
};

struct StimulusMetricsReport {
    std::string stimulus_id;
    double word_skip_rate = 0.0;
    double background_dwell_ms = 0.0;
    double background_dwell_ratio = 0.0;
    std::optional<double> multi_line_jump_ratio;       // null without line changes
    std::optional<double> word_length_duration_corr;   // Spearman, null when undefined
    double reading_speed_wpm = 0.0;
    int fixation_count = 0;
    Stage fixation_stage = Stage::Manufacturer;
    std::vector<std::string> warnings;
};

class AoiError : public Error {
public:
    enum class Code { MissingHeader, MalformedRow, OverlappingBoxes, DegenerateBox, DuplicateIndex };

    AoiError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

class MetricError : public Error {
public:
    enum class Code { EmptyLayout, EmptyWindow };

    MetricError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

// CSV with header "word_index,line_index,text,x_min,y_min,x_max,y_max".
// Validates box geometry, index uniqueness, and pairwise non-overlap.
StimulusLayout load_aoi_csv(std::string_view csv_text, std::string stimulus_id = "");

// Point-in-closed-box test on the fixation centroid; on a shared boundary the
// lowest word_index wins; outside every box the target is the background.
FixationAssignment assign_fixation(const EyeEvent& fixation, const StimulusLayout& layout,
                                   std::size_t fixation_index = 0);

std::vector<FixationAssignment> assign_fixations(std::span<const EyeEvent> fixations,
                                                 const StimulusLayout& layout);

// Fraction of layout words that received no fixation in the whole trial.
double word_skip_rate(std::span<const FixationAssignment> assignments,
                      const StimulusLayout& layout);

// Total background fixation time and its share of all fixation time.
std::pair<double, double> background_dwell(std::span<const EyeEvent> fixations,
                                           std::span<const FixationAssignment> assignments,
                                           std::vector<std::string>* warnings = nullptr);

// Over consecutive word-assigned fixations whose line changed, the fraction
// that jumped two or more lines. Undefined without any line-change pair.
// Background assignments are skipped: off-text there is no line index.
std::optional<double> multi_line_jump_ratio(std::span<const FixationAssignment> assignments,
                                            const StimulusLayout& layout);

// Spearman rank correlation between word length and total per-word fixation
// duration. Undefined with fewer than 3 fixated words or zero variance.
std::optional<double> word_length_effect(std::span<const EyeEvent> fixations,
                                         std::span<const FixationAssignment> assignments,
                                         const StimulusLayout& layout);

double reading_speed_wpm(const StimulusLayout& layout, const TrialWindow& window);

StimulusMetricsReport compute_stimulus_metrics(std::span<const EyeEvent> fixations,
                                               const StimulusLayout& layout,
                                               const TrialWindow& window, Stage stage);

}  // namespace gazeqc

#endif  // GAZEQC_STIMULUS_HPP
