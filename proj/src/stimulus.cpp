#include "gazeqc/stimulus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

namespace gazeqc {

namespace {

// Minimal CSV field splitting with double-quote support, enough for word
// texts containing commas or quotes.
std::vector<std::string> split_csv_row(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

bool parse_num(const std::string& tok, double& out) {
    const char* first = tok.c_str();
    const char* last = first + tok.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last;
}

bool boxes_overlap(const AoiWord& a, const AoiWord& b) {
    double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    return w > 0.0 && h > 0.0;  // positive-area intersection only
}

std::size_t utf8_length(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - mean_a;
        double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0) return std::nullopt;
    return cov / std::sqrt(var_a * var_b);
}

const AoiWord* find_word(const StimulusLayout& layout, int word_index) {
    auto it = std::lower_bound(layout.words.begin(), layout.words.end(), word_index,
                               [](const AoiWord& w, int idx) { return w.word_index < idx; });
    if (it != layout.words.end() && it->word_index == word_index) return &*it;
    return nullptr;
}

}  // namespace

StimulusLayout load_aoi_csv(std::string_view csv_text, std::string stimulus_id) {
    static const std::vector<std::string> kHeader = {"word_index", "line_index", "text",
                                                     "x_min",      "y_min",      "x_max",
                                                     "y_max"};
    StimulusLayout layout;
    layout.stimulus_id = std::move(stimulus_id);

    std::size_t pos = 0, line_no = 0;
    bool header_seen = false;
    while (pos < csv_text.size()) {
        std::size_t eol = csv_text.find('\n', pos);
        std::string_view line = csv_text.substr(pos, eol == std::string_view::npos
                                                         ? std::string_view::npos
                                                         : eol - pos);
        pos = eol == std::string_view::npos ? csv_text.size() : eol + 1;
        ++line_no;
        if (line.empty() || line == "\r") continue;

        auto fields = split_csv_row(line);
        if (!header_seen) {
            if (fields != kHeader)
                throw AoiError(AoiError::Code::MissingHeader,
                               "AOI CSV must start with header "
                               "'word_index,line_index,text,x_min,y_min,x_max,y_max'");
            header_seen = true;
            continue;
        }
        if (fields.size() != kHeader.size())
            throw AoiError(AoiError::Code::MalformedRow,
                           "row " + std::to_string(line_no) + ": expected 7 fields, got " +
                               std::to_string(fields.size()));
        AoiWord w;
        double wi, li;
        if (!parse_num(fields[0], wi) || !parse_num(fields[1], li) ||
            !parse_num(fields[3], w.x_min) || !parse_num(fields[4], w.y_min) ||
            !parse_num(fields[5], w.x_max) || !parse_num(fields[6], w.y_max) ||
            wi != std::floor(wi) || li != std::floor(li) || wi < 0 || li < 0)
            throw AoiError(AoiError::Code::MalformedRow,
                           "row " + std::to_string(line_no) + ": unparseable field");
        w.word_index = static_cast<int>(wi);
        w.line_index = static_cast<int>(li);
        w.text = fields[2];
        if (!(w.x_min < w.x_max) || !(w.y_min < w.y_max))
            throw AoiError(AoiError::Code::DegenerateBox,
                           "word " + std::to_string(w.word_index) + ": box has no area");
        layout.words.push_back(std::move(w));
    }
    if (!header_seen)
        throw AoiError(AoiError::Code::MissingHeader, "AOI CSV is empty");

    std::sort(layout.words.begin(), layout.words.end(),
              [](const AoiWord& a, const AoiWord& b) { return a.word_index < b.word_index; });
    for (std::size_t i = 1; i < layout.words.size(); ++i)
        if (layout.words[i].word_index == layout.words[i - 1].word_index)
            throw AoiError(AoiError::Code::DuplicateIndex,
                           "word_index " + std::to_string(layout.words[i].word_index) +
                               " appears more than once");
    for (std::size_t i = 0; i < layout.words.size(); ++i)
        for (std::size_t j = i + 1; j < layout.words.size(); ++j)
            if (boxes_overlap(layout.words[i], layout.words[j]))
                throw AoiError(AoiError::Code::OverlappingBoxes,
                               "words " + std::to_string(layout.words[i].word_index) + " and " +
                                   std::to_string(layout.words[j].word_index) +
                                   " overlap with positive area");
    for (const AoiWord& w : layout.words)
        layout.line_count = std::max(layout.line_count, w.line_index + 1);
    return layout;
}

FixationAssignment assign_fixation(const EyeEvent& fixation, const StimulusLayout& layout,
                                   std::size_t fixation_index) {
    FixationAssignment a;
    a.fixation = fixation_index;
    if (!fixation.fix_x_px || !fixation.fix_y_px) return a;  // no centroid: background
    // Words are sorted by index, so the first hit is the tie-break winner on
    // shared boundaries.
    for (const AoiWord& w : layout.words) {
        if (w.contains(*fixation.fix_x_px, *fixation.fix_y_px)) {
            a.word_index = w.word_index;
            break;
        }
    }
    return a;
}

std::vector<FixationAssignment> assign_fixations(std::span<const EyeEvent> fixations,
                                                 const StimulusLayout& layout) {
    std::vector<FixationAssignment> out;
    out.reserve(fixations.size());
    for (std::size_t i = 0; i < fixations.size(); ++i)
        out.push_back(assign_fixation(fixations[i], layout, i));
    return out;
}

double word_skip_rate(std::span<const FixationAssignment> assignments,
                      const StimulusLayout& layout) {
    if (layout.words.empty())
        throw MetricError(MetricError::Code::EmptyLayout, "layout has no words");
    std::vector<bool> fixated(layout.words.size(), false);
    for (const FixationAssignment& a : assignments) {
        if (!a.word_index) continue;
        auto it = std::lower_bound(
            layout.words.begin(), layout.words.end(), *a.word_index,
            [](const AoiWord& w, int idx) { return w.word_index < idx; });
        if (it != layout.words.end() && it->word_index == *a.word_index)
            fixated[static_cast<std::size_t>(it - layout.words.begin())] = true;
    }
    const auto hit = static_cast<std::size_t>(std::count(fixated.begin(), fixated.end(), true));
    return static_cast<double>(layout.words.size() - hit) /
           static_cast<double>(layout.words.size());
}

std::pair<double, double> background_dwell(std::span<const EyeEvent> fixations,
                                           std::span<const FixationAssignment> assignments,
                                           std::vector<std::string>* warnings) {
    double background_ms = 0.0, total_ms = 0.0;
    for (const FixationAssignment& a : assignments) {
        const double d = fixations[a.fixation].duration_ms;
        total_ms += d;
        if (a.background()) background_ms += d;
    }
    if (total_ms <= 0.0) {
        if (warnings) warnings->push_back("no fixation time in trial; background dwell ratio set to 0");
        return {background_ms, 0.0};
    }
    return {background_ms, background_ms / total_ms};
}

std::optional<double> multi_line_jump_ratio(std::span<const FixationAssignment> assignments,
                                            const StimulusLayout& layout) {
    std::vector<int> lines;
    for (const FixationAssignment& a : assignments) {
        if (!a.word_index) continue;  // the background has no line index
        if (const AoiWord* w = find_word(layout, *a.word_index)) lines.push_back(w->line_index);
    }
    int changes = 0, multi = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        int delta = lines[i] - lines[i - 1];
        if (delta == 0) continue;
        ++changes;
        if (std::abs(delta) >= 2) ++multi;
    }
    if (changes == 0) return std::nullopt;
    return static_cast<double>(multi) / static_cast<double>(changes);
}

std::optional<double> word_length_effect(std::span<const EyeEvent> fixations,
                                         std::span<const FixationAssignment> assignments,
                                         const StimulusLayout& layout) {
    std::map<int, double> duration_by_word;
    for (const FixationAssignment& a : assignments) {
        if (!a.word_index) continue;
        duration_by_word[*a.word_index] += fixations[a.fixation].duration_ms;
    }
    if (duration_by_word.size() < 3) return std::nullopt;
    std::vector<double> lengths, durations;
    for (const auto& [word_index, dur] : duration_by_word) {
        const AoiWord* w = find_word(layout, word_index);
        if (!w) continue;
        lengths.push_back(static_cast<double>(utf8_length(w->text)));
        durations.push_back(dur);
    }
    if (lengths.size() < 3) return std::nullopt;
    return pearson(average_ranks(lengths), average_ranks(durations));
}

double reading_speed_wpm(const StimulusLayout& layout, const TrialWindow& window) {
    if (window.duration_ms() <= 0.0)
        throw MetricError(MetricError::Code::EmptyWindow,
                          "trial window '" + window.trial_id + "' has no duration");
    return static_cast<double>(layout.words.size()) / (window.duration_ms() / 60000.0);
}

StimulusMetricsReport compute_stimulus_metrics(std::span<const EyeEvent> fixations,
                                               const StimulusLayout& layout,
                                               const TrialWindow& window, Stage stage) {
    StimulusMetricsReport report;
    report.stimulus_id = layout.stimulus_id;
    report.fixation_stage = stage;
    report.fixation_count = static_cast<int>(fixations.size());

    auto assignments = assign_fixations(fixations, layout);
    report.word_skip_rate = word_skip_rate(assignments, layout);
    auto [bg_ms, bg_ratio] = background_dwell(fixations, assignments, &report.warnings);
    report.background_dwell_ms = bg_ms;
    report.background_dwell_ratio = bg_ratio;
    report.multi_line_jump_ratio = multi_line_jump_ratio(assignments, layout);
    report.word_length_duration_corr = word_length_effect(fixations, assignments, layout);
    report.reading_speed_wpm = reading_speed_wpm(layout, window);
    return report;
}

}  // namespace gazeqc
