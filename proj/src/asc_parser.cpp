#include "gazeqc/asc_parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

namespace gazeqc {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && (is_space(s.front()) || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (is_space(s.back()) || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Whitespace-separated token stream over one line.
struct Tokens {
    std::string_view rest;

    explicit Tokens(std::string_view line) : rest(line) {}

    std::string_view next() {
        while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
        std::size_t i = 0;
        while (i < rest.size() && !is_space(rest[i])) ++i;
        std::string_view tok = rest.substr(0, i);
        rest.remove_prefix(i);
        return tok;
    }

    // Remainder after the current position with surrounding whitespace trimmed.
    std::string_view tail() const { return trim(rest); }
};

bool parse_double(std::string_view tok, double& out) {
    if (tok.empty()) return false;
    const char* first = tok.data();
    const char* last = first + tok.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last;
}

bool parse_int(std::string_view tok, int& out) {
    if (tok.empty()) return false;
    const char* first = tok.data();
    const char* last = first + tok.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last;
}

bool starts_with_digit(std::string_view line) {
    return !line.empty() && line.front() >= '0' && line.front() <= '9';
}

std::optional<Eye> parse_eye_token(std::string_view tok) {
    if (tok == "L" || tok == "LEFT") return Eye::Left;
    if (tok == "R" || tok == "RIGHT") return Eye::Right;
    return std::nullopt;
}

std::optional<double> opt_coord(std::string_view tok) {
    double v;
    if (parse_double(tok, v)) return v;
    return std::nullopt;  // "." and anything unparseable
}

struct EventFields {
    Eye eye;
    double start_ms;
    double end_ms;
};

// Common "<KIND> <eye> <ts> <te> ..." prefix of the end-event lines.
std::optional<EventFields> parse_event_prefix(Tokens& toks) {
    auto eye = parse_eye_token(toks.next());
    if (!eye) return std::nullopt;
    double ts, te;
    if (!parse_double(toks.next(), ts) || !parse_double(toks.next(), te)) return std::nullopt;
    if (te < ts) return std::nullopt;
    return EventFields{*eye, ts, te};
}

}  // namespace

std::optional<GazeSample> parse_sample_line(std::string_view line, SampleLayout layout,
                                            std::string* error) {
    Tokens toks(line);
    double t;
    if (!parse_double(toks.next(), t)) {
        if (error) *error = "unparseable timestamp";
        return std::nullopt;
    }
    const int need = layout.channel_count() * 3;
    if (need == 0) {
        if (error) *error = "layout declares no eye";
        return std::nullopt;
    }
    std::array<std::string_view, 6> fields{};
    int got = 0;
    while (got < need) {
        std::string_view tok = toks.next();
        if (tok.empty()) break;
        fields[static_cast<std::size_t>(got++)] = tok;
    }
    if (got < need) {
        if (error) *error = "fewer fields than the declared layout requires";
        return std::nullopt;
    }
    // Everything after the coordinate fields (corner markers, velocity,
    // resolution, input port) is an opaque tail and is ignored.

    GazeSample sample;
    sample.time_ms = t;
    int idx = 0;
    auto read_channel = [&](EyeChannel& ch) {
        auto x = opt_coord(fields[static_cast<std::size_t>(idx++)]);
        auto y = opt_coord(fields[static_cast<std::size_t>(idx++)]);
        auto p = opt_coord(fields[static_cast<std::size_t>(idx++)]);
        if (x && y) {  // x and y are all-or-nothing per eye
            ch.x_px = *x;
            ch.y_px = *y;
        }
        if (p && *p != 0.0) ch.pupil = *p;
    };
    if (layout.left) {
        read_channel(sample.left);
        sample.left_present = true;
    }
    if (layout.right) {
        read_channel(sample.right);
        sample.right_present = true;
    }
    return sample;
}

std::optional<ValidationRecord> parse_validation_message(const Message& msg,
                                                         std::vector<ParseWarning>* warnings) {
    Tokens toks(msg.text);
    if (toks.next() != "!CAL" || toks.next() != "VALIDATION") return std::nullopt;

    auto malformed = [&](const std::string& why) -> std::optional<ValidationRecord> {
        if (warnings)
            warnings->push_back({0, "malformed validation message at t=" +
                                        std::to_string(msg.time_ms) + ": " + why});
        return std::nullopt;
    };

    ValidationRecord rec;
    rec.time_ms = msg.time_ms;
    rec.model = std::string(toks.next());
    if (rec.model.empty()) return malformed("missing model token");
    std::string_view eyes_tok = toks.next();  // L / R / LR, informational only
    if (eyes_tok.empty()) return malformed("missing eyes token");
    auto eye = parse_eye_token(toks.next());
    if (!eye) return malformed("missing or invalid eye token");
    rec.eye = *eye;
    std::string_view label = toks.next();
    if (label.empty()) return malformed("missing error label");
    rec.error_label = std::string(label);

    std::string_view next = toks.next();
    if (next.empty()) return rec;  // e.g. ABORTED: no scores
    if (next != "ERROR") return malformed("expected ERROR section, got '" + std::string(next) + "'");
    double avg, max;
    if (!parse_double(toks.next(), avg)) return malformed("unparseable average error");
    if (toks.next() != "avg.") return malformed("expected 'avg.' literal");
    if (!parse_double(toks.next(), max)) return malformed("unparseable maximum error");
    if (toks.next() != "max") return malformed("expected 'max' literal");
    rec.avg_error_deg = avg;
    rec.max_error_deg = max;

    next = toks.next();
    if (next.empty()) return rec;
    if (next != "OFFSET") return malformed("expected OFFSET section, got '" + std::string(next) + "'");
    double off;
    if (!parse_double(toks.next(), off)) return malformed("unparseable offset");
    if (toks.next() != "deg.") return malformed("expected 'deg.' literal");
    std::string_view pix_tok = toks.next();
    std::size_t comma = pix_tok.find(',');
    if (comma == std::string_view::npos) return malformed("expected '<x>,<y>' pixel offset");
    double ox, oy;
    if (!parse_double(pix_tok.substr(0, comma), ox) || !parse_double(pix_tok.substr(comma + 1), oy))
        return malformed("unparseable pixel offset");
    if (toks.next() != "pix.") return malformed("expected 'pix.' literal");
    rec.offset_deg = off;
    rec.offset_pix = std::make_pair(ox, oy);
    return rec;
}

std::optional<CalibrationRecord> parse_calibration_message(const Message& msg,
                                                           std::vector<ParseWarning>* warnings) {
    Tokens toks(msg.text);
    if (toks.next() != "!CAL" || toks.next() != "CALIBRATION") return std::nullopt;

    auto malformed = [&](const std::string& why) -> std::optional<CalibrationRecord> {
        if (warnings)
            warnings->push_back({0, "malformed calibration message at t=" +
                                        std::to_string(msg.time_ms) + ": " + why});
        return std::nullopt;
    };

    CalibrationRecord rec;
    rec.time_ms = msg.time_ms;
    rec.model = std::string(toks.next());
    if (rec.model.empty()) return malformed("missing model token");
    if (toks.next().empty()) return malformed("missing eyes token");
    auto eye = parse_eye_token(toks.next());
    if (!eye) return malformed("missing or invalid eye token");
    rec.eye = *eye;
    rec.num_points = count_points(rec.model);
    return rec;
}

CalibrationEvents collect_calibration_events(const Recording& rec) {
    CalibrationEvents out;
    for (const Message& msg : rec.messages) {
        if (msg.text.rfind("!CAL", 0) != 0) continue;
        if (auto val = parse_validation_message(msg, &out.warnings)) {
            out.validations.push_back(std::move(*val));
        } else if (auto cal = parse_calibration_message(msg, &out.warnings)) {
            if (!cal->num_points)
                out.warnings.push_back({0, "unknown calibration model '" + cal->model +
                                               "': number of points not derivable"});
            out.calibrations.push_back(std::move(*cal));
        }
    }
    return out;
}

namespace {

struct ParserState {
    Recording rec;
    SampleLayout layout{false, true};
    bool layout_known = false;
    bool warned_no_layout = false;
    bool open_block = false;       // a START without END yet
    bool any_start = false;
    double block_last_time = 0.0;  // latest timestamp seen inside the open block
    bool block_time_warned = false;
    double prev_sample_time = -std::numeric_limits<double>::infinity();
    double min_time = std::numeric_limits<double>::infinity();
    double max_time = -std::numeric_limits<double>::infinity();
    // Run of samples outside any block (only tracked once a START was seen).
    std::size_t oob_run_first_line = 0;
    std::size_t oob_run_count = 0;
    std::size_t pre_block_samples = 0;

    void warn(std::size_t line, std::string message) {
        rec.warnings.push_back({line, std::move(message)});
    }

    void saw_time(double t) {
        min_time = std::min(min_time, t);
        max_time = std::max(max_time, t);
        if (open_block) block_last_time = std::max(block_last_time, t);
    }

    void flush_oob_run() {
        if (oob_run_count == 0) return;
        warn(oob_run_first_line,
             std::to_string(oob_run_count) + " sample(s) outside any recording block");
        oob_run_count = 0;
    }

    void close_block(double end_ms) {
        rec.blocks.back().end_ms = end_ms;
        open_block = false;
        block_time_warned = false;
        prev_sample_time = -std::numeric_limits<double>::infinity();
    }
};

void handle_declaration(ParserState& st, Tokens& toks, StreamDecl::Kind kind,
                        std::size_t line_no) {
    if (toks.next() != "GAZE") {
        st.warn(line_no, "malformed declaration: expected GAZE");
        return;
    }
    StreamDecl decl;
    decl.kind = kind;
    bool left = false, right = false;
    for (std::string_view tok = toks.next(); !tok.empty(); tok = toks.next()) {
        if (tok == "LEFT") {
            left = true;
        } else if (tok == "RIGHT") {
            right = true;
        } else if (tok == "RATE") {
            double rate;
            if (parse_double(toks.next(), rate)) decl.rate_hz = rate;
        } else if (tok == "TRACKING") {
            std::string_view mode = toks.next();
            if (!mode.empty()) decl.tracking_mode = std::string(mode);
        } else if (tok == "FILTER") {
            int level;
            if (parse_int(toks.next(), level)) decl.filter_level = level;
        }
        // other device-dependent tokens are tolerated and skipped
    }
    if (left && right)
        decl.eyes = TrackedEye::Binocular;
    else if (left)
        decl.eyes = TrackedEye::Left;
    else if (right)
        decl.eyes = TrackedEye::Right;
    if (kind == StreamDecl::Kind::Samples && decl.eyes) {
        st.layout = SampleLayout{left, right};
        st.layout_known = true;
    }
    st.rec.declarations.push_back(std::move(decl));
}

void handle_sample(ParserState& st, std::string_view line, std::size_t line_no) {
    if (!st.layout_known && !st.warned_no_layout) {
        // Guess the layout from the field count of the first sample line.
        Tokens probe(line);
        int fields = 0;
        while (!probe.next().empty()) ++fields;
        if (fields >= 7) st.layout = SampleLayout{true, true};
        st.warn(line_no, "no SAMPLES declaration before first sample; layout inferred as " +
                             std::string(st.layout.left && st.layout.right
                                             ? "binocular"
                                             : "monocular right"));
        st.warned_no_layout = true;
    }
    std::string error;
    auto sample = parse_sample_line(line, st.layout, &error);
    if (!sample) {
        st.warn(line_no, "malformed sample line: " + error);
        return;
    }
    if (st.open_block) {
        if (sample->time_ms < st.prev_sample_time && !st.block_time_warned) {
            st.warn(line_no, "non-monotonic sample timestamps within block");
            st.block_time_warned = true;
        }
        st.prev_sample_time = sample->time_ms;
    } else if (st.any_start) {
        if (st.oob_run_count == 0) st.oob_run_first_line = line_no;
        ++st.oob_run_count;
        sample->out_of_block = true;
    } else {
        ++st.pre_block_samples;
        sample->out_of_block = true;
    }
    st.saw_time(sample->time_ms);
    st.rec.samples.push_back(*sample);
}

void handle_end_event(ParserState& st, EventKind kind, Tokens& toks, std::size_t line_no,
                      std::string_view keyword) {
    auto prefix = parse_event_prefix(toks);
    if (!prefix) {
        st.warn(line_no, "malformed " + std::string(keyword) + " line");
        return;
    }
    EyeEvent ev;
    ev.kind = kind;
    ev.eye = prefix->eye;
    ev.start_ms = prefix->start_ms;
    ev.end_ms = prefix->end_ms;
    ev.duration_ms = ev.end_ms - ev.start_ms;
    ev.stage = Stage::Manufacturer;
    toks.next();  // device-reported duration; recomputed from the timestamps

    if (kind == EventKind::Fixation) {
        ev.fix_x_px = opt_coord(toks.next());
        ev.fix_y_px = opt_coord(toks.next());
        ev.fix_pupil = opt_coord(toks.next());
    } else if (kind == EventKind::Saccade) {
        ev.sacc_start_x_px = opt_coord(toks.next());
        ev.sacc_start_y_px = opt_coord(toks.next());
        ev.sacc_end_x_px = opt_coord(toks.next());
        ev.sacc_end_y_px = opt_coord(toks.next());
        ev.amplitude_deg = opt_coord(toks.next());
        ev.peak_velocity_deg_s = opt_coord(toks.next());
    }
    st.saw_time(ev.start_ms);
    st.saw_time(ev.end_ms);
    st.rec.events.push_back(std::move(ev));
}

}  // namespace

Recording parse_asc(std::string_view text) {
    ParserState st;
    std::size_t line_no = 0;
    std::size_t non_blank = 0;
    std::size_t pos = 0;

    while (pos < text.size()) {
        std::size_t eol = text.find_first_of("\r\n", pos);
        std::string_view line;
        if (eol == std::string_view::npos) {
            line = text.substr(pos);
            pos = text.size();
        } else {
            line = text.substr(pos, eol - pos);
            pos = eol + 1;
            if (text[eol] == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
        }
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        ++non_blank;

        if (starts_with_digit(line)) {
            handle_sample(st, line, line_no);
            continue;
        }
        st.flush_oob_run();

        if (line.rfind("**", 0) == 0) {
            std::string_view body = trim(line.substr(2));
            std::size_t colon = body.find(':');
            HeaderLine hl;
            if (colon == std::string_view::npos) {
                hl.key = std::string(body);
            } else {
                hl.key = std::string(trim(body.substr(0, colon)));
                hl.value = std::string(trim(body.substr(colon + 1)));
            }
            st.rec.header.push_back(std::move(hl));
            continue;
        }

        Tokens toks(line);
        std::string_view kw = toks.next();

        if (kw == "MSG") {
            double t;
            if (!parse_double(toks.next(), t)) {
                st.warn(line_no, "malformed MSG line: unparseable timestamp");
                continue;
            }
            st.saw_time(t);
            st.rec.messages.push_back({t, std::string(toks.tail())});
        } else if (kw == "START") {
            double t;
            if (!parse_double(toks.next(), t)) {
                st.warn(line_no, "malformed START line: unparseable timestamp");
                continue;
            }
            if (st.open_block) {
                st.warn(line_no, "START without matching END; previous block closed at last seen timestamp");
                st.close_block(std::max(st.rec.blocks.back().start_ms, st.block_last_time));
            }
            bool left = false, right = false;
            for (std::string_view tok = toks.next(); !tok.empty(); tok = toks.next()) {
                if (tok == "LEFT") left = true;
                if (tok == "RIGHT") right = true;
            }
            if ((left || right) && !st.layout_known) {
                st.layout = SampleLayout{left, right};
                st.layout_known = true;
            }
            st.rec.blocks.push_back({t, t, false});
            st.open_block = true;
            st.any_start = true;
            st.block_last_time = t;
            st.saw_time(t);
        } else if (kw == "END") {
            double t;
            if (!parse_double(toks.next(), t)) {
                st.warn(line_no, "malformed END line: unparseable timestamp");
                continue;
            }
            st.saw_time(t);
            if (!st.open_block) {
                st.warn(line_no, "END without matching START; line ignored");
                continue;
            }
            st.close_block(t);
        } else if (kw == "SAMPLES") {
            handle_declaration(st, toks, StreamDecl::Kind::Samples, line_no);
        } else if (kw == "EVENTS") {
            handle_declaration(st, toks, StreamDecl::Kind::Events, line_no);
        } else if (kw == "EFIX") {
            handle_end_event(st, EventKind::Fixation, toks, line_no, kw);
        } else if (kw == "ESACC") {
            handle_end_event(st, EventKind::Saccade, toks, line_no, kw);
        } else if (kw == "EBLINK") {
            handle_end_event(st, EventKind::Blink, toks, line_no, kw);
        } else if (kw == "SFIX" || kw == "SSACC" || kw == "SBLINK") {
            // Start markers carry no payload beyond what the end event repeats.
            auto eye = parse_eye_token(toks.next());
            double t;
            if (!eye || !parse_double(toks.next(), t)) {
                st.warn(line_no, "malformed " + std::string(kw) + " line");
                continue;
            }
            st.saw_time(t);
        } else {
            st.warn(line_no, "unrecognized line: '" + std::string(line.substr(0, 40)) +
                                 (line.size() > 40 ? "...'" : "'"));
        }
    }

    st.flush_oob_run();
    if (non_blank == 0) throw ParseError(ParseError::Code::EmptyInput, "no non-blank lines in input");

    if (st.open_block) {
        st.warn(line_no, "unterminated recording block; closed at last seen timestamp");
        st.close_block(std::max(st.rec.blocks.back().start_ms, st.block_last_time));
    }

    if (!st.any_start) {
        if (!std::isfinite(st.min_time)) {
            throw ParseError(ParseError::Code::NoRecordingBlock,
                             "no START line and no timestamped content");
        }
        st.rec.blocks.push_back({st.min_time, st.max_time, true});
        st.warn(0, "no START line; synthesized recording block [" + std::to_string(st.min_time) +
                       ", " + std::to_string(st.max_time) + "]");
    } else if (st.pre_block_samples > 0) {
        st.warn(0, std::to_string(st.pre_block_samples) +
                       " sample(s) before the first recording block");
    }
    return st.rec;
}

std::vector<TrialWindow> segment_trials(const Recording& rec, std::string_view start_prefix,
                                        std::string_view end_prefix,
                                        std::vector<ParseWarning>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back({0, msg});
    };

    std::vector<TrialWindow> out;
    if (rec.blocks.empty()) return out;

    struct Marker {
        double t;
        std::string id;
    };
    std::vector<Marker> starts;
    std::vector<double> ends;
    for (const Message& msg : rec.messages) {
        if (msg.text.rfind(start_prefix, 0) == 0) {
            std::string id(trim(std::string_view(msg.text).substr(start_prefix.size())));
            starts.push_back({msg.time_ms, std::move(id)});
        } else if (msg.text.rfind(end_prefix, 0) == 0) {
            ends.push_back(msg.time_ms);
        }
    }

    const double session_end = rec.blocks.back().end_ms;
    if (starts.empty()) {
        warn("no trial start markers; reporting the whole session as one window");
        out.push_back({"session", rec.blocks.front().start_ms, session_end,
                       TrialWindow::Source::WholeSession});
        return out;
    }

    for (std::size_t i = 0; i < starts.size(); ++i) {
        const Marker& m = starts[i];
        // Block the trial's data lives in: the one containing the marker, or
        // the next one when the marker fired between blocks.
        const RecordingBlock* block = nullptr;
        for (const RecordingBlock& b : rec.blocks) {
            if (b.end_ms > m.t) {
                block = &b;
                break;
            }
        }
        if (!block) {
            warn("trial '" + m.id + "' starts after the last recording block; skipped");
            continue;
        }
        double end = block->end_ms;
        if (i + 1 < starts.size()) end = std::min(end, starts[i + 1].t);
        for (double e : ends) {
            if (e > m.t) {
                end = std::min(end, e);
                break;
            }
        }
        double start = std::max(m.t, block->start_ms);
        if (end <= start) {
            warn("trial '" + m.id + "' has an empty window; skipped");
            continue;
        }
        TrialWindow w;
        w.trial_id = m.id.empty() ? std::to_string(out.size() + 1) : m.id;
        w.start_ms = start;
        w.end_ms = end;
        w.source = TrialWindow::Source::Markers;
        out.push_back(std::move(w));
    }

    if (out.empty()) {
        warn("no usable trial windows; reporting the whole session as one window");
        out.push_back({"session", rec.blocks.front().start_ms, session_end,
                       TrialWindow::Source::WholeSession});
    }
    return out;
}

}  // namespace gazeqc
