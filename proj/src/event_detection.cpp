#include "gazeqc/event_detection.hpp"

#include <algorithm>

namespace gazeqc {

namespace {

struct Point {
    double t, x, y, pupil;
    bool has_pupil;
};

double dispersion(double min_x, double max_x, double min_y, double max_y) {
    return (max_x - min_x) + (max_y - min_y);
}

EyeEvent make_fixation(const std::vector<Point>& pts, std::size_t first, std::size_t last,
                       Eye eye) {
    EyeEvent ev;
    ev.kind = EventKind::Fixation;
    ev.eye = eye;
    ev.stage = Stage::Fallback;
    ev.start_ms = pts[first].t;
    ev.end_ms = pts[last].t;
    ev.duration_ms = ev.end_ms - ev.start_ms;
    double sx = 0.0, sy = 0.0, sp = 0.0;
    std::size_t n = last - first + 1, np = 0;
    for (std::size_t i = first; i <= last; ++i) {
        sx += pts[i].x;
        sy += pts[i].y;
        if (pts[i].has_pupil) {
            sp += pts[i].pupil;
            ++np;
        }
    }
    ev.fix_x_px = sx / static_cast<double>(n);
    ev.fix_y_px = sy / static_cast<double>(n);
    if (np > 0) ev.fix_pupil = sp / static_cast<double>(np);
    return ev;
}

}  // namespace

std::vector<EyeEvent> detect_fixations_idt(std::span<const GazeSample> samples, Eye eye,
                                           const IdtParams& params) {
    std::vector<EyeEvent> out;
    if (!params.valid() || samples.empty()) return out;

    // Segment the trace at missing samples: a window never bridges a gap in
    // the data. seg_break[i] marks the first point of a new segment.
    std::vector<Point> pts;
    std::vector<bool> seg_break;
    pts.reserve(samples.size());
    bool pending_break = true;
    for (const GazeSample& s : samples) {
        const EyeChannel* ch = s.channel(eye);
        if (!ch || !ch->has_position()) {
            pending_break = true;
            continue;
        }
        pts.push_back({s.time_ms, ch->x_px, ch->y_px, ch->pupil, ch->has_pupil()});
        seg_break.push_back(pending_break);
        pending_break = false;
    }

    std::size_t i = 0;
    while (i < pts.size()) {
        double min_x = pts[i].x, max_x = pts[i].x;
        double min_y = pts[i].y, max_y = pts[i].y;
        std::size_t j = i;
        while (j + 1 < pts.size() && !seg_break[j + 1]) {
            const Point& p = pts[j + 1];
            double nmin_x = std::min(min_x, p.x), nmax_x = std::max(max_x, p.x);
            double nmin_y = std::min(min_y, p.y), nmax_y = std::max(max_y, p.y);
            if (dispersion(nmin_x, nmax_x, nmin_y, nmax_y) > params.dispersion_threshold_px)
                break;
            min_x = nmin_x;
            max_x = nmax_x;
            min_y = nmin_y;
            max_y = nmax_y;
            ++j;
        }
        if (pts[j].t - pts[i].t >= params.min_duration_ms) {
            out.push_back(make_fixation(pts, i, j, eye));
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace gazeqc
