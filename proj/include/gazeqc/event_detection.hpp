// Fallback fixation detection (dispersion-threshold identification) for
// recordings without manufacturer events. Every emitted event is stage-tagged
// Fallback so reports stay transparent about their provenance.

#ifndef GAZEQC_EVENT_DETECTION_HPP
#define GAZEQC_EVENT_DETECTION_HPP

#include <span>
#include <vector>

#include "gazeqc/types.hpp"

namespace gazeqc {

struct IdtParams {
    double dispersion_threshold_px = 25.0;
    double min_duration_ms = 50.0;

    bool valid() const { return dispersion_threshold_px > 0.0 && min_duration_ms > 0.0; }
};

// Classic I-DT over one eye's samples: grow a window while
// (max x - min x) + (max y - min y) stays within the threshold, emit a
// fixation at the window centroid once the window lasts min_duration_ms.
// A missing sample always breaks the window; gaps are never bridged.
std::vector<EyeEvent> detect_fixations_idt(std::span<const GazeSample> samples, Eye eye,
                                           const IdtParams& params);

}  // namespace gazeqc

#endif  // GAZEQC_EVENT_DETECTION_HPP
