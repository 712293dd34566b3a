#include <doctest.h>

#include <cmath>
#include <random>

#include "gazeqc/event_detection.hpp"

using namespace gazeqc;

namespace {

GazeSample at(double t, double x, double y) {
    GazeSample s;
    s.time_ms = t;
    s.right_present = true;
    s.right = {x, y, 1400.0};
    return s;
}

GazeSample missing_at(double t) {
    GazeSample s;
    s.time_ms = t;
    s.right_present = true;
    return s;
}

const IdtParams kDefault{25.0, 50.0};

}  // namespace

TEST_CASE("two-step trajectory yields exactly two fixations") {
    std::vector<GazeSample> samples;
    for (int t = 0; t < 100; ++t) samples.push_back(at(t, 100.0, 100.0));
    for (int t = 100; t < 200; ++t) samples.push_back(at(t, 300.0, 300.0));
    auto fixations = detect_fixations_idt(samples, Eye::Right, kDefault);
    REQUIRE(fixations.size() == 2);
    CHECK(*fixations[0].fix_x_px == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(*fixations[0].fix_y_px == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(*fixations[1].fix_x_px == doctest::Approx(300.0).epsilon(1e-12));
    CHECK(fixations[0].start_ms == 0.0);
    CHECK(fixations[0].end_ms == 99.0);
    CHECK(fixations[1].start_ms == 100.0);
    CHECK(fixations[1].end_ms == 199.0);
    CHECK(fixations[0].stage == Stage::Fallback);
    CHECK(fixations[0].kind == EventKind::Fixation);
}

TEST_CASE("all-missing input yields nothing") {
    std::vector<GazeSample> samples;
    for (int t = 0; t < 300; ++t) samples.push_back(missing_at(t));
    CHECK(detect_fixations_idt(samples, Eye::Right, kDefault).empty());
    CHECK(detect_fixations_idt({}, Eye::Right, kDefault).empty());
}

TEST_CASE("constant position yields a single spanning fixation") {
    std::vector<GazeSample> samples;
    for (int t = 0; t <= 200; ++t) samples.push_back(at(t, 512.0, 384.0));
    auto fixations = detect_fixations_idt(samples, Eye::Right, kDefault);
    REQUIRE(fixations.size() == 1);
    CHECK(fixations[0].start_ms == 0.0);
    CHECK(fixations[0].end_ms == 200.0);
    CHECK(*fixations[0].fix_x_px == 512.0);
}

TEST_CASE("a missing sample breaks the window and is never bridged") {
    std::vector<GazeSample> samples;
    for (int t = 0; t < 100; ++t) samples.push_back(at(t, 512.0, 384.0));
    samples.push_back(missing_at(100.0));
    for (int t = 101; t < 201; ++t) samples.push_back(at(t, 512.0, 384.0));
    auto fixations = detect_fixations_idt(samples, Eye::Right, kDefault);
    REQUIRE(fixations.size() == 2);
    CHECK(fixations[0].end_ms == 99.0);
    CHECK(fixations[1].start_ms == 101.0);
}

TEST_CASE("short dwells below min duration are not fixations") {
    std::vector<GazeSample> samples;
    for (int t = 0; t < 30; ++t) samples.push_back(at(t, 100.0, 100.0));
    for (int t = 30; t < 60; ++t) samples.push_back(at(t, 400.0, 100.0));
    CHECK(detect_fixations_idt(samples, Eye::Right, kDefault).empty());
}

TEST_CASE("fixations are sorted, disjoint, long enough, and inside their bounding box") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> pos(50.0, 900.0);
    std::uniform_real_distribution<double> jitter(-3.0, 3.0);
    for (int round = 0; round < 20; ++round) {
        std::vector<GazeSample> samples;
        double t = 0.0;
        for (int f = 0; f < 8; ++f) {
            const double cx = pos(rng), cy = pos(rng);
            const int dwell = 40 + static_cast<int>(pos(rng)) % 160;
            for (int i = 0; i < dwell; ++i)
                samples.push_back(at(t++, cx + jitter(rng), cy + jitter(rng)));
            if (f % 3 == 2) samples.push_back(missing_at(t++));
        }
        auto fixations = detect_fixations_idt(samples, Eye::Right, kDefault);
        for (std::size_t i = 0; i < fixations.size(); ++i) {
            CHECK(fixations[i].duration_ms >= kDefault.min_duration_ms);
            CHECK(fixations[i].end_ms >= fixations[i].start_ms);
            if (i > 0) CHECK(fixations[i].start_ms > fixations[i - 1].end_ms);
            // Centroid inside the member samples' bounding box.
            double min_x = 1e18, max_x = -1e18, min_y = 1e18, max_y = -1e18;
            for (const GazeSample& s : samples) {
                if (s.time_ms < fixations[i].start_ms || s.time_ms > fixations[i].end_ms) continue;
                if (!s.right.has_position()) continue;
                min_x = std::min(min_x, s.right.x_px);
                max_x = std::max(max_x, s.right.x_px);
                min_y = std::min(min_y, s.right.y_px);
                max_y = std::max(max_y, s.right.y_px);
            }
            CHECK(*fixations[i].fix_x_px >= min_x);
            CHECK(*fixations[i].fix_x_px <= max_x);
            CHECK(*fixations[i].fix_y_px >= min_y);
            CHECK(*fixations[i].fix_y_px <= max_y);
        }
    }
}

TEST_CASE("translation moves every centroid by the same vector") {
    std::mt19937 rng(32);
    std::uniform_real_distribution<double> pos(100.0, 800.0);
    std::vector<GazeSample> samples;
    double t = 0.0;
    for (int f = 0; f < 5; ++f) {
        const double cx = pos(rng), cy = pos(rng);
        for (int i = 0; i < 120; ++i) samples.push_back(at(t++, cx, cy));
    }
    const double dx = 37.25, dy = -11.5;
    std::vector<GazeSample> moved = samples;
    for (GazeSample& s : moved) {
        s.right.x_px += dx;
        s.right.y_px += dy;
    }
    auto base = detect_fixations_idt(samples, Eye::Right, kDefault);
    auto shifted = detect_fixations_idt(moved, Eye::Right, kDefault);
    REQUIRE(base.size() == shifted.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(*shifted[i].fix_x_px - *base[i].fix_x_px == doctest::Approx(dx).epsilon(1e-9));
        CHECK(*shifted[i].fix_y_px - *base[i].fix_y_px == doctest::Approx(dy).epsilon(1e-9));
    }
}

TEST_CASE("fallback count matches a manufacturer-style step trace within one") {
    // Noise-free steps well above the dispersion threshold, saccade samples
    // held at the previous position: the detector should find each step.
    for (int n : {4, 7, 10}) {
        std::vector<GazeSample> samples;
        std::vector<double> xs;
        double t = 0.0;
        for (int f = 0; f < n; ++f) {
            const double cx = 80.0 + 90.0 * f;
            xs.push_back(cx);
            for (int i = 0; i < 180; ++i) samples.push_back(at(t++, cx, 300.0));
            for (int i = 0; i < 20; ++i) samples.push_back(at(t++, cx, 300.0));  // saccade hold
        }
        auto fixations = detect_fixations_idt(samples, Eye::Right, kDefault);
        CHECK(std::abs(static_cast<int>(fixations.size()) - n) <= 1);
    }
}

TEST_CASE("invalid parameters yield no fixations") {
    std::vector<GazeSample> samples;
    for (int t = 0; t < 100; ++t) samples.push_back(at(t, 100.0, 100.0));
    CHECK(detect_fixations_idt(samples, Eye::Right, {0.0, 50.0}).empty());
    CHECK(detect_fixations_idt(samples, Eye::Right, {25.0, 0.0}).empty());
}
