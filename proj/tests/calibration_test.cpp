#include <doctest.h>

#include <algorithm>
#include <random>

#include "gazeqc/calibration.hpp"

using namespace gazeqc;

namespace {

ValidationRecord make_validation(double t, Eye eye, const std::string& label,
                                 std::optional<double> avg = std::nullopt,
                                 std::optional<double> max = std::nullopt) {
    ValidationRecord v;
    v.time_ms = t;
    v.model = "HV9";
    v.eye = eye;
    v.error_label = label;
    v.avg_error_deg = avg;
    v.max_error_deg = max;
    return v;
}

}  // namespace

TEST_CASE("count_points maps calibration models") {
    CHECK(count_points("H3") == 3);
    CHECK(count_points("HV3") == 3);
    CHECK(count_points("HV5") == 5);
    CHECK(count_points("HV9") == 9);
    CHECK(count_points("HV13") == 13);
    CHECK_FALSE(count_points("XY7").has_value());
}

TEST_CASE("summarize_calibration basic statistics") {
    std::vector<ValidationRecord> vals = {
        make_validation(100.0, Eye::Right, "GOOD", 0.34, 0.67),
        make_validation(200.0, Eye::Right, "GOOD", 0.51, 0.80),
    };
    CalibrationSummary s = summarize_calibration({}, vals, TrackedEye::Right);
    CHECK(s.num_validations == 2);
    CHECK(s.mean_avg_error_deg == doctest::Approx(0.425).epsilon(1e-12));
    CHECK(s.worst_max_error_deg == 0.80);
    CHECK(s.label_histogram.at("GOOD") == 2);
    CHECK(s.tracked_eye == TrackedEye::Right);
}

TEST_CASE("empty input yields zero counts and a warning") {
    CalibrationSummary s = summarize_calibration({}, {});
    CHECK(s.num_validations == 0);
    CHECK(s.num_calibrations == 0);
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0] == "no validation performed");
}

TEST_CASE("aborted validations count but never average") {
    std::vector<ValidationRecord> vals = {
        make_validation(100.0, Eye::Right, "GOOD", 0.34, 0.67),
        make_validation(200.0, Eye::Right, "ABORTED"),
    };
    CalibrationSummary s = summarize_calibration({}, vals);
    CHECK(s.num_validations == 2);
    CHECK(s.mean_avg_error_deg == 0.34);
    CHECK(s.label_histogram.at("GOOD") == 1);
    CHECK(s.label_histogram.at("ABORTED") == 1);
}

TEST_CASE("per-eye summaries for binocular validations") {
    std::vector<ValidationRecord> vals = {
        make_validation(100.0, Eye::Left, "GOOD", 0.30, 0.50),
        make_validation(100.0, Eye::Right, "FAIR", 0.60, 1.10),
    };
    CalibrationSummary s = summarize_calibration({}, vals, TrackedEye::Binocular);
    REQUIRE(s.per_eye.size() == 2);
    CHECK(s.per_eye[0].eye == Eye::Left);
    CHECK(s.per_eye[0].mean_avg_error_deg == 0.30);
    CHECK(s.per_eye[1].eye == Eye::Right);
    CHECK(s.per_eye[1].worst_max_error_deg == 1.10);
    CHECK(s.worst_max_error_deg == 1.10);
}

TEST_CASE("summary is invariant under record reordering") {
    std::vector<CalibrationRecord> cals;
    std::vector<ValidationRecord> vals;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> err(0.1, 1.2);
    for (int i = 0; i < 8; ++i) {
        CalibrationRecord c;
        c.time_ms = 100.0 * i;
        c.model = "HV9";
        c.eye = i % 2 ? Eye::Left : Eye::Right;
        cals.push_back(c);
        double avg = err(rng);
        vals.push_back(make_validation(100.0 * i + 50.0, c.eye, "GOOD", avg, avg + 0.2));
    }
    CalibrationSummary base = summarize_calibration(cals, vals, TrackedEye::Binocular);

    std::shuffle(cals.begin(), cals.end(), rng);
    std::shuffle(vals.begin(), vals.end(), rng);
    CalibrationSummary shuffled = summarize_calibration(cals, vals, TrackedEye::Binocular);

    CHECK(base.calibration_timestamps == shuffled.calibration_timestamps);
    CHECK(base.validation_timestamps == shuffled.validation_timestamps);
    CHECK(base.mean_avg_error_deg == shuffled.mean_avg_error_deg);
    CHECK(base.worst_max_error_deg == shuffled.worst_max_error_deg);
    CHECK(base.label_histogram == shuffled.label_histogram);
    CHECK(std::is_sorted(base.validation_timestamps.begin(), base.validation_timestamps.end()));
}

TEST_CASE("mean stays within contributing values and histogram is complete") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> err(0.05, 2.0);
    std::uniform_int_distribution<int> label_pick(0, 3);
    const char* labels[] = {"GOOD", "FAIR", "POOR", "ABORTED"};
    for (int round = 0; round < 50; ++round) {
        std::vector<ValidationRecord> vals;
        int n = 1 + round % 7;
        double lo = 1e9, hi = -1e9;
        for (int i = 0; i < n; ++i) {
            const char* label = labels[label_pick(rng)];
            if (std::string(label) == "ABORTED") {
                vals.push_back(make_validation(i, Eye::Right, label));
            } else {
                double avg = err(rng);
                lo = std::min(lo, avg);
                hi = std::max(hi, avg);
                vals.push_back(make_validation(i, Eye::Right, label, avg, avg + 0.1));
            }
        }
        CalibrationSummary s = summarize_calibration({}, vals);
        int histogram_total = 0;
        for (const auto& [label, count] : s.label_histogram) histogram_total += count;
        CHECK(histogram_total == s.num_validations);
        if (s.mean_avg_error_deg) {
            CHECK(*s.mean_avg_error_deg >= lo - 1e-12);
            CHECK(*s.mean_avg_error_deg <= hi + 1e-12);
        }
    }
}
