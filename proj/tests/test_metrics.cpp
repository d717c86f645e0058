#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ambisphere/metrics.hpp"
#include "ambisphere/rng.hpp"

using namespace ambisphere;

namespace {

Vec3 random_ball_point(SplitMix64& rng) {
    for (;;) {
        const Vec3 p{rng.next_uniform(-0.5, 0.5), rng.next_uniform(-0.5, 0.5),
                     rng.next_uniform(-0.5, 0.5)};
        if (p.norm() <= 0.5) return p;
    }
}

SourceRegion region_at(Vec3 centroid, double mass = 1.0) {
    SourceRegion r;
    r.mass = mass;
    r.centroid = centroid;
    r.voxel_indices = {0};
    return r;
}

}  // namespace

TEST_CASE("ssd reference values") {
    CHECK(ssd({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}) == 0.0);
    CHECK(ssd({0.5, 0.0, 0.0}, {-0.5, 0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ssd({0.5, 0.0, 0.0}, {0.0, 0.5, 0.0}) == doctest::Approx(0.70710678).epsilon(1e-7));
    CHECK_THROWS_AS(ssd({0.6, 0.0, 0.0}, {0.0, 0.0, 0.0}), std::out_of_range);
}

TEST_CASE("ssd satisfies the metric axioms") {
    SplitMix64 rng(1);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 a = random_ball_point(rng);
        const Vec3 b = random_ball_point(rng);
        const Vec3 c = random_ball_point(rng);
        const double ab = ssd(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab == ssd(b, a));
        CHECK(ssd(a, a) == 0.0);
        CHECK(ssd(a, c) <= ab + ssd(b, c) + 1e-12);
    }
}

TEST_CASE("overlap error set arithmetic") {
    const int R = 8;
    ProbabilityVolume a = ProbabilityVolume::zeros(R);
    ProbabilityVolume b = ProbabilityVolume::zeros(R);

    // both empty: agreement on absence
    CHECK(overlap_error(a, b, 0.5) == 0.0);

    a.at(4, 4, 4) = 1.0f;
    a.at(4, 4, 3) = 1.0f;
    // exactly one empty
    CHECK(overlap_error(a, b, 0.5) == 1.0);
    CHECK(overlap_error(b, a, 0.5) == 1.0);

    // identical
    b = a;
    CHECK(overlap_error(a, b, 0.5) == 0.0);

    // disjoint
    ProbabilityVolume c = ProbabilityVolume::zeros(R);
    c.at(3, 4, 4) = 1.0f;
    CHECK(overlap_error(a, c, 0.5) == 1.0);

    // nested with half the voxels: 1 - 1/2
    ProbabilityVolume half = ProbabilityVolume::zeros(R);
    half.at(4, 4, 4) = 1.0f;
    CHECK(overlap_error(a, half, 0.5) == 0.5);
    CHECK(overlap_error(half, a, 0.5) == 0.5);

    ProbabilityVolume wrong = ProbabilityVolume::zeros(16);
    CHECK_THROWS_AS(overlap_error(a, wrong, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(overlap_error(a, b, 1.5), std::invalid_argument);
}

TEST_CASE("overlap error thresholds both volumes") {
    const int R = 8;
    ProbabilityVolume a = ProbabilityVolume::zeros(R);
    ProbabilityVolume b = ProbabilityVolume::zeros(R);
    a.at(4, 4, 4) = 0.45f;  // below epsilon: treated as empty
    b.at(4, 4, 4) = 0.55f;
    CHECK(overlap_error(a, b, 0.5) == 1.0);
    CHECK(overlap_error(a, b, 0.4) == 0.0);
}

TEST_CASE("greedy matching pairs the globally closest centroids") {
    const auto single =
        match_sources({region_at({0.1, 0.0, 0.0})}, {region_at({0.2, 0.0, 0.0})});
    REQUIRE(single.pairs.size() == 1);
    CHECK(single.unmatched_pred.empty());
    CHECK(single.unmatched_gt.empty());

    // 2x2: greedy must find the minimum-total assignment (verified by hand
    // over both possible matchings)
    const std::vector<SourceRegion> pred = {region_at({0.1, 0.0, 0.0}),
                                            region_at({-0.1, 0.0, 0.0})};
    const std::vector<SourceRegion> gt = {region_at({-0.12, 0.0, 0.0}),
                                          region_at({0.12, 0.0, 0.0})};
    const MatchResult m = match_sources(pred, gt);
    REQUIRE(m.pairs.size() == 2);
    double greedy_total = 0.0;
    for (const auto& [pi, gi] : m.pairs) {
        greedy_total += (pred[pi].centroid - gt[gi].centroid).norm();
    }
    const double straight = (pred[0].centroid - gt[0].centroid).norm() +
                            (pred[1].centroid - gt[1].centroid).norm();
    const double crossed = (pred[0].centroid - gt[1].centroid).norm() +
                           (pred[1].centroid - gt[0].centroid).norm();
    CHECK(greedy_total == doctest::Approx(std::min(straight, crossed)).epsilon(1e-12));

    const MatchResult empty = match_sources({}, gt);
    CHECK(empty.pairs.empty());
    CHECK(empty.unmatched_gt.size() == 2);
}

TEST_CASE("perfect predictions score zero everywhere") {
    const int R = 16;
    ProbabilityVolume v = ProbabilityVolume::zeros(R);
    v.at(12, 8, 8) = 0.9f;
    v.at(11, 8, 8) = 0.8f;

    ClipVolumes clip;
    clip.clip_id = "clip";
    clip.predicted = {v, v};
    clip.ground_truth = {v, v};
    const EvalRow row = evaluate_corpus("ssm", "equirect", {clip}, {0.6, 0.5, 0.4});
    REQUIRE(row.per_epsilon.size() == 3);
    for (const EpsilonResult& res : row.per_epsilon) {
        REQUIRE(res.ssd_agg.has_value());
        CHECK(res.ssd_agg->mean == 0.0);
        CHECK(res.ssd_agg->std_seconds == 0.0);
        REQUIRE(res.overlap_agg.has_value());
        CHECK(res.overlap_agg->mean == 0.0);
        CHECK(res.overlap_agg->std_clips == 0.0);
    }
}

TEST_CASE("population statistics over two seconds") {
    SecondRecord r0;
    r0.clip_id = "a";
    r0.ssd_values = {0.0};
    r0.overlap = 0.0;
    SecondRecord r1;
    r1.clip_id = "a";
    r1.ssd_values = {1.0};
    r1.overlap = 1.0;
    const auto agg = aggregate_ssd({r0, r1});
    REQUIRE(agg.has_value());
    CHECK(agg->mean == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(agg->std_seconds == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(agg->count == 2);

    const auto no_values = aggregate_ssd({});
    CHECK(!no_values.has_value());
}

TEST_CASE("aggregates recompute from records bit-exactly") {
    const int R = 16;
    SplitMix64 rng(5);
    ClipVolumes clip;
    clip.clip_id = "clip";
    for (int s = 0; s < 4; ++s) {
        ProbabilityVolume pred = ProbabilityVolume::zeros(R);
        ProbabilityVolume gt = ProbabilityVolume::zeros(R);
        for (int i = 0; i < 10; ++i) {
            pred.at(8 + static_cast<int>(rng.next() % 5), 8, 8) =
                static_cast<float>(rng.next_uniform(0.3, 1.0));
            gt.at(8 + static_cast<int>(rng.next() % 5), 8, 8) =
                static_cast<float>(rng.next_uniform(0.3, 1.0));
        }
        clip.predicted.push_back(pred);
        clip.ground_truth.push_back(gt);
    }
    const EvalRow row = evaluate_corpus("att", "equirect", {clip}, {0.6, 0.5, 0.4});
    for (const EpsilonResult& res : row.per_epsilon) {
        const auto ssd_again = aggregate_ssd(res.records);
        const auto ov_again = aggregate_overlap(res.records);
        CHECK(ssd_again.has_value() == res.ssd_agg.has_value());
        if (ssd_again && res.ssd_agg) {
            CHECK(ssd_again->mean == res.ssd_agg->mean);
            CHECK(ssd_again->std_seconds == res.ssd_agg->std_seconds);
            CHECK(ssd_again->std_clips == res.ssd_agg->std_clips);
        }
        REQUIRE(ov_again.has_value());
        CHECK(ov_again->mean == res.overlap_agg->mean);
    }
}

TEST_CASE("reports carry the epsilon sweep structure") {
    EvalReport report;
    report.epsilons = {0.6, 0.5, 0.4};
    ClipVolumes clip;
    clip.clip_id = "clip";
    ProbabilityVolume v = ProbabilityVolume::zeros(16);
    v.at(12, 8, 8) = 0.9f;
    clip.predicted = {v};
    clip.ground_truth = {v};
    for (const char* model : {"ssm", "att"}) {
        for (const char* proj : {"cubemap3x2", "equirect"}) {
            report.rows.push_back(evaluate_corpus(model, proj, {clip}, report.epsilons));
        }
    }

    const std::string table = report_to_table(report);
    CHECK(table.find("360-SSD e=0.6") != std::string::npos);
    CHECK(table.find("360-SSD e=0.5") != std::string::npos);
    CHECK(table.find("360-SSD e=0.4") != std::string::npos);
    CHECK(table.find("360-OvErr e=0.6") != std::string::npos);
    CHECK(table.find("ssm-cubemap3x2") != std::string::npos);
    CHECK(table.find("att-equirect") != std::string::npos);

    const std::string json_text = report_to_json(report);
    CHECK(json_text.find("\"std_convention\": \"population\"") != std::string::npos);
    CHECK(json_text.find("\"rows\"") != std::string::npos);
}
