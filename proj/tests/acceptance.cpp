// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and timed.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "ambisphere/pipeline.hpp"
#include "ambisphere/rng.hpp"

using namespace ambisphere;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, const std::string& what, bool ok, double elapsed_s,
            double limit_s, const std::string& detail = "") {
    const bool in_time = limit_s <= 0.0 || elapsed_s <= limit_s;
    const bool pass = ok && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s (%.2fs%s)%s%s\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), elapsed_s,
                in_time ? "" : " OVER TIME LIMIT",
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

Vec3 random_ball_point(SplitMix64& rng) {
    for (;;) {
        const Vec3 p{rng.next_uniform(-0.5, 0.5), rng.next_uniform(-0.5, 0.5),
                     rng.next_uniform(-0.5, 0.5)};
        if (p.norm() <= 0.5) return p;
    }
}

ProbabilityVolume random_volume(int resolution, uint64_t seed, double density = 0.03) {
    ProbabilityVolume v = ProbabilityVolume::zeros(resolution);
    SplitMix64 rng(seed);
    for (int z = 0; z < resolution; ++z) {
        for (int y = 0; y < resolution; ++y) {
            for (int x = 0; x < resolution; ++x) {
                if (!in_ball(voxel_center(resolution, x, y, z))) continue;
                if (rng.next_double() < density) {
                    v.at(x, y, z) = static_cast<float>(rng.next_uniform(0.05, 1.0));
                }
            }
        }
    }
    return v;
}

std::vector<char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// chord-based angle between unit vectors; accurate for tiny angles where
// acos(dot) bottoms out around 1e-8
double small_angle(const Vec3& a, const Vec3& b) {
    const Vec3 d = a - b;
    return 2.0 * std::asin(0.5 * d.norm());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// --- criterion 1: encoder energy identity ---------------------------------

void criterion_energy() {
    Timer t;
    SplitMix64 rng(101);
    bool ok = true;
    for (int i = 0; i < 10000 && ok; ++i) {
        const double phi = rng.next_uniform(-kPi, kPi);
        const double theta = rng.next_uniform(-kPi / 2, kPi / 2);
        const double s = rng.next_uniform(-1.0, 1.0);
        const BFormatSignal b =
            encode_bformat({{{s}, SphericalDirection{phi, theta}, 1.0}}, 1, 48000);
        ok = std::abs(b.x[0] * b.x[0] + b.y[0] * b.y[0] + b.z[0] * b.z[0] - s * s) < 1e-9 &&
             std::abs(b.w[0] - s / std::sqrt(2.0)) < 1e-9;
    }
    report(1, "encoder energy identity over 10000 random triples", ok, t.seconds(), 1.0);
}

// --- criterion 2: encoder round trip ---------------------------------------

void criterion_decode() {
    Timer t;
    SplitMix64 rng(102);
    std::vector<double> tone(480);
    for (size_t i = 0; i < tone.size(); ++i) {
        tone[i] = 0.5 * std::sin(2.0 * kPi * 440.0 * static_cast<double>(i) / 48000.0);
    }
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
        const SphericalDirection want = SphericalDirection::normalized(
            rng.next_uniform(-kPi, kPi), rng.next_uniform(-kPi / 2 + 0.01, kPi / 2 - 0.01));
        const BFormatSignal b = encode_bformat({{tone, want, 1.0}}, tone.size(), 48000);
        const SphericalDirection got = decode_direction(b);
        ok = small_angle(to_unit_vector(want), to_unit_vector(got)) < 1e-9;
    }
    report(2, "decode recovers 1000 random encoded directions", ok, t.seconds(), 1.0);
}

// --- criterion 3: projection round trips ------------------------------------

void criterion_projections() {
    Timer t;
    SplitMix64 rng(103);
    bool ok = true;
    const ImageDims eq{512, 256};
    const ImageDims cm{384, 256};
    for (int i = 0; i < 10000 && ok; ++i) {
        // equirect pixel -> sphere -> pixel (interior: the final half pixel
        // folds across the seam or pole to an equivalent direction)
        const PixelCoord pe{rng.next_uniform(0.0, eq.width - 0.5 - 1e-9),
                            rng.next_uniform(0.0, eq.height - 0.5 - 1e-9)};
        const PixelCoord pe2 =
            direction_to_pixel(pixel_to_direction(pe, Projection::Equirect, eq),
                               Projection::Equirect, eq);
        ok = std::abs(pe.x - pe2.x) < 1e-9 && std::abs(pe.y - pe2.y) < 1e-9;
        if (!ok) break;

        // cubemap interior pixel round trip (clear of face seams)
        const int face = static_cast<int>(rng.next() % 6);
        const double fx = rng.next_uniform(1.0, 127.0);
        const double fy = rng.next_uniform(1.0, 127.0);
        const PixelCoord pc{(face % 3) * 128.0 + fx, (face / 3) * 128.0 + fy};
        const PixelCoord pc2 =
            direction_to_pixel(pixel_to_direction(pc, Projection::Cubemap3x2, cm),
                               Projection::Cubemap3x2, cm);
        ok = std::abs(pc.x - pc2.x) < 1e-9 && std::abs(pc.y - pc2.y) < 1e-9;
        if (!ok) break;

        // cross-projection direction agreement via the continuous mappings;
        // the equirect leg stays half a pixel clear of the poles where valid
        // pixel coordinates clamp
        const ImageDims fine{8192, 4096};
        const double pole_margin = kPi / fine.height;
        const SphericalDirection d = SphericalDirection::normalized(
            rng.next_uniform(-kPi, kPi),
            rng.next_uniform(-kPi / 2 + pole_margin, kPi / 2 - pole_margin));
        const CubemapCoord cc = sphere_to_cubemap(d);
        const SphericalDirection via_cm = cubemap_to_sphere(cc.face, cc.u, cc.v);
        const SphericalDirection via_eq =
            equirect_to_sphere(sphere_to_equirect(d, fine), fine);
        ok = small_angle(to_unit_vector(d), to_unit_vector(via_cm)) < 1e-9 &&
             small_angle(to_unit_vector(via_eq), to_unit_vector(via_cm)) < 1e-9;
    }
    report(3, "projection round trips and cross-projection agreement", ok, t.seconds(), 1.0);
}

// --- criterion 4: threshold semantics ----------------------------------------

void criterion_threshold() {
    Timer t;
    bool ok = true;
    for (uint64_t seed = 1; seed <= 10 && ok; ++seed) {
        const ProbabilityVolume v = random_volume(32, seed);
        for (double eps : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const ProbabilityVolume once = threshold(v, eps);
            // <= eps maps to zero, > eps is preserved
            for (size_t i = 0; i < v.voxels.size() && ok; ++i) {
                const float want = v.voxels[i] > eps ? v.voxels[i] : 0.0f;
                ok = once.voxels[i] == want;
            }
            // idempotence
            ok = ok && threshold(once, eps).voxels == once.voxels;
        }
        // monotone support in epsilon
        const ProbabilityVolume lo = threshold(v, 0.3);
        const ProbabilityVolume hi = threshold(v, 0.6);
        for (size_t i = 0; i < v.voxels.size() && ok; ++i) {
            if (hi.voxels[i] != 0.0f) ok = lo.voxels[i] != 0.0f;
        }
    }
    report(4, "threshold semantics on randomized volumes", ok, t.seconds(), 5.0);
}

// --- criterion 5: centroid oracle --------------------------------------------

void criterion_centroids() {
    Timer t;
    bool ok = true;
    for (uint64_t seed = 1; seed <= 100 && ok; ++seed) {
        const ProbabilityVolume v = random_volume(32, seed);
        for (const SourceRegion& r : extract_sources(v)) {
            double mass = 0.0;
            Vec3 acc;
            for (size_t idx : r.voxel_indices) {
                const int R = v.resolution;
                const int x = static_cast<int>(idx % static_cast<size_t>(R));
                const int y =
                    static_cast<int>((idx / static_cast<size_t>(R)) % static_cast<size_t>(R));
                const int z = static_cast<int>(idx / (static_cast<size_t>(R) * R));
                const double p = v.voxels[idx];
                mass += p;
                acc = acc + p * voxel_center(R, x, y, z);
            }
            acc = (1.0 / mass) * acc;
            ok = r.centroid.x == acc.x && r.centroid.y == acc.y && r.centroid.z == acc.z;
            if (!ok) break;
        }
    }
    report(5, "centroids equal brute-force weighted means exactly on 100 volumes", ok,
           t.seconds(), 10.0);
}

// --- criterion 6: metric axioms ----------------------------------------------

void criterion_metrics() {
    Timer t;
    SplitMix64 rng(106);
    bool ok = true;
    for (int i = 0; i < 10000 && ok; ++i) {
        const Vec3 a = random_ball_point(rng);
        const Vec3 b = random_ball_point(rng);
        const Vec3 c = random_ball_point(rng);
        const double ab = ssd(a, b);
        ok = ab >= 0.0 && ab <= 1.0 && ab == ssd(b, a) && ssd(a, a) == 0.0 &&
             ssd(a, c) <= ab + ssd(b, c) + 1e-12;
    }
    if (ok) {
        ProbabilityVolume two = ProbabilityVolume::zeros(8);
        two.at(4, 4, 4) = 1.0f;
        two.at(4, 4, 3) = 1.0f;
        ProbabilityVolume one = ProbabilityVolume::zeros(8);
        one.at(4, 4, 4) = 1.0f;
        ProbabilityVolume other = ProbabilityVolume::zeros(8);
        other.at(3, 4, 4) = 1.0f;
        const ProbabilityVolume empty = ProbabilityVolume::zeros(8);
        ok = overlap_error(two, two, 0.5) == 0.0 && overlap_error(two, other, 0.5) == 1.0 &&
             overlap_error(empty, empty, 0.5) == 0.0 && overlap_error(two, empty, 0.5) == 1.0 &&
             overlap_error(two, one, 0.5) == 0.5 && overlap_error(one, two, 0.5) == 0.5 &&
             overlap_error(one, other, 0.5) == overlap_error(other, one, 0.5);
    }
    report(6, "metric axioms, overlap extremes and the exact nested-half case", ok,
           t.seconds(), 5.0);
}

// --- criterion 7: desk-scale closed loop --------------------------------------

// largest angular separation between any two directions mapped to the same
// planar grid cell as `dir` (sampled on a fine pixel lattice)
double cell_diameter(SphericalDirection dir, Projection proj) {
    const int cell = map_cell_of_direction(dir, proj, 7, 7);
    std::vector<Vec3> pts;
    const int fine = 48;
    const ImageDims dims = proj == Projection::Equirect ? ImageDims{7 * fine, 7 * fine}
                                                        : ImageDims{21 * fine, 14 * fine};
    for (int y = 0; y < dims.height; ++y) {
        for (int x = 0; x < dims.width; ++x) {
            const SphericalDirection s = pixel_to_direction(
                {static_cast<double>(x), static_cast<double>(y)}, proj, dims);
            if (map_cell_of_direction(s, proj, 7, 7) == cell) pts.push_back(to_unit_vector(s));
        }
    }
    double best = 0.0;
    for (size_t i = 0; i < pts.size(); i += 5) {
        for (size_t j = i + 1; j < pts.size(); j += 5) {
            best = std::max(best, angle_between(pts[i], pts[j]));
        }
    }
    return best;
}

void criterion_closed_loop() {
    Timer t;
    const double deg = kPi / 180.0;
    bool ok = true;
    std::string detail;
    for (PredictionModel model : {PredictionModel::Ssm, PredictionModel::Att}) {
        for (Projection proj : {Projection::Equirect, Projection::Cubemap3x2}) {
            for (int k = 0; k < 8 && ok; ++k) {
                SceneSpec spec;
                spec.projection = proj;
                spec.dims = proj == Projection::Equirect ? ImageDims{224, 112}
                                                         : ImageDims{336, 224};
                spec.duration_s = 1;
                spec.sources.push_back(
                    {{SphericalDirection::normalized(k * 45.0 * deg, 0.0)}, 440.0, 0.14});
                const ClosedLoopReport rep = closed_loop_check(spec, model, 42, 0.5, 64);
                const double bound = cell_diameter(spec.sources[0].trajectory[0], proj);
                if (rep.max_angular_error > bound) {
                    ok = false;
                    char buf[128];
                    std::snprintf(buf, sizeof(buf), "%s %s phi=%d err=%.3f bound=%.3f",
                                  to_string(model).c_str(), to_string(proj).c_str(), k * 45,
                                  rep.max_angular_error, bound);
                    detail = buf;
                }
            }
        }
    }
    if (ok) {
        // annotations evaluated against themselves must score perfectly
        SceneSpec spec;
        spec.dims = {224, 112};
        spec.duration_s = 2;
        spec.sources.push_back({{SphericalDirection{0.0, 0.0}}, 440.0, 0.14});
        const ClipAnnotation ann = scene_annotations(spec);
        const double spread = 10.0 * deg;
        ClipVolumes clip;
        clip.clip_id = "self";
        for (const AnnotatedSecond& s : ann.seconds) {
            const ProbabilityVolume v =
                annotation_to_volume(s.sources, ann.projection, ann.dims, 64, spread);
            clip.predicted.push_back(v);
            clip.ground_truth.push_back(v);
        }
        const EvalRow row = evaluate_corpus("ssm", "equirect", {clip}, {0.5});
        ok = row.per_epsilon.size() == 1 && row.per_epsilon[0].ssd_agg.has_value() &&
             row.per_epsilon[0].ssd_agg->mean == 0.0 &&
             row.per_epsilon[0].overlap_agg->mean == 0.0;
        if (!ok) detail = "self-evaluation of annotations is not exactly zero";
    }
    report(7, "closed loop within one cell diameter for all 32 combinations", ok,
           t.seconds(), 60.0, detail);
}

// --- criterion 8: shape contracts ----------------------------------------------

void criterion_shapes() {
    Timer t;
    bool ok = VisualFeature{}.data.size() == 7ULL * 7 * 512 &&
              AudioFeature{}.values.size() == 128;

    VisualFeature v;
    AudioFeature a;
    SplitMix64 rng(108);
    for (float& x : v.data) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));
    for (float& x : a.values) x = static_cast<float>(rng.next_uniform(-0.1, 0.1));

    const AttParams ap = AttParams::from_seed(42);
    const PlanarProbMap att = predict_att(v, a, ap, Projection::Equirect);
    double total = 0.0;
    for (double x : att.values) total += x;
    ok = ok && std::abs(total - 1.0) < 1e-9;

    AttParams shifted = ap;
    for (float& b : shifted.la_bias) b += 3.0f;
    const PlanarProbMap att2 = predict_att(v, a, shifted, Projection::Equirect);
    for (int i = 0; i < kMapCells && ok; ++i) {
        ok = std::abs(att.values[static_cast<size_t>(i)] -
                      att2.values[static_cast<size_t>(i)]) < 1e-9;
    }

    const PlanarProbMap ssm_map =
        predict_ssm(v, a, SsmParams::from_seed(42), Projection::Equirect);
    for (double x : ssm_map.values) ok = ok && x > 0.0 && x < 1.0;

    report(8, "feature shapes, att normalization and shift invariance, ssm range", ok,
           t.seconds(), 1.0);
}

// --- criterion 9: determinism ----------------------------------------------------

void run_once(const fs::path& clip, const fs::path& out) {
    RunConfig cfg;
    cfg.model = PredictionModel::Ssm;
    cfg.seed = 42;
    cfg.resolution = 32;
    cfg.jobs = 2;
    run_predict(clip, clip / "audio.wav", cfg, out);

    const AudioSignal audio = read_wav(clip / "audio.wav");
    const auto seconds = read_sources_json(out / "sources.json");
    const BFormatSignal b = encode_clip(audio, seconds);
    write_bformat_wav(b, out / "bformat.wav");
}

void criterion_determinism() {
    Timer t;
    SceneSpec spec;
    spec.dims = {112, 56};
    spec.duration_s = 2;
    spec.sources.push_back({{SphericalDirection{0.0, 0.0}}, 440.0, 0.14});

    TempDir clip("ambisphere_acc_clip");
    render_scene(spec, 42, clip.path);
    TempDir a("ambisphere_acc_run_a");
    TempDir b("ambisphere_acc_run_b");
    run_once(clip.path, a.path);
    run_once(clip.path, b.path);

    bool ok = true;
    for (const char* name : {"volume_000000.raw", "volume_000001.raw", "sources.json",
                             "manifest.json", "bformat.wav"}) {
        const auto bytes_a = slurp(a.path / name);
        ok = ok && !bytes_a.empty() && bytes_a == slurp(b.path / name);
    }
    report(9, "predict + encode at seed 42 is byte-identical across reruns", ok, t.seconds(),
           0.0);
}

// --- criterion 10: report fidelity -------------------------------------------------

void criterion_report() {
    Timer t;
    EvalReport rep;
    rep.epsilons = {0.6, 0.5, 0.4};

    ClipVolumes clip;
    clip.clip_id = "clip";
    SplitMix64 rng(110);
    for (int s = 0; s < 3; ++s) {
        ProbabilityVolume pred = ProbabilityVolume::zeros(16);
        ProbabilityVolume gt = ProbabilityVolume::zeros(16);
        for (int i = 0; i < 12; ++i) {
            pred.at(6 + static_cast<int>(rng.next() % 5), 8, 8) =
                static_cast<float>(rng.next_uniform(0.3, 1.0));
            gt.at(6 + static_cast<int>(rng.next() % 5), 8, 8) =
                static_cast<float>(rng.next_uniform(0.3, 1.0));
        }
        clip.predicted.push_back(pred);
        clip.ground_truth.push_back(gt);
    }
    bool ok = true;
    for (const char* model : {"ssm", "att"}) {
        for (const char* proj : {"cubemap3x2", "equirect"}) {
            rep.rows.push_back(evaluate_corpus(model, proj, {clip}, rep.epsilons));
        }
    }
    // structure: models x projections rows against the epsilon sweep
    const std::string table = report_to_table(rep);
    for (const char* needle :
         {"360-SSD e=0.6", "360-SSD e=0.5", "360-SSD e=0.4", "360-OvErr e=0.6",
          "360-OvErr e=0.5", "360-OvErr e=0.4", "ssm-cubemap3x2", "ssm-equirect",
          "att-cubemap3x2", "att-equirect"}) {
        ok = ok && table.find(needle) != std::string::npos;
    }
    // aggregates recompute from per-second records bit-exactly
    for (const EvalRow& row : rep.rows) {
        ok = ok && row.per_epsilon.size() == 3;
        for (const EpsilonResult& res : row.per_epsilon) {
            const auto ssd_again = aggregate_ssd(res.records);
            const auto ov_again = aggregate_overlap(res.records);
            ok = ok && ssd_again.has_value() == res.ssd_agg.has_value();
            if (ssd_again && res.ssd_agg) {
                ok = ok && ssd_again->mean == res.ssd_agg->mean &&
                     ssd_again->std_seconds == res.ssd_agg->std_seconds &&
                     ssd_again->std_clips == res.ssd_agg->std_clips;
            }
            ok = ok && ov_again.has_value() && res.overlap_agg.has_value() &&
                 ov_again->mean == res.overlap_agg->mean &&
                 ov_again->std_seconds == res.overlap_agg->std_seconds;
        }
    }
    report(10, "evaluation table structure and bit-exact aggregate recomputation", ok,
           t.seconds(), 0.0);
}

}  // namespace

int main() {
    criterion_energy();
    criterion_decode();
    criterion_projections();
    criterion_threshold();
    criterion_centroids();
    criterion_metrics();
    criterion_closed_loop();
    criterion_shapes();
    criterion_determinism();
    criterion_report();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
