#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ambisphere/encoder.hpp"
#include "ambisphere/prediction.hpp"
#include "ambisphere/rng.hpp"
#include "ambisphere/volume.hpp"

using namespace ambisphere;

namespace {

void bm_projection_round_trip(benchmark::State& state) {
    SplitMix64 rng(1);
    const ImageDims dims{512, 256};
    for (auto _ : state) {
        const PixelCoord p{rng.next_uniform(0.0, dims.width - 1e-9),
                           rng.next_uniform(0.0, dims.height - 1e-9)};
        benchmark::DoNotOptimize(
            direction_to_pixel(pixel_to_direction(p, Projection::Equirect, dims),
                               Projection::Equirect, dims));
    }
}
BENCHMARK(bm_projection_round_trip);

void bm_encode_one_second(benchmark::State& state) {
    std::vector<double> tone(48000);
    for (size_t i = 0; i < tone.size(); ++i) {
        tone[i] = 0.5 * std::sin(2.0 * kPi * 440.0 * static_cast<double>(i) / 48000.0);
    }
    const std::vector<LocalizedSource> sources = {
        {tone, SphericalDirection{0.3, 0.1}, 0.5},
        {tone, SphericalDirection{-1.2, -0.4}, 0.5},
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode_bformat(sources, tone.size(), 48000));
    }
}
BENCHMARK(bm_encode_one_second);

void bm_lift_to_volume(benchmark::State& state) {
    PlanarProbMap m = PlanarProbMap::zeros(7, 7, Projection::Equirect);
    SplitMix64 rng(2);
    for (double& v : m.values) v = rng.next_double();
    const int resolution = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(lift_to_volume(m, resolution));
    }
}
BENCHMARK(bm_lift_to_volume)->Arg(32)->Arg(64);

void bm_extract_sources(benchmark::State& state) {
    ProbabilityVolume v = ProbabilityVolume::zeros(64);
    SplitMix64 rng(3);
    for (int z = 0; z < 64; ++z) {
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                if (!in_ball(voxel_center(64, x, y, z))) continue;
                if (rng.next_double() < 0.02) {
                    v.at(x, y, z) = static_cast<float>(rng.next_uniform(0.5, 1.0));
                }
            }
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_sources(v));
    }
}
BENCHMARK(bm_extract_sources);

void bm_predict_ssm(benchmark::State& state) {
    const SsmParams p = SsmParams::from_seed(42);
    VisualFeature vf;
    AudioFeature af;
    SplitMix64 rng(4);
    for (float& x : vf.data) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));
    for (float& x : af.values) x = static_cast<float>(rng.next_uniform(-0.1, 0.1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict_ssm(vf, af, p, Projection::Equirect));
    }
}
BENCHMARK(bm_predict_ssm);

void bm_predict_att(benchmark::State& state) {
    const AttParams p = AttParams::from_seed(42);
    VisualFeature vf;
    AudioFeature af;
    SplitMix64 rng(5);
    for (float& x : vf.data) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));
    for (float& x : af.values) x = static_cast<float>(rng.next_uniform(-0.1, 0.1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict_att(vf, af, p, Projection::Equirect));
    }
}
BENCHMARK(bm_predict_att);

}  // namespace

BENCHMARK_MAIN();
