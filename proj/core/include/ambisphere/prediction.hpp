#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ambisphere/embedding.hpp"
#include "ambisphere/geometry.hpp"

namespace ambisphere {

enum class PredictionModel {
    Ssm,
    Att,
};

std::string to_string(PredictionModel m);
PredictionModel model_from_string(const std::string& s);

inline constexpr int kMapCells = kFeatureGrid * kFeatureGrid;  // 49

/// Fusion head: three 3x3 stride-1 zero-padded conv layers over the
/// concatenated 7x7x640 feature grid (channels 640 -> 128 -> 64 -> 1, ReLU
/// after the first two), a scalar affine, then an element-wise sigmoid.
struct SsmParams {
    uint64_t seed = 0;
    std::vector<float> conv1;  // [128][640][3][3]
    std::vector<float> conv2;  // [64][128][3][3]
    std::vector<float> conv3;  // [1][64][3][3]
    std::vector<float> bias1, bias2, bias3;  // zero-initialized
    float affine_gain = 1.0f;
    float affine_bias = 0.0f;

    static SsmParams from_seed(uint64_t seed);
};

/// Attention head: per-cell visual transformation 512 -> 128, tanh, scored
/// against the weight vector omega; the audio transformation 128 -> 128 is
/// reduced to one scalar bias shared by all cells; softmax over 49 cells.
struct AttParams {
    uint64_t seed = 0;
    std::vector<float> lv_weight;  // [128][512]
    std::vector<float> lv_bias;    // [128], zero-initialized
    std::vector<float> la_weight;  // [128][128]
    std::vector<float> la_bias;    // [128], zero-initialized
    std::array<float, kAudioFeatureDim> omega{};

    static AttParams from_seed(uint64_t seed);
};

PlanarProbMap predict_ssm(const VisualFeature& v, const AudioFeature& a,
                          const SsmParams& p, Projection proj);

PlanarProbMap predict_att(const VisualFeature& v, const AudioFeature& a,
                          const AttParams& p, Projection proj);

/// Raw pre-softmax attention scores; softmax of these equals predict_att.
std::array<double, kMapCells> attention_scores(const VisualFeature& v,
                                               const AudioFeature& a,
                                               const AttParams& p);

/// Min-max rescaling of a map to [0, 1], used by the pipeline before lifting
/// so a single absolute epsilon is meaningful for both heads. A flat map
/// rescales to all zeros.
PlanarProbMap normalize_map(const PlanarProbMap& m);

}  // namespace ambisphere
