#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ambisphere/media.hpp"
#include "ambisphere/rng.hpp"

namespace ambisphere {

inline constexpr int kFeatureGrid = 7;
inline constexpr int kVisualChannels = 512;
inline constexpr int kAudioFeatureDim = 128;

/// 7x7 spatial grid of 512-channel cells, layout [row][col][channel].
struct VisualFeature {
    std::vector<float> data;

    VisualFeature() : data(static_cast<size_t>(kFeatureGrid) * kFeatureGrid * kVisualChannels, 0.0f) {}

    float at(int r, int c, int ch) const {
        return data[(static_cast<size_t>(r) * kFeatureGrid + c) * kVisualChannels + ch];
    }
    float& at(int r, int c, int ch) {
        return data[(static_cast<size_t>(r) * kFeatureGrid + c) * kVisualChannels + ch];
    }
};

struct AudioFeature {
    std::array<float, kAudioFeatureDim> values{};
};

inline constexpr int kAudioSampleRate = 48000;

/// Seed-deterministic stand-in weights for the toy conv stack and the audio
/// projection. Same seed gives bit-identical weights on every platform.
struct EmbeddingParams {
    uint64_t seed = 0;
    // 5 conv stages, 3x3 stride 2, channels 3/16/32/64/128/512, layout
    // [out][in][ky][kx]. Biases are zero.
    std::array<std::vector<float>, 5> conv_weights;
    // audio projection, 128 x (frames*mels)
    std::vector<float> audio_projection;

    static EmbeddingParams from_seed(uint64_t seed);
};

/// Per-frame toy conv features (bilinear resize to 224x224, five 3x3
/// stride-2 conv+ReLU stages, widths 16/32/64/128/512), averaged over the
/// 15 frames.
VisualFeature embed_visual(const FrameSecond& fs, const EmbeddingParams& p);

/// Log-mel spectrogram (64 mel bands, 25 ms window, 10 ms hop, floor 1e-10
/// before log) of one second of mono 48 kHz audio, standardized and linearly
/// projected to 128 values.
AudioFeature embed_audio(const std::vector<double>& mono_second, const EmbeddingParams& p);

/// Test oracle: channel 0 of each cell is the mean luminance of the matching
/// image region averaged over the 15 frames; all other channels are 0.
VisualFeature oracle_embed_visual(const FrameSecond& fs);

/// Log-mel frame/band grid used by embed_audio, exposed for tests.
inline constexpr int kMelBands = 64;
inline constexpr int kMelWindow = 1200;  // 25 ms at 48 kHz
inline constexpr int kMelHop = 480;      // 10 ms
inline constexpr int kMelFrames = 98;

std::vector<double> log_mel_spectrogram(const std::vector<double>& mono_second);

}  // namespace ambisphere
