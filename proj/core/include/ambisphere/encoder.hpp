#pragma once

#include <vector>

#include "ambisphere/media.hpp"
#include "ambisphere/volume.hpp"

namespace ambisphere {

/// One localized mono source for a single second.
struct LocalizedSource {
    std::vector<double> signal;
    SphericalDirection direction;
    double weight = 0.0;  // in [0,1]; weights over a second sum to 1
};

/// Each source receives the full mono signal scaled by its share of the total
/// region mass. Zero regions give an empty list.
std::vector<LocalizedSource> split_sources(const std::vector<double>& mono_second,
                                           const std::vector<SourceEstimate>& sources);

/// First-order B-format per sample:
///   W = sum s_i/sqrt(2), X = sum s_i cos(phi)cos(theta),
///   Y = sum s_i sin(phi)cos(theta), Z = sum s_i sin(theta).
/// An empty source list yields four silent channels of the requested length.
BFormatSignal encode_bformat(const std::vector<LocalizedSource>& sources,
                             size_t length, int sample_rate);

/// Test inverse for single-source signals, via channel inner products with W.
/// Throws std::domain_error for zero-energy input.
SphericalDirection decode_direction(const BFormatSignal& b);

/// Per-second encoding with a 20 ms linear crossfade across second
/// boundaries. `per_second` needs one entry per (possibly partial) second.
BFormatSignal encode_clip(const AudioSignal& audio,
                          const std::vector<std::vector<SourceEstimate>>& per_second);

inline constexpr double kCrossfadeSeconds = 0.02;

/// AmbiX-compatible channel set: order W, Y, Z, X with W rescaled by sqrt(2).
std::vector<std::vector<double>> to_ambix_channels(const BFormatSignal& b);

}  // namespace ambisphere
