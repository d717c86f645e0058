#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ambisphere/media.hpp"
#include "ambisphere/prediction.hpp"

namespace ambisphere {

/// One synthetic source: a white Gaussian-falloff blob plus a sine tone.
/// The trajectory holds one direction per second; a single entry means a
/// static source.
struct SourceSpec {
    std::vector<SphericalDirection> trajectory;
    double tone_hz = 440.0;
    double blob_radius_rad = 0.14;  // ~8 degrees

    SphericalDirection direction_at(int second) const;
};

struct SceneSpec {
    Projection projection = Projection::Equirect;
    ImageDims dims{224, 112};
    int duration_s = 10;
    std::vector<SourceSpec> sources;
};

/// Throws on invalid specs: > 4 sources, duplicate tone frequencies, or two
/// blobs within 2x radius of each other in any second.
void validate(const SceneSpec& spec);

SceneSpec scene_from_json_file(const std::filesystem::path& path);
void scene_to_json_file(const SceneSpec& spec, const std::filesystem::path& path);

/// The 15 (identical) frames of one second.
FrameSecond render_second_frames(const SceneSpec& spec, int second);

/// Mono 48 kHz sum of the source tones.
std::vector<double> render_audio_samples(const SceneSpec& spec);

ClipAnnotation scene_annotations(const SceneSpec& spec);

/// Writes frame_%06d.ppm (15 per second), audio.wav, and annotations.json.
/// Byte-deterministic per (spec, seed).
void render_scene(const SceneSpec& spec, uint64_t seed, const std::filesystem::path& out_dir);

struct ClosedLoopSecond {
    int second = 0;
    std::vector<double> angular_errors;  // per spec source, vs nearest extracted
    int extracted_sources = 0;
};

struct ClosedLoopReport {
    std::vector<ClosedLoopSecond> seconds;
    double max_angular_error = 0.0;
};

/// Runs the pipeline with the oracle visual embedding on an in-memory render
/// of the scene and reports per-second angular error between extracted and
/// specified directions.
ClosedLoopReport closed_loop_check(const SceneSpec& spec, PredictionModel model,
                                   uint64_t seed, double epsilon, int resolution);

}  // namespace ambisphere
