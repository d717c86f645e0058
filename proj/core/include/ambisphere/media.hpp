#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ambisphere/geometry.hpp"
#include "ambisphere/volume.hpp"

namespace ambisphere {

/// 8-bit RGB image, row-major, interleaved.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;

    size_t offset(int x, int y) const {
        return (static_cast<size_t>(y) * width + x) * 3;
    }
};

Image read_ppm(const std::filesystem::path& path);
void write_ppm(const Image& img, const std::filesystem::path& path);

/// The 15 frames making up one second of video.
struct FrameSecond {
    int second_index = 0;
    std::vector<Image> frames;
};

inline constexpr int kFramesPerSecond = 15;

/// Loads frames frame_%06d.ppm numbered second*15 .. second*15+14.
FrameSecond read_frame_second(const std::filesystem::path& dir, int second_index);

struct AudioSignal {
    std::vector<std::vector<double>> channels;  // 1 or 2, equal lengths
    int sample_rate = 0;

    size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Average of all channels.
std::vector<double> mono_mix(const AudioSignal& a);

/// Linear resampling to a new rate (identity when rates match).
AudioSignal resample_linear(const AudioSignal& a, int target_rate);

/// RIFF/WAVE reader: PCM16 or IEEE float32, 1-2 channels.
AudioSignal read_wav(const std::filesystem::path& path);

/// Writes IEEE float32 WAV with the given channels (interleaved on disk).
void write_wav_f32(const std::vector<std::vector<double>>& channels, int sample_rate,
                   const std::filesystem::path& path);

struct BFormatSignal {
    std::vector<double> w, x, y, z;
    int sample_rate = 0;

    size_t length() const { return w.size(); }
};

/// 4-channel float32 WAV, channel order W, X, Y, Z.
void write_bformat_wav(const BFormatSignal& b, const std::filesystem::path& path);

struct AnnotatedSecond {
    int second_index = 0;
    std::vector<PixelCoord> sources;
};

/// Per-second ground-truth source pixel locations for one clip (<= 10 s).
struct ClipAnnotation {
    std::string video_id;
    Projection projection = Projection::Equirect;
    ImageDims dims;
    std::vector<AnnotatedSecond> seconds;
};

ClipAnnotation read_annotations(const std::filesystem::path& path);
void write_annotations(const ClipAnnotation& a, const std::filesystem::path& path);

/// Validates invariants (ascending unique seconds, in-bounds pixels, <= 10 s).
void validate(const ClipAnnotation& a);

/// Raw little-endian float32 voxels, x-fastest, with a JSON sidecar
/// {resolution, projection, second_index} at the same path with a .json
/// extension.
struct VolumeFile {
    ProbabilityVolume volume;
    Projection projection = Projection::Equirect;
    int second_index = 0;
};

void write_volume(const VolumeFile& v, const std::filesystem::path& raw_path);
VolumeFile read_volume(const std::filesystem::path& raw_path);

}  // namespace ambisphere
