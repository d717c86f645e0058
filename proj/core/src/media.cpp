#include "ambisphere/media.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ambisphere {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    return out;
}

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

}  // namespace

Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string magic;
    in >> magic;
    if (magic != "P6") fail(path, "not a binary P6 PPM");
    // header tokens may be separated by whitespace and '#' comments
    auto next_int = [&](const char* name) {
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v = -1;
        in >> v;
        if (!in || v <= 0) fail(path, std::string("malformed PPM header field: ") + name);
        return static_cast<int>(v);
    };
    const int width = next_int("width");
    const int height = next_int("height");
    const int maxval = next_int("maxval");
    if (maxval != 255) fail(path, "unsupported PPM maxval (expected 255)");
    in.get();  // single whitespace after header
    Image img;
    img.width = width;
    img.height = height;
    img.rgb.resize(static_cast<size_t>(width) * height * 3);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) fail(path, "truncated PPM payload");
    return img;
}

void write_ppm(const Image& img, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
    if (!out) fail(path, "write failed");
}

FrameSecond read_frame_second(const std::filesystem::path& dir, int second_index) {
    if (second_index < 0) throw std::invalid_argument("second_index must be >= 0");
    FrameSecond fs;
    fs.second_index = second_index;
    fs.frames.reserve(kFramesPerSecond);
    for (int i = 0; i < kFramesPerSecond; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.ppm",
                      second_index * kFramesPerSecond + i);
        const std::filesystem::path p = dir / name;
        if (!std::filesystem::exists(p)) fail(p, "missing frame");
        fs.frames.push_back(read_ppm(p));
        if (fs.frames.back().width != fs.frames.front().width ||
            fs.frames.back().height != fs.frames.front().height) {
            fail(p, "frame dims differ within one second");
        }
    }
    return fs;
}

std::vector<double> mono_mix(const AudioSignal& a) {
    if (a.channels.empty()) return {};
    std::vector<double> out(a.length(), 0.0);
    for (const auto& ch : a.channels) {
        for (size_t i = 0; i < out.size(); ++i) out[i] += ch[i];
    }
    const double inv = 1.0 / static_cast<double>(a.channels.size());
    for (double& s : out) s *= inv;
    return out;
}

AudioSignal resample_linear(const AudioSignal& a, int target_rate) {
    if (target_rate <= 0) throw std::invalid_argument("target_rate must be positive");
    if (a.sample_rate == target_rate) return a;
    AudioSignal out;
    out.sample_rate = target_rate;
    const size_t in_len = a.length();
    const size_t out_len = static_cast<size_t>(
        std::llround(static_cast<double>(in_len) * target_rate / a.sample_rate));
    for (const auto& ch : a.channels) {
        std::vector<double> r(out_len, 0.0);
        for (size_t i = 0; i < out_len; ++i) {
            const double t = static_cast<double>(i) * a.sample_rate / target_rate;
            const size_t i0 = std::min(static_cast<size_t>(t), in_len - 1);
            const size_t i1 = std::min(i0 + 1, in_len - 1);
            const double frac = t - static_cast<double>(i0);
            r[i] = ch[i0] * (1.0 - frac) + ch[i1] * frac;
        }
        out.channels.push_back(std::move(r));
    }
    return out;
}

namespace {

struct RiffChunk {
    char id[4];
    uint32_t size;
};

template <typename T>
T read_le(std::ifstream& in, const std::filesystem::path& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) fail(path, "truncated file");
    return v;
}

}  // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    char riff[4], wave[4];
    in.read(riff, 4);
    uint32_t riff_size = read_le<uint32_t>(in, path);
    (void)riff_size;
    in.read(wave, 4);
    if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0) {
        fail(path, "not a RIFF/WAVE file");
    }

    uint16_t format = 0, num_channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    bool have_fmt = false;
    std::vector<char> data;
    while (in.peek() != EOF) {
        RiffChunk chunk{};
        in.read(chunk.id, 4);
        if (!in) break;
        chunk.size = read_le<uint32_t>(in, path);
        if (std::memcmp(chunk.id, "fmt ", 4) == 0) {
            format = read_le<uint16_t>(in, path);
            num_channels = read_le<uint16_t>(in, path);
            sample_rate = read_le<uint32_t>(in, path);
            read_le<uint32_t>(in, path);  // byte rate
            read_le<uint16_t>(in, path);  // block align
            bits = read_le<uint16_t>(in, path);
            if (chunk.size > 16) in.seekg(chunk.size - 16, std::ios::cur);
            have_fmt = true;
        } else if (std::memcmp(chunk.id, "data", 4) == 0) {
            data.resize(chunk.size);
            in.read(data.data(), chunk.size);
            if (in.gcount() != static_cast<std::streamsize>(chunk.size)) fail(path, "truncated data chunk");
        } else {
            in.seekg(chunk.size + (chunk.size & 1), std::ios::cur);
        }
    }
    if (!have_fmt) fail(path, "missing fmt chunk");
    if (num_channels < 1 || num_channels > 2) {
        fail(path, "unsupported channel count " + std::to_string(num_channels) +
                       " (expected 1 or 2)");
    }
    if (sample_rate == 0) fail(path, "zero sample rate");

    AudioSignal out;
    out.sample_rate = static_cast<int>(sample_rate);
    out.channels.assign(num_channels, {});
    if (format == 1 && bits == 16) {
        const size_t n = data.size() / 2 / num_channels;
        for (auto& ch : out.channels) ch.resize(n);
        const int16_t* samples = reinterpret_cast<const int16_t*>(data.data());
        for (size_t i = 0; i < n; ++i) {
            for (int c = 0; c < num_channels; ++c) {
                out.channels[static_cast<size_t>(c)][i] =
                    samples[i * num_channels + c] / 32768.0;
            }
        }
    } else if (format == 3 && bits == 32) {
        const size_t n = data.size() / 4 / num_channels;
        for (auto& ch : out.channels) ch.resize(n);
        const float* samples = reinterpret_cast<const float*>(data.data());
        for (size_t i = 0; i < n; ++i) {
            for (int c = 0; c < num_channels; ++c) {
                out.channels[static_cast<size_t>(c)][i] = samples[i * num_channels + c];
            }
        }
    } else {
        fail(path, "unsupported encoding (need PCM16 or IEEE float32)");
    }
    return out;
}

void write_wav_f32(const std::vector<std::vector<double>>& channels, int sample_rate,
                   const std::filesystem::path& path) {
    if (channels.empty()) throw std::invalid_argument("write_wav_f32: no channels");
    const size_t n = channels.front().size();
    for (const auto& ch : channels) {
        if (ch.size() != n) throw std::invalid_argument("write_wav_f32: channel lengths differ");
    }
    const uint16_t nch = static_cast<uint16_t>(channels.size());
    const uint32_t data_size = static_cast<uint32_t>(n * nch * 4);

    std::ofstream out = open_out(path);
    auto put16 = [&](uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
    auto put32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    out.write("RIFF", 4);
    put32(4 + 24 + 8 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put32(16);
    put16(3);  // IEEE float
    put16(nch);
    put32(static_cast<uint32_t>(sample_rate));
    put32(static_cast<uint32_t>(sample_rate) * nch * 4);
    put16(nch * 4);
    put16(32);
    out.write("data", 4);
    put32(data_size);
    std::vector<float> interleaved(n * nch);
    for (size_t i = 0; i < n; ++i) {
        for (uint16_t c = 0; c < nch; ++c) {
            interleaved[i * nch + c] = static_cast<float>(channels[c][i]);
        }
    }
    out.write(reinterpret_cast<const char*>(interleaved.data()),
              static_cast<std::streamsize>(interleaved.size() * 4));
    if (!out) fail(path, "write failed");
}

void write_bformat_wav(const BFormatSignal& b, const std::filesystem::path& path) {
    if (b.x.size() != b.w.size() || b.y.size() != b.w.size() || b.z.size() != b.w.size()) {
        throw std::invalid_argument("write_bformat_wav: channel lengths differ");
    }
    write_wav_f32({b.w, b.x, b.y, b.z}, b.sample_rate, path);
}

void validate(const ClipAnnotation& a) {
    if (a.dims.width <= 0 || a.dims.height <= 0) {
        throw std::invalid_argument("annotation: non-positive dims");
    }
    if (a.seconds.size() > 10) {
        throw std::invalid_argument("annotation: more than 10 seconds in one clip");
    }
    int prev = -1;
    for (const AnnotatedSecond& s : a.seconds) {
        if (s.second_index <= prev) {
            throw std::invalid_argument("annotation: seconds not unique and ascending");
        }
        prev = s.second_index;
        for (const PixelCoord& p : s.sources) {
            if (p.x < 0.0 || p.x >= a.dims.width || p.y < 0.0 || p.y >= a.dims.height) {
                throw std::out_of_range("annotation: source pixel outside dims");
            }
        }
    }
}

ClipAnnotation read_annotations(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(path, std::string("invalid JSON: ") + e.what());
    }
    ClipAnnotation a;
    try {
        a.video_id = j.at("video_id").get<std::string>();
        a.projection = projection_from_string(j.at("projection").get<std::string>());
        a.dims.width = j.at("width").get<int>();
        a.dims.height = j.at("height").get<int>();
        for (const json& js : j.at("seconds")) {
            AnnotatedSecond s;
            s.second_index = js.at("second").get<int>();
            for (const json& jp : js.at("sources")) {
                s.sources.push_back({jp.at("x").get<double>(), jp.at("y").get<double>()});
            }
            a.seconds.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        fail(path, std::string("annotation schema violation: ") + e.what());
    }
    validate(a);
    return a;
}

void write_annotations(const ClipAnnotation& a, const std::filesystem::path& path) {
    validate(a);
    json j;
    j["video_id"] = a.video_id;
    j["projection"] = to_string(a.projection);
    j["width"] = a.dims.width;
    j["height"] = a.dims.height;
    j["seconds"] = json::array();
    for (const AnnotatedSecond& s : a.seconds) {
        json js;
        js["second"] = s.second_index;
        js["sources"] = json::array();
        for (const PixelCoord& p : s.sources) {
            js["sources"].push_back({{"x", p.x}, {"y", p.y}});
        }
        j["seconds"].push_back(std::move(js));
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
    if (!out) fail(path, "write failed");
}

namespace {

std::filesystem::path sidecar_path(std::filesystem::path raw_path) {
    raw_path.replace_extension(".json");
    return raw_path;
}

}  // namespace

void write_volume(const VolumeFile& v, const std::filesystem::path& raw_path) {
    const size_t expect = static_cast<size_t>(v.volume.resolution) * v.volume.resolution *
                          v.volume.resolution;
    if (v.volume.voxels.size() != expect) {
        throw std::invalid_argument("write_volume: voxel count does not match resolution");
    }
    std::ofstream out = open_out(raw_path);
    out.write(reinterpret_cast<const char*>(v.volume.voxels.data()),
              static_cast<std::streamsize>(v.volume.voxels.size() * 4));
    if (!out) fail(raw_path, "write failed");

    json j;
    j["resolution"] = v.volume.resolution;
    j["projection"] = to_string(v.projection);
    j["second_index"] = v.second_index;
    std::ofstream side = open_out(sidecar_path(raw_path));
    side << j.dump(2) << "\n";
    if (!side) fail(sidecar_path(raw_path), "write failed");
}

VolumeFile read_volume(const std::filesystem::path& raw_path) {
    std::ifstream side = open_in(sidecar_path(raw_path));
    json j;
    try {
        side >> j;
    } catch (const json::exception& e) {
        fail(sidecar_path(raw_path), std::string("invalid JSON: ") + e.what());
    }
    VolumeFile v;
    try {
        v.volume.resolution = j.at("resolution").get<int>();
        v.projection = projection_from_string(j.at("projection").get<std::string>());
        v.second_index = j.at("second_index").get<int>();
    } catch (const json::exception& e) {
        fail(sidecar_path(raw_path), std::string("sidecar schema violation: ") + e.what());
    }
    if (v.volume.resolution <= 0) fail(sidecar_path(raw_path), "non-positive resolution");

    std::ifstream in = open_in(raw_path);
    const size_t n = static_cast<size_t>(v.volume.resolution) * v.volume.resolution *
                     v.volume.resolution;
    v.volume.voxels.resize(n);
    in.read(reinterpret_cast<char*>(v.volume.voxels.data()),
            static_cast<std::streamsize>(n * 4));
    if (in.gcount() != static_cast<std::streamsize>(n * 4)) {
        fail(raw_path, "payload size does not match sidecar resolution");
    }
    char extra;
    if (in.read(&extra, 1)) fail(raw_path, "payload size does not match sidecar resolution");
    return v;
}

}  // namespace ambisphere
