#include "ambisphere/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace ambisphere {

namespace {

using nlohmann::json;

}  // namespace

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (workers == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

SecondPrediction predict_second(const FrameSecond& frames,
                                const std::vector<double>& mono_second,
                                const RunConfig& cfg, const EmbeddingParams& emb,
                                const SsmParams& ssm, const AttParams& att) {
    const VisualFeature v = cfg.oracle_embedding ? oracle_embed_visual(frames)
                                                 : embed_visual(frames, emb);
    const AudioFeature a = embed_audio(mono_second, emb);
    PlanarProbMap map = cfg.model == PredictionModel::Ssm
                            ? predict_ssm(v, a, ssm, cfg.projection)
                            : predict_att(v, a, att, cfg.projection);
    SecondPrediction out;
    out.second = frames.second_index;
    out.map = normalize_map(map);
    out.volume = lift_to_volume(out.map, cfg.resolution);
    const std::vector<SourceRegion> regions =
        extract_sources(threshold(out.volume, cfg.epsilon));
    for (const SourceRegion& r : regions) {
        if (r.centroid.norm() > 1e-6) out.sources.push_back(to_source_estimate(r));
    }
    return out;
}

namespace {

int count_frame_seconds(const std::filesystem::path& frames_dir) {
    int max_index = -1;
    for (const auto& entry : std::filesystem::directory_iterator(frames_dir)) {
        const std::string name = entry.path().filename().string();
        int idx = -1;
        if (std::sscanf(name.c_str(), "frame_%d.ppm", &idx) == 1) {
            max_index = std::max(max_index, idx);
        }
    }
    if (max_index < 0) {
        throw std::runtime_error(frames_dir.string() + ": no frame_%06d.ppm files found");
    }
    return max_index / kFramesPerSecond + 1;
}

std::filesystem::path volume_path(const std::filesystem::path& dir, int second) {
    char name[32];
    std::snprintf(name, sizeof(name), "volume_%06d.raw", second);
    return dir / name;
}

std::vector<double> audio_second_slice(const std::vector<double>& mono, int second) {
    std::vector<double> slice(kAudioSampleRate, 0.0);
    const size_t start = static_cast<size_t>(second) * kAudioSampleRate;
    for (size_t i = 0; i < static_cast<size_t>(kAudioSampleRate); ++i) {
        const size_t idx = start + i;
        if (idx < mono.size()) slice[i] = mono[idx];
    }
    return slice;
}

}  // namespace

void run_predict(const std::filesystem::path& frames_dir,
                 const std::filesystem::path& audio_path, const RunConfig& cfg,
                 const std::filesystem::path& out_dir) {
    if (!std::filesystem::is_directory(frames_dir)) {
        throw std::runtime_error(frames_dir.string() + ": frames directory not found");
    }
    const int seconds = count_frame_seconds(frames_dir);
    AudioSignal audio = read_wav(audio_path);
    if (audio.sample_rate != kAudioSampleRate) {
        audio = resample_linear(audio, kAudioSampleRate);
    }
    const std::vector<double> mono = mono_mix(audio);

    const EmbeddingParams emb = EmbeddingParams::from_seed(cfg.seed);
    const SsmParams ssm = SsmParams::from_seed(cfg.seed);
    const AttParams att = AttParams::from_seed(cfg.seed);

    std::filesystem::create_directories(out_dir);
    std::vector<std::vector<SourceEstimate>> all_sources(static_cast<size_t>(seconds));
    parallel_for(static_cast<size_t>(seconds), cfg.jobs, [&](size_t s) {
        const FrameSecond frames = read_frame_second(frames_dir, static_cast<int>(s));
        const SecondPrediction pred =
            predict_second(frames, audio_second_slice(mono, static_cast<int>(s)), cfg,
                           emb, ssm, att);
        write_volume({pred.volume, cfg.projection, static_cast<int>(s)},
                     volume_path(out_dir, static_cast<int>(s)));
        all_sources[s] = pred.sources;
    });

    write_sources_json(all_sources, out_dir / "sources.json");

    json manifest;
    manifest["model"] = to_string(cfg.model);
    manifest["projection"] = to_string(cfg.projection);
    manifest["seed"] = cfg.seed;
    manifest["resolution"] = cfg.resolution;
    manifest["epsilon"] = cfg.epsilon;
    manifest["seconds"] = seconds;
    std::ofstream out(out_dir / "manifest.json", std::ios::trunc);
    if (!out) throw std::runtime_error((out_dir / "manifest.json").string() + ": cannot write");
    out << manifest.dump(2) << "\n";
}

void write_sources_json(const std::vector<std::vector<SourceEstimate>>& seconds,
                        const std::filesystem::path& path) {
    json j;
    j["seconds"] = json::array();
    for (size_t s = 0; s < seconds.size(); ++s) {
        json js;
        js["second"] = s;
        js["sources"] = json::array();
        for (const SourceEstimate& e : seconds[s]) {
            js["sources"].push_back({{"phi", e.direction.phi},
                                     {"theta", e.direction.theta},
                                     {"mass", e.mass}});
        }
        j["seconds"].push_back(std::move(js));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << j.dump(2) << "\n";
}

std::vector<std::vector<SourceEstimate>> read_sources_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
    }
    std::vector<std::vector<SourceEstimate>> out;
    try {
        for (const json& js : j.at("seconds")) {
            const size_t second = js.at("second").get<size_t>();
            if (out.size() <= second) out.resize(second + 1);
            for (const json& je : js.at("sources")) {
                out[second].push_back({SphericalDirection::normalized(
                                           je.at("phi").get<double>(),
                                           je.at("theta").get<double>()),
                                       je.at("mass").get<double>()});
            }
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": sources schema violation: " + e.what());
    }
    return out;
}

std::vector<std::vector<SourceEstimate>> sources_from_annotations(const ClipAnnotation& a,
                                                                  int total_seconds) {
    std::vector<std::vector<SourceEstimate>> out(static_cast<size_t>(total_seconds));
    for (const AnnotatedSecond& s : a.seconds) {
        if (s.second_index >= total_seconds) continue;
        for (const PixelCoord& p : s.sources) {
            out[static_cast<size_t>(s.second_index)].push_back(
                {pixel_to_direction(p, a.projection, a.dims), 1.0});
        }
    }
    return out;
}

RunManifest read_manifest(const std::filesystem::path& run_dir) {
    const std::filesystem::path path = run_dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
    }
    RunManifest m;
    try {
        m.model = j.at("model").get<std::string>();
        m.projection = j.at("projection").get<std::string>();
        m.seed = j.at("seed").get<uint64_t>();
        m.resolution = j.at("resolution").get<int>();
        m.epsilon = j.at("epsilon").get<double>();
        m.seconds = j.at("seconds").get<int>();
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": manifest schema violation: " + e.what());
    }
    return m;
}

EvalRow evaluate_run(const std::filesystem::path& run_dir,
                     const std::filesystem::path& annotations_path,
                     const std::vector<double>& epsilons, double spread_deg) {
    const RunManifest manifest = read_manifest(run_dir);
    const ClipAnnotation ann = read_annotations(annotations_path);
    const double spread_rad = spread_deg * kPi / 180.0;

    ClipVolumes clip;
    clip.clip_id = ann.video_id;
    for (int s = 0; s < manifest.seconds; ++s) {
        const VolumeFile vf = read_volume(volume_path(run_dir, s));
        if (vf.volume.resolution != manifest.resolution) {
            throw std::runtime_error(run_dir.string() +
                                     ": volume resolution does not match manifest");
        }
        std::vector<PixelCoord> pixels;
        for (const AnnotatedSecond& as : ann.seconds) {
            if (as.second_index == s) pixels = as.sources;
        }
        clip.ground_truth.push_back(annotation_to_volume(pixels, ann.projection, ann.dims,
                                                         manifest.resolution, spread_rad));
        clip.predicted.push_back(vf.volume);
    }
    return evaluate_corpus(manifest.model, manifest.projection, {clip}, epsilons);
}

}  // namespace ambisphere
