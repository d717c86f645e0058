#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ambisphere/embedding.hpp"
#include "ambisphere/encoder.hpp"
#include "ambisphere/metrics.hpp"
#include "ambisphere/prediction.hpp"
#include "ambisphere/synth.hpp"
#include "ambisphere/volume.hpp"

namespace ambisphere {

/// Runs fn(i) for i in [0, n) on up to `jobs` worker threads. Exceptions are
/// collected and the first one rethrown.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

struct RunConfig {
    PredictionModel model = PredictionModel::Ssm;
    Projection projection = Projection::Equirect;
    uint64_t seed = 42;
    int resolution = 64;
    double epsilon = 0.5;
    double spread_deg = 10.0;
    bool oracle_embedding = false;
    int jobs = 1;
};

struct SecondPrediction {
    int second = 0;
    PlanarProbMap map;            // normalized, as lifted
    ProbabilityVolume volume;     // pre-threshold
    std::vector<SourceEstimate> sources;  // after thresholding at cfg.epsilon
};

/// Stages II-III for one second: embedding, prediction head, normalization,
/// radial lift, thresholded source extraction.
SecondPrediction predict_second(const FrameSecond& frames,
                                const std::vector<double>& mono_second,
                                const RunConfig& cfg, const EmbeddingParams& emb,
                                const SsmParams& ssm, const AttParams& att);

/// Full predict run over a clip directory (frames + WAV). Writes
/// volume_%06d.raw/.json, sources.json and manifest.json into out_dir.
void run_predict(const std::filesystem::path& frames_dir,
                 const std::filesystem::path& audio_path, const RunConfig& cfg,
                 const std::filesystem::path& out_dir);

/// Per-second source lists parsed back from a sources.json.
std::vector<std::vector<SourceEstimate>> read_sources_json(const std::filesystem::path& path);
void write_sources_json(const std::vector<std::vector<SourceEstimate>>& seconds,
                        const std::filesystem::path& path);

/// Per-second sources derived from ground-truth annotations (unit mass each).
std::vector<std::vector<SourceEstimate>> sources_from_annotations(const ClipAnnotation& a,
                                                                  int total_seconds);

struct RunManifest {
    std::string model;
    std::string projection;
    uint64_t seed = 0;
    int resolution = 0;
    double epsilon = 0.0;
    int seconds = 0;
};

RunManifest read_manifest(const std::filesystem::path& run_dir);

/// Stage for cmd_evaluate: loads one run dir plus its annotation file and
/// produces the per-epsilon metrics row.
EvalRow evaluate_run(const std::filesystem::path& run_dir,
                     const std::filesystem::path& annotations_path,
                     const std::vector<double>& epsilons, double spread_deg);

}  // namespace ambisphere
