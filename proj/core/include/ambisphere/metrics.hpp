#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ambisphere/volume.hpp"

namespace ambisphere {

/// 360-SSD: Euclidean distance between two source centers inside the
/// radius-0.5 probability sphere. Range [0, 1].
double ssd(const Vec3& c_ground, const Vec3& c_predicted);

/// 360-OvErr: 1 - |intersection| / |union| of the nonzero voxel sets after
/// thresholding both volumes at epsilon. Both empty counts as perfect
/// agreement (0); exactly one empty is maximal disagreement (1).
double overlap_error(const ProbabilityVolume& predicted,
                     const ProbabilityVolume& ground_truth, double epsilon);

struct MatchResult {
    std::vector<std::pair<size_t, size_t>> pairs;  // (pred index, gt index)
    std::vector<size_t> unmatched_pred;            // false alarms
    std::vector<size_t> unmatched_gt;              // misses
};

/// Greedy minimum-distance matching over region centroids: repeatedly pairs
/// the globally closest unmatched (pred, gt) centroids.
MatchResult match_sources(const std::vector<SourceRegion>& pred,
                          const std::vector<SourceRegion>& gt);

struct SecondRecord {
    std::string clip_id;
    int second = 0;
    std::vector<double> ssd_values;  // one per matched source pair
    double overlap = 0.0;
    int misses = 0;
    int false_alarms = 0;
};

struct Aggregate {
    double mean = 0.0;
    double std_seconds = 0.0;  // population std over per-second values
    double std_clips = 0.0;    // population std over per-clip means
    size_t count = 0;          // number of contributing values
};

struct EpsilonResult {
    double epsilon = 0.0;
    std::vector<SecondRecord> records;
    std::optional<Aggregate> ssd_agg;      // empty when no matched seconds
    std::optional<Aggregate> overlap_agg;
};

struct EvalRow {
    std::string model;
    std::string projection;
    std::vector<EpsilonResult> per_epsilon;
};

struct EvalReport {
    std::vector<double> epsilons;
    std::vector<EvalRow> rows;
};

/// One clip's aligned per-second prediction and ground-truth volumes.
struct ClipVolumes {
    std::string clip_id;
    std::vector<ProbabilityVolume> predicted;
    std::vector<ProbabilityVolume> ground_truth;  // same length and resolution
};

/// Evaluates one (model, projection) run over a corpus for every epsilon.
EvalRow evaluate_corpus(const std::string& model, const std::string& projection,
                        const std::vector<ClipVolumes>& clips,
                        const std::vector<double>& epsilons);

/// Recomputes aggregates from records; used for the recomputability check.
std::optional<Aggregate> aggregate_ssd(const std::vector<SecondRecord>& records);
std::optional<Aggregate> aggregate_overlap(const std::vector<SecondRecord>& records);

/// Machine-readable report and the fixed-width table (models x projections
/// rows against the epsilon sweep).
std::string report_to_json(const EvalReport& r);
std::string report_to_table(const EvalReport& r);

}  // namespace ambisphere
