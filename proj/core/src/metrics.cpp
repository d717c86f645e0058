#include "ambisphere/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ambisphere {

double ssd(const Vec3& c_ground, const Vec3& c_predicted) {
    constexpr double kBallRadius = 0.5 + 1e-12;
    if (c_ground.norm() > kBallRadius || c_predicted.norm() > kBallRadius) {
        throw std::out_of_range("ssd: center outside the radius-0.5 ball");
    }
    return (c_ground - c_predicted).norm();
}

double overlap_error(const ProbabilityVolume& predicted,
                     const ProbabilityVolume& ground_truth, double epsilon) {
    if (predicted.resolution != ground_truth.resolution) {
        throw std::invalid_argument("overlap_error: volume resolutions differ");
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("overlap_error: epsilon outside [0,1]");
    }
    size_t inter = 0;
    size_t uni = 0;
    for (size_t i = 0; i < predicted.voxels.size(); ++i) {
        const bool p = predicted.voxels[i] > epsilon;
        const bool g = ground_truth.voxels[i] > epsilon;
        inter += p && g;
        uni += p || g;
    }
    if (uni == 0) return 0.0;  // agreement on absence
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

MatchResult match_sources(const std::vector<SourceRegion>& pred,
                          const std::vector<SourceRegion>& gt) {
    MatchResult result;
    std::vector<bool> pred_used(pred.size(), false);
    std::vector<bool> gt_used(gt.size(), false);
    const size_t n_pairs = std::min(pred.size(), gt.size());
    for (size_t k = 0; k < n_pairs; ++k) {
        double best = std::numeric_limits<double>::infinity();
        size_t bi = 0, bj = 0;
        for (size_t i = 0; i < pred.size(); ++i) {
            if (pred_used[i]) continue;
            for (size_t j = 0; j < gt.size(); ++j) {
                if (gt_used[j]) continue;
                const double d = (pred[i].centroid - gt[j].centroid).norm();
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        pred_used[bi] = true;
        gt_used[bj] = true;
        result.pairs.push_back({bi, bj});
    }
    for (size_t i = 0; i < pred.size(); ++i) {
        if (!pred_used[i]) result.unmatched_pred.push_back(i);
    }
    for (size_t j = 0; j < gt.size(); ++j) {
        if (!gt_used[j]) result.unmatched_gt.push_back(j);
    }
    return result;
}

namespace {

Aggregate make_aggregate(const std::vector<double>& values,
                         const std::vector<std::pair<std::string, double>>& clip_sums,
                         const std::vector<std::pair<std::string, size_t>>& clip_counts) {
    Aggregate a;
    a.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - a.mean) * (v - a.mean);
    a.std_seconds = std::sqrt(var / static_cast<double>(values.size()));

    // per-clip means, then population std over them
    std::vector<double> clip_means;
    for (size_t i = 0; i < clip_sums.size(); ++i) {
        if (clip_counts[i].second > 0) {
            clip_means.push_back(clip_sums[i].second /
                                 static_cast<double>(clip_counts[i].second));
        }
    }
    double cmean = 0.0;
    for (double v : clip_means) cmean += v;
    cmean /= static_cast<double>(clip_means.size());
    double cvar = 0.0;
    for (double v : clip_means) cvar += (v - cmean) * (v - cmean);
    a.std_clips = std::sqrt(cvar / static_cast<double>(clip_means.size()));
    return a;
}

std::optional<Aggregate> aggregate_values(
    const std::vector<SecondRecord>& records,
    const std::function<void(const SecondRecord&, std::vector<double>&)>& extract) {
    std::vector<double> values;
    std::vector<std::pair<std::string, double>> clip_sums;
    std::vector<std::pair<std::string, size_t>> clip_counts;
    auto clip_slot = [&](const std::string& id) -> size_t {
        for (size_t i = 0; i < clip_sums.size(); ++i) {
            if (clip_sums[i].first == id) return i;
        }
        clip_sums.push_back({id, 0.0});
        clip_counts.push_back({id, 0});
        return clip_sums.size() - 1;
    };
    for (const SecondRecord& r : records) {
        std::vector<double> v;
        extract(r, v);
        if (v.empty()) continue;
        const size_t slot = clip_slot(r.clip_id);
        for (double x : v) {
            values.push_back(x);
            clip_sums[slot].second += x;
            clip_counts[slot].second += 1;
        }
    }
    if (values.empty()) return std::nullopt;
    return make_aggregate(values, clip_sums, clip_counts);
}

}  // namespace

std::optional<Aggregate> aggregate_ssd(const std::vector<SecondRecord>& records) {
    return aggregate_values(records, [](const SecondRecord& r, std::vector<double>& out) {
        out = r.ssd_values;
    });
}

std::optional<Aggregate> aggregate_overlap(const std::vector<SecondRecord>& records) {
    return aggregate_values(records, [](const SecondRecord& r, std::vector<double>& out) {
        out.push_back(r.overlap);
    });
}

EvalRow evaluate_corpus(const std::string& model, const std::string& projection,
                        const std::vector<ClipVolumes>& clips,
                        const std::vector<double>& epsilons) {
    EvalRow row;
    row.model = model;
    row.projection = projection;
    for (double eps : epsilons) {
        EpsilonResult res;
        res.epsilon = eps;
        for (const ClipVolumes& clip : clips) {
            if (clip.predicted.size() != clip.ground_truth.size()) {
                throw std::invalid_argument("evaluate_corpus: prediction/ground-truth second counts differ");
            }
            for (size_t s = 0; s < clip.predicted.size(); ++s) {
                const ProbabilityVolume pred_t = threshold(clip.predicted[s], eps);
                const ProbabilityVolume gt_t = threshold(clip.ground_truth[s], eps);
                SecondRecord rec;
                rec.clip_id = clip.clip_id;
                rec.second = static_cast<int>(s);
                rec.overlap = overlap_error(pred_t, gt_t, eps);
                const auto pred_regions = extract_sources(pred_t);
                const auto gt_regions = extract_sources(gt_t);
                const MatchResult match = match_sources(pred_regions, gt_regions);
                for (const auto& [pi, gi] : match.pairs) {
                    rec.ssd_values.push_back(
                        ssd(gt_regions[gi].centroid, pred_regions[pi].centroid));
                }
                rec.misses = static_cast<int>(match.unmatched_gt.size());
                rec.false_alarms = static_cast<int>(match.unmatched_pred.size());
                res.records.push_back(std::move(rec));
            }
        }
        res.ssd_agg = aggregate_ssd(res.records);
        res.overlap_agg = aggregate_overlap(res.records);
        row.per_epsilon.push_back(std::move(res));
    }
    return row;
}

namespace {

using nlohmann::json;

json aggregate_to_json(const std::optional<Aggregate>& a) {
    if (!a) return json{{"empty", true}};
    return json{{"mean", a->mean},
                {"std_seconds", a->std_seconds},
                {"std_clips", a->std_clips},
                {"count", a->count}};
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
    json j;
    j["epsilons"] = r.epsilons;
    j["std_convention"] = "population";
    j["rows"] = json::array();
    for (const EvalRow& row : r.rows) {
        json jr;
        jr["model"] = row.model;
        jr["projection"] = row.projection;
        jr["per_epsilon"] = json::array();
        for (const EpsilonResult& res : row.per_epsilon) {
            json je;
            je["epsilon"] = res.epsilon;
            je["ssd"] = aggregate_to_json(res.ssd_agg);
            je["overlap_error"] = aggregate_to_json(res.overlap_agg);
            je["records"] = json::array();
            for (const SecondRecord& rec : res.records) {
                je["records"].push_back({{"clip", rec.clip_id},
                                         {"second", rec.second},
                                         {"ssd", rec.ssd_values},
                                         {"overlap_error", rec.overlap},
                                         {"misses", rec.misses},
                                         {"false_alarms", rec.false_alarms}});
            }
            jr["per_epsilon"].push_back(std::move(je));
        }
        j["rows"].push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

std::string report_to_table(const EvalReport& r) {
    std::ostringstream out;
    auto cell = [](const std::optional<Aggregate>& a) {
        if (!a) return std::string("      --     ");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f +- %.2f", a->mean, a->std_seconds);
        return std::string(buf);
    };
    out << "Scores: mean +- population std over matched seconds\n";
    char header[256];
    std::snprintf(header, sizeof(header), "%-14s|", "Models");
    out << header;
    for (const char* metric : {"360-SSD", "360-OvErr"}) {
        for (double eps : r.epsilons) {
            char h[64];
            std::snprintf(h, sizeof(h), " %s e=%.1f |", metric, eps);
            out << h;
        }
    }
    out << "\n";
    for (const EvalRow& row : r.rows) {
        std::string label = row.model + "-" + row.projection;
        char lab[64];
        std::snprintf(lab, sizeof(lab), "%-14s|", label.c_str());
        out << lab;
        for (int metric = 0; metric < 2; ++metric) {
            for (const EpsilonResult& res : row.per_epsilon) {
                out << " " << cell(metric == 0 ? res.ssd_agg : res.overlap_agg) << " |";
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace ambisphere
