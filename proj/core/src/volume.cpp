#include "ambisphere/volume.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ambisphere {

ProbabilityVolume ProbabilityVolume::zeros(int resolution) {
    if (resolution <= 0) throw std::invalid_argument("volume resolution must be positive");
    ProbabilityVolume v;
    v.resolution = resolution;
    v.voxels.assign(static_cast<size_t>(resolution) * resolution * resolution, 0.0f);
    return v;
}

Vec3 voxel_center(int resolution, int x, int y, int z) {
    const double r = resolution;
    return {-0.5 + (x + 0.5) / r, -0.5 + (y + 0.5) / r, -0.5 + (z + 0.5) / r};
}

bool in_ball(const Vec3& p) { return p.x * p.x + p.y * p.y + p.z * p.z <= 0.25; }

ProbabilityVolume lift_to_volume(const PlanarProbMap& m, int resolution) {
    if (resolution < 8) throw std::invalid_argument("lift_to_volume: resolution < 8 is degenerate");
    for (double v : m.values) {
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("lift_to_volume: map values outside [0,1]");
    }
    ProbabilityVolume out = ProbabilityVolume::zeros(resolution);
    const int R = resolution;
    for (int z = 0; z < R; ++z) {
        for (int y = 0; y < R; ++y) {
            for (int x = 0; x < R; ++x) {
                const Vec3 q = voxel_center(R, x, y, z);
                if (!in_ball(q)) continue;
                if (q.norm() < 1e-15) continue;  // origin voxel stays 0
                const SphericalDirection d = from_unit_vector(q);
                const int cell = map_cell_of_direction(d, m.projection, m.rows, m.cols);
                out.at(x, y, z) = static_cast<float>(m.values[static_cast<size_t>(cell)]);
            }
        }
    }
    return out;
}

ProbabilityVolume threshold(const ProbabilityVolume& v, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("threshold: epsilon outside [0,1]");
    }
    ProbabilityVolume out = v;
    for (float& p : out.voxels) {
        if (!(p > epsilon)) p = 0.0f;
    }
    return out;
}

std::vector<SourceRegion> extract_sources(const ProbabilityVolume& v) {
    const int R = v.resolution;
    const size_t n = v.voxels.size();
    std::vector<char> visited(n, 0);
    std::vector<SourceRegion> regions;

    std::vector<size_t> stack;
    for (size_t seed = 0; seed < n; ++seed) {
        if (visited[seed] || v.voxels[seed] == 0.0f) continue;
        // flood fill over the 26-neighborhood
        SourceRegion region;
        stack.clear();
        stack.push_back(seed);
        visited[seed] = 1;
        while (!stack.empty()) {
            const size_t idx = stack.back();
            stack.pop_back();
            region.voxel_indices.push_back(idx);
            const int x = static_cast<int>(idx % R);
            const int y = static_cast<int>((idx / R) % R);
            const int z = static_cast<int>(idx / (static_cast<size_t>(R) * R));
            for (int dz = -1; dz <= 1; ++dz) {
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0 && dz == 0) continue;
                        const int nx = x + dx, ny = y + dy, nz = z + dz;
                        if (nx < 0 || nx >= R || ny < 0 || ny >= R || nz < 0 || nz >= R) continue;
                        const size_t nidx = v.index(nx, ny, nz);
                        if (!visited[nidx] && v.voxels[nidx] != 0.0f) {
                            visited[nidx] = 1;
                            stack.push_back(nidx);
                        }
                    }
                }
            }
        }
        std::sort(region.voxel_indices.begin(), region.voxel_indices.end());
        double mass = 0.0;
        Vec3 acc;
        for (size_t idx : region.voxel_indices) {
            const double p = v.voxels[idx];
            const int x = static_cast<int>(idx % R);
            const int y = static_cast<int>((idx / R) % R);
            const int z = static_cast<int>(idx / (static_cast<size_t>(R) * R));
            const Vec3 q = voxel_center(R, x, y, z);
            acc = acc + p * q;
            mass += p;
        }
        region.mass = mass;
        region.centroid = (1.0 / mass) * acc;
        regions.push_back(std::move(region));
    }

    std::sort(regions.begin(), regions.end(), [](const SourceRegion& a, const SourceRegion& b) {
        if (a.mass != b.mass) return a.mass > b.mass;
        return a.voxel_indices.front() < b.voxel_indices.front();
    });
    return regions;
}

SphericalDirection region_direction(const SourceRegion& r) {
    const Vec3& c = r.centroid;
    if (c.norm() <= 1e-6) {
        throw std::domain_error("region_direction: centroid degenerate (at origin)");
    }
    const double phi = std::atan2(c.y, c.x);
    const double theta = std::atan2(c.z, std::hypot(c.x, c.y));
    return SphericalDirection::normalized(phi, theta);
}

ProbabilityVolume annotation_to_volume(const std::vector<PixelCoord>& sources,
                                       Projection proj, ImageDims dims,
                                       int resolution, double spread_rad) {
    if (resolution < 8) {
        throw std::invalid_argument("annotation_to_volume: resolution < 8 is degenerate");
    }
    ProbabilityVolume out = ProbabilityVolume::zeros(resolution);
    std::vector<Vec3> dirs;
    dirs.reserve(sources.size());
    for (const PixelCoord& p : sources) {
        dirs.push_back(to_unit_vector(pixel_to_direction(p, proj, dims)));
    }
    if (dirs.empty()) return out;
    const double cos_spread = std::cos(spread_rad);
    const int R = resolution;
    for (int z = 0; z < R; ++z) {
        for (int y = 0; y < R; ++y) {
            for (int x = 0; x < R; ++x) {
                const Vec3 q = voxel_center(R, x, y, z);
                if (!in_ball(q)) continue;
                const double n = q.norm();
                if (n < 1e-15) continue;
                for (const Vec3& d : dirs) {
                    if (dot(q, d) / n >= cos_spread) {
                        out.at(x, y, z) = 1.0f;
                        break;
                    }
                }
            }
        }
    }
    return out;
}

SourceEstimate to_source_estimate(const SourceRegion& r) {
    return {region_direction(r), r.mass};
}

}  // namespace ambisphere
