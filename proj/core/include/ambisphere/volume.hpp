#pragma once

#include <cstddef>
#include <vector>

#include "ambisphere/geometry.hpp"

namespace ambisphere {

/// Voxelized probability mass over the cube [-0.5, 0.5]^3. Voxels whose
/// center lies outside the radius-0.5 ball are always 0. Storage is
/// x-fastest: index = x + R*(y + R*z), matching the on-disk layout.
struct ProbabilityVolume {
    int resolution = 0;
    std::vector<float> voxels;

    static ProbabilityVolume zeros(int resolution);

    size_t index(int x, int y, int z) const {
        return static_cast<size_t>(x) +
               static_cast<size_t>(resolution) * (static_cast<size_t>(y) +
               static_cast<size_t>(resolution) * static_cast<size_t>(z));
    }
    float at(int x, int y, int z) const { return voxels[index(x, y, z)]; }
    float& at(int x, int y, int z) { return voxels[index(x, y, z)]; }
};

/// Center of voxel (x, y, z): each component is -0.5 + (i + 0.5)/R.
Vec3 voxel_center(int resolution, int x, int y, int z);

/// True when the point lies inside or on the radius-0.5 ball.
bool in_ball(const Vec3& p);

/// Extends a planar map radially: every in-ball voxel takes the map value of
/// the cell its direction projects into, so values are constant along rays.
/// The voxel at the exact origin (odd R) stays 0. Throws for R < 8.
ProbabilityVolume lift_to_volume(const PlanarProbMap& m, int resolution);

/// Keeps values strictly greater than epsilon; everything <= epsilon becomes 0.
ProbabilityVolume threshold(const ProbabilityVolume& v, double epsilon);

/// 26-connected component of nonzero voxels with its probability-weighted
/// centroid. Voxel indices are ascending; the centroid sum runs in that order.
struct SourceRegion {
    std::vector<size_t> voxel_indices;
    double mass = 0.0;
    Vec3 centroid;
};

/// Connected components of the nonzero voxel set, ordered by descending mass,
/// ties by smallest linear voxel index. Empty volume yields an empty list.
std::vector<SourceRegion> extract_sources(const ProbabilityVolume& v);

/// Eq.-style direction of a region centroid. Throws std::domain_error when
/// the centroid is within 1e-6 of the origin (antipodally symmetric region).
SphericalDirection region_direction(const SourceRegion& r);

/// Ground-truth construction: each annotated pixel becomes a value-1 spherical
/// cone of angular radius `spread_rad`; the result is the union over sources.
ProbabilityVolume annotation_to_volume(const std::vector<PixelCoord>& sources,
                                       Projection proj, ImageDims dims,
                                       int resolution, double spread_rad);

/// Direction + mass view of a region, the hand-off into the encoder.
struct SourceEstimate {
    SphericalDirection direction;
    double mass = 0.0;
};

SourceEstimate to_source_estimate(const SourceRegion& r);

}  // namespace ambisphere
