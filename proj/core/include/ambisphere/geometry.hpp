#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ambisphere {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// Direction on the unit sphere. Azimuth phi in (-pi, pi], positive toward
/// the viewer's left (+Y); elevation theta in [-pi/2, pi/2], positive up.
struct SphericalDirection {
    double phi = 0.0;
    double theta = 0.0;

    /// Folds any finite angle pair into the canonical ranges. Elevations
    /// beyond a pole reflect across it and rotate phi by pi.
    static SphericalDirection normalized(double phi, double theta);
};

/// Unit vector (cos phi cos theta, sin phi cos theta, sin theta).
Vec3 to_unit_vector(const SphericalDirection& s);

/// Inverse of to_unit_vector for any nonzero vector (not necessarily unit).
/// Throws std::domain_error when |v| is below 1e-12.
SphericalDirection from_unit_vector(const Vec3& v);

/// Angle in radians between the directions of two nonzero vectors.
double angle_between(const Vec3& a, const Vec3& b);

struct ImageDims {
    int width = 0;
    int height = 0;
};

/// Continuous pixel units; pixel i is centered at coordinate i, so valid
/// coordinates live in [-0.5, dims-0.5). Bounds checks below use [0, dims).
struct PixelCoord {
    double x = 0.0;
    double y = 0.0;
};

enum class Projection {
    Equirect,
    Cubemap3x2,
};

std::string to_string(Projection p);
Projection projection_from_string(const std::string& s);

/// Atlas is a fixed 3x2 grid, row-major [front, right, back, left, top, bottom].
enum class CubeFace : int {
    Front = 0,
    Right = 1,
    Back = 2,
    Left = 3,
    Top = 4,
    Bottom = 5,
};

struct CubemapCoord {
    CubeFace face = CubeFace::Front;
    double u = 0.0;  // in [0, 1)
    double v = 0.0;  // in [0, 1)
};

SphericalDirection equirect_to_sphere(PixelCoord p, ImageDims d);
PixelCoord sphere_to_equirect(SphericalDirection s, ImageDims d);

SphericalDirection cubemap_to_sphere(CubeFace face, double u, double v);

/// Face chosen by the dominant axis of the unit vector; exact ties broken by
/// face order front > right > back > left > top > bottom.
CubemapCoord sphere_to_cubemap(SphericalDirection s);

/// Direction of a pixel center under either projection. For the cubemap the
/// image must be a 3x2 atlas (width = 3*face, height = 2*face).
SphericalDirection pixel_to_direction(PixelCoord p, Projection proj, ImageDims d);
PixelCoord direction_to_pixel(SphericalDirection s, Projection proj, ImageDims d);

/// Planar probability map emitted by a prediction head, before any spherical
/// mapping. Prediction heads always emit 7x7 grids; the type is generic so
/// small fixtures stay cheap to write.
struct PlanarProbMap {
    int rows = 0;
    int cols = 0;
    Projection projection = Projection::Equirect;
    std::vector<double> values;  // row-major, in [0, 1]

    double at(int r, int c) const { return values[static_cast<size_t>(r) * cols + c]; }
    double& at(int r, int c) { return values[static_cast<size_t>(r) * cols + c]; }

    static PlanarProbMap zeros(int rows, int cols, Projection proj);
};

/// Direction of the center of map cell (row, col) under the map's projection.
SphericalDirection map_cell_direction(const PlanarProbMap& m, int row, int col);

/// Linear index (row*cols + col) of the map cell containing the given direction.
int map_cell_of_direction(SphericalDirection s, Projection proj, int rows, int cols);

struct SphereSample {
    SphericalDirection direction;
    double probability = 0.0;
};

/// One sample per map cell at the cell-center direction; probabilities pass
/// through unchanged.
std::vector<SphereSample> map_to_sphere_samples(const PlanarProbMap& m);

}  // namespace ambisphere
