#include "ambisphere/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ambisphere {

namespace {

double wrap_phi(double phi) {
    // into (-pi, pi]
    double p = std::fmod(phi + kPi, 2.0 * kPi);
    if (p <= 0.0) p += 2.0 * kPi;
    return p - kPi;
}

}  // namespace

SphericalDirection SphericalDirection::normalized(double phi, double theta) {
    if (!std::isfinite(phi) || !std::isfinite(theta)) {
        throw std::domain_error("SphericalDirection: non-finite angles");
    }
    // Fold theta into [-pi, pi] first, then reflect across the poles.
    double t = std::fmod(theta, 2.0 * kPi);
    if (t > kPi) t -= 2.0 * kPi;
    if (t < -kPi) t += 2.0 * kPi;
    if (t > kPi / 2.0) {
        t = kPi - t;
        phi += kPi;
    } else if (t < -kPi / 2.0) {
        t = -kPi - t;
        phi += kPi;
    }
    return {wrap_phi(phi), t};
}

Vec3 to_unit_vector(const SphericalDirection& s) {
    const double ct = std::cos(s.theta);
    return {std::cos(s.phi) * ct, std::sin(s.phi) * ct, std::sin(s.theta)};
}

SphericalDirection from_unit_vector(const Vec3& v) {
    if (v.norm() < 1e-12) {
        throw std::domain_error("from_unit_vector: zero-length vector");
    }
    const double phi = std::atan2(v.y, v.x);
    const double theta = std::atan2(v.z, std::hypot(v.x, v.y));
    return SphericalDirection::normalized(phi, theta);
}

double angle_between(const Vec3& a, const Vec3& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-12 || nb < 1e-12) {
        throw std::domain_error("angle_between: zero-length vector");
    }
    const double c = std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
    return std::acos(c);
}

std::string to_string(Projection p) {
    switch (p) {
        case Projection::Equirect: return "equirect";
        case Projection::Cubemap3x2: return "cubemap3x2";
    }
    throw std::logic_error("unreachable");
}

Projection projection_from_string(const std::string& s) {
    if (s == "equirect") return Projection::Equirect;
    if (s == "cubemap3x2") return Projection::Cubemap3x2;
    throw std::invalid_argument("unknown projection: " + s);
}

SphericalDirection equirect_to_sphere(PixelCoord p, ImageDims d) {
    if (d.width <= 0 || d.height <= 0) {
        throw std::invalid_argument("equirect_to_sphere: non-positive dims");
    }
    if (p.x < 0.0 || p.x >= d.width || p.y < 0.0 || p.y >= d.height) {
        throw std::out_of_range("equirect_to_sphere: pixel outside image bounds");
    }
    const double phi = 2.0 * kPi * (p.x + 0.5) / d.width - kPi;
    const double theta = kPi / 2.0 - kPi * (p.y + 0.5) / d.height;
    return SphericalDirection::normalized(phi, theta);
}

PixelCoord sphere_to_equirect(SphericalDirection s, ImageDims d) {
    if (d.width <= 0 || d.height <= 0) {
        throw std::invalid_argument("sphere_to_equirect: non-positive dims");
    }
    s = SphericalDirection::normalized(s.phi, s.theta);
    double x = (s.phi + kPi) * d.width / (2.0 * kPi) - 0.5;
    if (x < 0.0) x += d.width;  // phi just above -pi wraps to the right edge
    double y = (kPi / 2.0 - s.theta) * d.height / kPi - 0.5;
    x = std::clamp(x, 0.0, std::nexttoward(static_cast<double>(d.width), 0.0));
    y = std::clamp(y, 0.0, std::nexttoward(static_cast<double>(d.height), 0.0));
    return {x, y};
}

namespace {

// Cube of half-extent 1. Face-local a = 2u-1, b = 2v-1; b grows downward in
// the face image, so equator faces map b to -Z.
Vec3 face_point(CubeFace face, double a, double b) {
    switch (face) {
        case CubeFace::Front:  return {1.0, -a, -b};
        case CubeFace::Right:  return {-a, -1.0, -b};
        case CubeFace::Back:   return {-1.0, a, -b};
        case CubeFace::Left:   return {a, 1.0, -b};
        case CubeFace::Top:    return {b, -a, 1.0};
        case CubeFace::Bottom: return {-b, -a, -1.0};
    }
    throw std::invalid_argument("invalid cube face id");
}

constexpr double kUvMax = 0x1.fffffffffffffp-1;  // largest double below 1

}  // namespace

SphericalDirection cubemap_to_sphere(CubeFace face, double u, double v) {
    const int f = static_cast<int>(face);
    if (f < 0 || f > 5) throw std::invalid_argument("invalid cube face id");
    if (u < 0.0 || u >= 1.0 || v < 0.0 || v >= 1.0) {
        throw std::out_of_range("cubemap_to_sphere: (u,v) outside [0,1)");
    }
    return from_unit_vector(face_point(face, 2.0 * u - 1.0, 2.0 * v - 1.0));
}

CubemapCoord sphere_to_cubemap(SphericalDirection s) {
    const Vec3 p = to_unit_vector(s);
    // Signed component along each face's outward axis, in tie-break order.
    const std::array<double, 6> axis = {p.x, -p.y, -p.x, p.y, p.z, -p.z};
    const double m = *std::max_element(axis.begin(), axis.end());
    int f = 0;
    while (axis[static_cast<size_t>(f)] != m) ++f;

    double a = 0.0;
    double b = 0.0;
    switch (static_cast<CubeFace>(f)) {
        case CubeFace::Front:  a = -p.y / m; b = -p.z / m; break;
        case CubeFace::Right:  a = -p.x / m; b = -p.z / m; break;
        case CubeFace::Back:   a = p.y / m; b = -p.z / m; break;
        case CubeFace::Left:   a = p.x / m; b = -p.z / m; break;
        case CubeFace::Top:    a = -p.y / m; b = p.x / m; break;
        case CubeFace::Bottom: a = -p.y / m; b = -p.x / m; break;
    }
    const double u = std::clamp((a + 1.0) / 2.0, 0.0, kUvMax);
    const double v = std::clamp((b + 1.0) / 2.0, 0.0, kUvMax);
    return {static_cast<CubeFace>(f), u, v};
}

namespace {

int atlas_face_size(ImageDims d) {
    if (d.width <= 0 || d.height <= 0 || d.width % 3 != 0 || d.height % 2 != 0 ||
        d.width / 3 != d.height / 2) {
        throw std::invalid_argument("cubemap atlas dims must be (3*face, 2*face)");
    }
    return d.width / 3;
}

}  // namespace

SphericalDirection pixel_to_direction(PixelCoord p, Projection proj, ImageDims d) {
    if (proj == Projection::Equirect) return equirect_to_sphere(p, d);
    const int fs = atlas_face_size(d);
    if (p.x < 0.0 || p.x >= d.width || p.y < 0.0 || p.y >= d.height) {
        throw std::out_of_range("pixel_to_direction: pixel outside atlas bounds");
    }
    const double px = (p.x + 0.5) / fs;
    const double py = (p.y + 0.5) / fs;
    const int col = std::min(static_cast<int>(px), 2);
    const int row = std::min(static_cast<int>(py), 1);
    const double u = std::clamp(px - col, 0.0, kUvMax);
    const double v = std::clamp(py - row, 0.0, kUvMax);
    return cubemap_to_sphere(static_cast<CubeFace>(row * 3 + col), u, v);
}

PixelCoord direction_to_pixel(SphericalDirection s, Projection proj, ImageDims d) {
    if (proj == Projection::Equirect) return sphere_to_equirect(s, d);
    const int fs = atlas_face_size(d);
    const CubemapCoord c = sphere_to_cubemap(s);
    const int f = static_cast<int>(c.face);
    double x = (f % 3 + c.u) * fs - 0.5;
    double y = (f / 3 + c.v) * fs - 0.5;
    if (x < 0.0) x = 0.0;
    x = std::min(x, std::nexttoward(static_cast<double>(d.width), 0.0));
    y = std::clamp(y, 0.0, std::nexttoward(static_cast<double>(d.height), 0.0));
    return {x, y};
}

PlanarProbMap PlanarProbMap::zeros(int rows, int cols, Projection proj) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("PlanarProbMap: non-positive dims");
    PlanarProbMap m;
    m.rows = rows;
    m.cols = cols;
    m.projection = proj;
    m.values.assign(static_cast<size_t>(rows) * cols, 0.0);
    return m;
}

SphericalDirection map_cell_direction(const PlanarProbMap& m, int row, int col) {
    if (row < 0 || row >= m.rows || col < 0 || col >= m.cols) {
        throw std::out_of_range("map_cell_direction: cell outside grid");
    }
    if (m.projection == Projection::Equirect) {
        return equirect_to_sphere({static_cast<double>(col), static_cast<double>(row)},
                                  {m.cols, m.rows});
    }
    // Atlas cell center in face units; route through the containing face.
    const double cx = (col + 0.5) * 3.0 / m.cols;
    const double cy = (row + 0.5) * 2.0 / m.rows;
    const int fcol = std::min(static_cast<int>(cx), 2);
    const int frow = std::min(static_cast<int>(cy), 1);
    return cubemap_to_sphere(static_cast<CubeFace>(frow * 3 + fcol),
                             std::clamp(cx - fcol, 0.0, kUvMax),
                             std::clamp(cy - frow, 0.0, kUvMax));
}

int map_cell_of_direction(SphericalDirection s, Projection proj, int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("map grid dims must be positive");
    if (proj == Projection::Equirect) {
        const PixelCoord p = sphere_to_equirect(s, {cols, rows});
        int col = static_cast<int>(std::floor(p.x + 0.5));
        if (col >= cols) col -= cols;  // seam wrap
        int row = std::clamp(static_cast<int>(std::floor(p.y + 0.5)), 0, rows - 1);
        return row * cols + col;
    }
    const CubemapCoord c = sphere_to_cubemap(s);
    const int f = static_cast<int>(c.face);
    const double cx = (f % 3 + c.u) / 3.0;
    const double cy = (f / 3 + c.v) / 2.0;
    const int col = std::min(static_cast<int>(cx * cols), cols - 1);
    const int row = std::min(static_cast<int>(cy * rows), rows - 1);
    return row * cols + col;
}

std::vector<SphereSample> map_to_sphere_samples(const PlanarProbMap& m) {
    std::vector<SphereSample> out;
    out.reserve(m.values.size());
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            out.push_back({map_cell_direction(m, r, c), m.at(r, c)});
        }
    }
    return out;
}

}  // namespace ambisphere
