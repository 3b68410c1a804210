#pragma once

// Planar geometric primitives: points, balls, elongated neighbourhoods,
// solid cylinders (rectangles with marked end faces in d = 2), Hausdorff
// distance and well-positioned ratios on sample clouds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace entrolab {

inline constexpr int kDim = 2;  // runtime dimension; formulas stay generic

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double& operator[](int i) { return i == 0 ? x : y; }
    double operator[](int i) const { return i == 0 ? x : y; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a = a + b; return a; }
inline Vec2& operator-=(Vec2& a, Vec2 b) { a = a - b; return a; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline bool finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return a / n;
}

struct Mat2 {
    // row-major [[a, b], [c, d]]
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const {
        double dt = det();
        if (dt == 0.0) throw std::invalid_argument("Mat2::inverse: singular");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Mat2 mul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    // entry-sum norm |A| = sum |a_ij|
    double entry_sum_norm() const {
        return std::fabs(a) + std::fabs(b) + std::fabs(c) + std::fabs(d);
    }
    // operator norm (largest singular value)
    double op_norm() const {
        double q = a * a + b * b + c * c + d * d;
        double dt = det();
        double disc = std::max(0.0, q * q - 4.0 * dt * dt);
        return std::sqrt(0.5 * (q + std::sqrt(disc)));
    }
    static Mat2 rotation(double angle) {
        double co = std::cos(angle), si = std::sin(angle);
        return {co, -si, si, co};
    }
    static Mat2 diag(double sx, double sy) { return {sx, 0.0, 0.0, sy}; }
};

// Distance from x to the closed segment [p,q], three-case orthogonal
// projection.
inline double dist_to_segment(Vec2 x, Vec2 p, Vec2 q) {
    Vec2 d = q - p;
    double l2 = norm2(d);
    if (l2 == 0.0) return dist(x, p);
    double t = dot(x - p, d) / l2;
    if (t <= 0.0) return dist(x, p);
    if (t >= 1.0) return dist(x, q);
    return dist(x, p + t * d);
}

struct Ball {
    Vec2 center;
    double r = 1.0;
    bool contains(Vec2 x) const { return dist(x, center) < r; }
};

// E(p,q;r): open r-neighbourhood of the segment [p,q].
struct ElongatedNbhd {
    Vec2 p, q;
    double r = 1.0;

    ElongatedNbhd() = default;
    ElongatedNbhd(Vec2 p_, Vec2 q_, double r_) : p(p_), q(q_), r(r_) {
        if (!(r > 0.0)) throw std::invalid_argument("ElongatedNbhd: r must be > 0");
    }
    bool contains(Vec2 x) const { return dist_to_segment(x, p, q) < r; }
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    double diam() const { return std::hypot(width(), height()); }
    bool contains(Vec2 v) const {
        return v.x > x0 && v.x < x1 && v.y > y0 && v.y < y1;
    }
    static Rect square(Vec2 center, double side) {
        double h = 0.5 * side;
        return {center.x - h, center.y - h, center.x + h, center.y + h};
    }
};

struct Annulus {
    Vec2 center;
    double r_in = 0.0, r_out = 1.0;
    bool contains(Vec2 x) const {
        double d = dist(x, center);
        return d > r_in && d < r_out;
    }
};

// Rigid solid cylinder C(a,b;rho): in d = 2 the rectangle of coaxial radius
// rho about the segment [a,b], with marked end faces C- (at a) and C+ (at b).
struct SolidCylinder {
    Vec2 a, b;
    double rho = 0.25;

    SolidCylinder() = default;
    SolidCylinder(Vec2 a_, Vec2 b_, double rho_) : a(a_), b(b_), rho(rho_) {
        if (!(rho > 0.0)) throw std::invalid_argument("SolidCylinder: rho must be > 0");
        if (dist(a, b) == 0.0) throw std::invalid_argument("SolidCylinder: a == b");
    }

    double len() const { return dist(a, b); }
    double rad() const { return rho; }
    Vec2 center() const { return 0.5 * (a + b); }
    Vec2 axis_dir() const { return normalized(b - a); }
    double circumradius() const { return std::hypot(0.5 * len(), rho); }

    // Straightened coordinates: u axial in [-1,1] over the cylinder, w
    // transverse in units of rho.
    Vec2 to_frame(Vec2 x) const {
        Vec2 e = axis_dir();
        Vec2 rel = x - center();
        return {dot(rel, e) / (0.5 * len()), dot(rel, perp(e)) / rho};
    }
    Vec2 from_frame(Vec2 f) const {
        Vec2 e = axis_dir();
        return center() + (f.x * 0.5 * len()) * e + (f.y * rho) * perp(e);
    }

    bool contains(Vec2 x) const {
        Vec2 f = to_frame(x);
        return std::fabs(f.x) < 1.0 && std::fabs(f.y) < 1.0;
    }
    bool contains_closed(Vec2 x, double tol = 0.0) const {
        Vec2 f = to_frame(x);
        double su = 0.5 * len(), sw = rho;
        return std::fabs(f.x) * su <= su + tol && std::fabs(f.y) * sw <= sw + tol;
    }

    // Marked end faces: segments through a (minus) and b (plus), orthogonal
    // to the axis, of half-length rho.
    std::vector<Vec2> sample_mark(int sign, int count) const {
        Vec2 e = perp(axis_dir());
        Vec2 base = sign < 0 ? a : b;
        std::vector<Vec2> pts;
        pts.reserve(count);
        for (int i = 0; i < count; ++i) {
            double t = count == 1 ? 0.0 : -1.0 + 2.0 * i / (count - 1);
            pts.push_back(base + (t * rho) * e);
        }
        return pts;
    }

    std::vector<Vec2> sample_boundary(int count) const {
        std::vector<Vec2> pts;
        pts.reserve(count);
        for (int i = 0; i < count; ++i) {
            double t = static_cast<double>(i) / count;  // param around perimeter
            Vec2 f;
            if (t < 0.25) f = {-1.0 + 8.0 * t, -1.0};
            else if (t < 0.5) f = {1.0, -1.0 + 8.0 * (t - 0.25)};
            else if (t < 0.75) f = {1.0 - 8.0 * (t - 0.5), 1.0};
            else f = {-1.0, 1.0 - 8.0 * (t - 0.75)};
            pts.push_back(from_frame(f));
        }
        return pts;
    }

    std::vector<Vec2> sample_interior(int per_axis) const {
        std::vector<Vec2> pts;
        pts.reserve(per_axis * per_axis);
        for (int i = 0; i < per_axis; ++i)
            for (int j = 0; j < per_axis; ++j) {
                double u = -1.0 + 2.0 * (i + 0.5) / per_axis;
                double w = -1.0 + 2.0 * (j + 0.5) / per_axis;
                pts.push_back(from_frame({u, w}));
            }
        return pts;
    }

    // Axial slice between fractions t0 < t1 of the axis, same radius.
    SolidCylinder axial_slice(double t0, double t1) const {
        Vec2 d = b - a;
        return SolidCylinder(a + t0 * d, a + t1 * d, rho);
    }
};

using Region = std::variant<Ball, ElongatedNbhd, Rect, SolidCylinder, Annulus>;

inline bool region_contains(const Region& r, Vec2 x) {
    return std::visit([&](const auto& g) { return g.contains(x); }, r);
}

inline double region_diam(const Region& r) {
    return std::visit(
        [](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ball>) return 2.0 * g.r;
            else if constexpr (std::is_same_v<T, ElongatedNbhd>) return dist(g.p, g.q) + 2.0 * g.r;
            else if constexpr (std::is_same_v<T, Rect>) return g.diam();
            else if constexpr (std::is_same_v<T, SolidCylinder>) return 2.0 * g.circumradius();
            else return 2.0 * g.r_out;
        },
        r);
}

inline Rect region_bbox(const Region& r) {
    return std::visit(
        [](const auto& g) -> Rect {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ball>)
                return {g.center.x - g.r, g.center.y - g.r, g.center.x + g.r, g.center.y + g.r};
            else if constexpr (std::is_same_v<T, ElongatedNbhd>)
                return {std::min(g.p.x, g.q.x) - g.r, std::min(g.p.y, g.q.y) - g.r,
                        std::max(g.p.x, g.q.x) + g.r, std::max(g.p.y, g.q.y) + g.r};
            else if constexpr (std::is_same_v<T, Rect>)
                return g;
            else if constexpr (std::is_same_v<T, SolidCylinder>) {
                double c = g.circumradius();
                Vec2 m = g.center();
                return {m.x - c, m.y - c, m.x + c, m.y + c};
            } else
                return {g.center.x - g.r_out, g.center.y - g.r_out,
                        g.center.x + g.r_out, g.center.y + g.r_out};
        },
        r);
}

// Grid cloud over the region's bounding box, filtered by membership.
inline std::vector<Vec2> region_cloud(const Region& r, double resolution) {
    Rect bb = region_bbox(r);
    double step = resolution * region_diam(r);
    if (!(step > 0.0)) throw std::invalid_argument("region_cloud: bad resolution");
    std::vector<Vec2> pts;
    for (double y = bb.y0 + 0.5 * step; y < bb.y1; y += step)
        for (double x = bb.x0 + 0.5 * step; x < bb.x1; x += step) {
            Vec2 v{x, y};
            if (region_contains(r, v)) pts.push_back(v);
        }
    return pts;
}

// Hausdorff distance between point clouds (max of directed sup-inf).
inline double hausdorff_distance(const std::vector<Vec2>& s0, const std::vector<Vec2>& s1) {
    if (s0.empty() || s1.empty())
        throw std::invalid_argument("hausdorff_distance: empty cloud");
    auto directed = [](const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
        double sup = 0.0;
        for (const Vec2& x : a) {
            double inf = std::numeric_limits<double>::infinity();
            for (const Vec2& y : b) inf = std::min(inf, dist(x, y));
            sup = std::max(sup, inf);
        }
        return sup;
    };
    return std::max(directed(s0, s1), directed(s1, s0));
}

inline double cloud_diam(const std::vector<Vec2>& s) {
    double d = 0.0;
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j) d = std::max(d, dist(s[i], s[j]));
    return d;
}

// Pairwise-disjoint bounded open regions with a sampled separation check.
struct RegionSet {
    std::vector<Region> regions;
    double resolution = 1e-3;  // geom_resolution, relative to region diameter

    void validate_disjoint() const {
        for (size_t i = 0; i < regions.size(); ++i) {
            auto ci = region_cloud(regions[i], std::max(resolution, 2e-2));
            for (size_t j = i + 1; j < regions.size(); ++j)
                for (const Vec2& p : ci)
                    if (region_contains(regions[j], p))
                        throw std::invalid_argument(
                            "RegionSet: regions " + std::to_string(i) + " and " +
                            std::to_string(j) + " overlap at sampled resolution");
        }
    }

    std::vector<std::vector<Vec2>> clouds() const {
        std::vector<std::vector<Vec2>> out;
        out.reserve(regions.size());
        for (const Region& r : regions) out.push_back(region_cloud(r, std::max(resolution, 1e-2)));
        return out;
    }
};

// max_m diam(Omega_m) / min_{i<j} dist_H(Omega_i, Omega_j) on sample clouds.
inline double well_positioned_ratio(const RegionSet& rs) {
    if (rs.regions.size() < 2)
        throw std::invalid_argument("well_positioned_ratio: need at least two regions");
    rs.validate_disjoint();
    auto cls = rs.clouds();
    double max_diam = 0.0;
    for (const auto& c : cls) max_diam = std::max(max_diam, cloud_diam(c));
    double min_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < cls.size(); ++i)
        for (size_t j = i + 1; j < cls.size(); ++j)
            min_dist = std::min(min_dist, hausdorff_distance(cls[i], cls[j]));
    if (!(min_dist > 0.0))
        throw std::invalid_argument("well_positioned_ratio: regions touch at resolution");
    return max_diam / min_dist;
}

}  // namespace entrolab
