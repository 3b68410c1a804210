#pragma once

// N-branched horseshoe homeomorphisms and sampled verification of the
// cylinder-crossing conditions (1)-(4).
//
// Construction (in a normalized unit frame, conjugated into the requested
// square or cylinder): the core is the horizontal cylinder
// [0.2,0.8] x [0.4,0.6]. It is split into N axial slices separated by thin
// gaps. A column map sorts each slice to its own transverse level, then a
// row map stretches it across the full core length plus a protrusion. Both
// stages are piecewise-linear triangular maps, so the composite has an
// exact closed-form inverse and Lipschitz constant Theta(N).

#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "homeo.hpp"

namespace entrolab {

struct HorseshoeSpec {
    int branches = 2;
    Rect support_box;                  // bounding box of the conjugated support
    SolidCylinder core;                // core cylinder in world coordinates
    std::vector<SolidCylinder> strips; // N disjoint sub-cylinders of the core
};

struct CrossingCertificate {
    std::array<bool, 4> conditions{false, false, false, false};
    double resolution = 1e-3;  // sampling step relative to target diameter
    double margin = 0.0;       // minimum clearance observed (world units)

    bool pass() const {
        return conditions[0] && conditions[1] && conditions[2] && conditions[3] &&
               margin > 0.0;
    }
};

namespace hs {

// unit-frame layout constants
inline constexpr double kCoreX0 = 0.2, kCoreX1 = 0.8;
inline constexpr double kCoreY0 = 0.4, kCoreY1 = 0.6;
inline constexpr double kGapTotal = 0.03;
inline constexpr double kOvershoot = 0.01;    // protrusion beyond the core ends
inline constexpr double kSpread = 0.12;       // total transverse spread of levels
inline constexpr double kRampX0 = 0.1, kRampX1 = 0.9;  // column-map taper zone
inline constexpr double kRowEdge0 = 0.02, kRowEdge1 = 0.98;

struct Layout {
    int n = 2;
    double sigma = 0.0;              // slice width
    double gamma = 0.0;              // gap width
    double w1 = 0.0;                 // image band halfwidth
    std::vector<double> a;           // slice left edges
    std::vector<double> y;           // band levels

    explicit Layout(int n_) : n(n_) {
        if (n < 1) throw std::invalid_argument("horseshoe: need N >= 1");
        double span = kCoreX1 - kCoreX0;
        gamma = n > 1 ? kGapTotal / (n - 1) : 0.0;
        sigma = (span - (n - 1) * gamma) / n;
        w1 = 0.3 * kSpread / n;
        a.resize(n);
        y.resize(n);
        for (int k = 0; k < n; ++k) {
            a[k] = kCoreX0 + k * (sigma + gamma);
            y[k] = 0.5 + kSpread * (2.0 * (k + 1) - n - 1) / (2.0 * n);
        }
    }

    double stretch() const { return (kCoreX1 - kCoreX0 + 2.0 * kOvershoot) / sigma; }

    // column map: transverse band (center, halfwidth) as a function of x
    void band_at(double x, double& eta, double& w) const {
        if (x <= kRampX0 || x >= kRampX1) { eta = 0.5; w = 0.1; return; }
        if (x < kCoreX0) {
            double t = (x - kRampX0) / (kCoreX0 - kRampX0);
            eta = 0.5 + t * (y[0] - 0.5);
            w = 0.1 + t * (w1 - 0.1);
            return;
        }
        if (x > kCoreX1) {
            double t = (kRampX1 - x) / (kRampX1 - kCoreX1);
            eta = 0.5 + t * (y[n - 1] - 0.5);
            w = 0.1 + t * (w1 - 0.1);
            return;
        }
        for (int k = 0; k < n; ++k) {
            if (x <= a[k] + sigma) { eta = y[k]; w = w1; return; }
            if (k + 1 < n && x < a[k + 1]) {
                double t = (x - (a[k] + sigma)) / gamma;
                eta = y[k] + t * (y[k + 1] - y[k]);
                w = w1;
                return;
            }
        }
        eta = y[n - 1];
        w = w1;
    }

    // row map: source slice window [l, l + sigma] as a function of y;
    // identity rows have window equal to the image span.
    static constexpr double kImg0 = kCoreX0 - kOvershoot;
    static constexpr double kImg1 = kCoreX1 + kOvershoot;

    bool window_at(double yy, double& l) const {
        double lo_taper = y[0] - 3.0 * w1;
        double hi_taper = y[n - 1] + 3.0 * w1;
        if (yy <= lo_taper || yy >= hi_taper) return false;  // identity row
        if (yy < y[0] - w1) {
            double t = (yy - lo_taper) / (2.0 * w1);
            l = kImg0 + t * (a[0] - kImg0);
            return true;
        }
        if (yy > y[n - 1] + w1) {
            double t = (hi_taper - yy) / (2.0 * w1);
            l = kImg0 + t * (a[n - 1] - kImg0);
            return true;
        }
        for (int k = 0; k < n; ++k) {
            if (yy <= y[k] + w1) {
                if (yy >= y[k] - w1) { l = a[k]; return true; }
                double t = (yy - (y[k - 1] + w1)) / (y[k] - y[k - 1] - 2.0 * w1);
                l = a[k - 1] + t * (a[k] - a[k - 1]);
                return true;
            }
        }
        l = a[n - 1];
        return true;
    }
};

// piecewise-linear increasing map through the given knots, and its inverse
inline double pl_map(double t, const double* xs, const double* ys, int count) {
    if (t <= xs[0]) return ys[0] + (t - xs[0]);
    if (t >= xs[count - 1]) return ys[count - 1] + (t - xs[count - 1]);
    for (int i = 1; i < count; ++i)
        if (t <= xs[i])
            return ys[i - 1] + (t - xs[i - 1]) * (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
    return t;
}

}  // namespace hs

struct HorseshoeNode final : MapNode {
    hs::Layout layout;
    Mat2 frame;       // unit -> world
    Vec2 frame_off;
    Mat2 frame_inv;
    HorseshoeSpec spec;

    HorseshoeNode(int n, Mat2 f, Vec2 off) : layout(n), frame(f), frame_off(off),
                                             frame_inv(f.inverse()) {
        spec.branches = n;
        Vec2 ca = to_world({hs::kCoreX0, 0.5});
        Vec2 cb = to_world({hs::kCoreX1, 0.5});
        double rho = 0.1 * norm(frame.apply({0.0, 1.0}));
        spec.core = SolidCylinder(ca, cb, rho);
        double span = hs::kCoreX1 - hs::kCoreX0;
        for (int k = 0; k < n; ++k) {
            double t0 = (layout.a[k] - hs::kCoreX0) / span;
            double t1 = t0 + layout.sigma / span;
            spec.strips.push_back(spec.core.axial_slice(t0, t1));
        }
        Vec2 c0 = to_world({0, 0}), c1 = to_world({1, 0}), c2 = to_world({0, 1}),
             c3 = to_world({1, 1});
        spec.support_box = {std::min({c0.x, c1.x, c2.x, c3.x}),
                            std::min({c0.y, c1.y, c2.y, c3.y}),
                            std::max({c0.x, c1.x, c2.x, c3.x}),
                            std::max({c0.y, c1.y, c2.y, c3.y})};
        support = spec.support_box;
        declared_lip = 4.0 + 15.0 * n;  // coarse analytic bound, tests measure
    }

    NodeKind kind() const override { return NodeKind::Horseshoe; }

    Vec2 to_world(Vec2 u) const { return frame.apply(u) + frame_off; }
    Vec2 to_unit(Vec2 x) const { return frame_inv.apply(x - frame_off); }

    // stage 1: column map (x fixed, piecewise-linear in y)
    double stage1(double x, double y, bool forward) const {
        double eta, w;
        layout.band_at(x, eta, w);
        const double xs[4] = {0.0, hs::kCoreY0, hs::kCoreY1, 1.0};
        const double ys[4] = {0.0, eta - w, eta + w, 1.0};
        return forward ? hs::pl_map(y, xs, ys, 4) : hs::pl_map(y, ys, xs, 4);
    }

    // stage 2: row map (y fixed, piecewise-linear in x)
    double stage2(double y, double x, bool forward) const {
        double l;
        if (!layout.window_at(y, l)) return x;
        const double xs[4] = {hs::kRowEdge0, l, l + layout.sigma, hs::kRowEdge1};
        const double ys[4] = {hs::kRowEdge0, hs::Layout::kImg0, hs::Layout::kImg1,
                              hs::kRowEdge1};
        return forward ? hs::pl_map(x, xs, ys, 4) : hs::pl_map(x, ys, xs, 4);
    }

    Vec2 eval(Vec2 p) const override {
        Vec2 u = to_unit(p);
        if (u.x <= 0.0 || u.x >= 1.0 || u.y <= 0.0 || u.y >= 1.0) return p;
        u.y = stage1(u.x, u.y, true);
        u.x = stage2(u.y, u.x, true);
        return to_world(u);
    }
    Vec2 eval_inv(Vec2 p) const override {
        Vec2 u = to_unit(p);
        if (u.x <= 0.0 || u.x >= 1.0 || u.y <= 0.0 || u.y >= 1.0) return p;
        u.x = stage2(u.y, u.x, false);
        u.y = stage1(u.x, u.y, false);
        return to_world(u);
    }
};

struct HorseshoeResult {
    HomeoExpr map;
    HorseshoeSpec spec;
};

// Lipschitz homeomorphism of the plane, identity outside the square R,
// whose N strips each map across the core cylinder.
inline HorseshoeResult make_horseshoe(int n, const Rect& r) {
    if (n < 1) throw std::invalid_argument("make_horseshoe: need N >= 1");
    Mat2 f = Mat2::diag(r.width(), r.height());
    auto node = std::make_shared<HorseshoeNode>(n, f, Vec2{r.x0, r.y0});
    HorseshoeResult out{HomeoExpr(node), node->spec};
    return out;
}

// Horseshoe whose core is the given cylinder; support stays inside the
// elongated neighbourhood E(a,b;3*rho) when len(C) <= 48 rho.
inline HorseshoeResult make_horseshoe_on(const SolidCylinder& c, int n) {
    if (n < 1) throw std::invalid_argument("make_horseshoe_on: need N >= 1");
    Vec2 e = c.axis_dir();
    double sx = c.len() / (hs::kCoreX1 - hs::kCoreX0);
    double sy = c.rad() / 0.1;
    Mat2 rot{e.x, -e.y, e.y, e.x};
    Mat2 f = rot.mul(Mat2::diag(sx, sy));
    Vec2 off = c.center() - f.apply({0.5, 0.5});
    auto node = std::make_shared<HorseshoeNode>(n, f, off);
    return {HomeoExpr(node), node->spec};
}

// ------------------------------------------------------------ certificates

inline double dist_to_rect_boundary_outside(const SolidCylinder& t, Vec2 p) {
    // positive distance to the closed cylinder when outside, else negative
    Vec2 f = t.to_frame(p);
    double hu = 0.5 * t.len(), hw = t.rad();
    double du = (std::fabs(f.x) - 1.0) * hu;
    double dw = (std::fabs(f.y) - 1.0) * hw;
    if (du <= 0.0 && dw <= 0.0) return std::max(du, dw);  // inside (negative)
    if (du > 0.0 && dw > 0.0) return std::hypot(du, dw);
    return std::max(du, dw);
}

// Sampled verification of the crossing conditions for m applied to the
// marked cylinder C against `target`, at resolution h (relative to the
// target diameter).
inline CrossingCertificate check_crossing(const HomeoExpr& m, const SolidCylinder& C,
                                          const SolidCylinder& target,
                                          double h = 1e-3) {
    if (!(h > 0.0)) throw std::invalid_argument("check_crossing: h must be > 0");
    if (target.rad() >= 0.5 * target.len())
        throw std::invalid_argument("check_crossing: degenerate target (rho >= len/2)");

    CrossingCertificate cert;
    cert.resolution = h;
    double h_abs = h * 2.0 * target.circumradius();

    double hu = 0.5 * target.len();
    Vec2 te = target.axis_dir();
    Vec2 tn = perp(te);
    Vec2 lat_a0 = target.a + target.rad() * tn, lat_a1 = target.b + target.rad() * tn;
    Vec2 lat_b0 = target.a - target.rad() * tn, lat_b1 = target.b - target.rad() * tn;

    double perimeter = 2.0 * (C.len() + 2.0 * C.rad());
    int nb = std::max(64, std::min(40000, static_cast<int>(perimeter / h_abs)));

    bool meets = false;
    double margin1 = -std::numeric_limits<double>::infinity();
    double margin2 = std::numeric_limits<double>::infinity();

    auto visit = [&](Vec2 x) {
        Vec2 y = m.eval(x);
        Vec2 f = target.to_frame(y);
        double inside = std::min((1.0 - std::fabs(f.x)) * hu,
                                 (1.0 - std::fabs(f.y)) * target.rad());
        if (inside > 0.0) meets = true;
        margin1 = std::max(margin1, inside);
        double dl = std::min(dist_to_segment(y, lat_a0, lat_a1),
                             dist_to_segment(y, lat_b0, lat_b1));
        margin2 = std::min(margin2, dl);
    };
    for (Vec2 x : C.sample_boundary(nb)) visit(x);
    for (Vec2 x : C.sample_interior(24)) visit(x);

    cert.conditions[0] = meets;
    cert.conditions[1] = margin2 > 0.0;

    int nm = std::max(16, std::min(8000, static_cast<int>(2.0 * C.rad() / h_abs)));
    double margin3 = std::numeric_limits<double>::infinity();
    bool cond4 = true;
    double margin4 = std::numeric_limits<double>::infinity();
    for (int sign : {-1, +1}) {
        for (Vec2 x : C.sample_mark(sign, nm)) {
            Vec2 y = m.eval(x);
            margin3 = std::min(margin3, dist_to_rect_boundary_outside(target, y));
            double u = target.to_frame(y).x;
            double excess = (std::fabs(u) - 1.0) * hu;
            if (!(excess > h_abs) || (u > 0.0 ? +1 : -1) != sign) cond4 = false;
            margin4 = std::min(margin4, excess);
        }
    }
    cert.conditions[2] = margin3 > 0.0;
    cert.conditions[3] = cond4;
    cert.margin = std::min({meets ? margin1 : -1.0, margin2, margin3, margin4});
    return cert;
}

// True iff all N strip certificates pass; second component is the entropy
// lower bound log N.
inline std::pair<bool, double> branch_certificate(const HomeoExpr& m,
                                                  const HorseshoeSpec& spec,
                                                  double h = 1e-3) {
    for (const SolidCylinder& strip : spec.strips) {
        CrossingCertificate c = check_crossing(m, strip, spec.core, h);
        if (!c.pass()) return {false, 0.0};
    }
    return {true, std::log(static_cast<double>(spec.branches))};
}

}  // namespace entrolab
