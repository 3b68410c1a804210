#pragma once

// Numerical metrology for maps: Holder/Lipschitz seminorms, moduli of
// continuity, Sobolev energies and distances, distortion, Jacobians, and
// the analytic inequality checks. Sampled seminorms are lower bounds of the
// true seminorms, so every inequality here is tested one-sided (a reported
// violation is a true violation).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "homeo.hpp"
#include "parallel.hpp"
#include "sampling.hpp"

namespace entrolab {

inline constexpr double kLip = 1.0;  // exponent value standing for alpha = Lip

struct SeminormReport {
    double alpha = 1.0;
    bool lipschitz = false;
    double value = 0.0;
    Vec2 arg_x, arg_y;          // attaining pair
    size_t pair_count = 0;
    size_t skipped = 0;         // coincident pairs
    std::map<int, double> scale_histogram;  // decade of |x-y| -> max quotient

    double quotient_at(const std::function<Vec2(Vec2)>& f) const {
        double d = dist(arg_x, arg_y);
        return d > 0.0 ? dist(f(arg_x), f(arg_y)) / std::pow(d, alpha) : 0.0;
    }
};

namespace detail {

template <typename F>
SeminormReport seminorm_over_pairs(const F& f, double alpha,
                                   const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                   int workers) {
    SeminormReport rep;
    rep.alpha = alpha;
    rep.lipschitz = alpha == 1.0;
    rep.pair_count = pairs.size();
    std::vector<double> q(pairs.size(), -1.0);
    parallel_for(pairs.size(), workers, [&](size_t i) {
        double d = dist(pairs[i].first, pairs[i].second);
        if (d <= 0.0) return;
        q[i] = dist(f(pairs[i].first), f(pairs[i].second)) / std::pow(d, alpha);
    });
    for (size_t i = 0; i < pairs.size(); ++i) {
        if (q[i] < 0.0) { ++rep.skipped; continue; }
        double d = dist(pairs[i].first, pairs[i].second);
        int decade = static_cast<int>(std::floor(std::log10(d)));
        auto it = rep.scale_histogram.find(decade);
        if (it == rep.scale_histogram.end() || it->second < q[i])
            rep.scale_histogram[decade] = q[i];
        if (q[i] > rep.value) {
            rep.value = q[i];
            rep.arg_x = pairs[i].first;
            rep.arg_y = pairs[i].second;
        }
    }
    return rep;
}

template <typename F>
SeminormReport seminorm_impl(const F& f, double alpha, const SamplingPlan& plan,
                             int workers) {
    auto pairs = plan.point_pairs();
    if (pairs.size() < 1) throw std::invalid_argument("holder_seminorm: plan has < 2 points");
    SeminormReport rep = seminorm_over_pairs(f, alpha, pairs, workers);
    // zoom around the maximizer: fresh pair clouds at shrinking scales
    for (int round = 0; round < plan.zoom_rounds; ++round) {
        double d = dist(rep.arg_x, rep.arg_y);
        if (d <= 0.0) break;
        Vec2 c = 0.5 * (rep.arg_x + rep.arg_y);
        double s = 2.0 * d;
        SamplingPlan zoom = SamplingPlan::pairs(
            Rect{c.x - s, c.y - s, c.x + s, c.y + s},
            std::max(1000, plan.pair_count / 4), plan.seed + 101 + round);
        zoom.min_sep = d * 1e-3;
        zoom.max_sep = s;
        SeminormReport r2 = seminorm_over_pairs(f, alpha, zoom.point_pairs(), workers);
        if (r2.value > rep.value) {
            rep.value = r2.value;
            rep.arg_x = r2.arg_x;
            rep.arg_y = r2.arg_y;
        }
        rep.pair_count += r2.pair_count;
    }
    return rep;
}

}  // namespace detail

// Max over sampled pairs of |m(x)-m(y)| / |x-y|^alpha (alpha = 1: Lipschitz).
inline SeminormReport holder_seminorm(const HomeoExpr& m, double alpha,
                                      const SamplingPlan& plan, int workers = 1) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("holder_seminorm: alpha must be in (0,1]");
    return detail::seminorm_impl([&](Vec2 x) { return m.eval(x); }, alpha, plan, workers);
}

inline SeminormReport holder_seminorm_inv(const HomeoExpr& m, double alpha,
                                          const SamplingPlan& plan, int workers = 1) {
    return detail::seminorm_impl([&](Vec2 x) { return m.eval_inv(x); }, alpha, plan, workers);
}

// ||f-g||_C0 + [f-g]_alpha over the plan (alpha = 0: plain C0 distance).
inline double holder_distance(const HomeoExpr& f, const HomeoExpr& g, double alpha,
                              const SamplingPlan& plan, int workers = 1) {
    auto diff = [&](Vec2 x) { return f.eval(x) - g.eval(x); };
    auto pts = plan.points();
    std::vector<double> c0(pts.size(), 0.0);
    parallel_for(pts.size(), workers, [&](size_t i) { c0[i] = norm(diff(pts[i])); });
    double sup = 0.0;
    for (double v : c0) sup = std::max(sup, v);
    if (alpha <= 0.0) return sup;
    SeminormReport rep = detail::seminorm_impl(diff, alpha, plan, workers);
    return sup + rep.value;
}

// Per-radius local seminorms [m]_{alpha, B(x,r)}.
inline std::vector<double> little_holder_profile(const HomeoExpr& m, double alpha,
                                                 Vec2 x, const std::vector<double>& radii,
                                                 int pairs_per_radius = 4000,
                                                 uint64_t seed = 0) {
    std::vector<double> out;
    out.reserve(radii.size());
    for (size_t i = 0; i < radii.size(); ++i) {
        double r = radii[i];
        if (!(r > 0.0)) throw std::invalid_argument("little_holder_profile: r must be > 0");
        Rng rng(seed + i);
        double best = 0.0;
        for (int k = 0; k < pairs_per_radius; ++k) {
            double t1 = rng.uniform(0.0, 2.0 * M_PI), r1 = r * std::sqrt(rng.uniform());
            double t2 = rng.uniform(0.0, 2.0 * M_PI), r2 = r * std::sqrt(rng.uniform());
            Vec2 a = x + r1 * Vec2{std::cos(t1), std::sin(t1)};
            Vec2 b = x + r2 * Vec2{std::cos(t2), std::sin(t2)};
            double d = dist(a, b);
            if (d <= 0.0) continue;
            best = std::max(best, dist(m.eval(a), m.eval(b)) / std::pow(d, alpha));
        }
        out.push_back(best);
    }
    return out;
}

// --------------------------------------------------------------- gradients

struct Jet {
    Mat2 df;       // finite-difference Jacobian
    bool one_sided = false;
};

namespace detail {

inline int piece_signature(const std::vector<Region>& pieces, Vec2 x) {
    int sig = 0;
    for (size_t i = 0; i < pieces.size(); ++i)
        if (region_contains(pieces[i], x)) sig |= 1 << (i % 30);
    return sig;
}

template <typename F>
Jet fd_jacobian(const F& f, Vec2 x, double h, const std::vector<Region>& pieces) {
    Jet jet;
    Vec2 cols[2];
    int sig = pieces.empty() ? 0 : piece_signature(pieces, x);
    for (int axis = 0; axis < 2; ++axis) {
        Vec2 e = axis == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
        bool plus_ok = pieces.empty() || piece_signature(pieces, x + e) == sig;
        bool minus_ok = pieces.empty() || piece_signature(pieces, x - e) == sig;
        if (plus_ok && minus_ok) {
            cols[axis] = (f(x + e) - f(x - e)) / (2.0 * h);
        } else if (minus_ok) {
            cols[axis] = (f(x) - f(x - e)) / h;
            jet.one_sided = true;
        } else {
            cols[axis] = (f(x + e) - f(x)) / h;
            jet.one_sided = true;
        }
    }
    jet.df = {cols[0].x, cols[1].x, cols[0].y, cols[1].y};
    return jet;
}

}  // namespace detail

// Piece regions whose boundaries carry derivative discontinuities.
inline std::vector<Region> piece_regions(const HomeoExpr& m) {
    std::vector<Region> out;
    if (m.kind() == NodeKind::Piecewise) {
        const auto& pw = static_cast<const PiecewiseNode&>(m.node());
        for (const auto& [reg, sub] : pw.parts) out.push_back(reg);
    } else if (m.node().support) {
        out.push_back(*m.node().support);
    }
    return out;
}

struct EnergyReport {
    double p = 2.0;
    double h = 1e-2;
    double e_p = 0.0;       // integral of |grad u|^p + |grad v|^p
    double df_p = 0.0;      // integral of |Df|^p, |Df| = sum |d_j f_i|
    double jacobian_integral = 0.0;
    size_t cells = 0;
    size_t one_sided_cells = 0;

    static double cp(double p) { return std::pow(2.0, 1.5 * p); }
    bool double_inequality_holds(double slack = 1e-9) const {
        return e_p <= df_p + slack && df_p <= cp(p) * e_p + slack;
    }
};

// Midpoint-rule energies of m over the rectangle at grid step h. Central
// differences, one-sided inside a 2h collar of declared piece boundaries.
inline EnergyReport sobolev_energy(const HomeoExpr& m, double p, Rect dom, double h,
                                   int workers = 1) {
    if (!(p >= 1.0)) throw std::invalid_argument("sobolev_energy: need p >= 1");
    if (!(h > 0.0)) throw std::invalid_argument("sobolev_energy: need h > 0");
    auto pieces = piece_regions(m);
    int nx = std::max(1, static_cast<int>(std::lround(dom.width() / h)));
    int ny = std::max(1, static_cast<int>(std::lround(dom.height() / h)));
    double hx = dom.width() / nx, hy = dom.height() / ny;
    EnergyReport rep;
    rep.p = p;
    rep.h = h;
    rep.cells = static_cast<size_t>(nx) * ny;
    std::vector<std::array<double, 4>> cell(rep.cells);  // e_p, df_p, jac, one_sided
    parallel_for(rep.cells, workers, [&](size_t idx) {
        int j = static_cast<int>(idx) / nx, i = static_cast<int>(idx) % nx;
        Vec2 x{dom.x0 + (i + 0.5) * hx, dom.y0 + (j + 0.5) * hy};
        Jet jet = detail::fd_jacobian([&](Vec2 z) { return m.eval(z); }, x,
                                      0.5 * std::min(hx, hy), pieces);
        double gu = std::hypot(jet.df.a, jet.df.b);
        double gv = std::hypot(jet.df.c, jet.df.d);
        cell[idx] = {std::pow(gu, p) + std::pow(gv, p),
                     std::pow(jet.df.entry_sum_norm(), p), jet.df.det(),
                     jet.one_sided ? 1.0 : 0.0};
        if (!std::isfinite(cell[idx][0]) || !std::isfinite(cell[idx][1]))
            throw std::domain_error("sobolev_energy: non-finite difference quotient");
    });
    double area = hx * hy;
    for (const auto& c : cell) {
        rep.e_p += c[0] * area;
        rep.df_p += c[1] * area;
        rep.jacobian_integral += c[2] * area;
        rep.one_sided_cells += c[3] > 0.0 ? 1 : 0;
    }
    return rep;
}

// rho(f,g) = ||f-g||_{W^{1,p}} + ||f^{-1}-g^{-1}||_{W^{1,p*}} over dom.
inline double sobolev_distance(const HomeoExpr& f, const HomeoExpr& g, double p,
                               double pstar, Rect dom, double h, int workers = 1) {
    auto pieces = piece_regions(f);
    auto pieces_g = piece_regions(g);
    pieces.insert(pieces.end(), pieces_g.begin(), pieces_g.end());
    int nx = std::max(1, static_cast<int>(std::lround(dom.width() / h)));
    int ny = std::max(1, static_cast<int>(std::lround(dom.height() / h)));
    double hx = dom.width() / nx, hy = dom.height() / ny;
    size_t cells = static_cast<size_t>(nx) * ny;
    std::vector<std::array<double, 4>> acc(cells);  // c0, dpow, c0_inv, dpow_inv
    parallel_for(cells, workers, [&](size_t idx) {
        int j = static_cast<int>(idx) / nx, i = static_cast<int>(idx) % nx;
        Vec2 x{dom.x0 + (i + 0.5) * hx, dom.y0 + (j + 0.5) * hy};
        double step = 0.5 * std::min(hx, hy);
        Jet jf = detail::fd_jacobian([&](Vec2 z) { return f.eval(z); }, x, step, pieces);
        Jet jg = detail::fd_jacobian([&](Vec2 z) { return g.eval(z); }, x, step, pieces);
        Mat2 d{jf.df.a - jg.df.a, jf.df.b - jg.df.b, jf.df.c - jg.df.c, jf.df.d - jg.df.d};
        Jet jfi = detail::fd_jacobian([&](Vec2 z) { return f.eval_inv(z); }, x, step, pieces);
        Jet jgi = detail::fd_jacobian([&](Vec2 z) { return g.eval_inv(z); }, x, step, pieces);
        Mat2 di{jfi.df.a - jgi.df.a, jfi.df.b - jgi.df.b, jfi.df.c - jgi.df.c,
                jfi.df.d - jgi.df.d};
        acc[idx] = {norm(f.eval(x) - g.eval(x)), std::pow(d.entry_sum_norm(), p),
                    norm(f.eval_inv(x) - g.eval_inv(x)),
                    std::pow(di.entry_sum_norm(), pstar)};
    });
    double c0 = 0.0, dp = 0.0, c0i = 0.0, dpi = 0.0, area = hx * hy;
    for (const auto& a : acc) {
        c0 = std::max(c0, a[0]);
        dp += a[1] * area;
        c0i = std::max(c0i, a[2]);
        dpi += a[3] * area;
    }
    return c0 + std::pow(dp, 1.0 / p) + c0i + std::pow(dpi, 1.0 / pstar);
}

// ------------------------------------------------------------- distortion

struct DistortionReport {
    double h = 1e-2;
    double max_k = 1.0;
    double mean_k = 1.0;
    size_t cells = 0;
    size_t flagged = 0;  // cells where |f_z| - |f_zbar| <= tolerance
    bool finite_distortion() const { return flagged == 0; }
};

// K = (|f_z| + |f_zbar|) / (|f_z| - |f_zbar|) from finite-difference
// Wirtinger derivatives of the real 2x2 Jacobian.
inline DistortionReport distortion_field(const HomeoExpr& m, Rect dom, double h,
                                         double denom_tol = 1e-9, int workers = 1) {
    auto pieces = piece_regions(m);
    int nx = std::max(1, static_cast<int>(std::lround(dom.width() / h)));
    int ny = std::max(1, static_cast<int>(std::lround(dom.height() / h)));
    double hx = dom.width() / nx, hy = dom.height() / ny;
    DistortionReport rep;
    rep.h = h;
    rep.cells = static_cast<size_t>(nx) * ny;
    std::vector<std::array<double, 2>> cell(rep.cells);  // K, flagged
    parallel_for(rep.cells, workers, [&](size_t idx) {
        int j = static_cast<int>(idx) / nx, i = static_cast<int>(idx) % nx;
        Vec2 x{dom.x0 + (i + 0.5) * hx, dom.y0 + (j + 0.5) * hy};
        Jet jet = detail::fd_jacobian([&](Vec2 z) { return m.eval(z); }, x,
                                      0.5 * std::min(hx, hy), pieces);
        double ux = jet.df.a, uy = jet.df.b, vx = jet.df.c, vy = jet.df.d;
        double fz = 0.5 * std::hypot(ux + vy, vx - uy);
        double fzb = 0.5 * std::hypot(ux - vy, vx + uy);
        double denom = fz - fzb;
        if (denom <= denom_tol) cell[idx] = {std::numeric_limits<double>::infinity(), 1.0};
        else cell[idx] = {(fz + fzb) / denom, 0.0};
    });
    double sum = 0.0;
    for (const auto& c : cell) {
        if (c[1] > 0.0) { ++rep.flagged; continue; }
        rep.max_k = std::max(rep.max_k, c[0]);
        sum += c[0];
    }
    rep.mean_k = rep.cells > rep.flagged ? sum / (rep.cells - rep.flagged) : 0.0;
    return rep;
}

// |J_m| <= d! |Dm|^d at every grid cell (d = 2).
inline bool jacobian_bound_check(const HomeoExpr& m, Rect dom, double h,
                                 double slack = 1e-9, int workers = 1) {
    auto pieces = piece_regions(m);
    int nx = std::max(1, static_cast<int>(std::lround(dom.width() / h)));
    int ny = std::max(1, static_cast<int>(std::lround(dom.height() / h)));
    double hx = dom.width() / nx, hy = dom.height() / ny;
    size_t cells = static_cast<size_t>(nx) * ny;
    std::vector<char> ok(cells, 1);
    parallel_for(cells, workers, [&](size_t idx) {
        int j = static_cast<int>(idx) / nx, i = static_cast<int>(idx) % nx;
        Vec2 x{dom.x0 + (i + 0.5) * hx, dom.y0 + (j + 0.5) * hy};
        Jet jet = detail::fd_jacobian([&](Vec2 z) { return m.eval(z); }, x,
                                      0.5 * std::min(hx, hy), pieces);
        double n = jet.df.entry_sum_norm();
        ok[idx] = std::fabs(jet.df.det()) <= 2.0 * n * n + slack ? 1 : 0;
    });
    for (char c : ok)
        if (!c) return false;
    return true;
}

// |m(z)-m(w)|^2 <= 2 pi (int_{2D} |Dm|^2) / log(e + diam(D)/|z-w|) for
// sampled pairs in the disk D. Returns pass flag and the worst LHS/RHS ratio.
inline std::pair<bool, double> energy_modulus_check(const HomeoExpr& m, Ball d,
                                                    int pair_count, uint64_t seed,
                                                    double grid_h, int workers = 1) {
    Ball d2{d.center, 2.0 * d.r};
    Rect bb{d2.center.x - d2.r, d2.center.y - d2.r, d2.center.x + d2.r, d2.center.y + d2.r};
    auto pieces = piece_regions(m);
    int n = std::max(2, static_cast<int>(std::lround(2.0 * d2.r / grid_h)));
    double hx = 2.0 * d2.r / n;
    std::vector<double> contrib(static_cast<size_t>(n) * n, 0.0);
    parallel_for(contrib.size(), workers, [&](size_t idx) {
        int j = static_cast<int>(idx) / n, i = static_cast<int>(idx) % n;
        Vec2 x{bb.x0 + (i + 0.5) * hx, bb.y0 + (j + 0.5) * hx};
        if (!d2.contains(x)) return;
        Jet jet = detail::fd_jacobian([&](Vec2 z) { return m.eval(z); }, x, 0.5 * hx, pieces);
        double nrm = jet.df.entry_sum_norm();
        contrib[idx] = nrm * nrm * hx * hx;
    });
    double integral = 0.0;
    for (double c : contrib) integral += c;

    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < pair_count; ++k) {
        double t1 = rng.uniform(0.0, 2.0 * M_PI), r1 = d.r * std::sqrt(rng.uniform());
        double t2 = rng.uniform(0.0, 2.0 * M_PI), r2 = d.r * std::sqrt(rng.uniform());
        Vec2 z = d.center + r1 * Vec2{std::cos(t1), std::sin(t1)};
        Vec2 w = d.center + r2 * Vec2{std::cos(t2), std::sin(t2)};
        double sep = dist(z, w);
        if (sep <= 0.0) continue;
        double lhs = norm2(m.eval(z) - m.eval(w));
        double rhs = 2.0 * M_PI * integral / std::log(M_E + 2.0 * d.r / sep);
        worst = std::max(worst, lhs / rhs);
    }
    return {worst <= 1.0 + 1e-9, worst};
}

// E_1(m^{-1} on m(D)) <= 4 Area(D)^{1-1/p} E_p(m on D)^{1/p}, with numeric
// tolerance. Returns pass flag and the slack (rhs - lhs)/rhs.
inline std::pair<bool, double> inverse_energy_check(const HomeoExpr& m, Rect dom,
                                                    double p, double h,
                                                    double tol = 0.05,
                                                    int workers = 1) {
    EnergyReport fwd = sobolev_energy(m, p, dom, h, workers);
    // bounding box of the image by mapping the boundary
    Rect ib{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            -std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
    int nb = 256;
    for (int i = 0; i < nb; ++i) {
        double t = static_cast<double>(i) / nb;
        for (Vec2 x : {Vec2{dom.x0 + t * dom.width(), dom.y0},
                       Vec2{dom.x0 + t * dom.width(), dom.y1},
                       Vec2{dom.x0, dom.y0 + t * dom.height()},
                       Vec2{dom.x1, dom.y0 + t * dom.height()}}) {
            Vec2 y = m.eval(x);
            ib.x0 = std::min(ib.x0, y.x);
            ib.y0 = std::min(ib.y0, y.y);
            ib.x1 = std::max(ib.x1, y.x);
            ib.y1 = std::max(ib.y1, y.y);
        }
    }
    auto pieces = piece_regions(m);
    int nx = std::max(2, static_cast<int>(std::lround(ib.width() / h)));
    int ny = std::max(2, static_cast<int>(std::lround(ib.height() / h)));
    double hx = ib.width() / nx, hy = ib.height() / ny;
    std::vector<double> contrib(static_cast<size_t>(nx) * ny, 0.0);
    parallel_for(contrib.size(), workers, [&](size_t idx) {
        int j = static_cast<int>(idx) / nx, i = static_cast<int>(idx) % nx;
        Vec2 y{ib.x0 + (i + 0.5) * hx, ib.y0 + (j + 0.5) * hy};
        Vec2 x = m.eval_inv(y);
        if (!dom.contains(x)) return;  // outside m(D)
        Jet jet = detail::fd_jacobian([&](Vec2 z) { return m.eval_inv(z); }, y,
                                      0.5 * std::min(hx, hy), pieces);
        double gu = std::hypot(jet.df.a, jet.df.b);
        double gv = std::hypot(jet.df.c, jet.df.d);
        contrib[idx] = (gu + gv) * hx * hy;
    });
    double e1_inv = 0.0;
    for (double c : contrib) e1_inv += c;
    double area = dom.width() * dom.height();
    double rhs = 4.0 * std::pow(area, 1.0 - 1.0 / p) * std::pow(fwd.e_p, 1.0 / p);
    double slack = (rhs - e1_inv) / rhs;
    return {e1_inv <= rhs * (1.0 + tol), slack};
}

// Sampled [phi1 o f o phi0^{-1}]_alpha <= [phi1]_Lip [f]_beta
// [phi0^{-1}]_Lip^beta diam(dom0)^{beta-alpha} + slack.
inline bool rescaling_bound_check(const HomeoExpr& f, const HomeoExpr& phi0,
                                  const HomeoExpr& phi1, double alpha, double beta,
                                  Rect dom, Rect dom0, int pair_count = 20000,
                                  uint64_t seed = 0, int workers = 1) {
    SamplingPlan plan0 = SamplingPlan::pairs(dom0, pair_count, seed);
    SamplingPlan plan = SamplingPlan::pairs(dom, pair_count, seed + 1);
    auto conj = [&](Vec2 x) { return phi1.eval(f.eval(phi0.eval_inv(x))); };
    SeminormReport lhs = detail::seminorm_impl(conj, alpha, plan0, workers);
    SeminormReport f_beta = detail::seminorm_impl(
        [&](Vec2 x) { return f.eval(x); }, beta, plan, workers);
    SeminormReport p1_lip = detail::seminorm_impl(
        [&](Vec2 x) { return phi1.eval(x); }, 1.0, plan, workers);
    SeminormReport p0i_lip = detail::seminorm_impl(
        [&](Vec2 x) { return phi0.eval_inv(x); }, 1.0, plan0, workers);
    double rhs = p1_lip.value * f_beta.value * std::pow(p0i_lip.value, beta) *
                 std::pow(dom0.diam(), beta - alpha);
    return lhs.value <= rhs + 1e-9;
}

// [glued]_alpha <= K(alpha,kappa) max per-piece seminorm; reports the
// empirical K.
inline std::pair<bool, double> gluing_bound_check(const HomeoExpr& glued, double alpha,
                                                  Rect dom, int pair_count = 20000,
                                                  uint64_t seed = 0, int workers = 1) {
    SamplingPlan whole = SamplingPlan::pairs(dom, pair_count, seed);
    SeminormReport total = holder_seminorm(glued, alpha, whole, workers);
    auto pieces = piece_regions(glued);
    double piece_max = 0.0;
    if (pieces.empty()) {
        piece_max = total.value;
    } else {
        for (const Region& reg : pieces) {
            Rect bb = region_bbox(reg);
            SamplingPlan p = SamplingPlan::pairs(bb, pair_count / 2, seed + 7);
            SeminormReport r = holder_seminorm(glued, alpha, p, workers);
            piece_max = std::max(piece_max, r.value);
        }
        // the complement piece: pairs over the whole domain avoiding the regions
        auto prs = whole.point_pairs();
        std::vector<std::pair<Vec2, Vec2>> outside;
        for (auto& pr : prs) {
            bool in = false;
            for (const Region& reg : pieces)
                if (region_contains(reg, pr.first) || region_contains(reg, pr.second))
                    in = true;
            if (!in) outside.push_back(pr);
        }
        if (!outside.empty()) {
            SeminormReport r = detail::seminorm_over_pairs(
                [&](Vec2 x) { return glued.eval(x); }, alpha, outside, workers);
            piece_max = std::max(piece_max, r.value);
        }
    }
    if (piece_max <= 0.0) return {true, 1.0};
    return {std::isfinite(total.value / piece_max), total.value / piece_max};
}

}  // namespace entrolab
