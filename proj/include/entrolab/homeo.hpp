#pragma once

// Composable two-sided-evaluable planar homeomorphisms: identity, affine
// maps, bump-flow moves (translation, rotation/twist, cylinder affinity),
// piecewise gluing over disjoint supports, composition and inversion.
//
// Flow moves are time-one maps of compactly supported vector fields.
// Translation and affinity flows integrate by fixed-step RK4 (inverse =
// reversed time). Twist flows preserve |x - center| exactly, so they
// evaluate in closed form: rotation by amount * profile(|x - center|).

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bump.hpp"
#include "geometry.hpp"
#include "rng.hpp"

namespace entrolab {

enum class NodeKind {
    Identity,
    Affine,
    TranslationFlow,
    Twist,
    AffinityFlow,
    Horseshoe,
    Piecewise,
    Compose,
    Inverse,
};

struct MapNode {
    virtual ~MapNode() = default;
    virtual NodeKind kind() const = 0;
    virtual Vec2 eval(Vec2 x) const = 0;
    virtual Vec2 eval_inv(Vec2 y) const = 0;

    std::optional<Region> support;       // declared support, if compact
    std::optional<double> declared_lip;  // analytic bound on [m]_Lip
    std::optional<double> declared_diff_lip;  // analytic bound on [m - id]_Lip
};

class HomeoExpr {
  public:
    HomeoExpr() = default;
    explicit HomeoExpr(std::shared_ptr<const MapNode> n) : node_(std::move(n)) {}

    bool valid() const { return static_cast<bool>(node_); }
    NodeKind kind() const { return node_->kind(); }
    const MapNode& node() const { return *node_; }
    const std::shared_ptr<const MapNode>& ptr() const { return node_; }

    Vec2 eval(Vec2 x) const {
        Vec2 y = node_->eval(x);
        if (!finite(y)) throw std::domain_error("HomeoExpr::eval: non-finite value");
        return y;
    }
    Vec2 eval_inv(Vec2 y) const {
        Vec2 x = node_->eval_inv(y);
        if (!finite(x)) throw std::domain_error("HomeoExpr::eval_inv: non-finite value");
        return x;
    }

  private:
    std::shared_ptr<const MapNode> node_;
};

// ---------------------------------------------------------------- nodes

struct IdentityNode final : MapNode {
    NodeKind kind() const override { return NodeKind::Identity; }
    Vec2 eval(Vec2 x) const override { return x; }
    Vec2 eval_inv(Vec2 y) const override { return y; }
};

struct AffineNode final : MapNode {
    Mat2 m;
    Vec2 offset;
    Mat2 minv;

    AffineNode(Mat2 m_, Vec2 off) : m(m_), offset(off), minv(m_.inverse()) {}
    NodeKind kind() const override { return NodeKind::Affine; }
    Vec2 eval(Vec2 x) const override { return m.apply(x) + offset; }
    Vec2 eval_inv(Vec2 y) const override { return minv.apply(y - offset); }
};

namespace detail {

template <typename Field>
inline Vec2 rk4(const Field& f, Vec2 x, int steps, double direction) {
    double h = direction / steps;
    for (int i = 0; i < steps; ++i) {
        Vec2 k1 = f(x);
        Vec2 k2 = f(x + (0.5 * h) * k1);
        Vec2 k3 = f(x + (0.5 * h) * k2);
        Vec2 k4 = f(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

}  // namespace detail

inline constexpr int kDefaultFlowSteps = 64;

// Time-one map of X(x) = bump(dist(x, [tube_a, tube_b])) * v. The bump tube
// may be longer than the displacement so that a prescribed set translates
// exactly (constant field along every stage point makes RK4 exact there).
struct TranslationFlowNode final : MapNode {
    Vec2 tube_a, tube_b;
    BumpProfile prof;
    Vec2 v;
    int steps = kDefaultFlowSteps;

    TranslationFlowNode(Vec2 ta, Vec2 tb, double r1, double r2, Vec2 v_, int steps_)
        : tube_a(ta), tube_b(tb), prof(r1, r2), v(v_), steps(steps_) {
        support = ElongatedNbhd(ta, tb, r2);
        double m = prof.slope_bound() * norm(v);
        declared_diff_lip = m * std::exp(m);
        declared_lip = 1.0 + *declared_diff_lip;
    }
    NodeKind kind() const override { return NodeKind::TranslationFlow; }
    Vec2 field(Vec2 x) const {
        return prof.value(dist_to_segment(x, tube_a, tube_b)) * v;
    }
    Vec2 eval(Vec2 x) const override {
        return detail::rk4([this](Vec2 p) { return field(p); }, x, steps, 1.0);
    }
    Vec2 eval_inv(Vec2 y) const override {
        return detail::rk4([this](Vec2 p) { return field(p); }, y, steps, -1.0);
    }
};

// Radial twist (r, theta) -> (r, theta + amount * profile(r)): exact
// rotation by `amount` on the plateau [plateau_lo, plateau_hi], identity
// outside (ramp_lo, ramp_hi). rotation_move is the case ramp_lo = 0.
struct TwistNode final : MapNode {
    Vec2 center;
    double amount = 0.0;
    double ramp_lo = 0.0, plateau_lo = 0.0;  // inner ramp (absent if equal)
    double plateau_hi = 1.0, ramp_hi = 2.0;  // outer ramp

    TwistNode(Vec2 c, double amt, double rl, double pl, double ph, double rh)
        : center(c), amount(amt), ramp_lo(rl), plateau_lo(pl), plateau_hi(ph), ramp_hi(rh) {
        if (!(plateau_hi < ramp_hi))
            throw std::invalid_argument("TwistNode: need plateau_hi < ramp_hi");
        if (ramp_lo > 0.0)
            support = Annulus{center, ramp_lo, ramp_hi};
        else
            support = Ball{center, ramp_hi};
        double outer = BumpProfile(plateau_hi, ramp_hi).slope_bound();
        double inner = plateau_lo > ramp_lo
                           ? 1.875 / (plateau_lo - ramp_lo)
                           : 0.0;
        // |grad angle| * radius + |angle| bounds the deviation from isometry
        declared_lip = 1.0 + std::fabs(amount) * (1.0 + std::max(outer, inner) * ramp_hi);
    }
    NodeKind kind() const override { return NodeKind::Twist; }

    double angle_at(double rho) const {
        double up = plateau_lo > ramp_lo ? quintic_ramp(rho, ramp_lo, plateau_lo) : 1.0;
        double down = rho <= plateau_hi
                          ? 1.0
                          : 1.0 - quintic_ramp(rho, plateau_hi, ramp_hi);
        return amount * up * down;
    }
    Vec2 rotate_about(Vec2 x, double sign) const {
        Vec2 rel = x - center;
        double rho = norm(rel);
        double th = sign * angle_at(rho);
        double co = std::cos(th), si = std::sin(th);
        return center + Vec2{co * rel.x - si * rel.y, si * rel.x + co * rel.y};
    }
    Vec2 eval(Vec2 x) const override { return rotate_about(x, 1.0); }
    Vec2 eval_inv(Vec2 y) const override { return rotate_about(y, -1.0); }
};

// Time-one map of X(x) = bump(dist(x, axis segment)) * M (x - center) with
// M = R diag(log_axial, log_trans) R^T in the cylinder frame. On the bump
// plateau this is the exact linear scaling by (e^{log_axial}, e^{log_trans}).
struct AffinityFlowNode final : MapNode {
    Vec2 center;
    Vec2 axis;  // unit
    double log_axial = 0.0, log_trans = 0.0;
    Vec2 seg_a, seg_b;
    BumpProfile prof;
    int steps = kDefaultFlowSteps;
    Mat2 gen;

    AffinityFlowNode(Vec2 c, Vec2 axis_unit, double la, double lt, Vec2 sa, Vec2 sb,
                     double r1, double r2, int steps_)
        : center(c), axis(axis_unit), log_axial(la), log_trans(lt),
          seg_a(sa), seg_b(sb), prof(r1, r2), steps(steps_) {
        Mat2 rot{axis.x, -axis.y, axis.y, axis.x};
        gen = rot.mul(Mat2::diag(la, lt)).mul(rot.inverse());
        support = ElongatedNbhd(sa, sb, r2);
        double scale = std::exp(std::max(std::fabs(la), std::fabs(lt)));
        declared_lip = scale * std::exp(prof.slope_bound() *
                                        std::max(std::fabs(la), std::fabs(lt)) *
                                        (dist(sa, sb) + 2.0 * r2));
    }
    NodeKind kind() const override { return NodeKind::AffinityFlow; }
    Vec2 field(Vec2 x) const {
        double b = prof.value(dist_to_segment(x, seg_a, seg_b));
        return b * gen.apply(x - center);
    }
    Vec2 eval(Vec2 x) const override {
        return detail::rk4([this](Vec2 p) { return field(p); }, x, steps, 1.0);
    }
    Vec2 eval_inv(Vec2 y) const override {
        return detail::rk4([this](Vec2 p) { return field(p); }, y, steps, -1.0);
    }
};

struct PiecewiseNode final : MapNode {
    std::vector<std::pair<Region, HomeoExpr>> parts;
    HomeoExpr fallback;

    NodeKind kind() const override { return NodeKind::Piecewise; }
    Vec2 eval(Vec2 x) const override {
        for (const auto& [reg, m] : parts)
            if (region_contains(reg, x)) return m.eval(x);
        return fallback.eval(x);
    }
    Vec2 eval_inv(Vec2 y) const override {
        // parts preserve their regions, so the inverse dispatches identically
        for (const auto& [reg, m] : parts)
            if (region_contains(reg, y)) return m.eval_inv(y);
        return fallback.eval_inv(y);
    }
};

struct ComposeNode final : MapNode {
    std::vector<HomeoExpr> children;  // compose({f, g}) = f after g

    NodeKind kind() const override { return NodeKind::Compose; }
    Vec2 eval(Vec2 x) const override {
        for (auto it = children.rbegin(); it != children.rend(); ++it) x = it->eval(x);
        return x;
    }
    Vec2 eval_inv(Vec2 y) const override {
        for (const auto& c : children) y = c.eval_inv(y);
        return y;
    }
};

struct InverseNode final : MapNode {
    HomeoExpr child;

    NodeKind kind() const override { return NodeKind::Inverse; }
    Vec2 eval(Vec2 x) const override { return child.eval_inv(x); }
    Vec2 eval_inv(Vec2 y) const override { return child.eval(y); }
};

// ----------------------------------------------------------- constructors

inline HomeoExpr identity() { return HomeoExpr(std::make_shared<IdentityNode>()); }

inline HomeoExpr affine(Mat2 m, Vec2 offset) {
    return HomeoExpr(std::make_shared<AffineNode>(m, offset));
}

inline HomeoExpr translation_flow(Vec2 tube_a, Vec2 tube_b, double r1, double r2,
                                  Vec2 v, int steps = kDefaultFlowSteps) {
    if (norm(v) == 0.0) return identity();
    return HomeoExpr(std::make_shared<TranslationFlowNode>(tube_a, tube_b, r1, r2, v, steps));
}

// Time-one bump flow sending p to q exactly, supported in E(p,q;r2).
inline HomeoExpr translation_move(Vec2 p, Vec2 q, double r1, double r2,
                                  int steps = kDefaultFlowSteps) {
    if (!(0.0 < r1 && r1 < r2))
        throw std::invalid_argument("translation_move: need 0 < r1 < r2");
    if (p.x == q.x && p.y == q.y) return identity();
    return translation_flow(p, q, r1, r2, q - p, steps);
}

// Translation by v that is exact on the ball B(m, s); support E(m, m+v; s+pad).
inline HomeoExpr exact_translation_on_ball(Vec2 m, double s, Vec2 v, double pad,
                                           int steps = kDefaultFlowSteps) {
    if (norm(v) == 0.0) return identity();
    if (!(pad > 0.0)) throw std::invalid_argument("exact_translation_on_ball: pad must be > 0");
    return translation_flow(m, m + v, s, s + pad, v, steps);
}

// Basic translation of a cylinder's neighbourhood to the origin. Exact
// translation by -c on all of E(0,c;r), r the least radius containing C;
// the bump tube runs along [-c, c] so every trajectory stays on the plateau.
inline HomeoExpr translate_to_origin(const SolidCylinder& C,
                                     int steps = kDefaultFlowSteps) {
    Vec2 c = C.center();
    if (norm(c) == 0.0) return identity();
    double r = 0.0;
    for (Vec2 corner : {C.from_frame({-1, -1}), C.from_frame({-1, 1}),
                        C.from_frame({1, -1}), C.from_frame({1, 1})})
        r = std::max(r, dist_to_segment(corner, {0, 0}, c));
    r = std::max(r, 1e-12);
    return translation_flow(-1.0 * c, c, r, r + norm(c), -1.0 * c, steps);
}

// Exact rotation by `angle` about `center` on B(center, r); support B(center, 2r).
inline HomeoExpr rotation_move(Vec2 center, double angle, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("rotation_move: r must be > 0");
    if (angle == 0.0) return identity();
    return HomeoExpr(std::make_shared<TwistNode>(center, angle, 0.0, 0.0, r, 2.0 * r));
}

// (rho, theta) -> (rho, theta + amount * plateau(rho)); recurrent base
// dynamics. amount is the rotation in radians on [plateau_lo, plateau_hi].
inline HomeoExpr annulus_twist(Vec2 center, double amount, double ramp_lo,
                               double plateau_lo, double plateau_hi, double ramp_hi) {
    if (amount == 0.0) return identity();
    if (!(0.0 <= ramp_lo && ramp_lo <= plateau_lo && plateau_lo <= plateau_hi &&
          plateau_hi < ramp_hi))
        throw std::invalid_argument("annulus_twist: radii must be ordered");
    return HomeoExpr(std::make_shared<TwistNode>(center, amount, ramp_lo, plateau_lo,
                                                 plateau_hi, ramp_hi));
}

inline HomeoExpr affinity_flow(Vec2 center, Vec2 axis_unit, double log_axial,
                               double log_trans, Vec2 seg_a, Vec2 seg_b, double r1,
                               double r2, int steps = kDefaultFlowSteps) {
    if (log_axial == 0.0 && log_trans == 0.0) return identity();
    return HomeoExpr(std::make_shared<AffinityFlowNode>(
        center, axis_unit, log_axial, log_trans, seg_a, seg_b, r1, r2, steps));
}

inline bool coaxial_concentric(const SolidCylinder& cs, const SolidCylinder& ct,
                               double tol = 1e-9) {
    if (dist(cs.center(), ct.center()) > tol * (cs.len() + ct.len())) return false;
    double cr = std::fabs(cs.axis_dir().x * ct.axis_dir().y -
                          cs.axis_dir().y * ct.axis_dir().x);
    return cr < 1e-9;
}

// Basic cylinder affinity: maps Cs across the concentric coaxial Ct. The
// image overshoots Ct axially (factor 3) and undershoots transversally
// (factor 1/2) so that the crossing conditions hold with positive margin.
inline HomeoExpr affinity_move(const SolidCylinder& cs, const SolidCylinder& ct,
                               int steps = kDefaultFlowSteps) {
    if (!coaxial_concentric(cs, ct))
        throw std::invalid_argument("affinity_move: cylinders must be concentric and coaxial");
    if (std::fabs(cs.len() - ct.len()) < 1e-15 && std::fabs(cs.rad() - ct.rad()) < 1e-15)
        return identity();
    double la = std::log(3.0 * ct.len() / cs.len());
    double lt = std::log(0.5 * ct.rad() / cs.rad());
    double half = 0.5 * std::max(cs.len(), 3.0 * ct.len());
    Vec2 e = cs.axis_dir();
    Vec2 c = cs.center();
    Vec2 sa = c - half * e, sb = c + half * e;
    double r1 = std::max(cs.rad(), ct.rad());
    double hull_len = 2.0 * half;
    double r2 = r1 + std::hypot(hull_len, 2.0 * r1);  // lemma's enlarged tube
    return affinity_flow(c, e, la, lt, sa, sb, r1, r2, steps);
}

// Exact affinity carrying Cs onto Ct (used by the transport pipeline).
inline HomeoExpr affinity_onto(const SolidCylinder& cs, const SolidCylinder& ct,
                               int steps = kDefaultFlowSteps) {
    if (!coaxial_concentric(cs, ct))
        throw std::invalid_argument("affinity_onto: cylinders must be concentric and coaxial");
    double la = std::log(ct.len() / cs.len());
    double lt = std::log(ct.rad() / cs.rad());
    if (la == 0.0 && lt == 0.0) return identity();
    double half = 0.5 * std::max(cs.len(), ct.len());
    Vec2 e = cs.axis_dir();
    Vec2 c = cs.center();
    double r1 = std::max(cs.rad(), ct.rad());
    double r2 = r1 + std::hypot(2.0 * half, 2.0 * r1);
    return affinity_flow(c, e, la, lt, c - half * e, c + half * e, r1, r2, steps);
}

inline HomeoExpr compose(std::vector<HomeoExpr> children) {
    std::vector<HomeoExpr> flat;
    for (auto& c : children) {
        if (!c.valid()) throw std::invalid_argument("compose: invalid child");
        if (c.kind() == NodeKind::Identity) continue;
        flat.push_back(std::move(c));
    }
    if (flat.empty()) return identity();
    if (flat.size() == 1) return flat.front();
    auto node = std::make_shared<ComposeNode>();
    node->children = std::move(flat);
    return HomeoExpr(node);
}

inline HomeoExpr inverse(HomeoExpr m) {
    if (m.kind() == NodeKind::Identity) return m;
    if (m.kind() == NodeKind::Inverse)
        return static_cast<const InverseNode&>(m.node()).child;  // Inv(Inv(m)) = m
    auto node = std::make_shared<InverseNode>();
    node->child = std::move(m);
    return HomeoExpr(node);
}

inline bool cylinders_isometric(const SolidCylinder& c0, const SolidCylinder& c1,
                                double tol = 1e-12) {
    double s = c0.len() + c0.rad();
    return std::fabs(c0.len() - c1.len()) <= tol * s && std::fabs(c0.rad() - c1.rad()) <= tol * s;
}

// Maps C isometrically onto C2 with marks matched, support in B(p, 10r):
// translate to the hub p, rotate about p, translate out to C2's centre.
inline HomeoExpr cylinder_isometry(const SolidCylinder& C, const SolidCylinder& C2,
                                   Vec2 p, double r, int steps = kDefaultFlowSteps) {
    if (!cylinders_isometric(C, C2))
        throw std::invalid_argument("cylinder_isometry: cylinders are not isometric");
    Vec2 c = C.center(), c2 = C2.center();
    Vec2 e = C.axis_dir(), e2 = C2.axis_dir();
    double angle = std::atan2(e.x * e2.y - e.y * e2.x, dot(e, e2));
    bool same_pos = dist(c, c2) < 1e-15 && std::fabs(angle) < 1e-15;
    if (same_pos) return identity();
    double cr = C.circumradius();
    std::vector<HomeoExpr> stages;
    stages.push_back(exact_translation_on_ball(c, cr, p - c, std::max(r, cr), steps));
    if (angle != 0.0) stages.push_back(rotation_move(p, angle, cr * (1.0 + 1e-9)));
    stages.push_back(exact_translation_on_ball(p, cr, c2 - p, std::max(r, cr), steps));
    // compose: last stage applied last
    return compose({stages.rbegin(), stages.rend()});
}

// Transport across two balls: Cp in B(p,r) onto Cq in B(q,r), support in
// E(p,q;10r).
inline HomeoExpr cylinder_transport(const SolidCylinder& Cp, const SolidCylinder& Cq,
                                    Vec2 p, Vec2 q, double r,
                                    int steps = kDefaultFlowSteps) {
    if (!cylinders_isometric(Cp, Cq))
        throw std::invalid_argument("cylinder_transport: cylinders are not isometric");
    if (dist(p, q) < 1e-15) return cylinder_isometry(Cp, Cq, p, r, steps);
    HomeoExpr slide = exact_translation_on_ball(p, r, q - p, 9.0 * r, steps);
    SolidCylinder moved(Cp.a + (q - p), Cp.b + (q - p), Cp.rho);
    HomeoExpr iso = cylinder_isometry(moved, Cq, q, r, steps);
    return compose({iso, slide});
}

// Glue disjointly supported maps over a default. Each part must be
// supported in its region (checked by sampling).
inline HomeoExpr piecewise(std::vector<std::pair<Region, HomeoExpr>> parts,
                           HomeoExpr fallback, int leak_samples = 256,
                           uint64_t seed = 0) {
    if (!fallback.valid()) fallback = identity();
    if (parts.empty()) return fallback;
    {
        RegionSet rs;
        for (const auto& [reg, m] : parts) rs.regions.push_back(reg);
        rs.validate_disjoint();
    }
    Rng rng(seed);
    for (const auto& [reg, m] : parts) {
        Rect bb = region_bbox(reg);
        int kept = 0;
        for (int i = 0; i < leak_samples * 4 && kept < leak_samples; ++i) {
            Vec2 x{rng.uniform(bb.x0, bb.x1), rng.uniform(bb.y0, bb.y1)};
            if (!region_contains(reg, x)) continue;
            ++kept;
            if (!region_contains(reg, m.eval(x)))
                throw std::invalid_argument("piecewise: part map leaks outside its region");
        }
    }
    auto node = std::make_shared<PiecewiseNode>();
    node->parts = std::move(parts);
    node->fallback = std::move(fallback);
    return HomeoExpr(node);
}

// ---------------------------------------------------------------- orbits

struct Orbit {
    std::vector<Vec2> points;   // orbit[0] = x, orbit[j+1] = m(orbit[j])
    int escaped_at = -1;        // step index at which the orbit left the domain
    bool escaped() const { return escaped_at >= 0; }
};

inline Orbit iterate(const HomeoExpr& m, Vec2 x, int k,
                     const std::optional<Region>& domain = std::nullopt) {
    Orbit o;
    o.points.push_back(x);
    for (int j = 0; j < k; ++j) {
        Vec2 y;
        try {
            y = m.eval(o.points.back());
        } catch (const std::domain_error&) {
            o.escaped_at = j;
            return o;
        }
        if (domain && !region_contains(*domain, y)) {
            o.escaped_at = j;
            return o;
        }
        o.points.push_back(y);
    }
    return o;
}

}  // namespace entrolab
