#pragma once

// Named constructions: the nested-squares family (horseshoes of growing
// branch count conjugated into dyadic squares accumulating at the origin),
// its tail truncations, and annulus twist base dynamics.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "homeo.hpp"
#include "horseshoe.hpp"

namespace entrolab {

struct NestedSquares {
    int first = 1;
    int last = 4;

    // I_n = [2^-n, 2^-(n-1)], Q_n = I_n x I_n
    static Rect square(int n) {
        double lo = std::ldexp(1.0, -n), hi = std::ldexp(1.0, -(n - 1));
        return {lo, lo, hi, hi};
    }
    // A_n: unit square -> Q_n, A_n(x,y) = ((x+1)/2^n, (y+1)/2^n)
    static Mat2 conjugation_matrix(int n) {
        double s = std::ldexp(1.0, -n);
        return Mat2::diag(s, s);
    }
    static Vec2 conjugation_offset(int n) {
        double s = std::ldexp(1.0, -n);
        return {s, s};
    }
    static Rect inner_square(int n) {  // R_n = A_n([1/3,2/3]^2)
        double s = std::ldexp(1.0, -n);
        return {s * (1.0 + 1.0 / 3.0), s * (1.0 + 1.0 / 3.0),
                s * (1.0 + 2.0 / 3.0), s * (1.0 + 2.0 / 3.0)};
    }
    // square index n with both coordinates in I_n, 0 if none; boundaries go
    // to the lower n (where all maps agree with the identity anyway)
    static int locate(Vec2 z) {
        if (!(z.x > 0.0 && z.y > 0.0 && z.x <= 1.0 && z.y <= 1.0)) return 0;
        int nx = std::max(1, static_cast<int>(std::ceil(-std::log2(z.x))));
        int ny = std::max(1, static_cast<int>(std::ceil(-std::log2(z.y))));
        return nx == ny ? nx : 0;
    }
};

struct NestedSquaresNode final : MapNode {
    int first = 1, last = 4;
    std::vector<HomeoExpr> blocks;  // conjugated horseshoe per square, index n-first

    NodeKind kind() const override { return NodeKind::Horseshoe; }  // reserialized by name
    Vec2 eval(Vec2 z) const override {
        int n = NestedSquares::locate(z);
        if (n < first || n > last) return z;
        return blocks[n - first].eval(z);
    }
    Vec2 eval_inv(Vec2 z) const override {
        int n = NestedSquares::locate(z);
        if (n < first || n > last) return z;
        return blocks[n - first].eval_inv(z);
    }
};

// Horseshoe with branch_of(n) branches sewn into Q_n for n = first..last,
// identity elsewhere. The default schedule branch_of(n) = n gives
// per-square entropy log n and derivative bound O(n).
inline HomeoExpr nested_squares_map(int first, int last,
                                    const std::function<int(int)>& branch_of = {}) {
    if (first < 1 || last < first)
        throw std::invalid_argument("nested_squares_map: need 1 <= first <= last");
    auto node = std::make_shared<NestedSquaresNode>();
    node->first = first;
    node->last = last;
    Rect inner{1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
    for (int n = first; n <= last; ++n) {
        int branches = branch_of ? branch_of(n) : n;
        HorseshoeResult g = make_horseshoe(branches, inner);
        Mat2 a = NestedSquares::conjugation_matrix(n);
        Vec2 b = NestedSquares::conjugation_offset(n);
        // A_n o g o A_n^{-1}
        node->blocks.push_back(
            compose({affine(a, b), g.map, affine(a.inverse(), -1.0 * a.inverse().apply(b))}));
    }
    node->support = Rect{0.0, 0.0, 1.0, 1.0};
    return HomeoExpr(node);
}

inline HomeoExpr nested_squares_tail(int m, int cap = 8,
                                     const std::function<int(int)>& branch_of = {}) {
    if (m < 1) throw std::invalid_argument("nested_squares_tail: need m >= 1");
    if (m > cap) return identity();
    return nested_squares_map(m, cap, branch_of);
}

}  // namespace entrolab
