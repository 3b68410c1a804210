#pragma once

// Deterministic sampling plans for estimators: grids, seeded point clouds,
// and seeded pair clouds with log-uniform separations.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"

namespace entrolab {

struct SamplingPlan {
    enum class Kind { Grid, PairCloud };

    Kind kind = Kind::Grid;
    Rect domain{0.0, 0.0, 1.0, 1.0};
    int grid_per_axis = 64;       // Grid
    int pair_count = 20000;       // PairCloud
    uint64_t seed = 0;
    int zoom_rounds = 0;          // refine around the maximizer
    double min_sep = 1e-9;        // PairCloud: smallest separation
    double max_sep = 0.0;         // PairCloud: largest separation (0 = domain diam)

    static SamplingPlan grid(Rect r, int per_axis, int zooms = 0) {
        SamplingPlan p;
        p.kind = Kind::Grid;
        p.domain = r;
        p.grid_per_axis = per_axis;
        p.zoom_rounds = zooms;
        return p;
    }
    static SamplingPlan pairs(Rect r, int count, uint64_t seed, int zooms = 0) {
        SamplingPlan p;
        p.kind = Kind::PairCloud;
        p.domain = r;
        p.pair_count = count;
        p.seed = seed;
        p.zoom_rounds = zooms;
        return p;
    }

    std::vector<Vec2> points() const {
        std::vector<Vec2> pts;
        if (kind == Kind::Grid) {
            pts.reserve(static_cast<size_t>(grid_per_axis) * grid_per_axis);
            for (int j = 0; j < grid_per_axis; ++j)
                for (int i = 0; i < grid_per_axis; ++i)
                    pts.push_back({domain.x0 + domain.width() * (i + 0.5) / grid_per_axis,
                                   domain.y0 + domain.height() * (j + 0.5) / grid_per_axis});
        } else {
            Rng rng(seed);
            pts.reserve(pair_count);
            for (int i = 0; i < pair_count; ++i)
                pts.push_back({rng.uniform(domain.x0, domain.x1),
                               rng.uniform(domain.y0, domain.y1)});
        }
        return pts;
    }

    // pairs with log-uniform separation scales, clipped to the domain
    std::vector<std::pair<Vec2, Vec2>> point_pairs() const {
        std::vector<std::pair<Vec2, Vec2>> out;
        if (kind == Kind::Grid) {
            auto pts = points();
            out.reserve(pts.size() * 4);
            int n = grid_per_axis;
            auto at = [&](int i, int j) { return pts[static_cast<size_t>(j) * n + i]; };
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    if (i + 1 < n) out.emplace_back(at(i, j), at(i + 1, j));
                    if (j + 1 < n) out.emplace_back(at(i, j), at(i, j + 1));
                    if (i + 1 < n && j + 1 < n) out.emplace_back(at(i, j), at(i + 1, j + 1));
                    // long-range partner for the coarse scales
                    out.emplace_back(at(i, j), at((i + n / 2) % n, (j + n / 3) % n));
                }
            return out;
        }
        Rng rng(seed);
        double hi = max_sep > 0.0 ? max_sep : domain.diam();
        double lo = std::min(min_sep, hi * 0.5);
        out.reserve(pair_count);
        for (int i = 0; i < pair_count; ++i) {
            Vec2 a{rng.uniform(domain.x0, domain.x1), rng.uniform(domain.y0, domain.y1)};
            double t = lo * std::pow(hi / lo, rng.uniform());
            double th = rng.uniform(0.0, 2.0 * M_PI);
            Vec2 b = a + t * Vec2{std::cos(th), std::sin(th)};
            b.x = std::min(std::max(b.x, domain.x0), domain.x1);
            b.y = std::min(std::max(b.y, domain.y0), domain.y1);
            if (dist(a, b) > 0.0) out.emplace_back(a, b);
        }
        return out;
    }
};

}  // namespace entrolab
