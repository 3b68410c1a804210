#pragma once

// Bowen separated-set entropy estimation: greedy maximal (n,eps)-separated
// subsets of a sample cloud under the Bowen metric
// d_n(x,y) = max_{0<=k<n} |f^k x - f^k y| (forward iterates only),
// least-squares growth-rate fits, the Lipschitz upper bound, and the
// certificate/estimate/bound reconciliation verdict.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "geometry.hpp"
#include "homeo.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace entrolab {

// Forward-orbit table for a cloud, cached across n.
struct OrbitTable {
    std::vector<std::vector<Vec2>> orbits;  // orbits[i][k] = f^k(cloud[i])
    std::vector<char> escaped;
    int depth = 0;
    size_t escaped_count = 0;

    static OrbitTable build(const HomeoExpr& m, const std::vector<Vec2>& cloud,
                            int depth, int workers = 1) {
        OrbitTable t;
        t.depth = depth;
        t.orbits.assign(cloud.size(), {});
        t.escaped.assign(cloud.size(), 0);
        parallel_for(cloud.size(), workers, [&](size_t i) {
            auto& orb = t.orbits[i];
            orb.reserve(depth);
            Vec2 x = cloud[i];
            orb.push_back(x);
            for (int k = 1; k < depth; ++k) {
                try {
                    x = m.eval(x);
                } catch (const std::domain_error&) {
                    t.escaped[i] = 1;
                    break;
                }
                orb.push_back(x);
            }
        });
        for (char e : t.escaped) t.escaped_count += e;
        return t;
    }

    bool separated(size_t i, size_t j, int n, double eps) const {
        const auto& a = orbits[i];
        const auto& b = orbits[j];
        int kmax = std::min({n, static_cast<int>(a.size()), static_cast<int>(b.size())});
        for (int k = 0; k < kmax; ++k)
            if (dist(a[k], b[k]) > eps) return true;
        return false;
    }
};

namespace detail {

struct SpatialHash {
    double cell = 1.0;
    std::unordered_map<int64_t, std::vector<int>> buckets;

    explicit SpatialHash(double c) : cell(c) {}
    int64_t key(Vec2 p) const {
        int64_t i = static_cast<int64_t>(std::floor(p.x / cell));
        int64_t j = static_cast<int64_t>(std::floor(p.y / cell));
        return i * 0x100000001LL + j;
    }
    void insert(Vec2 p, int idx) { buckets[key(p)].push_back(idx); }
    template <typename Visit>
    void neighbors(Vec2 p, Visit&& v) const {
        int64_t ci = static_cast<int64_t>(std::floor(p.x / cell));
        int64_t cj = static_cast<int64_t>(std::floor(p.y / cell));
        for (int64_t di = -1; di <= 1; ++di)
            for (int64_t dj = -1; dj <= 1; ++dj) {
                auto it = buckets.find((ci + di) * 0x100000001LL + (cj + dj));
                if (it == buckets.end()) continue;
                for (int idx : it->second) v(idx);
            }
    }
};

// Greedy first-fit pass extending `accepted` (already pairwise separated)
// over the candidate order. Returns the maximal set.
inline std::vector<int> greedy_extend(const OrbitTable& table, int n, double eps,
                                      const std::vector<int>& order,
                                      std::vector<int> accepted) {
    SpatialHash hash(eps);
    std::vector<char> in_set(table.orbits.size(), 0);
    for (int idx : accepted) {
        hash.insert(table.orbits[idx][0], idx);
        in_set[idx] = 1;
    }
    for (int cand : order) {
        if (in_set[cand] || table.escaped[cand]) continue;
        bool ok = true;
        // only spatial neighbors at k = 0 can fail to be separated
        hash.neighbors(table.orbits[cand][0], [&](int other) {
            if (ok && !table.separated(cand, other, n, eps)) ok = false;
        });
        if (ok) {
            accepted.push_back(cand);
            hash.insert(table.orbits[cand][0], cand);
            in_set[cand] = 1;
        }
    }
    return accepted;
}

}  // namespace detail

// Cardinality of a greedy maximal (n,eps)-separated subset of the cloud.
inline int separated_count(const HomeoExpr& m, int n, double eps,
                           const std::vector<Vec2>& cloud, uint64_t seed = 0,
                           int workers = 1) {
    if (n < 1) throw std::invalid_argument("separated_count: need n >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("separated_count: need eps > 0");
    OrbitTable table = OrbitTable::build(m, cloud, n, workers);
    std::vector<int> order(cloud.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(order);
    return static_cast<int>(detail::greedy_extend(table, n, eps, order, {}).size());
}

struct EntropyEstimate {
    std::vector<int> n_values;
    std::vector<double> eps_values;                 // as given (descending recommended)
    std::vector<std::vector<int>> counts;           // counts[e][i] = S(n_i, eps_e)
    std::vector<double> slope_per_eps;
    double slope = 0.0;                             // headline: max over eps
    size_t cloud_size = 0;
    size_t escaped = 0;
    bool unreliable = false;                        // > 1% escapes
    bool degenerate = false;                        // flat counts
    uint64_t seed = 0;

    double escape_fraction() const {
        return cloud_size ? static_cast<double>(escaped) / cloud_size : 0.0;
    }
};

// Fill the S(n,eps) table and fit per-eps growth rates. Counts are nested so
// that S is non-decreasing in n and non-increasing in eps on every run.
inline EntropyEstimate entropy_estimate(const HomeoExpr& m,
                                        const std::vector<int>& n_values,
                                        const std::vector<double>& eps_values,
                                        const std::vector<Vec2>& cloud,
                                        uint64_t seed = 0, int workers = 1) {
    if (n_values.size() < 4)
        throw std::invalid_argument("entropy_estimate: need at least 4 n-values");
    for (size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] <= n_values[i - 1])
            throw std::invalid_argument("entropy_estimate: n_values must increase");

    EntropyEstimate est;
    est.n_values = n_values;
    est.eps_values = eps_values;
    est.cloud_size = cloud.size();
    est.seed = seed;

    int depth = n_values.back();
    OrbitTable table = OrbitTable::build(m, cloud, depth, workers);
    est.escaped = table.escaped_count;
    est.unreliable = est.escaped > cloud.size() / 100;

    std::vector<int> order(cloud.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(order);

    // eps sorted descending for the nesting argument
    std::vector<size_t> eps_order(eps_values.size());
    for (size_t e = 0; e < eps_order.size(); ++e) eps_order[e] = e;
    std::sort(eps_order.begin(), eps_order.end(),
              [&](size_t a, size_t b) { return eps_values[a] > eps_values[b]; });

    est.counts.assign(eps_values.size(), std::vector<int>(n_values.size(), 0));
    for (size_t e : eps_order) {
        std::vector<int> accepted;
        for (size_t i = 0; i < n_values.size(); ++i) {
            accepted = detail::greedy_extend(table, n_values[i], eps_values[e], order,
                                             std::move(accepted));
            est.counts[e][i] = static_cast<int>(accepted.size());
        }
    }
    // promote across eps: any (n, eps')-separated family with eps' > eps is
    // (n, eps)-separated, so the reported count may take the max
    for (size_t r = 1; r < eps_order.size(); ++r)
        for (size_t i = 0; i < n_values.size(); ++i)
            est.counts[eps_order[r]][i] = std::max(est.counts[eps_order[r]][i],
                                                   est.counts[eps_order[r - 1]][i]);

    // least-squares slope of log S over the upper half of the n-range
    size_t fit_from = n_values.size() - (n_values.size() + 1) / 2;
    est.slope_per_eps.assign(eps_values.size(), 0.0);
    bool any_growth = false;
    for (size_t e = 0; e < eps_values.size(); ++e) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (size_t i = fit_from; i < n_values.size(); ++i) {
            double x = n_values[i];
            double y = std::log(std::max(1, est.counts[e][i]));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++cnt;
        }
        double denom = cnt * sxx - sx * sx;
        double slope = denom != 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
        est.slope_per_eps[e] = std::max(0.0, slope);
        if (est.counts[e].back() != est.counts[e].front()) any_growth = true;
    }
    est.degenerate = !any_growth;
    est.slope = *std::max_element(est.slope_per_eps.begin(), est.slope_per_eps.end());
    return est;
}

// dim * log+(L)
inline double lipschitz_upper_bound(double lip, double hausdorff_dim) {
    if (!(lip > 0.0)) throw std::invalid_argument("lipschitz_upper_bound: need L > 0");
    if (hausdorff_dim < 0.0)
        throw std::invalid_argument("lipschitz_upper_bound: need dim >= 0");
    return hausdorff_dim * std::max(0.0, std::log(lip));
}

struct Verdict {
    bool pass = false;
    double slope = 0.0;
    double cert_bound = 0.0;
    double lip_bound = 0.0;
    double tol = 0.0;
};

// Passes iff cert_bound - tol <= slope <= lip_bound + tol. A certificate
// bound exceeding the Lipschitz bound is a construction inconsistency.
inline Verdict reconcile(const EntropyEstimate& est, double cert_bound,
                         double lip_bound, double tol) {
    if (cert_bound > lip_bound + tol)
        throw std::logic_error("reconcile: certificate bound exceeds Lipschitz bound");
    Verdict v;
    v.slope = est.slope;
    v.cert_bound = cert_bound;
    v.lip_bound = lip_bound;
    v.tol = tol;
    v.pass = cert_bound - tol <= est.slope && est.slope <= lip_bound + tol;
    return v;
}

}  // namespace entrolab
