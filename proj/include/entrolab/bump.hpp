#pragma once

// Quintic bump profile: 1 on [0, r1], 0 on [r2, inf), C^1 monotone between.
// Obtained by integrating s -> (s-r1)^2 (r2-s)^2 and rescaling, which gives
// the closed-form slope bound (15/8)/(r2-r1).

#include <cmath>
#include <stdexcept>

namespace entrolab {

struct BumpProfile {
    double r1 = 0.5;
    double r2 = 1.0;

    BumpProfile() = default;
    BumpProfile(double r1_, double r2_) : r1(r1_), r2(r2_) {
        if (!(0.0 < r1 && r1 < r2))
            throw std::invalid_argument("BumpProfile: need 0 < r1 < r2");
    }

    double value(double t) const {
        if (t <= r1) return 1.0;
        if (t >= r2) return 0.0;
        double u = (t - r1) / (r2 - r1);
        // 1 - (10u^3 - 15u^4 + 6u^5), decreasing from 1 to 0
        return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    }

    double slope(double t) const {
        if (t <= r1 || t >= r2) return 0.0;
        double u = (t - r1) / (r2 - r1);
        return -30.0 * u * u * (1.0 - u) * (1.0 - u) / (r2 - r1);
    }

    // max |d bump/dt| = (15/8)/(r2-r1), attained at the midpoint
    double slope_bound() const { return 1.875 / (r2 - r1); }
};

// Smooth ramp 0 -> 1 over [a, b] with the same quintic kernel.
inline double quintic_ramp(double t, double a, double b) {
    if (t <= a) return 0.0;
    if (t >= b) return 1.0;
    double u = (t - a) / (b - a);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

}  // namespace entrolab
