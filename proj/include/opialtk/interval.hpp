#pragma once

#include <cmath>
#include <string>

#include "opialtk/errors.hpp"

namespace opialtk {

/// Closed interval [lo, hi] with lo < hi, both finite.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
            throw DomainError("invalid interval [" + std::to_string(lo_) + ", " +
                              std::to_string(hi_) + "]");
        }
    }

    double width() const { return hi - lo; }

    /// Membership with a small slack so endpoint round-off does not reject
    /// points produced by affine node maps.
    bool contains(double x, double slack_scale = 1e-12) const {
        const double slack = slack_scale * width();
        return x >= lo - slack && x <= hi + slack;
    }

    bool contains(const Interval& other) const {
        return contains(other.lo) && contains(other.hi);
    }

    double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

} // namespace opialtk
