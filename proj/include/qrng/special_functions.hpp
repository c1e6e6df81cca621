#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "qrng/errors.hpp"

namespace qrng::special {

/// Complementary error function.
inline double erfc(double x) { return std::erfc(x); }

/// Regularised upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double igamc(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw DomainError("igamc requires a > 0 and x >= 0");
    }
    return boost::math::gamma_q(a, x);
}

/// Regularised lower incomplete gamma P(a, x) = 1 - Q(a, x).
inline double igam(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw DomainError("igam requires a > 0 and x >= 0");
    }
    return boost::math::gamma_p(a, x);
}

/// Standard normal cumulative distribution.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace qrng::special
