#pragma once

#include <cmath>
#include <stdexcept>

namespace helmtrace {

inline double legendre_p(int l, double x) {
    if (l < 0) throw std::domain_error("legendre_p: negative degree");
    double p0 = 1.0;
    if (l == 0) return p0;
    double p1 = x;
    for (int j = 1; j < l; ++j) {
        double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

namespace detail {

// 1 - P_l(1 - 2t) as a terminating hypergeometric sum,
//   1 - P_l(1-2t) = -sum_{j>=1} (-1)^j C(l,j) C(l+j,j) t^j,
// accurate for small t where the direct recurrence cancels.
inline double one_minus_p(int l, double t) {
    double term = static_cast<double>(l) * (l + 1) * t; // j = 1
    double sum = term;
    for (int j = 1; j < l; ++j) {
        term *= -(static_cast<double>(l - j) * (l + j + 1)) /
                ((j + 1.0) * (j + 1.0)) * t;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

} // namespace detail

} // namespace helmtrace
