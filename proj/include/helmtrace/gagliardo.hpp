#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <helmtrace/quadrature.hpp>

namespace helmtrace {

namespace detail {

inline void require_sample_count(std::size_t n) {
    if (n < 64 || (n & (n - 1)) != 0)
        throw std::invalid_argument("samples: length must be a power of two >= 64");
}

// Spectral derivative of periodic samples (exact for band-limited data).
inline std::vector<cplx> spectral_derivative(const std::vector<cplx>& g) {
    std::size_t n = g.size();
    std::vector<cplx> a = g;
    fft_radix2(a, false);
    for (std::size_t j = 0; j < n; ++j) {
        long k = (j <= n / 2) ? static_cast<long>(j)
                              : static_cast<long>(j) - static_cast<long>(n);
        if (j == n / 2) k = 0; // drop the unmatched Nyquist mode
        a[j] *= cplx{0.0, static_cast<double>(k)};
    }
    fft_radix2(a, true);
    return a;
}

// Fourth-order finite-difference derivative of a compactly supported segment;
// one-sided at the ends so that constants differentiate to exactly zero.
inline std::vector<cplx> fd_derivative_segment(const std::vector<cplx>& g, double dx) {
    std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.size());
    std::vector<cplx> d(g.size());
    auto at = [&](std::ptrdiff_t i) -> cplx {
        if (i < 0 || i >= n) return {0.0, 0.0};
        return g[static_cast<std::size_t>(i)];
    };
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        cplx v;
        if (i >= 2 && i + 2 < n) {
            v = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) /
                (12.0 * dx);
        } else if (i + 2 < n && i >= 0 && (i < 2)) {
            v = (-3.0 * at(i) + 4.0 * at(i + 1) - at(i + 2)) / (2.0 * dx);
        } else {
            v = (3.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) / (2.0 * dx);
        }
        d[static_cast<std::size_t>(i)] = v;
    }
    return d;
}

} // namespace detail

// Gagliardo seminorm^2 on the unit circle by the periodic double trapezoid
// with the diagonal replaced by its removable limit |g'(theta)|^2.  Exact for
// band-limited samples; the band limit below N/4 is enforced by the spectral
// tail of the input.
inline double gagliardo_circle(const std::vector<cplx>& samples) {
    std::size_t n = samples.size();
    detail::require_sample_count(n);
    std::vector<cplx> hat = samples;
    fft_radix2(hat, false);
    double total = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        long k = (j <= n / 2) ? static_cast<long>(j)
                              : static_cast<long>(j) - static_cast<long>(n);
        double e = std::norm(hat[j]);
        total += e;
        if (std::abs(k) * 4 >= static_cast<long>(n)) tail += e;
    }
    if (total > 0.0 && tail > 1e-12 * total)
        throw std::invalid_argument("gagliardo_circle: samples not band-limited below N/4");

    std::vector<cplx> deriv = detail::spectral_derivative(samples);
    double step = 2.0 * detail::pi() / static_cast<double>(n);
    // kernel weight by index offset d: 1/(4 sin^2(pi d / N))
    std::vector<double> w(n, 0.0);
    for (std::size_t d = 1; d < n; ++d) {
        double sn = std::sin(detail::pi() * static_cast<double>(d) / static_cast<double>(n));
        w[d] = 1.0 / (4.0 * sn * sn);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::size_t d = (i > j) ? i - j : j - i;
            acc += std::norm(samples[i] - samples[j]) * w[d];
        }
        acc += std::norm(deriv[i]);
    }
    return acc * step * step;
}

// Gagliardo seminorm^2 on the real line for samples on a uniform grid with
// the data supported strictly inside it.  The double trapezoid runs over the
// support window; the exact contribution of pairs with one point beyond the
// support is added in closed form, so the result is invariant under shifting
// the data by whole grid steps.
inline double gagliardo_line(const std::vector<cplx>& samples, double dx) {
    std::size_t n = samples.size();
    detail::require_sample_count(n);
    if (!(dx > 0.0)) throw std::invalid_argument("gagliardo_line: bad grid step");
    double peak = 0.0;
    for (const auto& v : samples) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    std::size_t lo = 0, hi = n - 1;
    while (lo < n && std::abs(samples[lo]) <= 1e-14 * peak) ++lo;
    while (hi > 0 && std::abs(samples[hi]) <= 1e-14 * peak) --hi;
    if (lo == 0 || hi == n - 1)
        throw std::invalid_argument("gagliardo_line: support reaches the grid edge");
    std::size_t a = lo - 1, b = hi + 1; // zero samples bracketing the support
    std::vector<cplx> seg(samples.begin() + static_cast<std::ptrdiff_t>(a),
                          samples.begin() + static_cast<std::ptrdiff_t>(b) + 1);
    std::vector<cplx> deriv = detail::fd_derivative_segment(seg, dx);
    std::size_t m = seg.size();
    auto tw = [m](std::size_t i) { return (i == 0 || i + 1 == m) ? 0.5 : 1.0; };
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            double diff = static_cast<double>(i) - static_cast<double>(j);
            acc += tw(i) * tw(j) * std::norm(seg[i] - seg[j]) / (diff * diff * dx * dx);
        }
        acc += tw(i) * tw(i) * std::norm(deriv[i]);
    }
    double interior = acc * dx * dx;
    // pairs with y beyond [x_a, x_b], where g(y) = 0:
    //   2 int |g(x)|^2 [1/(x_b - x) + 1/(x - x_a)] dx
    double corr = 0.0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        double from_left = static_cast<double>(i) * dx;
        double from_right = static_cast<double>(m - 1 - i) * dx;
        corr += std::norm(seg[i]) * (1.0 / from_right + 1.0 / from_left);
    }
    return interior + 2.0 * corr * dx;
}

struct SplitReport {
    double whole = 0.0;     // seminorm^2 over the full circle
    double parts_sum = 0.0; // sum of restricted seminorms^2 over the two arcs
    double l2_sq = 0.0;     // ||g||^2_{L2(circle)}
    double c_spl = 0.0;     // measured (whole - parts)/l2
    bool lower_holds = false;
};

// Decomposition check for two arcs [lo, hi] (radians, 0 <= lo < hi < 2 pi)
// separated by gaps of at least pi/8 on both sides:
//   parts_sum <= whole <= parts_sum + C ||g||^2.
inline SplitReport split_inequality_check(const std::vector<cplx>& samples,
                                          std::pair<double, double> arc1,
                                          std::pair<double, double> arc2) {
    std::size_t n = samples.size();
    detail::require_sample_count(n);
    double tp = 2.0 * detail::pi();
    auto valid_arc = [tp](std::pair<double, double> a) {
        return a.first >= 0.0 && a.first < a.second && a.second < tp;
    };
    if (!valid_arc(arc1) || !valid_arc(arc2) || arc1.second >= arc2.first)
        throw std::invalid_argument("split_inequality_check: arcs must be ordered and inside [0, 2pi)");
    double gap_mid = arc2.first - arc1.second;
    double gap_wrap = tp - arc2.second + arc1.first;
    if (gap_mid < detail::pi() / 8.0 || gap_wrap < detail::pi() / 8.0)
        throw std::invalid_argument("split_inequality_check: arc gaps below pi/8");

    double step = tp / static_cast<double>(n);
    std::vector<double> w(n, 0.0);
    for (std::size_t d = 1; d < n; ++d) {
        double sn = std::sin(detail::pi() * static_cast<double>(d) / static_cast<double>(n));
        w[d] = 1.0 / (4.0 * sn * sn);
    }
    std::vector<cplx> deriv = detail::spectral_derivative(samples);

    SplitReport rep;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::size_t d = (i > j) ? i - j : j - i;
            acc += std::norm(samples[i] - samples[j]) * w[d];
        }
        acc += std::norm(deriv[i]);
        rep.l2_sq += std::norm(samples[i]);
    }
    rep.whole = acc * step * step;
    rep.l2_sq *= step;

    for (auto arc : {arc1, arc2}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i) {
            double th = step * static_cast<double>(i);
            if (th >= arc.first && th <= arc.second) idx.push_back(i);
        }
        if (idx.size() < 2) continue;
        std::vector<cplx> seg;
        seg.reserve(idx.size());
        for (auto i : idx) seg.push_back(samples[i]);
        std::vector<cplx> dseg = detail::fd_derivative_segment(seg, step);
        double part = 0.0;
        for (std::size_t p = 0; p < idx.size(); ++p) {
            for (std::size_t q = 0; q < idx.size(); ++q) {
                if (p == q) continue;
                std::size_t d = idx[p] > idx[q] ? idx[p] - idx[q] : idx[q] - idx[p];
                part += std::norm(seg[p] - seg[q]) * w[d];
            }
            part += std::norm(dseg[p]);
        }
        rep.parts_sum += part * step * step;
    }
    rep.lower_holds = rep.parts_sum <= rep.whole * (1.0 + 1e-12) + 1e-300;
    rep.c_spl = (rep.l2_sq > 0.0) ? std::max(0.0, rep.whole - rep.parts_sum) / rep.l2_sq
                                  : 0.0;
    return rep;
}

} // namespace helmtrace
