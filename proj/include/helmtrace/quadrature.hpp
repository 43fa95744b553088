#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include <helmtrace/constants.hpp>

namespace helmtrace {

using cplx = std::complex<double>;

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 20000;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 abscissae).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class T, class F, class NormFn>
void gk15_segment(F& f, double a, double b, T& value, double& err, NormFn& nrm) {
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    T fc = f(mid);
    T resk = gk15_wk[7] * fc;
    T resg = gk15_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        double dx = half * gk15_x[j];
        T f1 = f(mid - dx);
        T f2 = f(mid + dx);
        T s = f1 + f2;
        resk = resk + gk15_wk[j] * s;
        if (j % 2 == 1) resg = resg + gk15_wg[(j - 1) / 2] * s;
    }
    value = half * resk;
    err = std::abs(half) * nrm(resk - resg);
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of a payload type T supporting
// T+T, T-T and double*T.  Throws std::runtime_error when the interval
// budget is exhausted before the tolerance is met.
template <class T, class F, class NormFn>
T gk15_adaptive(F&& f, double a, double b, QuadOptions opt, NormFn&& nrm) {
    struct Seg {
        double a, b, err;
        T value;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    std::priority_queue<Seg> segs;
    T v{};
    double e = 0.0;
    detail::gk15_segment(f, a, b, v, e, nrm);
    segs.push({a, b, e, v});
    T total = v;
    double total_err = e;
    int count = 1;
    while (true) {
        double target = std::max(opt.abs_tol, opt.rel_tol * nrm(total));
        if (total_err <= target) break;
        if (count >= opt.max_intervals)
            throw std::runtime_error("gk15_adaptive: failed to converge");
        Seg worst = segs.top();
        segs.pop();
        double m = 0.5 * (worst.a + worst.b);
        T vl{}, vr{};
        double el = 0.0, er = 0.0;
        detail::gk15_segment(f, worst.a, m, vl, el, nrm);
        detail::gk15_segment(f, m, worst.b, vr, er, nrm);
        total = total - worst.value + vl + vr;
        total_err = total_err - worst.err + el + er;
        segs.push({worst.a, m, el, vl});
        segs.push({m, worst.b, er, vr});
        ++count;
    }
    return total;
}

template <class F>
auto gk15_adaptive(F&& f, double a, double b, QuadOptions opt = {}) {
    using T = decltype(f(a));
    return gk15_adaptive<T>(std::forward<F>(f), a, b, opt,
                            [](const T& x) { return std::abs(x); });
}

// In-place radix-2 FFT; forward uses e^{-i 2pi jk/n}.  n must be a power of 2.
inline void fft_radix2(std::vector<cplx>& a, bool inverse = false) {
    std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        cplx wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * pp * pp);
    }
}

// Composite Simpson with n (even) intervals; used by simple test oracles.
template <class F>
auto simpson(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    auto acc = f(a) + f(b);
    for (int j = 1; j < n; ++j) acc = acc + ((j % 2) ? 4.0 : 2.0) * f(a + j * h);
    return (h / 3.0) * acc;
}

} // namespace helmtrace
