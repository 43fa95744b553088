#pragma once
// Modified Bessel functions I_k, K_k of integer order and modified spherical
// Bessel functions i_l, k_l for complex argument in the right half plane.
//
// Evaluation strategy per (order, |z|):
//   |z| < series_radius            ascending power series
//   series_radius <= |z| < t(k)    ratio by continued fraction (Lentz) for I,
//                                  Steed continued fraction for K_0/K_1, then
//                                  forward recurrence in the order; I recovered
//                                  through the cross Wronskian
//   |z| >= t(k) = max(100, k^2)    large-argument expansion (I keeps the
//                                  reflected exponential term off the real axis)
//
// Internals carry values as ScaledComplex so that products such as
// I_k(z_1) K_k(z_2) stay representable; the public functions materialize plain
// complex values and throw std::range_error when that is impossible.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "constants.hpp"
#include "scaled_complex.hpp"

namespace helmtrace {

inline constexpr int max_cyl_order = 256;
inline constexpr int max_sph_order = 128;
inline constexpr double arg_window_min = 1e-8;
inline constexpr double arg_window_max = 1e6;

namespace detail {

// Switchover radii. Mutable only so the self test can inject a corrupted
// value and confirm the scan below catches it; production code never writes.
struct Regimes {
    double series_radius = 2.0;
    double asympt_radius = 100.0;
};
inline Regimes regimes{};

inline double asympt_threshold(double nu) {
    return std::max(regimes.asympt_radius, nu * nu);
}

inline void check_arg(int order, int cap, cplx z, const char* who) {
    if (order < 0 || order > cap)
        throw std::domain_error(std::string(who) + ": order out of range");
    double az = std::abs(z);
    if (!(z.real() > 0.0))
        throw std::domain_error(std::string(who) + ": Re z must be positive");
    if (az < arg_window_min || az > arg_window_max)
        throw std::domain_error(std::string(who) + ": |z| outside supported window");
}

// I_{nu+1}(z)/I_nu(z) by the modified Lentz algorithm on
// r_nu = 1/(2(nu+1)/z + r_{nu+1}).
inline cplx cf1_ratio(double nu, cplx z) {
    const double tiny = 1e-290;
    const int max_it = 20000 + static_cast<int>(12.0 * (std::abs(z) + nu));
    cplx f{tiny, 0.0}, c{tiny, 0.0}, d{0.0, 0.0};
    for (int j = 1; j <= max_it; ++j) {
        cplx b = 2.0 * (nu + j) / z;
        d = b + d;
        if (std::abs(d) < tiny) d = {tiny, 0.0};
        c = b + 1.0 / c;
        if (std::abs(c) < tiny) c = {tiny, 0.0};
        d = 1.0 / d;
        cplx delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return f;
    }
    throw std::runtime_error("cf1_ratio: continued fraction did not converge");
}

// Ascending series, valid for small |z| (all orders).
inline ScaledComplex i_series(int k, cplx z) {
    cplx w = z * z * 0.25;
    cplx sum{1.0, 0.0}, term{1.0, 0.0};
    for (int m = 1; m <= 400; ++m) {
        term *= w / (static_cast<double>(m) * (k + m));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    double lr = std::log(std::abs(z) * 0.5);
    double th = std::arg(z);
    cplx phase = std::polar(1.0, k * th);
    return ScaledComplex(phase * sum, k * lr - std::lgamma(k + 1.0));
}

// K_0 and K_1 by the log-series, small |z|.
inline std::pair<ScaledComplex, ScaledComplex> k01_series(cplx z) {
    cplx w = z * z * 0.25;
    cplx lz = std::log(z * 0.5);
    // I_0, I_1 and the companion harmonic-number sums in one sweep.
    cplx i0{1.0, 0.0}, i1{1.0, 0.0};
    cplx s0{0.0, 0.0}, s1{1.0, 0.0}; // s1 starts with (H_0+H_1) w^0/(0!1!) = 1
    cplx t0{1.0, 0.0}, t1{1.0, 0.0};
    double hm = 0.0;
    for (int m = 1; m <= 400; ++m) {
        t0 *= w / (static_cast<double>(m) * m);
        t1 *= w / (static_cast<double>(m) * (m + 1));
        hm += 1.0 / m;
        i0 += t0;
        i1 += t1;
        s0 += hm * t0;
        s1 += (2.0 * hm + 1.0 / (m + 1.0)) * t1;
        if (std::abs(t0) < 1e-18 * std::abs(i0) &&
            std::abs(t1) < 1e-18 * std::abs(i1))
            break;
    }
    i1 *= z * 0.5;
    cplx k0 = -(lz + euler_gamma) * i0 + s0;
    cplx k1 = 1.0 / z + (lz + euler_gamma) * i1 - (z * 0.25) * s1;
    return {ScaledComplex(k0), ScaledComplex(k1)};
}

// K_0 and K_1 by Steed's continued fraction with Temme normalization,
// for moderate |z| in the right half plane.
inline std::pair<ScaledComplex, ScaledComplex> k01_cf2(cplx z) {
    const int max_it = 40000;
    cplx b = 2.0 * (1.0 + z);
    cplx d = 1.0 / b;
    cplx delh = d, h = d;
    cplx q1{0.0, 0.0}, q2{1.0, 0.0};
    const cplx a1{0.25, 0.0};
    cplx q = a1, c = a1, a = -a1;
    cplx s = 1.0 + q * delh;
    bool ok = false;
    for (int i = 2; i <= max_it; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / static_cast<double>(i);
        cplx qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        cplx dels = q * delh;
        s += dels;
        if (std::abs(dels) < 1e-16 * std::abs(s)) { ok = true; break; }
    }
    if (!ok) throw std::runtime_error("k01_cf2: continued fraction did not converge");
    h = a1 * h;
    // K_0(z) = sqrt(pi/(2z)) e^{-z} / s, carried with the e^{-Re z} split off.
    cplx front = std::sqrt(pi_over_2() / z) * std::polar(1.0, -z.imag()) / s;
    ScaledComplex k0(front, -z.real());
    ScaledComplex k1 = k0 * ((z + 0.5 - h) / z);
    return {k0, k1};
}

// Forward recurrence K_{j+1} = K_{j-1} + (2j/z) K_j (stable upward).
inline std::pair<ScaledComplex, ScaledComplex>
k_chain(int k, cplx z, ScaledComplex k0, ScaledComplex k1) {
    if (k == 0) return {k0, k1};
    ScaledComplex km = k0, kc = k1;
    for (int j = 1; j < k; ++j) {
        ScaledComplex kn = km + kc * (2.0 * j / z);
        km = kc;
        kc = kn;
    }
    ScaledComplex knext = km + kc * (2.0 * k / z);
    return {kc, knext};
}

// (K_k, K_{k+1}) with the start dictated by |z|.
inline std::pair<ScaledComplex, ScaledComplex> k_pair(int k, cplx z);

inline ScaledComplex k_asympt(int k, cplx z);
inline ScaledComplex i_asympt(int k, cplx z);

inline std::pair<ScaledComplex, ScaledComplex> k_pair(int k, cplx z) {
    double az = std::abs(z);
    if (az >= asympt_threshold(k)) return {k_asympt(k, z), k_asympt(k + 1, z)};
    auto [k0, k1] = (az < regimes.series_radius) ? k01_series(z) : k01_cf2(z);
    return k_chain(k, z, k0, k1);
}

// Large-argument expansion coefficients a_m(nu) with 4nu^2 = fournu2.
// K_nu(z) ~ sqrt(pi/2z) e^{-z} sum a_m/z^m;
// I_nu(z) ~ e^z/sqrt(2 pi z) sum (-1)^m a_m/z^m + reflected e^{-z} term.
inline cplx asympt_sum(double fournu2, cplx z, int sign_alternating) {
    cplx sum{1.0, 0.0}, term{1.0, 0.0};
    double prev = 1.0;
    for (int m = 1; m <= 60; ++m) {
        double num = fournu2 - (2.0 * m - 1.0) * (2.0 * m - 1.0);
        term *= num / (8.0 * m) / z;
        if (sign_alternating) term = -term;
        double at = std::abs(term);
        if (at > prev) break; // divergent tail reached
        sum += term;
        if (at < 1e-18 * std::abs(sum)) break;
        prev = at;
    }
    return sum;
}

inline ScaledComplex k_asympt(int k, cplx z) {
    cplx s = asympt_sum(4.0 * k * static_cast<double>(k), z, 0);
    cplx front = std::sqrt(pi_over_2() / z) * std::polar(1.0, -z.imag());
    return ScaledComplex(front * s, -z.real());
}

inline ScaledComplex i_asympt(int k, cplx z) {
    double fournu2 = 4.0 * k * static_cast<double>(k);
    cplx a = asympt_sum(fournu2, z, 1);
    cplx front = 1.0 / std::sqrt(2.0 * pi() * z);
    ScaledComplex grow(front * std::polar(1.0, z.imag()) * a, z.real());
    if (z.imag() == 0.0) return grow;
    // Reflected term: coefficient i(-1)^k above the real axis, conjugate below.
    cplx b = asympt_sum(fournu2, z, 0);
    double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    cplx mu = (z.imag() > 0.0) ? cplx{0.0, sgn} : cplx{0.0, -sgn};
    ScaledComplex decay(front * std::polar(1.0, -z.imag()) * mu * b, -z.real());
    return grow + decay;
}

inline ScaledComplex i_scaled(int k, cplx z) {
    double az = std::abs(z);
    if (az < regimes.series_radius) return i_series(k, z);
    if (az >= asympt_threshold(k)) return i_asympt(k, z);
    cplx r = cf1_ratio(k, z);
    auto [kk, kk1] = k_pair(k, z);
    // I_k K_{k+1} + I_{k+1} K_k = 1/z  =>  I_k = 1/(z (K_{k+1} + r K_k))
    ScaledComplex denom = (kk1 + kk * r) * z;
    return denom.inverse();
}

inline ScaledComplex k_scaled(int k, cplx z) {
    return k_pair(k, z).first;
}

// ---- modified spherical family ---------------------------------------------

// Scaled chain values kt_l = k_l(z) e^{z}; rational in z, so exact to carry.
inline std::pair<ScaledComplex, ScaledComplex> sph_k_chain(int l, cplx z) {
    ScaledComplex k0(pi_over_2() / z);
    ScaledComplex k1 = k0 * (1.0 + 1.0 / z);
    if (l == 0) return {k0, k1};
    ScaledComplex km = k0, kc = k1;
    for (int j = 1; j < l; ++j) {
        ScaledComplex kn = km + kc * ((2.0 * j + 1.0) / z);
        km = kc;
        kc = kn;
    }
    ScaledComplex knext = km + kc * ((2.0 * l + 1.0) / z);
    return {kc, knext};
}

inline ScaledComplex sph_k_scaled(int l, cplx z) {
    ScaledComplex kt = sph_k_chain(l, z).first;
    return kt * ScaledComplex(std::polar(1.0, -z.imag()), -z.real());
}

inline ScaledComplex sph_i_series(int l, cplx z) {
    cplx w = z * z * 0.5;
    cplx sum{1.0, 0.0}, term{1.0, 0.0};
    for (int m = 1; m <= 400; ++m) {
        term *= w / (static_cast<double>(m) * (2.0 * l + 2.0 * m + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    // prefactor z^l/(2l+1)!!, (2l+1)!! = (2l+1)!/(2^l l!)
    double ldf = std::lgamma(2.0 * l + 2.0) - l * std::log(2.0) - std::lgamma(l + 1.0);
    double lr = std::log(std::abs(z));
    cplx phase = std::polar(1.0, l * std::arg(z));
    return ScaledComplex(phase * sum, l * lr - ldf);
}

// Exact finite expansion (terminating at m = l); usable once |z| dominates l^2.
inline ScaledComplex sph_i_closed(int l, cplx z) {
    double fournu2 = (2.0 * l + 1.0) * (2.0 * l + 1.0);
    cplx a{1.0, 0.0}, b{1.0, 0.0}, term{1.0, 0.0};
    for (int m = 1; m <= l; ++m) {
        double num = fournu2 - (2.0 * m - 1.0) * (2.0 * m - 1.0);
        term *= num / (8.0 * m) / z;
        b += term;
        a += (m % 2 == 0) ? term : -term;
    }
    cplx inv2z = 0.5 / z;
    ScaledComplex grow(inv2z * std::polar(1.0, z.imag()) * a, z.real());
    double sgn = (l % 2 == 0) ? -1.0 : 1.0; // multiplies e^{-z} B
    ScaledComplex decay(sgn * inv2z * std::polar(1.0, -z.imag()) * b, -z.real());
    return grow + decay;
}

inline ScaledComplex sph_i_scaled(int l, cplx z) {
    double az = std::abs(z);
    if (az < regimes.series_radius) return sph_i_series(l, z);
    double nu = l + 0.5;
    if (l <= 1 || az >= asympt_threshold(nu)) return sph_i_closed(l, z);
    // Cross Wronskian i_l k_{l+1} + i_{l+1} k_l = pi/(2 z^2).
    cplx r = cf1_ratio(nu, z);
    auto [kl, kl1] = sph_k_chain(l, z); // carries e^{+z}
    ScaledComplex denom = kl1 + kl * r;
    ScaledComplex num(pi_over_2() / (z * z) * std::polar(1.0, z.imag()), z.real());
    return num / denom;
}

// Worst relative discrepancy between adjacent evaluation methods, sampled in
// bands around the switchover radii. The self test requires this to stay
// below 1e-10; a corrupted radius shows up as an O(1) jump.
inline double switchover_max_jump() {
    double worst = 0.0;
    auto rel = [](const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero() && b.is_zero()) return 0.0;
        cplx r = ratio(a, b);
        return std::abs(r - 1.0);
    };
    const double phases[] = {0.03, 0.7, 1.2, 1.45, -0.7, -1.45};
    const double sr = regimes.series_radius;
    for (double f : {0.85, 0.95, 1.05, 1.2}) {
        for (double ph : phases) {
            cplx z = std::polar(sr * f, ph);
            for (int k : {0, 1, 5, 32}) {
                // series vs ratio/Wronskian path for I
                cplx r = cf1_ratio(k, z);
                auto kp = k_pair(k, z);
                ScaledComplex mid = ((kp.second + kp.first * r) * z).inverse();
                worst = std::max(worst, rel(i_series(k, z), mid));
            }
            // K start methods
            auto [a0, a1] = k01_series(z);
            auto [b0, b1] = k01_cf2(z);
            worst = std::max(worst, rel(a0, b0));
            worst = std::max(worst, rel(a1, b1));
            // spherical series vs closed form / Wronskian
            for (int l : {0, 1, 2, 5}) {
                ScaledComplex srs = sph_i_series(l, z);
                ScaledComplex alt;
                if (l <= 1) {
                    alt = sph_i_closed(l, z);
                } else {
                    cplx rr = cf1_ratio(l + 0.5, z);
                    auto [kl, kl1] = sph_k_chain(l, z);
                    ScaledComplex num(pi_over_2() / (z * z) * std::polar(1.0, z.imag()),
                                      z.real());
                    alt = num / (kl1 + kl * rr);
                }
                worst = std::max(worst, rel(srs, alt));
            }
        }
    }
    // middle vs large-argument expansion
    for (int k : {0, 3, 11}) {
        double t = asympt_threshold(k);
        for (double f : {0.85, 1.0, 1.25}) {
            for (double ph : phases) {
                cplx z = std::polar(t * f, ph);
                cplx r = cf1_ratio(k, z);
                auto [c0, c1] = k01_cf2(z);
                auto kc = k_chain(k, z, c0, c1);
                ScaledComplex i_mid = ((kc.second + kc.first * r) * z).inverse();
                worst = std::max(worst, rel(i_mid, i_asympt(k, z)));
                worst = std::max(worst, rel(kc.first, k_asympt(k, z)));
            }
        }
    }
    // spherical Wronskian vs terminating expansion
    for (int l : {2, 5}) {
        double t = asympt_threshold(l + 0.5);
        for (double f : {0.85, 1.1}) {
            for (double ph : phases) {
                cplx z = std::polar(t * f, ph);
                cplx rr = cf1_ratio(l + 0.5, z);
                auto [kl, kl1] = sph_k_chain(l, z);
                ScaledComplex num(pi_over_2() / (z * z) * std::polar(1.0, z.imag()),
                                  z.real());
                ScaledComplex wro = num / (kl1 + kl * rr);
                worst = std::max(worst, rel(wro, sph_i_closed(l, z)));
            }
        }
    }
    return worst;
}

// I'_k/I_k = k/z + I_{k+1}/I_k, with the ratio taken in whatever form the
// regime keeps cancellation-free.
inline cplx log_deriv_i_impl(int order, cplx z) {
    double az = std::abs(z);
    cplx ratio_up;
    if (az < regimes.series_radius) {
        ratio_up = ratio(i_series(order + 1, z), i_series(order, z));
    } else if (az >= asympt_threshold(order)) {
        ratio_up = ratio(i_asympt(order + 1, z), i_asympt(order, z));
    } else {
        ratio_up = cf1_ratio(order, z);
    }
    return static_cast<double>(order) / z + ratio_up;
}

// K'_k/K_k = -K_{k-1}/K_k - k/z  (K_{-1} = K_1).
inline cplx log_deriv_k_impl(int order, cplx z) {
    if (order == 0) {
        auto [k0, k1] = k_pair(0, z);
        return -ratio(k1, k0);
    }
    auto [km, kc] = k_pair(order - 1, z);
    return -ratio(km, kc) - static_cast<double>(order) / z;
}

} // namespace detail

// ---- public surface ---------------------------------------------------------

inline cplx bessel_i(int order, cplx z) {
    detail::check_arg(order, max_cyl_order, z, "bessel_i");
    return detail::i_scaled(order, z).value();
}

inline cplx bessel_k(int order, cplx z) {
    detail::check_arg(order, max_cyl_order, z, "bessel_k");
    return detail::k_scaled(order, z).value();
}

inline cplx log_deriv_i(int order, cplx z) {
    detail::check_arg(order, max_cyl_order, z, "log_deriv_i");
    return detail::log_deriv_i_impl(order, z);
}

inline cplx log_deriv_k(int order, cplx z) {
    detail::check_arg(order, max_cyl_order, z, "log_deriv_k");
    return detail::log_deriv_k_impl(order, z);
}

inline cplx sph_i(int l, cplx z) {
    detail::check_arg(l, max_sph_order, z, "sph_i");
    return detail::sph_i_scaled(l, z).value();
}

inline cplx sph_k(int l, cplx z) {
    detail::check_arg(l, max_sph_order, z, "sph_k");
    return detail::sph_k_scaled(l, z).value();
}

// i'_l/i_l = l/z + i_{l+1}/i_l.
inline cplx log_deriv_sph_i(int l, cplx z) {
    detail::check_arg(l, max_sph_order, z, "log_deriv_sph_i");
    double az = std::abs(z);
    cplx ratio_up;
    if (az < detail::regimes.series_radius) {
        ratio_up = detail::ratio(detail::sph_i_series(l + 1, z),
                                 detail::sph_i_series(l, z));
    } else if (l >= 2 && az < detail::asympt_threshold(l + 0.5)) {
        ratio_up = detail::cf1_ratio(l + 0.5, z);
    } else {
        ratio_up = detail::ratio(detail::sph_i_closed(l + 1, z),
                                 detail::sph_i_closed(l, z));
    }
    return static_cast<double>(l) / z + ratio_up;
}

// k'_l/k_l = -k_{l-1}/k_l - (l+1)/z  (k_{-1} = k_0); for l = 0 this is
// exactly -(1 + 1/z).
inline cplx log_deriv_sph_k(int l, cplx z) {
    detail::check_arg(l, max_sph_order, z, "log_deriv_sph_k");
    if (l == 0) return -(1.0 + 1.0 / z);
    auto [km, kc] = detail::sph_k_chain(l - 1, z);
    return -detail::ratio(km, kc) - (l + 1.0) / z;
}

} // namespace helmtrace
