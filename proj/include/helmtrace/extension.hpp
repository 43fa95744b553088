#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <helmtrace/bessel.hpp>
#include <helmtrace/quadrature.hpp>
#include <helmtrace/trace_space.hpp>

namespace helmtrace {

enum class GeometryKind {
    DiskInterior,
    DiskExterior,
    Annulus,
    BallInterior,
    BallExterior,
    HalfSpace
};

struct Geometry {
    GeometryKind kind = GeometryKind::DiskInterior;
    double inner_radius = 0.5; // annulus only; Gamma is the outer unit circle

    static Geometry disk() { return {GeometryKind::DiskInterior, 0.0}; }
    static Geometry disk_exterior() { return {GeometryKind::DiskExterior, 0.0}; }
    static Geometry annulus(double rho) {
        if (!(rho >= 0.05 && rho <= 0.95))
            throw std::domain_error("Geometry: annulus inner radius outside [0.05, 0.95]");
        return {GeometryKind::Annulus, rho};
    }
    static Geometry ball() { return {GeometryKind::BallInterior, 0.0}; }
    static Geometry ball_exterior() { return {GeometryKind::BallExterior, 0.0}; }
    static Geometry half_space() { return {GeometryKind::HalfSpace, 0.0}; }
};

enum class ExtensionVariant { Standard, Alternative };

// Dirichlet-to-Neumann eigenvalues on the model geometries.  The per-mode
// minimal-extension weight is 2*pi*value on the circle geometries and the
// value itself on the ball geometries (orthonormal spherical basis).

inline double dtn_disk(int k, const Weight& w) {
    cplx v = log_deriv_i(std::abs(k), {w.sigma, 0.0});
    return w.sigma * v.real();
}

inline double dtn_exterior_disk(int k, const Weight& w) {
    cplx v = log_deriv_k(std::abs(k), {w.sigma, 0.0});
    return -w.sigma * v.real();
}

inline double dtn_ball(int l, const Weight& w) {
    cplx v = log_deriv_sph_i(l, {w.sigma, 0.0});
    return w.sigma * v.real();
}

inline double dtn_exterior_ball(int l, const Weight& w) {
    cplx v = log_deriv_sph_k(l, {w.sigma, 0.0});
    return -w.sigma * v.real();
}

// Per-mode weight of the minimal extension norm on the annulus rho < r < 1
// with data on the unit circle and the variant's condition at r = rho:
// Alternative has u(rho) = 0, Standard has u'(rho) = 0.  The radial solution
// is a I_k(sigma r) + b K_k(sigma r); everything is evaluated through scaled
// ratios so that sigma up to 1e6 stays representable.
inline double annulus_mode(int k, const Weight& w, double rho,
                           ExtensionVariant variant) {
    if (std::abs(k) > max_cyl_order)
        throw std::domain_error("annulus_mode: order out of range");
    if (!(rho >= 0.05 && rho <= 0.95))
        throw std::domain_error("annulus_mode: inner radius outside [0.05, 0.95]");
    int ka = std::abs(k);
    cplx s{w.sigma, 0.0};
    cplx sr{w.sigma * rho, 0.0};
    // t = [I_k(sr) K_k(s)] / [I_k(s) K_k(sr)], decays like e^{-2 sigma(1-rho)}
    detail::ScaledComplex tnum =
        detail::i_scaled(ka, sr) * detail::k_scaled(ka, s);
    detail::ScaledComplex tden =
        detail::i_scaled(ka, s) * detail::k_scaled(ka, sr);
    if (tden.is_zero())
        throw std::runtime_error("annulus_mode: singular radial system");
    cplx t = detail::ratio(tnum, tden);
    cplx boa; // b/a in the basis {I(sigma r)/I(sigma), K(sigma r)/K(sigma)}
    if (variant == ExtensionVariant::Alternative) {
        boa = -t;
    } else {
        cplx li = log_deriv_i(ka, sr);
        cplx lk = log_deriv_k(ka, sr);
        boa = -(li / lk) * t;
    }
    cplx den = 1.0 + boa;
    if (std::abs(den) < 1e-300)
        throw std::runtime_error("annulus_mode: singular radial system");
    cplx di = s * log_deriv_i(ka, s);
    cplx dk = s * log_deriv_k(ka, s);
    cplx weight = 2.0 * detail::pi() * (di + boa * dk) / den;
    if (std::abs(weight.imag()) > 1e-12 * std::max(1.0, std::abs(weight.real())))
        throw std::runtime_error("annulus_mode: non-real weight");
    if (!(weight.real() > 0.0))
        throw std::runtime_error("annulus_mode: non-positive weight");
    return weight.real();
}

struct ExtensionProfile {
    Geometry geometry;
    double sigma = 1.0;
    ExtensionVariant variant = ExtensionVariant::Standard;
    DiagonalNormProfile weights; // h_k
};

inline ExtensionProfile make_extension_profile(
    const Geometry& geo, const Weight& w, int max_mode,
    ExtensionVariant variant = ExtensionVariant::Standard) {
    ExtensionProfile p;
    p.geometry = geo;
    p.sigma = w.sigma;
    p.variant = variant;
    p.weights.sigma = w.sigma;
    p.weights.label =
        (variant == ExtensionVariant::Alternative) ? NormLabel::HDAlt : NormLabel::HD;
    p.weights.lambda.resize(static_cast<std::size_t>(max_mode) + 1);
    double tp = 2.0 * detail::pi();
    for (int k = 0; k <= max_mode; ++k) {
        double& lam = p.weights.lambda[static_cast<std::size_t>(k)];
        switch (geo.kind) {
            case GeometryKind::DiskInterior:
                p.weights.surface = SurfaceKind::Circle;
                lam = tp * dtn_disk(k, w);
                break;
            case GeometryKind::DiskExterior:
                p.weights.surface = SurfaceKind::Circle;
                lam = tp * dtn_exterior_disk(k, w);
                break;
            case GeometryKind::Annulus:
                p.weights.surface = SurfaceKind::Circle;
                lam = annulus_mode(k, w, geo.inner_radius, variant);
                break;
            case GeometryKind::BallInterior:
                p.weights.surface = SurfaceKind::Sphere;
                lam = dtn_ball(k, w);
                break;
            case GeometryKind::BallExterior:
                p.weights.surface = SurfaceKind::Sphere;
                lam = dtn_exterior_ball(k, w);
                break;
            case GeometryKind::HalfSpace:
                throw std::invalid_argument(
                    "make_extension_profile: half space has no modal profile");
        }
    }
    return p;
}

inline double min_ext_norm(const FourierTrace& g, const ExtensionProfile& p) {
    return diag_norm(p.weights, g);
}

inline double min_ext_norm(const SphericalTrace& g, const ExtensionProfile& p) {
    return diag_norm(p.weights, g);
}

// Sampled one-dimensional spectrum |ghat(xi)|^2 on an increasing grid.
struct SampledSpectrum {
    std::vector<double> xi;
    std::vector<double> power;
};

// sqrt(2 pi * int sqrt(sigma^2 + xi^2) |ghat|^2 dxi) by trapezoid on the grid.
inline double halfspace_norm(const SampledSpectrum& sp, double sigma) {
    if (sp.xi.size() != sp.power.size() || sp.xi.size() < 2)
        throw std::invalid_argument("halfspace_norm: bad sample arrays");
    if (!(sigma >= 0.0 && sigma <= 1e6))
        throw std::domain_error("halfspace_norm: sigma outside supported window");
    double peak = 0.0;
    for (double p : sp.power) {
        if (!(p >= 0.0)) throw std::invalid_argument("halfspace_norm: negative power");
        peak = std::max(peak, p);
    }
    if (peak == 0.0) return 0.0;
    if (sp.power.front() > 1e-16 * peak || sp.power.back() > 1e-16 * peak)
        throw std::runtime_error("halfspace_norm: spectrum not decayed at grid edge");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < sp.xi.size(); ++i) {
        double f0 = std::hypot(sigma, sp.xi[i]) * sp.power[i];
        double f1 = std::hypot(sigma, sp.xi[i + 1]) * sp.power[i + 1];
        acc += 0.5 * (f0 + f1) * (sp.xi[i + 1] - sp.xi[i]);
    }
    return std::sqrt(2.0 * detail::pi() * acc);
}

namespace detail {

struct EnergyPair {
    double grad = 0.0; // 2 pi int (|u'|^2 + k^2/r^2 |u|^2) r dr
    double mass = 0.0; // 2 pi int |u|^2 r dr
};

inline EnergyPair operator+(EnergyPair a, EnergyPair b) {
    return {a.grad + b.grad, a.mass + b.mass};
}
inline EnergyPair operator-(EnergyPair a, EnergyPair b) {
    return {a.grad - b.grad, a.mass - b.mass};
}
inline EnergyPair operator*(double c, EnergyPair a) {
    return {c * a.grad, c * a.mass};
}

inline double energy_pair_norm(const EnergyPair& p) {
    return std::abs(p.grad) + std::abs(p.mass);
}

// The modal fields concentrate in a layer of width ~min(1/k, 1/Re s) at
// r = 1; a single adaptive pass over a long interval can sample straight past
// it (every node lands where the field has underflowed and the error
// estimator sees zeros).  Integrate over panels that grow geometrically away
// from that edge instead.
template <class F>
EnergyPair energy_ladder(F&& f, double a, double b, bool edge_at_right,
                         double edge_width) {
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.max_intervals = 40000;
    double len = b - a;
    double w = std::min(edge_width, 0.5 * len);
    std::vector<double> cuts; // offsets from the edge
    for (double off = w; off < len; off *= 2.0) cuts.push_back(off);
    cuts.push_back(len);
    EnergyPair acc{};
    double prev = 0.0;
    for (double off : cuts) {
        double lo = edge_at_right ? b - off : a + prev;
        double hi = edge_at_right ? b - prev : a + off;
        // panels far from the edge carry a vanishing share of the total; give
        // them an absolute floor so integrand noise at underflow scale cannot
        // exhaust the subdivision budget
        opt.abs_tol = 1e-13 * energy_pair_norm(acc);
        acc = acc + gk15_adaptive<EnergyPair>(f, lo, hi, opt, energy_pair_norm);
        prev = off;
    }
    return acc;
}

// Radial energies of u(r) = I_k(s r)/I_k(s) on the unit disk.
inline EnergyPair disk_energy_pair(int k, cplx s) {
    ScaledComplex den = i_scaled(k, s);
    auto f = [k, s, &den](double r) -> EnergyPair {
        cplx z = s * r;
        cplx u = ratio(i_scaled(k, z), den);
        double u2 = std::norm(u);
        if (u2 == 0.0) return {0.0, 0.0};
        cplx dlog = s * log_deriv_i_impl(k, z);
        double grad = u2 * (std::norm(dlog) + static_cast<double>(k) * k / (r * r)) * r;
        return {grad, u2 * r};
    };
    double w = 0.25 * std::min(1.0 / (k + 1.0), 1.0 / std::max(1.0, s.real()));
    EnergyPair e = energy_ladder(f, 0.0, 1.0, true, w);
    return 2.0 * pi() * e;
}

// Radial energies of u(r) = K_k(s r)/K_k(s) on r > 1, truncated at
// R = 1 + max(20/Re s, 10) with the exponential tail added back.
inline EnergyPair exterior_energy_pair(int k, cplx s) {
    ScaledComplex den = k_scaled(k, s);
    auto f = [k, s, &den](double r) -> EnergyPair {
        cplx z = s * r;
        cplx u = ratio(k_scaled(k, z), den);
        double u2 = std::norm(u);
        if (u2 == 0.0) return {0.0, 0.0};
        cplx dlog = s * log_deriv_k_impl(k, z);
        double grad = u2 * (std::norm(dlog) + static_cast<double>(k) * k / (r * r)) * r;
        return {grad, u2 * r};
    };
    double rmax = 1.0 + std::max(20.0 / s.real(), 10.0);
    double w = 0.25 * std::min(1.0 / (k + 1.0), 1.0 / std::max(1.0, s.real()));
    EnergyPair e = energy_ladder(f, 1.0, rmax, false, w);
    // integrand decays like e^{-2 Re(s)(r - rmax)} past the cut
    EnergyPair tail = (1.0 / (2.0 * s.real())) * f(rmax);
    return 2.0 * pi() * (e + tail);
}

// Lommel-type closed forms for the same pairs; independent of the quadrature
// path, used as a cross-check.  Valid off the real axis via the cross-product
// identity and on it via the confluent limit.
inline EnergyPair disk_energy_pair_closed(int k, cplx s) {
    double tp = 2.0 * pi();
    cplx L = log_deriv_i(k, s);
    double mass;
    if (s.imag() == 0.0) {
        double sg = s.real();
        mass = pi() * ((1.0 + static_cast<double>(k) * k / (sg * sg)) - std::norm(L));
    } else {
        mass = tp * std::imag(s * L) / std::imag(s * s);
    }
    double grad = std::real(tp * s * L) - std::real(s * s) * mass;
    return {grad, mass};
}

inline EnergyPair exterior_energy_pair_closed(int k, cplx s) {
    double tp = 2.0 * pi();
    cplx L = log_deriv_k(k, s);
    double mass;
    if (s.imag() == 0.0) {
        double sg = s.real();
        mass = pi() * (std::norm(L) - (1.0 + static_cast<double>(k) * k / (sg * sg)));
    } else {
        mass = -tp * std::imag(s * L) / std::imag(s * s);
    }
    double grad = std::real(-tp * s * L) - std::real(s * s) * mass;
    return {grad, mass};
}

} // namespace detail

// ||u||^2_{H^1(disk, sigma)} for the outgoing-free modal extension
// u = (I_k(s r)/I_k(s)) e^{ik theta}; sigma defaults to |s|.
inline double field_energy_disk(int k, const Wavenumber& s, double sigma = -1.0) {
    if (sigma < 0.0) sigma = s.sigma;
    auto e = detail::disk_energy_pair(std::abs(k), s.s);
    return e.grad + sigma * sigma * e.mass;
}

inline double field_energy_exterior_disk(int k, const Wavenumber& s,
                                         double sigma = -1.0) {
    if (sigma < 0.0) sigma = s.sigma;
    auto e = detail::exterior_energy_pair(std::abs(k), s.s);
    return e.grad + sigma * sigma * e.mass;
}

} // namespace helmtrace
