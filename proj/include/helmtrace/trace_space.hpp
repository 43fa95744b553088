#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <helmtrace/legendre.hpp>
#include <helmtrace/quadrature.hpp>

namespace helmtrace {

// Boundary data on the unit circle in the basis e_k(theta) = e^{ik theta},
// so ||g||^2_{L2} = 2 pi sum |c_k|^2.
class FourierTrace {
public:
    explicit FourierTrace(int max_mode) : kmax_(max_mode) {
        if (max_mode < 0) throw std::domain_error("FourierTrace: negative max_mode");
        c_.assign(2 * static_cast<std::size_t>(max_mode) + 1, cplx{0.0, 0.0});
    }
    static FourierTrace mode(int k, cplx amplitude = {1.0, 0.0}) {
        FourierTrace g(std::abs(k));
        g.set(k, amplitude);
        return g;
    }
    int max_mode() const { return kmax_; }
    cplx coeff(int k) const {
        if (std::abs(k) > kmax_) return {0.0, 0.0};
        return c_[static_cast<std::size_t>(k + kmax_)];
    }
    void set(int k, cplx v) {
        if (std::abs(k) > kmax_)
            throw std::out_of_range("FourierTrace: mode beyond max_mode");
        c_[static_cast<std::size_t>(k + kmax_)] = v;
    }
    double l2_norm_sq() const {
        double s = 0.0;
        for (const auto& v : c_) s += std::norm(v);
        return 2.0 * detail::pi() * s;
    }
    void serialize(std::ostream& os) const {
        char line[96];
        for (int k = -kmax_; k <= kmax_; ++k) {
            cplx v = coeff(k);
            std::snprintf(line, sizeof line, "%d %.17g %.17g\n", k, v.real(), v.imag());
            os << line;
        }
    }
    static FourierTrace deserialize(std::istream& is) {
        std::vector<std::pair<int, cplx>> rows;
        int kmax = 0;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            int k;
            double re, im;
            if (!(ls >> k >> re >> im))
                throw std::runtime_error("FourierTrace: malformed line: " + line);
            rows.emplace_back(k, cplx{re, im});
            kmax = std::max(kmax, std::abs(k));
        }
        FourierTrace g(kmax);
        for (auto& [k, v] : rows) g.set(k, v);
        return g;
    }

private:
    int kmax_;
    std::vector<cplx> c_;
};

// Zonal data on the unit sphere in the orthonormal basis Y_{l0},
// so ||g||^2_{L2} = sum |c_l|^2.
class SphericalTrace {
public:
    explicit SphericalTrace(int max_degree) {
        if (max_degree < 0) throw std::domain_error("SphericalTrace: negative degree");
        c_.assign(static_cast<std::size_t>(max_degree) + 1, cplx{0.0, 0.0});
    }
    static SphericalTrace mode(int l, cplx amplitude = {1.0, 0.0}) {
        SphericalTrace g(l);
        g.set(l, amplitude);
        return g;
    }
    int max_degree() const { return static_cast<int>(c_.size()) - 1; }
    cplx coeff(int l) const {
        if (l < 0 || l > max_degree()) return {0.0, 0.0};
        return c_[static_cast<std::size_t>(l)];
    }
    void set(int l, cplx v) {
        if (l < 0 || l > max_degree())
            throw std::out_of_range("SphericalTrace: degree out of range");
        c_[static_cast<std::size_t>(l)] = v;
    }
    double l2_norm_sq() const {
        double s = 0.0;
        for (const auto& v : c_) s += std::norm(v);
        return s;
    }
    void serialize(std::ostream& os) const {
        char line[96];
        for (int l = 0; l <= max_degree(); ++l) {
            cplx v = coeff(l);
            std::snprintf(line, sizeof line, "%d %.17g %.17g\n", l, v.real(), v.imag());
            os << line;
        }
    }

private:
    std::vector<cplx> c_;
};

struct Weight {
    double sigma;
    double sigma_low;   // min{1, sigma}
    double sigma_high;  // max{1, 1/sigma}
    explicit Weight(double s) : sigma(s) {
        if (!(s >= 1e-6 && s <= 1e6))
            throw std::domain_error("Weight: sigma outside supported window");
        sigma_low = std::min(1.0, s);
        sigma_high = std::max(1.0, 1.0 / s);
    }
};

struct Wavenumber {
    cplx s;
    double sigma;  // |s|
    double rho;    // Re s / |s|
    explicit Wavenumber(cplx value) : s(value) {
        if (!(value.real() > 0.0))
            throw std::domain_error("Wavenumber: Re s must be positive");
        sigma = std::abs(value);
        rho = value.real() / sigma;
    }
};

enum class NormLabel { HD, HDAlt, GD, HN, HNAlt };
enum class SurfaceKind { Circle, Sphere };

inline const char* to_string(NormLabel l) {
    switch (l) {
        case NormLabel::HD: return "HD";
        case NormLabel::HDAlt: return "HD-alt";
        case NormLabel::GD: return "GD";
        case NormLabel::HN: return "HN";
        case NormLabel::HNAlt: return "HN-alt";
    }
    return "?";
}

// Per-mode weights lambda_k of a norm that diagonalizes in the trace basis;
// stored for k = 0..K with lambda_{-k} = lambda_k on the circle.
struct DiagonalNormProfile {
    NormLabel label = NormLabel::HD;
    SurfaceKind surface = SurfaceKind::Circle;
    double sigma = 1.0;
    std::vector<double> lambda;

    int max_index() const { return static_cast<int>(lambda.size()) - 1; }
    double weight_at(int k) const {
        int a = std::abs(k);
        if (a > max_index())
            throw std::out_of_range("DiagonalNormProfile: mode beyond profile");
        return lambda[static_cast<std::size_t>(a)];
    }
};

inline double gagliardo_eigen_circle(int k) {
    if (std::abs(k) > 4096)
        throw std::domain_error("gagliardo_eigen_circle: |k| > 4096");
    return 4.0 * detail::pi() * detail::pi() * std::abs(k);
}

// Lambda_l = pi * int_0^pi (1 - P_l(cos g)) cos(g/2)/sin^2(g/2) dg.
inline double gagliardo_eigen_sphere(int l) {
    if (l < 0 || l > 128)
        throw std::domain_error("gagliardo_eigen_sphere: degree out of range");
    if (l == 0) return 0.0;
    auto f = [l](double g) {
        double t = std::sin(0.5 * g);
        double t2 = t * t;
        double omp = (t2 * l * l <= 10.0) ? detail::one_minus_p(l, t2)
                                          : 1.0 - legendre_p(l, std::cos(g));
        return omp * std::cos(0.5 * g) / t2;
    };
    // endpoint at 0 is removable: integrand -> l(l+1); start a hair inside
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    double eps = 1e-13;
    double head = static_cast<double>(l) * (l + 1) * eps; // rectangle for [0, eps]
    return detail::pi() * (gk15_adaptive(f, eps, detail::pi(), opt) + head);
}

inline DiagonalNormProfile gd_profile_circle(int max_mode, const Weight& w) {
    DiagonalNormProfile p;
    p.label = NormLabel::GD;
    p.surface = SurfaceKind::Circle;
    p.sigma = w.sigma;
    double l2w = 2.0 * detail::pi() * w.sigma * w.sigma_low;
    p.lambda.resize(static_cast<std::size_t>(max_mode) + 1);
    for (int k = 0; k <= max_mode; ++k)
        p.lambda[static_cast<std::size_t>(k)] = gagliardo_eigen_circle(k) + l2w;
    return p;
}

inline DiagonalNormProfile gd_profile_sphere(int max_degree, const Weight& w) {
    DiagonalNormProfile p;
    p.label = NormLabel::GD;
    p.surface = SurfaceKind::Sphere;
    p.sigma = w.sigma;
    double l2w = w.sigma * w.sigma_low;
    p.lambda.resize(static_cast<std::size_t>(max_degree) + 1);
    for (int l = 0; l <= max_degree; ++l)
        p.lambda[static_cast<std::size_t>(l)] = gagliardo_eigen_sphere(l) + l2w;
    return p;
}

inline double diag_norm(const DiagonalNormProfile& p, const FourierTrace& g) {
    if (p.surface != SurfaceKind::Circle)
        throw std::invalid_argument("diag_norm: profile is not a circle profile");
    double s = 0.0;
    for (int k = -g.max_mode(); k <= g.max_mode(); ++k)
        s += p.weight_at(k) * std::norm(g.coeff(k));
    return std::sqrt(s);
}

inline double diag_norm(const DiagonalNormProfile& p, const SphericalTrace& g) {
    if (p.surface != SurfaceKind::Sphere)
        throw std::invalid_argument("diag_norm: profile is not a sphere profile");
    double s = 0.0;
    for (int l = 0; l <= g.max_degree(); ++l)
        s += p.weight_at(l) * std::norm(g.coeff(l));
    return std::sqrt(s);
}

inline double sobolev_weighted_norm(const FourierTrace& g, const Weight& w) {
    return diag_norm(gd_profile_circle(g.max_mode(), w), g);
}

inline double sobolev_weighted_norm(const SphericalTrace& g, const Weight& w) {
    return diag_norm(gd_profile_sphere(g.max_degree(), w), g);
}

// Bilinear duality pairing sum_k 2 pi d_k c_{-k} (no conjugation).
inline cplx pairing(const FourierTrace& g_n, const FourierTrace& g_d) {
    int kmax = std::max(g_n.max_mode(), g_d.max_mode());
    cplx s{0.0, 0.0};
    for (int k = -kmax; k <= kmax; ++k) s += g_n.coeff(k) * g_d.coeff(-k);
    return 2.0 * detail::pi() * s;
}

inline double dual_norm(const DiagonalNormProfile& p, const FourierTrace& g_n) {
    if (p.surface != SurfaceKind::Circle)
        throw std::invalid_argument("dual_norm: profile is not a circle profile");
    double tp = 2.0 * detail::pi();
    double s = 0.0;
    for (int k = -g_n.max_mode(); k <= g_n.max_mode(); ++k) {
        double a = std::norm(g_n.coeff(k));
        if (a == 0.0) continue;
        double lam = p.weight_at(k);
        if (lam == 0.0) throw std::domain_error("dual_norm: zero diagonal weight");
        s += tp * tp * a / lam;
    }
    return std::sqrt(s);
}

inline double dual_norm(const DiagonalNormProfile& p, const SphericalTrace& g_n) {
    if (p.surface != SurfaceKind::Sphere)
        throw std::invalid_argument("dual_norm: profile is not a sphere profile");
    double s = 0.0;
    for (int l = 0; l <= g_n.max_degree(); ++l) {
        double a = std::norm(g_n.coeff(l));
        if (a == 0.0) continue;
        double lam = p.weight_at(l);
        if (lam == 0.0) throw std::domain_error("dual_norm: zero diagonal weight");
        s += a / lam;
    }
    return std::sqrt(s);
}

// Norm over a disjoint union of boundary components: the squares add.
inline double decompose_union(const std::vector<DiagonalNormProfile>& profiles,
                              const std::vector<FourierTrace>& parts) {
    if (profiles.size() != parts.size())
        throw std::invalid_argument("decompose_union: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        double n = diag_norm(profiles[i], parts[i]);
        s += n * n;
    }
    return std::sqrt(s);
}

} // namespace helmtrace
