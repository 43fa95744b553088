// End-to-end acceptance gate.  Each numbered check prints one [PASS]/[FAIL]
// line with its measured figure of merit and wall time; the process exits
// nonzero if any check fails.  Tolerances and runtime budgets are pinned here
// on purpose -- loosening them is a code change, not a config change.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <helmtrace/extension.hpp>
#include <helmtrace/fem.hpp>
#include <helmtrace/gagliardo.hpp>
#include <helmtrace/layer_ops.hpp>
#include <helmtrace/sweep.hpp>
#include <helmtrace/trace_space.hpp>

using namespace helmtrace;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i)
        g.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i /
                             (n - 1)));
    return g;
}

char buf[256];

// 1. Wronskian of the modified Bessel pair on random complex arguments.
Outcome check_wronskian_spine() {
    const double tol = 1e-11, budget = 5.0;
    double t0 = now_seconds();
    std::mt19937 gen(20240917u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        int k = static_cast<int>(u(gen) * 64.999);
        double mag = std::exp(std::log(1e-3) + u(gen) * std::log(1e6));
        double ph = (u(gen) - 0.5) * 3.0;
        cplx z = std::polar(mag, ph);
        cplx v = (detail::i_scaled(k, z) * detail::k_scaled(k, z)).value();
        cplx li = detail::log_deriv_i_impl(k, z);
        cplx lk = detail::log_deriv_k_impl(k, z);
        // I'_k K_k - I_k K'_k = 1/z, normalized by |1/z|
        double res = std::abs(z * v * (li - lk) - 1.0);
        worst = std::max(worst, res);
    }
    double dt = now_seconds() - t0;
    std::snprintf(buf, sizeof buf, "max |z(I'K - IK') - 1| = %.3g (tol %.0e) in %.2fs",
                  worst, tol, dt);
    return {worst <= tol && dt < budget, buf};
}

// 2. Variational energy equals the Dirichlet-to-Neumann pairing value.
Outcome check_energy_identity() {
    const double tol = 1e-8, budget = 10.0;
    double t0 = now_seconds();
    double worst = 0.0;
    for (int i = 0; i < 7; ++i) {
        double sig = std::pow(10.0, -3.0 + i);
        Weight w(sig);
        Wavenumber wn(cplx{sig, 0.0});
        for (int k = 0; k <= 16; ++k) {
            double din = 2.0 * detail::pi() * dtn_disk(k, w);
            double dex = 2.0 * detail::pi() * dtn_exterior_disk(k, w);
            worst = std::max(worst, std::abs(field_energy_disk(k, wn) - din) / din);
            worst = std::max(worst,
                             std::abs(field_energy_exterior_disk(k, wn) - dex) / dex);
        }
    }
    double dt = now_seconds() - t0;
    std::snprintf(buf, sizeof buf,
                  "max |energy - 2pi dtn| / value = %.3g (tol %.0e) in %.2fs", worst,
                  tol, dt);
    return {worst <= tol && dt < budget, buf};
}

// 3. Quadrature route for the fractional seminorm against the eigenvalues.
Outcome check_gagliardo_routes() {
    const double tol = 1e-8, budget = 20.0;
    const std::size_t n = 512;
    double t0 = now_seconds();
    double worst = 0.0;
    auto sample = [n](const FourierTrace& g) {
        std::vector<cplx> s(n);
        for (std::size_t j = 0; j < n; ++j) {
            double th = 2.0 * detail::pi() * static_cast<double>(j) / n;
            cplx acc{0.0, 0.0};
            for (int k = -g.max_mode(); k <= g.max_mode(); ++k)
                acc += g.coeff(k) * std::polar(1.0, k * th);
            s[j] = acc;
        }
        return s;
    };
    for (int k = 0; k <= 16; ++k) {
        FourierTrace g = FourierTrace::mode(k);
        double q = gagliardo_circle(sample(g));
        double ref = gagliardo_eigen_circle(k);
        double err = (k == 0) ? std::abs(q) : std::abs(q - ref) / ref;
        worst = std::max(worst, err);
    }
    std::mt19937 gen(0x9a617a0du);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        FourierTrace g(100);
        for (int k = -100; k <= 100; ++k) g.set(k, {u(gen), u(gen)});
        double q = gagliardo_circle(sample(g));
        double ref = 0.0;
        for (int k = -100; k <= 100; ++k)
            ref += gagliardo_eigen_circle(k) * std::norm(g.coeff(k));
        worst = std::max(worst, std::abs(q - ref) / ref);
    }
    double dt = now_seconds() - t0;
    std::snprintf(buf, sizeof buf, "max route disagreement = %.3g (tol %.0e) in %.2fs",
                  worst, tol, dt);
    return {worst <= tol && dt < budget, buf};
}

// 4. Conforming finite element energies: upper bounds with a contracting gap.
Outcome check_fem_oracle() {
    const double gap_cap = 0.02, contraction_min = 1.5, budget = 120.0;
    double t0 = now_seconds();
    const std::vector<double> sigmas = {1e-2, 1e-1, 1.0, 1e1, 1e2};
    Mesh coarse = mesh_disk(0.1), fine = mesh_disk(0.05);
    double def_c = (detail::pi() - coarse.area()) / detail::pi();
    double def_f = (detail::pi() - fine.area()) / detail::pi();
    int upper_fail = 0;
    double worst_gap = 0.0, worst_contraction = 1e300;
    int qualifying = 0;
    for (double sig : sigmas) {
        Weight w(sig);
        MinExtensionSolver sc(coarse, sig, ExtensionVariant::Standard);
        MinExtensionSolver sf(fine, sig, ExtensionVariant::Standard);
        for (int k = 0; k <= 4; ++k) {
            FourierTrace g = FourierTrace::mode(k);
            double exact = 2.0 * detail::pi() * dtn_disk(k, w);
            double ec = sc.solve(g).energy, ef = sf.solve(g).energy;
            if (ec < exact * (1.0 - 2.0 * def_c) * (1.0 - 1e-9)) ++upper_fail;
            if (ef < exact * (1.0 - 2.0 * def_f) * (1.0 - 1e-9)) ++upper_fail;
            double gc = ec / exact - 1.0, gf = ef / exact - 1.0;
            worst_gap = std::max(worst_gap, gf);
            if (gc >= 1e-3) {
                ++qualifying;
                worst_contraction = std::min(worst_contraction, gc / gf);
            }
        }
    }
    double dt = now_seconds() - t0;
    bool pass = upper_fail == 0 && worst_gap <= gap_cap && qualifying > 0 &&
                worst_contraction >= contraction_min && dt < budget;
    std::snprintf(buf, sizeof buf,
                  "upper-bound fails %d, worst gap %.3g (cap %.0e), contraction "
                  ">= %.2f on %d rows in %.1fs",
                  upper_fail, worst_gap, gap_cap, worst_contraction, qualifying, dt);
    return {pass, buf};
}

// 5. Disk weights versus the diagonal Gagliardo weights: bounded band.
Outcome check_disk_band() {
    const double band_cap = 10.0, budget = 5.0;
    double t0 = now_seconds();
    double sup = 0.0, inf = 1e300;
    for (double sig : log_grid(1e-4, 1e4, 25)) {
        Weight w(sig);
        for (int k = 0; k <= 64; ++k) {
            double h = 2.0 * detail::pi() * dtn_disk(k, w);
            double gd = gagliardo_eigen_circle(k) +
                        2.0 * detail::pi() * sig * w.sigma_low;
            double r = h / gd;
            sup = std::max(sup, r);
            inf = std::min(inf, r);
        }
    }
    double dt = now_seconds() - t0;
    bool pass = std::isfinite(sup) && inf > 0.0 && sup / inf <= band_cap && dt < budget;
    std::snprintf(buf, sizeof buf, "ratio band [%.4g, %.4g], sup/inf = %.3g (cap %g) in %.2fs",
                  inf, sup, sup / inf, band_cap, dt);
    return {pass, buf};
}

// 6. Exterior ball weights versus Gagliardo at the lifted weight max{1, sigma}.
Outcome check_exterior_ball_band() {
    const double l0_tol = 1e-10, budget = 5.0;
    double t0 = now_seconds();
    double sup = 0.0, inf = 1e300, worst_l0 = 0.0;
    for (double sig : log_grid(1e-4, 1e4, 25)) {
        Weight w(sig);
        double lift = std::max(1.0, sig);
        for (int l = 0; l <= 64; ++l) {
            double h = dtn_exterior_ball(l, w);
            double gd = gagliardo_eigen_sphere(l) + lift;
            double r = h / gd;
            sup = std::max(sup, r);
            inf = std::min(inf, r);
            if (l == 0) {
                double ref = (1.0 + sig) / lift;
                worst_l0 = std::max({worst_l0, std::abs(r - ref),
                                     r < 1.0 ? 1.0 - r : 0.0,
                                     r > 2.0 ? r - 2.0 : 0.0});
            }
        }
    }
    double dt = now_seconds() - t0;
    bool pass = std::isfinite(sup) && inf > 0.0 && worst_l0 <= l0_tol && dt < budget;
    std::snprintf(buf, sizeof buf,
                  "ratio band [%.4g, %.4g]; l=0 deviation from (1+s)/max(1,s): %.3g "
                  "(tol %.0e) in %.2fs",
                  inf, sup, worst_l0, l0_tol, dt);
    return {pass, buf};
}

// 7. Two-dimensional exterior counterexample: the k = 0 ratio decays.
Outcome check_exterior_2d_decay() {
    double t0 = now_seconds();
    std::vector<double> vals;
    for (double sig : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6})
        vals.push_back(dtn_exterior_disk(0, Weight(sig)));
    bool monotone = true;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (!(vals[i] < vals[i - 1])) monotone = false;
    bool halved = vals.back() < 0.5 * vals.front();
    double dt = now_seconds() - t0;
    std::snprintf(buf, sizeof buf,
                  "ratio falls %.4g -> %.4g over sigma 1e-2 -> 1e-6 (monotone %s) in %.2fs",
                  vals.front(), vals.back(), monotone ? "yes" : "no", dt);
    return {monotone && halved && dt < 5.0, buf};
}

// 8. Weight scaling per mode against the sigma = 1 weights.
Outcome check_scaling() {
    const double slack = 1e-12, budget = 30.0;
    double t0 = now_seconds();
    int fails = 0;
    double c_sc = 1.0, worst_eq = 0.0;
    auto grid = log_grid(1e-4, 1e4, 25);
    for (const Geometry& geo : {Geometry::disk(), Geometry::ball()}) {
        auto p1 = make_extension_profile(geo, Weight(1.0), 64);
        for (double sig : grid) {
            Weight w(sig);
            auto p = make_extension_profile(geo, w, 64);
            for (int k = 0; k <= 64; ++k) {
                double h1 = p1.weights.weight_at(k), hs = p.weights.weight_at(k);
                double low = w.sigma_low * w.sigma_low * h1;
                double up = std::pow(std::max(1.0, sig), 2) * h1;
                if (low > hs * (1.0 + slack)) ++fails;
                if (hs > up * (1.0 + slack)) ++fails;
                if (sig > 1.0) c_sc = std::max(c_sc, std::sqrt(hs / h1 / sig));
                if (std::abs(sig - 1.0) < 1e-12)
                    worst_eq = std::max(worst_eq, std::abs(hs - h1) / h1);
            }
        }
    }
    double dt = now_seconds() - t0;
    bool pass = fails == 0 && std::isfinite(c_sc) && worst_eq <= 1e-12 && dt < budget;
    std::snprintf(buf, sizeof buf,
                  "%d grid violations, C_sc = %.6g, sigma=1 deviation %.3g (tol 1e-12) "
                  "in %.2fs",
                  fails, c_sc, worst_eq, dt);
    return {pass, buf};
}

// 9. Constant-trace sharpness on the annulus: ratio ~ min{1, sigma}.
Outcome check_sharpness() {
    const double lin_tol = 0.2, budget = 10.0;
    double t0 = now_seconds();
    Geometry ann = Geometry::annulus(0.5);
    double c = 0.0, worst_lin = 0.0;
    auto grid = log_grid(1e-4, 1.0, 25);
    std::vector<std::pair<double, double>> pts;
    for (double sig : grid) {
        Weight w(sig);
        auto std_p = make_extension_profile(ann, w, 0);
        auto alt_p = make_extension_profile(ann, w, 0, ExtensionVariant::Alternative);
        double ratio =
            std::sqrt(std_p.weights.weight_at(0) / alt_p.weights.weight_at(0));
        c = std::max(c, ratio / w.sigma_low);
        pts.emplace_back(sig, ratio);
    }
    double slope = pts.front().second / pts.front().first;
    int lin_pts = 0;
    for (auto [sig, ratio] : pts)
        if (sig <= 0.1) {
            ++lin_pts;
            worst_lin = std::max(worst_lin, std::abs(ratio / (slope * sig) - 1.0));
        }
    double dt = now_seconds() - t0;
    bool pass = std::isfinite(c) && c > 0.0 && worst_lin <= lin_tol && lin_pts >= 10 &&
                dt < budget;
    std::snprintf(buf, sizeof buf,
                  "single C = %.6g; worst linearity deviation %.3g on %d points (tol "
                  "%.2f) in %.2fs",
                  c, worst_lin, lin_pts, lin_tol, dt);
    return {pass, buf};
}

// 10. Layer operator bound suite plus the real-axis equality and coercivity.
Outcome check_operator_bounds() {
    const double nd_tol = 1e-9, budget = 60.0;
    double t0 = now_seconds();
    const double phases[] = {0.0, 0.39269908169872414, -0.39269908169872414,
                             0.7853981633974483, -0.7853981633974483, 1.45, -1.45};
    auto grid = log_grid(1e-3, 1e3, 25);
    long violations = 0;
    double worst_margin = 1e300;
    std::string worst_bound;
    for (double sig : grid) {
        for (double ph : phases) {
            Wavenumber wn(std::polar(sig, ph));
            BoundReport rep = check_continuity_bounds(layer_spectrum(wn, 64));
            for (const auto& r : rep.rows)
                if (!r.pass) ++violations;
            if (rep.worst_margin < worst_margin) {
                worst_margin = rep.worst_margin;
                worst_bound = rep.worst_bound;
            }
        }
    }
    double t_bounds = now_seconds() - t0;
    bool bounds_ok = violations == 0 && t_bounds < budget;

    double worst_nd = 0.0;
    for (double sig : grid) {
        Wavenumber wn(cplx{sig, 0.0});
        for (int k = 0; k <= 64; ++k)
            worst_nd = std::max(worst_nd,
                                std::abs(check_normal_derivative_bound(k, wn) - 1.0));
    }

    long coercivity_fails = 0;
    for (double sig : grid) {
        for (double ph : phases) {
            Wavenumber wn(std::polar(sig, ph));
            for (int k = 0; k <= 64; k += 4) {
                auto m = check_coercivity(k, wn);
                double scale = std::abs(m.l);
                if (m.abs_over_rot < -1e-12 * scale) ++coercivity_fails;
                if (m.rot_over_energy < -1e-10 * scale) ++coercivity_fails;
            }
        }
    }
    bool pass = bounds_ok && worst_nd <= nd_tol && coercivity_fails == 0;
    std::snprintf(buf, sizeof buf,
                  "%ld bound violations, worst margin %.3g (%s) in %.1fs; real-axis "
                  "|ratio-1| %.3g (tol %.0e); %ld coercivity fails",
                  violations, worst_margin, worst_bound.c_str(), t_bounds, worst_nd,
                  nd_tol, coercivity_fails);
    return {pass, buf};
}

// 11. Singular-quadrature oracle against the analytic layer eigenvalues.
Outcome check_layer_oracle() {
    const double tol = 1e-7, budget = 60.0;
    double t0 = now_seconds();
    double worst = 0.0;
    for (double mag : {0.5, 3.0, 10.0}) {
        for (double ph : {0.0, 0.7, 1.3}) {
            Wavenumber wn(std::polar(mag, ph));
            auto spec = layer_spectrum(wn, 32);
            for (int k = 0; k <= 32; ++k) {
                cplx q = v_quadrature_oracle(k, wn.s);
                cplx a = spec.mode(k).v;
                worst = std::max(worst, std::abs(q - a) / std::abs(a));
            }
        }
    }
    double dt = now_seconds() - t0;
    std::snprintf(buf, sizeof buf, "max oracle disagreement %.3g (tol %.0e) in %.2fs",
                  worst, tol, dt);
    return {worst <= tol && dt < budget, buf};
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome (*run)();
    };
    const Entry entries[] = {
        {"01 bessel wronskian spine", check_wronskian_spine},
        {"02 variational energy identity", check_energy_identity},
        {"03 independent seminorm routes", check_gagliardo_routes},
        {"04 finite element upper bounds", check_fem_oracle},
        {"05 disk weight band", check_disk_band},
        {"06 exterior ball weight band", check_exterior_ball_band},
        {"07 planar exterior decay", check_exterior_2d_decay},
        {"08 weight scaling", check_scaling},
        {"09 annulus sharpness", check_sharpness},
        {"10 operator bound suite", check_operator_bounds},
        {"11 layer quadrature oracle", check_layer_oracle},
    };
    int failures = 0;
    for (const auto& e : entries) {
        Outcome out;
        try {
            out = e.run();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] %s: %s\n", out.pass ? "PASS" : "FAIL", e.name,
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of 11 checks failed\n", failures);
        return 1;
    }
    std::printf("all 11 checks passed\n");
    return 0;
}
