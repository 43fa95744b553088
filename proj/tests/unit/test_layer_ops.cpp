#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include <helmtrace/layer_ops.hpp>

using helmtrace::BoundReport;
using helmtrace::check_coercivity;
using helmtrace::check_continuity_bounds;
using helmtrace::check_normal_derivative_bound;
using helmtrace::cplx;
using helmtrace::layer_spectrum;
using helmtrace::LayerSpectrum;
using helmtrace::v_quadrature_oracle;
using helmtrace::Wavenumber;

namespace {

constexpr double two_pi = 6.283185307179586476925287;

const helmtrace::BoundRow& find_row(const BoundReport& rep, int k, const char* name) {
    for (const auto& r : rep.rows)
        if (r.k == k && r.bound_name == name) return r;
    FAIL("row not found");
    return rep.rows.front();
}

} // namespace

TEST_CASE("mode spectra satisfy the jump identities") {
    for (double ph : {0.0, 0.6, -1.2}) {
        for (double sig : {1.1e-3, 0.3, 7.0, 9.9e2}) {
            auto spec = layer_spectrum(Wavenumber(std::polar(sig, ph)), 48);
            REQUIRE(spec.modes.size() == 49);
            for (const auto& m : spec.modes) {
                // Neumann trace of the single layer jumps by the density
                CHECK(std::abs(m.s_neumann_in - m.s_neumann_ext - 1.0) <= 1e-11);
                // Dirichlet trace of the double layer jumps by minus the density
                CHECK(std::abs(m.d_dirichlet_in - m.d_dirichlet_ext + 1.0) <= 1e-11);
                // both trace averages coincide mode by mode on the circle
                CHECK(std::abs(m.kop - m.kdual) <= 1e-12 * (1.0 + std::abs(m.kop)));
            }
        }
    }
}

TEST_CASE("single layer symbol values") {
    auto spec = layer_spectrum(Wavenumber(cplx{1.0, 0.0}), 4);
    CHECK_THAT(spec.mode(0).v.real(),
               Catch::Matchers::WithinRel(0.5330446749562686, 1e-13));
    CHECK(std::abs(spec.mode(0).v.imag()) <= 1e-15);
    CHECK(std::abs(spec.mode(-3).v - spec.mode(3).v) == 0.0);

    auto spec25 = layer_spectrum(Wavenumber(cplx{2.5, 0.0}), 4);
    CHECK_THAT(spec25.mode(3).v.real(),
               Catch::Matchers::WithinRel(0.1272390210800266, 1e-13));

    auto spec1i = layer_spectrum(Wavenumber(cplx{1.0, 1.0}), 8);
    CHECK(std::abs(spec1i.mode(5).v -
                   cplx{0.09970713176417184, -0.004137184742496865}) <= 1e-14);

    // W_0(1) = I_0'(1) K_0'(1)
    CHECK_THAT(spec.mode(0).w.real(),
               Catch::Matchers::WithinRel(-0.3401733509048675, 1e-12));

    // large-|s| decay of the symbol
    auto spec50 = layer_spectrum(Wavenumber(cplx{50.0, 0.0}), 0);
    CHECK(std::abs(spec50.mode(0).v) <= 1.1 / (2.0 * 50.0));
    CHECK(std::abs(spec50.mode(0).v) >= 0.9 / (2.0 * 50.0));
}

TEST_CASE("quadrature route reproduces the analytic symbol") {
    cplx o = v_quadrature_oracle(0, cplx{1.0, 0.0});
    CHECK(std::abs(o - cplx{0.5330446749562686, 0.0}) <= 1e-8);

    auto spec = layer_spectrum(Wavenumber(cplx{1.0, 1.0}), 8);
    CHECK(std::abs(v_quadrature_oracle(5, cplx{1.0, 1.0}) - spec.mode(5).v) <= 1e-7);
    // negative mode index folds onto the same coefficient
    CHECK(std::abs(v_quadrature_oracle(-5, cplx{1.0, 1.0}) - spec.mode(5).v) <= 1e-7);

    for (double ph : {0.0, 0.7, 1.3}) {
        for (double sig : {0.01, 0.5, 3.0, 10.0}) {
            cplx s = std::polar(sig, ph);
            auto sp = layer_spectrum(Wavenumber(s), 32);
            for (int k = 0; k <= 32; ++k) {
                INFO("k=" << k << " sigma=" << sig << " phase=" << ph);
                REQUIRE(std::abs(v_quadrature_oracle(k, s) - sp.mode(k).v) <= 1e-7);
            }
        }
    }
}

TEST_CASE("operator norm bounds hold along rays") {
    SECTION("real wavenumber") {
        auto rep = check_continuity_bounds(layer_spectrum(Wavenumber(cplx{1.0, 0.0}), 32));
        CHECK(rep.all_pass);
        CHECK(rep.rows.size() == 6u * 33u);
        const auto& r = find_row(rep, 0, "single_layer_trace");
        // h_0(1) |V_0(1)| = 2 pi I_1(1) K_0(1)
        CHECK_THAT(r.lhs, Catch::Matchers::WithinRel(1.4950575184942214, 1e-10));
        CHECK_THAT(r.rhs, Catch::Matchers::WithinRel(two_pi, 1e-15));
        CHECK(r.pass);
    }
    SECTION("steep ray") {
        double ph = 1.45;
        auto rep = check_continuity_bounds(
            layer_spectrum(Wavenumber(std::polar(3.0, ph)), 32));
        CHECK(rep.all_pass);
        const auto& r = find_row(rep, 4, "double_layer");
        CHECK_THAT(r.rhs, Catch::Matchers::WithinRel(0.5 + 1.0 / std::cos(ph), 1e-13));
        CHECK(rep.worst_margin > 0.0);
    }
    SECTION("extreme moduli") {
        for (double sig : {1.1e-3, 9.9e2}) {
            for (double ph : {0.0, -1.45}) {
                auto rep = check_continuity_bounds(
                    layer_spectrum(Wavenumber(std::polar(sig, ph)), 64));
                INFO("sigma=" << sig << " phase=" << ph
                              << " worst=" << rep.worst_margin << " at "
                              << rep.worst_bound);
                CHECK(rep.all_pass);
            }
        }
    }
    SECTION("hypersingular margin settles in the mode tail") {
        auto rep = check_continuity_bounds(layer_spectrum(Wavenumber(cplx{2.0, 0.0}), 64));
        double prev = find_row(rep, 32, "hypersingular").margin;
        for (int k = 40; k <= 64; k += 8) {
            double cur = find_row(rep, k, "hypersingular").margin;
            // approaches its 1/2 tail limit from below; never collapses
            CHECK(cur >= prev - 1e-12);
            CHECK(cur >= 0.4);
            CHECK(cur <= 0.5);
            prev = cur;
        }
    }
}

TEST_CASE("normal derivative dual norm saturates on the real axis") {
    for (int k : {0, 1, 3, 8}) {
        for (double sig : {0.05, 1.0, 20.0}) {
            INFO("k=" << k << " sigma=" << sig);
            CHECK_THAT(check_normal_derivative_bound(k, Wavenumber(cplx{sig, 0.0})),
                       Catch::Matchers::WithinAbs(1.0, 1e-9));
        }
    }
    CHECK_THAT(check_normal_derivative_bound(32, Wavenumber(cplx{100.0, 0.0})),
               Catch::Matchers::WithinAbs(1.0, 1e-8));
    // off the real axis the field energy strictly dominates
    for (double ph : {0.5, 1.0, 1.45}) {
        double r = check_normal_derivative_bound(2, Wavenumber(std::polar(2.0, ph)));
        CHECK(r < 1.0);
        CHECK(r > 0.0);
    }
}

TEST_CASE("rotated coercivity of the transmission form") {
    for (int k : {0, 2, 16}) {
        for (double ph : {0.0, 0.785398163397448, 1.45, -1.1}) {
            for (double sig : {0.01, 1.0, 100.0}) {
                Wavenumber wn(std::polar(sig, ph));
                auto m = check_coercivity(k, wn);
                INFO("k=" << k << " sigma=" << sig << " phase=" << ph);
                double scale = std::abs(m.l);
                REQUIRE(scale > 0.0);
                // |l| dominates its rotated real part
                CHECK(m.abs_over_rot >= -1e-13 * scale);
                // the rotated real part equals the weighted energy identically
                CHECK(std::abs(m.rot_over_energy) <= 1e-12 * scale);
                if (ph == 0.0) CHECK(std::abs(m.abs_over_rot) <= 1e-13 * scale);
            }
        }
    }
}

TEST_CASE("bound report serialization") {
    auto rep = check_continuity_bounds(layer_spectrum(Wavenumber(cplx{2.0, 1.0}), 2));
    std::ostringstream os;
    rep.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "re_s,im_s,k,bound_name,lhs,rhs,margin,pass");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
        auto c1 = line.find(',');
        CHECK(std::abs(std::stod(line.substr(0, c1)) - 2.0) <= 1e-16);
    }
    CHECK(rows == rep.rows.size());
    // 17 significant digits survive a round trip
    std::ostringstream probe;
    rep.rows.front().lhs = 0.1234567890123456789;
    double v = rep.rows.front().lhs;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    CHECK(std::stod(buf) == v);
}

TEST_CASE("layer operator preconditions") {
    CHECK_THROWS_AS(layer_spectrum(Wavenumber(cplx{2e3, 0.0}), 4), std::domain_error);
    CHECK_THROWS_AS(layer_spectrum(Wavenumber(cplx{1e-4, 0.0}), 4), std::domain_error);
    CHECK_THROWS_AS(layer_spectrum(Wavenumber(cplx{1.0, 0.0}), 129), std::domain_error);
    CHECK_THROWS_AS(layer_spectrum(Wavenumber(cplx{1.0, 0.0}), -1), std::domain_error);
    CHECK_THROWS_AS(v_quadrature_oracle(33, cplx{1.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(v_quadrature_oracle(0, cplx{-1.0, 0.1}), std::domain_error);
    CHECK_THROWS_AS(v_quadrature_oracle(0, cplx{2e3, 0.0}), std::domain_error);
    auto spec = layer_spectrum(Wavenumber(cplx{1.0, 0.0}), 2);
    CHECK_THROWS_AS(spec.mode(3), std::out_of_range);
}
