#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <helmtrace/gagliardo.hpp>
#include <helmtrace/trace_space.hpp>

using helmtrace::cplx;
using helmtrace::FourierTrace;
using helmtrace::gagliardo_circle;
using helmtrace::gagliardo_line;
using helmtrace::split_inequality_check;

namespace {

const double pi = helmtrace::detail::pi();

std::vector<cplx> sample_trace(const FourierTrace& g, std::size_t n) {
    std::vector<cplx> s(n);
    for (std::size_t j = 0; j < n; ++j) {
        double th = 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
        cplx acc{0.0, 0.0};
        for (int k = -g.max_mode(); k <= g.max_mode(); ++k)
            acc += g.coeff(k) * std::polar(1.0, k * th);
        s[j] = acc;
    }
    return s;
}

double spectral_value(const FourierTrace& g) {
    double s = 0.0;
    for (int k = -g.max_mode(); k <= g.max_mode(); ++k)
        s += 4.0 * pi * pi * std::abs(k) * std::norm(g.coeff(k));
    return s;
}

FourierTrace random_trace(int kmax, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FourierTrace g(kmax);
    for (int k = -kmax; k <= kmax; ++k) g.set(k, cplx{u(rng), u(rng)});
    return g;
}

} // namespace

TEST_CASE("circle quadrature reproduces single-mode values") {
    auto g1 = FourierTrace::mode(1);
    double v1 = gagliardo_circle(sample_trace(g1, 256));
    CHECK(std::abs(v1 - 4.0 * pi * pi) < 1e-10 * 4.0 * pi * pi);

    std::vector<cplx> flat(128, cplx{0.7, -0.3});
    CHECK(gagliardo_circle(flat) == 0.0);

    FourierTrace g(5);
    g.set(3, {1.0, 0.0});
    g.set(-5, {2.0, 0.0});
    double v = gagliardo_circle(sample_trace(g, 256));
    double want = 4.0 * pi * pi * (3.0 + 4.0 * 5.0);
    CHECK(std::abs(v - want) < 1e-9 * want);
}

TEST_CASE("circle quadrature matches spectral sum on random band-limited data") {
    std::mt19937 rng(2026);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_trace(16, rng);
        double v = gagliardo_circle(sample_trace(g, 256));
        double want = spectral_value(g);
        CHECK(std::abs(v - want) <= 1e-8 * want);
        CHECK(v >= 0.0);
    }
}

TEST_CASE("circle quadrature invariances") {
    std::mt19937 rng(7);
    auto g = random_trace(12, rng);
    auto s = sample_trace(g, 256);

    SECTION("conjugating the samples preserves the value") {
        auto sc = s;
        for (auto& v : sc) v = std::conj(v);
        CHECK(gagliardo_circle(sc) == Catch::Approx(gagliardo_circle(s)).epsilon(1e-13));
    }
    SECTION("grid refinement changes the value below 1e-12") {
        double v1 = gagliardo_circle(s);
        double v2 = gagliardo_circle(sample_trace(g, 512));
        CHECK(std::abs(v1 - v2) < 1e-12 * v1);
    }
}

TEST_CASE("circle quadrature plus weighted mass matches the diagonal norm") {
    std::mt19937 rng(99);
    auto g = random_trace(32, rng);
    auto s = sample_trace(g, 256);
    double semi = gagliardo_circle(s);
    for (double sigma : {1e-3, 1.0, 1e3}) {
        helmtrace::Weight w(sigma);
        double lhs = std::pow(helmtrace::sobolev_weighted_norm(g, w), 2);
        double rhs = semi + sigma * w.sigma_low * g.l2_norm_sq();
        CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);
    }
}

TEST_CASE("circle quadrature input validation") {
    CHECK_THROWS_AS(gagliardo_circle(std::vector<cplx>(32)), std::invalid_argument);
    CHECK_THROWS_AS(gagliardo_circle(std::vector<cplx>(100)), std::invalid_argument);
    auto high = sample_trace(FourierTrace::mode(100), 256); // at N/4 boundary and beyond
    CHECK_THROWS_AS(gagliardo_circle(high), std::invalid_argument);
}

namespace {

std::vector<cplx> sample_line(double (*f)(double), double x0, double dx, std::size_t n,
                              double shift = 0.0) {
    std::vector<cplx> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = cplx{f(x0 + dx * static_cast<double>(i) - shift), 0.0};
    return s;
}

double hat(double x) { return std::max(0.0, 1.0 - std::abs(x)); }
double gauss(double x) { return std::exp(-0.5 * x * x); }

} // namespace

TEST_CASE("line quadrature recovers the Fourier convention constant") {
    // |g|^2 = C * integral |xi| |ghat|^2 with ghat(xi) = int g e^{-i x xi} dx;
    // the two reference profiles have exact spectral integrals 8 ln 2 and 2 pi.
    std::size_t n = 2048;
    double vh = gagliardo_line(sample_line(&hat, -4.0, 8.0 / static_cast<double>(n), n),
                               8.0 / static_cast<double>(n));
    double vg = gagliardo_line(sample_line(&gauss, -12.0, 24.0 / static_cast<double>(n), n),
                               24.0 / static_cast<double>(n));
    double c_hat = vh / (8.0 * std::log(2.0));
    double c_gauss = vg / (2.0 * pi);
    INFO("measured convention constants: hat " << c_hat << ", gaussian " << c_gauss);
    CHECK(c_hat > 0.0);
    CHECK(c_gauss > 0.0);
    CHECK(std::abs(c_hat / c_gauss - 1.0) < 1e-3);
}

TEST_CASE("line quadrature is invariant under whole-step translation") {
    std::size_t n = 2048;
    double dx = 8.0 / static_cast<double>(n);
    double v0 = gagliardo_line(sample_line(&hat, -4.0, dx, n), dx);
    double v1 = gagliardo_line(sample_line(&hat, -4.0, dx, n, 1.0), dx); // shift by half the support
    CHECK(std::abs(v0 - v1) < 1e-8 * v0);
}

TEST_CASE("line quadrature edge cases") {
    CHECK(gagliardo_line(std::vector<cplx>(128), 0.1) == 0.0);
    std::size_t n = 128;
    double dx = 6.0 / static_cast<double>(n);
    auto clipped = sample_line(&gauss, -3.0, dx, n); // nonzero at the grid edge
    CHECK_THROWS_AS(gagliardo_line(clipped, dx), std::invalid_argument);
    auto ok = sample_line(&hat, -4.0, 8.0 / 128.0, 128);
    CHECK_THROWS_AS(gagliardo_line(ok, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gagliardo_line(std::vector<cplx>(48), 0.1), std::invalid_argument);
}

namespace {

// C^inf bump supported on (lo, hi), zero outside.
std::vector<cplx> arc_bump(std::size_t n, double lo, double hi) {
    std::vector<cplx> s(n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        double th = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        double t = (th - lo) / (hi - lo);
        if (t > 0.0 && t < 1.0) s[i] = cplx{std::exp(-1.0 / (t * (1.0 - t))), 0.0};
    }
    return s;
}

std::vector<cplx> arc_indicator(std::size_t n, std::pair<double, double> a1,
                                std::pair<double, double> a2) {
    std::vector<cplx> s(n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        double th = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        bool in1 = th >= a1.first && th <= a1.second;
        bool in2 = th >= a2.first && th <= a2.second;
        if (in1 || in2) s[i] = cplx{1.0, 0.0};
    }
    return s;
}

} // namespace

TEST_CASE("arc decomposition inequalities") {
    std::size_t n = 512;
    std::pair<double, double> arc1{0.0, 0.5 * pi};
    std::pair<double, double> arc2{pi, 1.5 * pi};

    SECTION("data supported on one arc: strict cross term") {
        auto rep = split_inequality_check(arc_bump(n, 0.1, 0.5 * pi - 0.1), arc1, arc2);
        CHECK(rep.lower_holds);
        CHECK(rep.parts_sum > 0.0);
        CHECK(rep.whole > rep.parts_sum); // pairs against the zero tail
    }
    SECTION("indicator of the two arcs: restricted seminorms vanish") {
        auto rep = split_inequality_check(arc_indicator(n, arc1, arc2), arc1, arc2);
        CHECK(rep.parts_sum == 0.0);
        CHECK(rep.whole > 0.1);
        CHECK(rep.lower_holds);
    }
    SECTION("random band-limited data: both inequalities, constant recorded") {
        std::mt19937 rng(11);
        auto g = random_trace(16, rng);
        auto rep = split_inequality_check(sample_trace(g, n), arc1, arc2);
        INFO("measured splitting constant " << rep.c_spl);
        CHECK(rep.lower_holds);
        CHECK(rep.c_spl >= 0.0);
        CHECK(rep.l2_sq > 0.0);
    }
    SECTION("arc validation") {
        auto s = arc_bump(n, 0.1, 1.0);
        CHECK_THROWS_AS(split_inequality_check(s, {0.0, pi}, {pi + 0.1, 1.9 * pi}),
                        std::invalid_argument); // gap below pi/8
        CHECK_THROWS_AS(split_inequality_check(s, {1.0, 0.5}, arc2), std::invalid_argument);
        CHECK_THROWS_AS(split_inequality_check(s, {0.0, 4.0}, {3.0, 5.0}),
                        std::invalid_argument); // overlapping
    }
}
