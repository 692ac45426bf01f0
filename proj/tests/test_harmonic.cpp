#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <vector>

#include "fuplab/error.hpp"
#include "fuplab/harmonic.hpp"
#include "fuplab/quad.hpp"

using namespace fuplab;

namespace {

constexpr double kPi = 3.14159265358979323846;

SlitDomainSpec left_slit() {
    SlitDomainSpec s;
    s.r = 0.5;
    s.slit_lo = -1.0;
    s.slit_hi = 0.0;
    s.t = 0.5;
    return s;
}

// expected per-bin counts for a line piece of a strip histogram
std::vector<double> line_expected(const PieceHistogram& piece, double t, double r,
                                  long long n_paths) {
    std::vector<double> e;
    for (size_t i = 0; i + 1 < piece.edges.size(); ++i)
        e.push_back(double(n_paths) * (strip_cdf(t, r, piece.edges[i + 1]) -
                                       strip_cdf(t, r, piece.edges[i])));
    return e;
}

// expected per-bin counts for a slit face (coordinates relative to slit_lo)
std::vector<double> slit_expected(const PieceHistogram& piece, double t_rel, double ell,
                                  long long n_paths) {
    std::vector<double> e;
    for (size_t i = 0; i + 1 < piece.edges.size(); ++i) {
        double lo = piece.edges[i] - piece.edges.front();
        double hi = piece.edges[i + 1] - piece.edges.front();
        e.push_back(double(n_paths) *
                    (slit_plane_cdf(t_rel, ell, hi) - slit_plane_cdf(t_rel, ell, lo)));
    }
    return e;
}

template <class F>
std::string fup_code(F&& f) {
    try {
        f();
    } catch (const FupError& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_SUITE("harmonic") {

TEST_CASE("strip closed form: pinned value, symmetry, mass, dual route") {
    CHECK(strip_density(0.0, 0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    for (double s : {0.1, 0.7, 2.3})
        CHECK(strip_density(0.3, 0.4, 0.3 + s) ==
              doctest::Approx(strip_density(0.3, 0.4, 0.3 - s)).epsilon(1e-14));
    // both lines carry 1/2 each
    double total = 2.0 * (strip_cdf(0.0, 0.5, 40.0) - strip_cdf(0.0, 0.5, -40.0));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    // quadrature of the density against the closed-form mass
    for (auto [a, b] : {std::pair{-1.0, 0.3}, std::pair{0.2, 2.0}}) {
        double q = integrate([&](double x) { return strip_density(0.1, 0.35, x); }, a, b);
        CHECK(q == doctest::Approx(strip_cdf(0.1, 0.35, b) - strip_cdf(0.1, 0.35, a))
                       .epsilon(1e-10));
    }
}

TEST_CASE("strip density equals the half-plane pullback") {
    // the map w = i exp(pi (z - t) / (2r)) sends the strip to the upper
    // half-plane and t to i, whose exit density on the real axis is
    // 1 / (pi (1 + w^2)); pull it back with a numeric |dw/dz|
    for (auto [t, r] : {std::pair{0.0, 0.5}, std::pair{0.3, 0.25}}) {
        for (double u : {-1.3, -0.4, 0.0, 0.7, 2.1}) {
            for (double sgn : {1.0, -1.0}) {
                double x = t + u;
                auto w = [&](double xx) {
                    std::complex<double> z(xx, sgn * r);
                    return std::complex<double>(0.0, 1.0) *
                           std::exp(kPi * (z - t) / (2.0 * r));
                };
                double hstep = 5e-4;
                std::complex<double> dw =
                    (-w(x + 2 * hstep) + 8.0 * w(x + hstep) - 8.0 * w(x - hstep) +
                     w(x - 2 * hstep)) /
                    (12.0 * hstep);
                std::complex<double> wx = w(x);
                double pullback = std::abs(dw) / (kPi * std::abs(1.0 + wx * wx));
                double direct = strip_density(t, r, x);
                CHECK(pullback == doctest::Approx(direct).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("slit-plane closed form: pinned values, mass, endpoint blowup") {
    CHECK(slit_plane_density(2.0, 1.0, 0.5) == doctest::Approx(0.300105438719).epsilon(1e-10));
    CHECK(slit_plane_cdf(2.0, 1.0, 0.5) == doctest::Approx(0.195913276015).epsilon(1e-10));
    CHECK(2.0 * slit_plane_cdf(2.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(2.0 * slit_plane_cdf(-0.7, 0.6, 0.6) == doctest::Approx(1.0).epsilon(1e-14));

    double q = integrate([](double z) { return slit_plane_density(2.0, 1.0, z); }, 0.1, 0.5);
    CHECK(q == doctest::Approx(slit_plane_cdf(2.0, 1.0, 0.5) - slit_plane_cdf(2.0, 1.0, 0.1))
                   .epsilon(1e-9));

    // z^{-1/2} blowup at the near endpoint: least-squares slope over dyadic z
    std::vector<double> lz, lp;
    for (double z = 1e-2; z >= 0.9e-6; z /= 10.0) {
        lz.push_back(std::log(z));
        lp.push_back(std::log(slit_plane_density(2.0, 1.0, z)));
    }
    double n = double(lz.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lz.size(); ++i) {
        sx += lz[i];
        sy += lp[i];
        sxx += lz[i] * lz[i];
        sxy += lz[i] * lp[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.1));

    // empirical L^p norm stays finite for p < 2
    double lp15 = integrate(
        [](double z) { return std::pow(slit_plane_density(2.0, 1.0, z), 1.5); }, 1e-9,
        1.0 - 1e-9);
    CHECK(std::isfinite(lp15));
    CHECK(lp15 < 100.0);
}

TEST_CASE("closed-form preconditions") {
    CHECK(fup_code([] { slit_plane_density(0.5, 1.0, 0.5); }) == "point-on-slit");
    CHECK(fup_code([] { slit_plane_density(0.0, 1.0, 0.5); }) == "point-on-slit");
    CHECK(fup_code([] { slit_plane_density(1.0, 1.0, 0.5); }) == "point-on-slit");
    CHECK_THROWS_AS(slit_plane_density(1.05, 1.0, 0.5), ConfigError); // closer than l/10
    CHECK_THROWS_AS(slit_plane_density(2.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(slit_plane_density(2.0, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(slit_plane_density(2.0, 0.0, 0.5), ConfigError);
    CHECK(fup_code([] { slit_plane_cdf(0.3, 1.0, 0.5); }) == "point-on-slit");
    CHECK_THROWS_AS(strip_density(0.0, 0.0, 0.0), ConfigError);

    SlitDomainSpec bad = left_slit();
    bad.r = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = left_slit();
    bad.slit_lo = -1.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError); // length 1.2 > 1
    bad = left_slit();
    bad.slit_lo = bad.slit_hi;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = left_slit();
    bad.t = 0.0; // slit endpoint
    CHECK(fup_code([&] { bad.validate(); }) == "point-on-slit");

    CHECK_THROWS_AS(brownian_exit(left_slit(), DomainKind::strip, 10, 1), ConfigError);
}

TEST_CASE("unslit strip exits match the closed form") {
    SlitDomainSpec spec;
    spec.r = 0.5;
    spec.slit_lo = -1.5;
    spec.slit_hi = -0.6;
    spec.t = 0.0;
    const long long n = 100000;
    ExitHistogram h = brownian_exit(spec, DomainKind::strip, n, 7);
    REQUIRE(h.pieces.size() == 2);
    CHECK(h.pieces[0].total + h.pieces[1].total == n);

    // symmetry between the two lines
    CHECK(std::abs(h.mass("top") - 0.5) <= 3.0 * h.sigma("top") + 1e-12);

    std::vector<long long> obs;
    std::vector<double> expct;
    for (const auto& piece : h.pieces) {
        for (long long c : piece.counts) obs.push_back(c);
        for (double e : line_expected(piece, spec.t, spec.r, n)) expct.push_back(e);
    }
    ChiSquare cs = chi_square(obs, expct);
    CHECK(cs.dof == 39);
    CHECK(cs.p_value >= 0.01);
}

TEST_CASE("slit-plane exits match the closed form") {
    SlitDomainSpec spec;
    spec.r = 0.5;
    spec.slit_lo = 0.0;
    spec.slit_hi = 1.0;
    spec.t = 2.0;
    const long long n = 200000;
    ExitHistogram h = brownian_exit(spec, DomainKind::slit_plane, n, 2);
    REQUIRE(h.pieces.size() == 2);
    CHECK(h.pieces[0].total + h.pieces[1].total == n);

    double diff = std::abs(h.mass("I+") - h.mass("I-"));
    CHECK(diff <= 3.0 * std::sqrt(2.0) * h.sigma("I+") + 1e-12);

    std::vector<long long> obs;
    std::vector<double> expct;
    for (const auto& piece : h.pieces) {
        for (long long c : piece.counts) obs.push_back(c);
        for (double e : slit_expected(piece, spec.t - spec.slit_lo, spec.slit_length(), n))
            expct.push_back(e);
    }
    ChiSquare cs = chi_square(obs, expct);
    CHECK(cs.dof == 39);
    CHECK(cs.p_value >= 0.01);
}

TEST_CASE("quadrupling the paths halves the error bars") {
    SlitDomainSpec spec = left_slit();
    ExitHistogram small = brownian_exit(spec, DomainKind::slit_strip, 20000, 3);
    ExitHistogram big = brownian_exit(spec, DomainKind::slit_strip, 80000, 3);
    double ratio = small.sigma("I+") / big.sigma("I+");
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("exit sampling is reproducible across thread counts") {
    SlitDomainSpec spec = left_slit();
    setenv("FUP_LAB_THREADS", "1", 1);
    ExitHistogram a = brownian_exit(spec, DomainKind::slit_strip, 20000, 42);
    setenv("FUP_LAB_THREADS", "7", 1);
    ExitHistogram b = brownian_exit(spec, DomainKind::slit_strip, 20000, 42);
    unsetenv("FUP_LAB_THREADS");
    ExitHistogram c = brownian_exit(spec, DomainKind::slit_strip, 20000, 42);
    REQUIRE(a.pieces.size() == b.pieces.size());
    for (size_t i = 0; i < a.pieces.size(); ++i) {
        CHECK(a.pieces[i].counts == b.pieces[i].counts);
        CHECK(a.pieces[i].counts == c.pieces[i].counts);
    }
}

TEST_CASE("slit faces beat the lower bound") {
    SlitDomainSpec spec = left_slit(); // d(t, I0) = 1/2
    LowerBoundResult res = slit_strip_lower_bound(spec, 200000, 5);
    CHECK(res.bound == doctest::Approx(std::exp(-4.0) / 8.0).epsilon(1e-14));
    CHECK(res.mc_plus >= res.bound - 3.0 * res.sigma_plus);
    CHECK(res.mc_minus >= res.bound - 3.0 * res.sigma_minus);

    // observation point hugging the slit: nearly everything exits on the faces
    SlitDomainSpec close = left_slit();
    close.t = 1e-3;
    LowerBoundResult tight = slit_strip_lower_bound(close, 100000, 6);
    CHECK(tight.mc_plus > 0.45);
    CHECK(tight.mc_plus < 0.55);
    CHECK(tight.mc_minus > 0.45);
    CHECK(tight.mc_minus < 0.55);
    CHECK(tight.mc_plus >= tight.bound);

    SlitDomainSpec far = left_slit();
    far.t = 2.5; // d > 1 violates the hypothesis
    CHECK_THROWS_AS(slit_strip_lower_bound(far, 10000, 1), ConfigError);
    SlitDomainSpec endpoint = left_slit();
    endpoint.t = 0.0;
    CHECK(fup_code([&] { slit_strip_lower_bound(endpoint, 10000, 1); }) == "point-on-slit");
}

TEST_CASE("slit-strip face mass never exceeds the slit-plane face mass") {
    SlitDomainSpec spec = left_slit();
    ExitHistogram h = brownian_exit(spec, DomainKind::slit_strip, 100000, 9);
    // in the full plane every path exits through the slit, half per face
    CHECK(h.mass("I+") <= 0.5 + 3.0 * h.sigma("I+"));
    CHECK(h.mass("I-") <= 0.5 + 3.0 * h.sigma("I-"));
}

TEST_CASE("boundary averages dominate interior values of log|F|") {
    SlitDomainSpec spec = left_slit();

    EntireTestFn one; // F == 1
    SubharmonicCheck c0 = subharmonic_bound_check(spec, one, 5000, 1);
    CHECK(c0.lhs == 0.0);
    CHECK(c0.rhs == 0.0);
    CHECK(c0.sigma == 0.0);
    CHECK(c0.holds());

    EntireTestFn osc;
    osc.a = 1.0; // F = exp(iz)
    SubharmonicCheck c1 = subharmonic_bound_check(spec, osc, 50000, 2);
    CHECK(c1.lhs == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c1.holds());

    EntireTestFn shifted;
    shifted.a = -2.0;
    shifted.roots = {{0.5, 2.0}}; // (z - (1/2 + 2i)) exp(-2iz)
    SubharmonicCheck c2 = subharmonic_bound_check(spec, shifted, 50000, 3);
    CHECK(c2.lhs == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(c2.holds());

    EntireTestFn plain;
    plain.roots = {{0.5, 0.0}}; // z - t alone is not in the catalog
    CHECK_THROWS_AS(plain.validate(), ConfigError);
}

TEST_CASE("chi-square helper matches known quantiles") {
    ChiSquare zero = chi_square({50, 50}, {50.0, 50.0});
    CHECK(zero.stat == 0.0);
    CHECK(zero.dof == 1);
    CHECK(zero.p_value == doctest::Approx(1.0).epsilon(1e-12));

    ChiSquare five = chi_square({100, 0}, {90.0, 10.0});
    CHECK(five.dof == 1);
    // stat = 100/90 + 100/10 = 11.111; p = 0.000858
    CHECK(five.stat == doctest::Approx(100.0 / 90.0 + 10.0).epsilon(1e-12));

    // chi2(0.95; 20) = 31.410 -> survival 0.05
    ChiSquare q = chi_square(std::vector<long long>(21, 0), std::vector<double>(21, 1.0));
    CHECK(q.dof == 20);
    CHECK(chi2_sf(31.410, 20.0) == doctest::Approx(0.05).epsilon(2e-3));

    CHECK_THROWS_AS(chi_square({1, 2}, {1.0}), ConfigError);
    CHECK_THROWS_AS(chi_square({1, 2}, {1.0, 0.0}), ConfigError);
}

} // TEST_SUITE
