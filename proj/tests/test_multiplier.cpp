#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "fuplab/error.hpp"
#include "fuplab/generators.hpp"
#include "fuplab/multiplier.hpp"
#include "fuplab/regular_sets.hpp"

using namespace fuplab;

namespace {

RegularSetApprox unit_cantor(int depth) {
    CantorSpec spec;
    spec.base = 3;
    spec.alphabet = {0, 2};
    spec.depth = depth;
    return gen_cantor(spec);
}

RegularSetApprox dilated_cantor(int depth) {
    return affine_map(unit_cantor(depth), Rat(ipow(3, depth)), Rat(0));
}

// One cell spanning [origin, origin + scale].
RegularSetApprox interval_set(const Rat& origin, const Rat& scale) {
    RegularSetApprox s;
    s.base = 3;
    s.depth = 0;
    s.frame = Frame{origin, scale};
    s.cells = {0};
    s.weights = {Rat(1)};
    return s;
}

RegularSetApprox point_set(const Rat& origin) {
    RegularSetApprox s;
    s.base = 3;
    s.depth = 0;
    s.frame = Frame{origin, Rat(0)};
    s.cells = {0};
    s.weights = {Rat(1)};
    return s;
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

template <class F>
std::string cfg_field(F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

// Direct DFT coefficient of a sampled torus function.
std::complex<double> dft_coef(const std::vector<double>& v, long long nu) {
    std::complex<double> acc{0.0, 0.0};
    const double m = static_cast<double>(v.size());
    for (size_t j = 0; j < v.size(); ++j)
        acc += v[j] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(nu) *
                                          static_cast<double>(j) / m);
    return acc / m;
}

} // namespace

TEST_SUITE("multiplier") {

TEST_CASE("mollifier values, transforms and tails") {
    CHECK(phi_value(Mollifier::fejer2, 0.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(phi_value(Mollifier::fejer4, 0.0) == doctest::Approx(315.0 / 604.0).epsilon(1e-14));
    for (double x : {-3.7, -0.4, 0.9, 2.0, 6.3}) {
        CHECK(phi_value(Mollifier::fejer2, x) >= 0.0);
        CHECK(phi_value(Mollifier::fejer2, x) == phi_value(Mollifier::fejer2, -x));
        CHECK(phi_value(Mollifier::fejer4, x) <= phi_value(Mollifier::fejer4, 0.0));
    }

    CHECK(phi_hat(Mollifier::fejer2, 0.0) == 1.0);
    CHECK(phi_hat(Mollifier::fejer4, 0.0) == 1.0);
    CHECK(phi_hat(Mollifier::fejer2, 1.0) == 0.0);
    CHECK(phi_hat(Mollifier::fejer2, -1.0) == 0.0);
    CHECK(phi_hat(Mollifier::fejer4, 2.5) == 0.0);
    // half-integer anchors are exact rationals of the B-spline lattice
    CHECK(phi_hat(Mollifier::fejer2, 0.5) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(phi_hat(Mollifier::fejer4, 0.5) == doctest::Approx(15.0 / 302.0).epsilon(1e-14));
    CHECK(phi_hat(Mollifier::fejer2, -0.5) == doctest::Approx(0.25).epsilon(1e-14));
    double prev2 = 1.0, prev4 = 1.0;
    for (double xi = 0.05; xi < 1.0; xi += 0.05) {
        double h2 = phi_hat(Mollifier::fejer2, xi);
        double h4 = phi_hat(Mollifier::fejer4, xi);
        CHECK(h2 < prev2);
        CHECK(h4 < prev4);
        CHECK(h2 > 0.0);
        prev2 = h2;
        prev4 = h4;
    }

    // total mass: both kernels integrate to one
    CHECK(phi_tail(Mollifier::fejer2, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(phi_tail(Mollifier::fejer4, 0.0) == doctest::Approx(1.0).epsilon(1e-6));

    const double radii[5] = {0.9, 2.7, 8.1, 24.3, 72.9};
    const double tails2[5] = {8.0157678e-02, 2.2777128e-03, 5.8788708e-05, 2.2201178e-06,
                              8.0050044e-08};
    const double tails4[5] = {2.3522861e-01, 9.9279634e-05, 9.0579575e-08, 5.8133096e-11,
                              2.7848993e-14};
    for (int i = 0; i < 5; ++i) {
        CHECK(phi_tail(Mollifier::fejer2, radii[i]) ==
              doctest::Approx(tails2[i]).epsilon(1e-5));
        CHECK(phi_tail(Mollifier::fejer4, radii[i]) ==
              doctest::Approx(tails4[i]).epsilon(1e-5));
        if (i > 0) {
            CHECK(phi_tail(Mollifier::fejer2, radii[i]) < phi_tail(Mollifier::fejer2, radii[i - 1]));
            CHECK(phi_tail(Mollifier::fejer4, radii[i]) < phi_tail(Mollifier::fejer4, radii[i - 1]));
        }
    }

    CHECK_THROWS_AS(phi_tail(Mollifier::fejer2, -1.0), ConfigError);
    CHECK_THROWS_AS(phi_tail(Mollifier::fejer4, std::numeric_limits<double>::infinity()),
                    ConfigError);
}

TEST_CASE("coarse graining fattens the occupied tree cells") {
    // full interval: every tile occupied, one component with the 1/10 margin
    for (int n : {1, 2, 3}) {
        auto u = coarse_grain(interval_set(Rat(0), Rat(1)), n, 3);
        REQUIRE(u.size() == 1);
        Rat fat = Rat(1) / Rat(10 * to_ll(ipow(3, n)));
        CHECK(u[0].first == -fat);
        CHECK(u[0].second == Rat(1) + fat);
    }

    // mid-third set at level 2: four components on the 1/90 lattice
    auto u2 = coarse_grain(unit_cantor(6), 2, 3);
    REQUIRE(u2.size() == 4);
    const long long lo90[4] = {-1, 19, 59, 79};
    const long long hi90[4] = {11, 31, 71, 91};
    for (int i = 0; i < 4; ++i) {
        CHECK(u2[i].first == Rat(lo90[i], 90));
        CHECK(u2[i].second == Rat(hi90[i], 90));
    }

    // deeper levels keep covering the set, components stay sorted and disjoint
    for (int n : {1, 3, 5}) {
        auto u = coarse_grain(unit_cantor(5), n, 3);
        for (size_t i = 1; i < u.size(); ++i) CHECK(u[i].first > u[i - 1].second);
        RegularSetApprox x = unit_cantor(5);
        for (size_t c = 0; c < x.cells.size(); ++c) {
            bool inside = false;
            for (const auto& [a, b] : u)
                if (a <= x.cell_left(c) && x.cell_right(c) <= b) inside = true;
            CHECK(inside);
        }
    }

    // a point occupies exactly the tile it sits in
    auto up = coarse_grain(point_set(Rat(1, 3)), 3, 3);
    REQUIRE(up.size() == 1);
    CHECK(up[0].first == Rat(9, 27) - Rat(1, 270));
    CHECK(up[0].second == Rat(10, 27) + Rat(1, 270));

    CHECK(cfg_field([&] { coarse_grain(unit_cantor(3), 2, 1); }) == "l");
    CHECK(cfg_field([&] { coarse_grain(unit_cantor(3), -1, 3); }) == "n");
    CHECK(cfg_field([&] { coarse_grain(unit_cantor(3), 41, 3); }) == "n");
}

TEST_CASE("unique continuation anchors") {
    UcResult point = unique_continuation_constant(point_set(Rat(0)), 0.25);
    CHECK(point.c3 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(point.period == 1);
    CHECK(point.freq_count == 1);
    CHECK(point.gram_count == 1);

    // full line at full window: no loss at all
    UcResult full = unique_continuation_constant(interval_set(Rat(0), Rat(1)), 1.0);
    CHECK(full.c3 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(full.period == 4);
    CHECK(full.freq_count == 4);

    // single unit cell, narrower window: every class is the singleton Gram
    UcResult half = unique_continuation_constant(interval_set(Rat(0), Rat(1)), 0.5);
    CHECK(half.c3 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(half.gram_count == 1);

    CHECK(cfg_field([&] { unique_continuation_constant(point_set(Rat(0)), 0.0); }) == "c1");
    CHECK(cfg_field([&] { unique_continuation_constant(point_set(Rat(0)), 1.2); }) == "c1");
    CHECK(cfg_field([&] {
              unique_continuation_constant(point_set(Rat(0)), 0.25, 0.9);
          }) == "window");

    // a set squeezed strictly between integer frequencies has no basis at all
    RegularSetApprox gap;
    gap.base = 10;
    gap.depth = 1;
    gap.frame = Frame{Rat(0), Rat(1)};
    gap.cells = {1};
    gap.weights = {Rat(1)};
    CHECK(fup_code([&] { unique_continuation_constant(gap, 0.25); }) == "empty-support");
}

TEST_CASE("unique continuation on the dilated Cantor ladder") {
    const double frozen[3] = {0.143852573, 0.121822373, 0.112972905};
    double prev = 0.0;
    for (int i = 0; i < 3; ++i) {
        int k = i + 3;
        UcResult uc = unique_continuation_constant(dilated_cantor(k), 0.25);
        CHECK(uc.c3 == doctest::Approx(frozen[i]).epsilon(1e-5));
        CHECK(uc.period == 4 * to_ll(ipow(3, k)));
        CHECK(uc.freq_count == (1LL << k) * uc.period);
        // every residue class sees the same cell pattern, one Gram suffices
        CHECK(uc.gram_count == 1);
        if (i > 0) {
            CHECK(uc.c3 < prev);
            CHECK(uc.c3 >= 0.5 * prev);
        }
        prev = uc.c3;
    }
}

TEST_CASE("interpolation inequality for band-limited samples") {
    BandLimitedSample f;
    f.period = 2.0;
    f.freqs = {3};
    f.coef = {{1.0, 0.0}};
    std::vector<WindowPair> w = {{0.25, 0.4}};
    InterpolationResult r = interpolation_check(f, w, 0.2, 0.5, 1e-9);
    CHECK(r.holds);
    CHECK(r.lhs_log == doctest::Approx(0.0).epsilon(1e-9)); // |f| == 1 on a unit window
    // the Fourier side dominates the window side, so the gap keeps the c/r factor
    CHECK(r.rhs_log - r.lhs_log >= std::log(10.0 / 0.5) - 1e-3);

    BandLimitedSample g;
    g.period = 4.0;
    g.freqs = {-2, 1, 5};
    g.coef = {{0.3, -0.1}, {0.8, 0.2}, {-0.4, 0.5}};
    std::vector<WindowPair> w3 = {{0.0, 0.1}, {1.5, 1.9}, {3.0, 3.6}};
    InterpolationResult r3 = interpolation_check(g, w3, 0.3, 0.7, 1e-7, 8.0);
    CHECK(r3.holds);
    CHECK(std::isfinite(r3.lhs_log));
    CHECK(std::isfinite(r3.rhs_log));

    // identically zero sample: both sides vanish, inequality holds trivially
    BandLimitedSample z = f;
    z.coef = {{0.0, 0.0}};
    CHECK(interpolation_check(z, w, 0.2, 0.5, 1e-9).holds);

    CHECK(cfg_field([&] { interpolation_check(f, w, 0.2, 0.0, 1e-9); }) == "r");
    CHECK(cfg_field([&] { interpolation_check(f, w, 0.2, 1.0, 1e-9); }) == "r");
    CHECK(cfg_field([&] { interpolation_check(f, w, 0.2, 0.5, 0.0); }) == "kappa");
    CHECK(cfg_field([&] { interpolation_check(f, w, 0.2, 0.5, 1e-3); }) == "kappa");
    CHECK(cfg_field([&] { interpolation_check(f, w, 0.0, 0.5, 1e-9); }) == "c0");
    CHECK(cfg_field([&] { interpolation_check(f, w, 1.2, 0.5, 1e-9); }) == "c0");
    CHECK(cfg_field([&] { interpolation_check(f, w, 0.2, 0.5, 1e-9, 0.0); }) == "c");
    CHECK(cfg_field([&] { interpolation_check(f, {}, 0.2, 0.5, 1e-9); }) == "windows");
    CHECK(cfg_field([&] {
              interpolation_check(f, {{0.0, 0.0}, {0.5, 0.5}}, 0.2, 0.5, 1e-9);
          }) == "windows");
    CHECK(cfg_field([&] { interpolation_check(f, {{1.5, 1.5}}, 0.2, 0.5, 1e-9); }) ==
          "windows");
    CHECK(cfg_field([&] { interpolation_check(f, {{0.0, 0.9}}, 0.2, 0.5, 1e-9); }) ==
          "windows");

    BandLimitedSample bad = f;
    bad.freqs = {3, 3};
    bad.coef = {{1.0, 0.0}, {1.0, 0.0}};
    CHECK_THROWS_AS(interpolation_check(bad, w, 0.2, 0.5, 1e-9), ConfigError);
    bad.freqs = {3};
    CHECK_THROWS_AS(interpolation_check(bad, w, 0.2, 0.5, 1e-9), ConfigError);
}

TEST_CASE("smoothed cutoff hugs the set and stays band-limited") {
    RegularSetApprox x = unit_cantor(6);
    PsiWeight psi = build_psi(x, 1, 3, 3, Mollifier::fejer2, 1 << 17, 2.0);
    CHECK(psi.values.size() == (1 << 17));
    CHECK(psi.period == 2.0);
    CHECK(psi.spacing() == doctest::Approx(2.0 / (1 << 17)).epsilon(1e-15));
    CHECK(psi.c_phi_over_l == doctest::Approx(8.0157678e-02).epsilon(1e-5));
    // kernel mass within the fattening keeps the cutoff near one on the set
    CHECK(psi.min_on_x >= 1.0 - psi.c_phi_over_l - 1e-9);
    CHECK(psi.min_on_x == doctest::Approx(0.959908373812).epsilon(1e-6));
    CHECK(psi.min_value >= -1e-9);
    CHECK(psi.max_value <= 1.0 + 1e-9);

    PsiWeight sharp = build_psi(x, 1, 6, 3, Mollifier::fejer2, 1 << 17, 2.0);
    CHECK(sharp.min_on_x >= 1.0 - 2.2201178e-06 - 1e-9);

    // full interval: the midpoint sits a whole half-unit inside the support,
    // so only the far kernel tail is missing there
    PsiWeight flat = build_psi(interval_set(Rat(0), Rat(1)), 0, 2, 3, Mollifier::fejer2,
                               1 << 14, 2.0);
    CHECK(flat.values[(1 << 14) / 4] >= 1.0 - phi_tail(Mollifier::fejer2, 4.5) - 1e-9);
    CHECK(flat.values[(1 << 14) / 4] <= 1.0 + 1e-9);
    CHECK(flat.min_on_x >= 1.0 - flat.c_phi_over_l - 1e-9);

    // covering the whole torus collapses the cutoff to the constant one
    PsiWeight ones = build_psi(interval_set(Rat(0), Rat(2)), 1, 3, 3, Mollifier::fejer2,
                               1 << 14, 2.0);
    for (size_t j = 0; j < ones.values.size(); j += 997) CHECK(ones.values[j] == 1.0);
    CHECK(ones.min_value == 1.0);
    CHECK(ones.min_on_x == 1.0);

    // spectral content: sampled DFT matches the built coefficients in band and
    // vanishes beyond it
    PsiWeight small = build_psi(unit_cantor(3), 0, 2, 3, Mollifier::fejer2, 1 << 12, 2.0);
    const long long band = 18; // ceil(3^2 * period)
    auto u = coarse_grain(unit_cantor(3), 1, 3);
    std::vector<std::pair<double, double>> parts;
    for (const auto& [a, b] : u) parts.emplace_back(to_double(a), to_double(b));
    for (long long nu : {0LL, 3LL, 11LL}) {
        std::complex<double> direct = dft_coef(small.values, nu);
        std::complex<double> acc{0.0, 0.0};
        double xi = static_cast<double>(nu) / 2.0;
        if (xi == 0.0) {
            for (const auto& [a, b] : parts) acc += (b - a) / 2.0;
        } else {
            for (const auto& [a, b] : parts)
                acc += (std::polar(1.0, -2.0 * M_PI * xi * a) -
                        std::polar(1.0, -2.0 * M_PI * xi * b)) /
                       std::complex<double>(0.0, 4.0 * M_PI * xi);
        }
        acc *= phi_hat(Mollifier::fejer2, xi / 9.0);
        CHECK(std::abs(direct - acc) <= 1e-10);
    }
    for (long long nu : {band + 1, 2 * band, (1LL << 11) - 1})
        CHECK(std::abs(dft_coef(small.values, nu)) <= 1e-8);

    // rebuilding is bit-for-bit reproducible
    PsiWeight again = build_psi(x, 1, 3, 3, Mollifier::fejer2, 1 << 17, 2.0);
    CHECK(again.values == psi.values);

    CHECK(cfg_field([&] { build_psi(x, 1, 3, 3, Mollifier::fejer2, 1000, 2.0); }) ==
          "m-grid");
    CHECK(cfg_field([&] { build_psi(x, 1, 3, 3, Mollifier::fejer2, 1LL << 25, 2.0); }) ==
          "m-grid");
    CHECK(cfg_field([&] { build_psi(x, 3, 3, 3, Mollifier::fejer2, 1 << 11, 2.0); }) ==
          "m-grid");
    CHECK(cfg_field([&] { build_psi(x, 1, 0, 3, Mollifier::fejer2, 1 << 12, 2.0); }) == "t");
    CHECK(cfg_field([&] { build_psi(x, 1, 3, 3, Mollifier::fejer2, 1 << 12, -1.0); }) ==
          "period");
}

TEST_CASE("band compression of the cutoff contracts") {
    ContractionResult cr =
        contraction_estimate(unit_cantor(6), dilated_cantor(6), 1, 3, 3, Mollifier::fejer2);
    CHECK(cr.band_size == 624);
    CHECK(cr.tau > 0.0);
    CHECK(cr.lambda_max < 1.0);
    CHECK(cr.tau == doctest::Approx(kTauFixture).epsilon(1e-9));

    // full cover: multiplication by one, nothing contracts
    ContractionResult id =
        contraction_estimate(interval_set(Rat(0), Rat(2)), dilated_cantor(3), 1, 3, 3,
                             Mollifier::fejer2);
    CHECK(id.tau == 0.0);
    CHECK(id.lambda_max == 1.0);
    CHECK(id.band_size == 0);

    // more mass in the cutoff support means less contraction
    ContractionResult thin =
        contraction_estimate(unit_cantor(4), dilated_cantor(3), 1, 2, 3, Mollifier::fejer2);
    ContractionResult fat =
        contraction_estimate(interval_set(Rat(0), Rat(1)), dilated_cantor(3), 1, 2, 3,
                             Mollifier::fejer2);
    CHECK(thin.tau > 0.0);
    CHECK(fat.tau >= 0.0);
    CHECK(thin.tau >= fat.tau - 1e-12);

    CHECK(cfg_field([&] {
              contraction_estimate(unit_cantor(6), dilated_cantor(9), 1, 3, 3,
                                   Mollifier::fejer2);
          }) == "band");
    CHECK(cfg_field([&] {
              contraction_estimate(unit_cantor(3), dilated_cantor(3), -1, 3, 3,
                                   Mollifier::fejer2);
          }) == "n");
    CHECK(cfg_field([&] {
              contraction_estimate(unit_cantor(3), dilated_cantor(3), 1, 0, 3,
                                   Mollifier::fejer2);
          }) == "t");
}

TEST_CASE("iterated cutoffs give an empirical exponent") {
    RegularSetApprox x = unit_cantor(8);
    RegularSetApprox y = dilated_cantor(8);
    IterateResult it = iterate_fup(x, y, 3, 5, 2, Mollifier::fejer4, 1 << 22, 2.0);

    CHECK(it.basis_size == 512);
    CHECK(it.grid_points == (1 << 22));
    CHECK(it.tau_fixture == kTauFixture);
    CHECK(it.c_phi_over_l == doctest::Approx(9.0579575e-08).epsilon(1e-5));
    CHECK(it.pre_lhs == doctest::Approx(0.999747485383).epsilon(1e-9));
    CHECK(it.pre_rhs == 1.0 - kTauFixture / 2.0);
    CHECK(it.pre_lhs <= it.pre_rhs);

    REQUIRE(it.x_ratios.size() == 2);
    REQUIRE(it.full_ratios.size() == 1);
    // the mass the quadrature sees on the set is the exact cell total
    const double r1_exact = std::sqrt(std::pow(2.0 / 3.0, 8) / 2.0);
    CHECK(it.x_ratios[0] == doctest::Approx(r1_exact).epsilon(1e-9));
    CHECK(it.x_ratios[1] == doctest::Approx(0.13967541).epsilon(1e-6));
    CHECK(it.x_ratios[1] <= it.x_ratios[0] + 1e-9);
    CHECK(it.full_ratios[0] == doctest::Approx(0.22850480).epsilon(1e-6));
    CHECK(it.full_ratios[0] <= it.pre_lhs);
    CHECK(it.q == doctest::Approx(0.22850482).epsilon(1e-6));
    CHECK(it.beta_empirical == doctest::Approx(0.268739).epsilon(1e-4));
    CHECK(it.beta_empirical > 0.0);

    // single stage: no products yet, neutral exponent
    IterateResult one = iterate_fup(unit_cantor(3), dilated_cantor(3), 3, 5, 1,
                                    Mollifier::fejer4, 1 << 12, 2.0);
    CHECK(one.full_ratios.empty());
    CHECK(one.x_ratios.size() == 1);
    CHECK(one.q == 1.0);
    CHECK(one.beta_empirical == 0.0);

    // short mollifier: the tail eats the recorded contraction, refused upfront
    CHECK(fup_code([&] {
              iterate_fup(unit_cantor(3), dilated_cantor(3), 3, 3, 2, Mollifier::fejer4,
                          1 << 12, 2.0);
          }) == "iterate-precondition-failed");
    CHECK(fup_code([&] {
              iterate_fup(unit_cantor(3), dilated_cantor(3), 3, 3, 2, Mollifier::fejer2,
                          1 << 12, 2.0);
          }) == "iterate-precondition-failed");

    // torus-covering support never contracts
    CHECK(fup_code([&] {
              iterate_fup(interval_set(Rat(0), Rat(2)), dilated_cantor(3), 3, 5, 2,
                          Mollifier::fejer4, 1 << 12, 2.0);
          }) == "contraction-failed");

    // frequency-free target set
    CHECK(fup_code([&] {
              iterate_fup(unit_cantor(3), point_set(Rat(1, 3)), 3, 5, 2, Mollifier::fejer4,
                          1 << 12, 2.0);
          }) == "empty-support");

    CHECK(cfg_field([&] {
              iterate_fup(unit_cantor(3), dilated_cantor(3), 1, 5, 2, Mollifier::fejer4,
                          1 << 12, 2.0);
          }) == "l");
    CHECK(cfg_field([&] {
              iterate_fup(unit_cantor(3), dilated_cantor(3), 3, 5, 0, Mollifier::fejer4,
                          1 << 12, 2.0);
          }) == "m-max");
    CHECK(cfg_field([&] {
              iterate_fup(unit_cantor(3), dilated_cantor(3), 3, 5, 2, Mollifier::fejer4, 100,
                          2.0);
          }) == "m-grid");
    RegularSetApprox shifted = affine_map(unit_cantor(3), Rat(1), Rat(3, 2));
    CHECK(cfg_field([&] {
              iterate_fup(shifted, dilated_cantor(3), 3, 5, 2, Mollifier::fejer4, 1 << 12,
                          2.0);
          }) == "x-range");
}

} // TEST_SUITE
