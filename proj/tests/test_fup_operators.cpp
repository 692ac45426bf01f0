#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fuplab/error.hpp"
#include "fuplab/fup_operators.hpp"
#include "fuplab/generators.hpp"
#include "fuplab/regular_sets.hpp"

using namespace fuplab;

namespace {

RegularSetApprox cantor(int depth) {
    CantorSpec spec;
    spec.base = 3;
    spec.alphabet = {0, 2};
    spec.depth = depth;
    return gen_cantor(spec);
}

// Two unit-size middle-third sets, the second shifted to start at 2, living on
// a common width-3 frame (so both land on the same base-3 grid).
RegularSetApprox two_copies(int depth) {
    RegularSetApprox c = cantor(depth);
    RegularSetApprox s;
    s.base = 3;
    s.depth = depth + 1;
    s.frame.origin = 0;
    s.frame.scale = 3;
    long long off = 2 * to_ll(ipow(3, depth));
    for (long long cell : c.cells) s.cells.push_back(cell);
    for (long long cell : c.cells) s.cells.push_back(off + cell);
    s.weights.assign(s.cells.size(), Rat(1, (long long)s.cells.size()));
    s.check_valid();
    return s;
}

Rat unit_h(int k) { return Rat(BigInt(1), ipow(3, k)); }

// curved phase -2 pi x y - x^2 y^2 / 4 with a flat symbol on [0.9, 2.1]^2
PhaseSpec curved_phase() {
    PhaseSpec p;
    p.kind = PhaseSpec::Kind::polynomial;
    p.poly.assign(3, std::vector<double>(3, 0.0));
    p.poly[1][1] = -2.0 * std::numbers::pi;
    p.poly[2][2] = -0.25;
    p.b = plateau_amplitude(0.9, 2.1, 0.9, 2.1);
    return p;
}

ChiSpec pair_cutoff() {
    ChiSpec chi;
    chi.x_center = 0.5;
    chi.y_center = 2.5;
    chi.x_halfwidth = chi.y_halfwidth = 0.625;
    chi.plateau = 0.8;
    return chi;
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

TEST_SUITE("fup_operators") {

TEST_CASE("quadrature lattice is h-aligned midpoints inside the fattened set") {
    RegularSetApprox c2 = cantor(2);
    Rat h = unit_h(2);
    QuadGrid g = quad_grid(c2, h, 1.0, 10);
    CHECK(g.spacing == h / Rat(10));
    REQUIRE(g.points.size() == g.lattice.size());
    CHECK(g.points.size() > 40);
    for (size_t i = 0; i < g.points.size(); ++i) {
        CHECK(g.points[i] == (Rat(g.lattice[i]) + Rat(1, 2)) * g.spacing);
        bool inside = false;
        for (size_t c = 0; c < c2.cells.size(); ++c)
            inside = inside || (g.points[i] >= c2.cell_left(c) - h &&
                                g.points[i] <= c2.cell_right(c) + h);
        CHECK(inside);
    }

    RegularSetApprox pt;
    pt.base = 2;
    pt.depth = 0;
    pt.frame.origin = Rat(1, 3);
    pt.frame.scale = 0;
    pt.cells = {0};
    pt.weights = {Rat(1)};
    QuadGrid gp = quad_grid(pt, h, 1.0, 10);
    CHECK(gp.points.size() == 20);
    for (const Rat& p : gp.points) {
        CHECK(p >= Rat(1, 3) - h);
        CHECK(p <= Rat(1, 3) + h);
    }
}

TEST_CASE("plateau amplitude reproduces the induced discrete norm") {
    RegularSetApprox c5 = cantor(5);
    Rat h = unit_h(5);
    AmplitudeSpec a = plateau_amplitude(-0.2, 1.2, -0.2, 1.2);

    FupInstance inst10 = induced_instance(c5, c5, h);
    CHECK(inst10.n == 24300);
    CHECK(inst10.x_idx.size() == 800);
    CHECK(inst10.y_idx == inst10.x_idx);

    double q10 = amplitude_restricted_norm(c5, c5, h, a).value;
    double d10 = fourier_restricted_norm(inst10).value;
    CHECK(std::abs(q10 - d10) <= 1e-9 * d10);
    CHECK(q10 == doctest::Approx(0.86711543).epsilon(2e-6));

    double q20 = amplitude_restricted_norm(c5, c5, h, a, 1.0, 20).value;
    double d20 = fourier_restricted_norm(induced_instance(c5, c5, h, 1.0, 20)).value;
    CHECK(std::abs(q20 - d20) <= 1e-9 * d20);
    CHECK(q20 == doctest::Approx(0.86679915).epsilon(2e-6));

    // refining the quadrature moves the value by ever less
    CHECK(std::abs(q10 - q20) < 5e-4);
}

TEST_CASE("amplitude norm is linear in the symbol height") {
    RegularSetApprox c4 = cantor(4);
    Rat h = unit_h(4);
    double one = amplitude_restricted_norm(c4, c4, h, plateau_amplitude(-0.2, 1.2, -0.2, 1.2)).value;
    double tall =
        amplitude_restricted_norm(c4, c4, h, plateau_amplitude(-0.2, 1.2, -0.2, 1.2, 2.5)).value;
    double zero =
        amplitude_restricted_norm(c4, c4, h, plateau_amplitude(-0.2, 1.2, -0.2, 1.2, 0.0)).value;
    CHECK(tall == doctest::Approx(2.5 * one).epsilon(1e-12));
    CHECK(zero == 0.0);
}

TEST_CASE("linear phase route agrees with the amplitude route") {
    RegularSetApprox c4 = cantor(4);
    Rat h = unit_h(4);
    AmplitudeSpec bump = bump_amplitude(0.5, 0.8, 0.5, 0.8, 0.6);
    double via_a = amplitude_restricted_norm(c4, c4, h, bump).value;
    PhaseSpec lin;
    lin.b = bump;
    double via_p = phase_restricted_norm(c4, c4, h, lin).value;
    CHECK(via_a == doctest::Approx(via_p).epsilon(1e-10));
    CHECK(via_a > 0.1);
    CHECK(via_a < 1.5);
}

TEST_CASE("lattice translations leave the linear norm unchanged") {
    RegularSetApprox c4 = cantor(4);
    Rat h = unit_h(4);
    AmplitudeSpec a = plateau_amplitude(-1.0, 3.0, -1.0, 3.0);
    double base = amplitude_restricted_norm(c4, c4, h, a).value;
    RegularSetApprox moved = affine_map(c4, Rat(1), Rat(7) * h);
    CHECK(amplitude_restricted_norm(moved, c4, h, a).value == doctest::Approx(base).epsilon(1e-9));
    CHECK(amplitude_restricted_norm(moved, moved, h, a).value ==
          doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("a thicker neighborhood never shrinks the norm") {
    RegularSetApprox c4 = cantor(4);
    Rat h = unit_h(4);
    AmplitudeSpec a = plateau_amplitude(-1.0, 2.0, -1.0, 2.0);
    double thin = amplitude_restricted_norm(c4, c4, h, a, 1.0).value;
    double thick = amplitude_restricted_norm(c4, c4, h, a, 0.7).value;
    CHECK(thick >= thin - 1e-12);
}

TEST_CASE("curved phase decays where the linear one plateaus") {
    RegularSetApprox x = affine_map(cantor(8), Rat(1), Rat(1));
    PhaseSpec p = curved_phase();
    std::vector<double> vals;
    for (int k = 3; k <= 5; ++k)
        vals.push_back(phase_restricted_norm(x, x, unit_h(k), p).value);
    CHECK(vals[0] == doctest::Approx(0.90084664).epsilon(2e-6));
    CHECK(vals[1] == doctest::Approx(0.87370584).epsilon(2e-6));
    CHECK(vals[2] == doctest::Approx(0.78455100).epsilon(2e-6));
    CHECK(vals[1] < vals[0]);
    CHECK(vals[2] < vals[1]);
}

TEST_CASE("circle-pair kernel matches pinned values and decays") {
    RegularSetApprox lam = two_copies(8);
    ChiSpec chi = pair_cutoff();
    std::vector<double> vals;
    for (int k = 3; k <= 5; ++k) vals.push_back(hyperbolic_norm(lam, unit_h(k), chi).value);
    CHECK(vals[0] == doctest::Approx(0.96147406).epsilon(2e-6));
    CHECK(vals[1] == doctest::Approx(0.90756004).epsilon(2e-6));
    CHECK(vals[2] == doctest::Approx(0.84292453).epsilon(2e-6));
    CHECK(vals[1] < vals[0]);
    CHECK(vals[2] < vals[1]);
}

TEST_CASE("cutoff height scales the circle-pair norm") {
    RegularSetApprox lam = two_copies(6);
    Rat h = unit_h(4);
    ChiSpec chi = pair_cutoff();
    double one = hyperbolic_norm(lam, h, chi).value;
    CHECK(one > 0.1);
    chi.amplitude = 2.0;
    CHECK(hyperbolic_norm(lam, h, chi).value == doctest::Approx(2.0 * one).epsilon(1e-12));
    chi.amplitude = 0.0;
    CHECK(hyperbolic_norm(lam, h, chi).value == 0.0);
}

TEST_CASE("amplitude declarations are checked") {
    AmplitudeSpec a = plateau_amplitude(0.0, 1.0, 0.0, 1.0);
    CHECK_NOTHROW(a.validate());
    a.samples.pop_back();
    CHECK_THROWS_AS(a.validate(), ConfigError);

    AmplitudeSpec b = bump_amplitude(0.0, 1.0, 0.0, 1.0, 0.5);
    CHECK_NOTHROW(b.validate());
    AmplitudeSpec tight = b;
    tight.c_k[1] /= 10.0;
    CHECK_THROWS_AS(tight.validate(), ConfigError);

    AmplitudeSpec sup = plateau_amplitude(0.0, 1.0, 0.0, 1.0);
    sup.sx1 = 0.4; // nonzero samples beyond the claimed support
    CHECK_THROWS_AS(sup.validate(), ConfigError);

    AmplitudeSpec wide = plateau_amplitude(0.0, 1.0, 0.0, 1.0);
    wide.sx1 = 1.5; // claimed support sticks out of the sample rectangle
    CHECK_THROWS_AS(wide.validate(), ConfigError);
}

TEST_CASE("bad grids and phases surface with their codes") {
    RegularSetApprox c3 = cantor(3);
    Rat h = unit_h(3);
    AmplitudeSpec a = plateau_amplitude(-0.2, 1.2, -0.2, 1.2);

    CHECK(fup_code([&] { amplitude_restricted_norm(c3, c3, h, a, 1.0, 9); }) ==
          "grid-too-coarse");
    CHECK_THROWS_AS(amplitude_restricted_norm(c3, c3, h, a, 0.0), ConfigError);
    CHECK_THROWS_AS(amplitude_restricted_norm(c3, c3, h, a, 1.5), ConfigError);
    CHECK_THROWS_AS(induced_instance(c3, c3, Rat(2, 243)), ConfigError);

    PhaseSpec flat; // mixed derivative of x^2 y^2 vanishes on the axes
    flat.kind = PhaseSpec::Kind::polynomial;
    flat.poly.assign(3, std::vector<double>(3, 0.0));
    flat.poly[2][2] = 1.0;
    flat.b = plateau_amplitude(-0.5, 0.5, -0.5, 0.5);
    CHECK(fup_code([&] { phase_restricted_norm(c3, c3, h, flat); }) == "degenerate-phase");

    ChiSpec touching = pair_cutoff();
    touching.y_center = 1.5; // windows [-1/8, 9/8] and [7/8, 17/8] overlap
    CHECK(fup_code([&] { hyperbolic_norm(c3, h, touching); }) == "support-touches-diagonal");

    ChiSpec wrapped = pair_cutoff();
    wrapped.x_center = 0.2;
    wrapped.y_center = 6.2; // meet again once the circle wraps at 2 pi
    CHECK(fup_code([&] { hyperbolic_norm(c3, h, wrapped); }) == "support-touches-diagonal");
}

} // TEST_SUITE
