#pragma once
#include <vector>

#include "fuplab/fup_core.hpp"
#include "fuplab/regular_set.hpp"

namespace fuplab {

// cubic smoothstep on [0,1], clamped outside
double smoothstep01(double t);

// even cutoff: 1 on |t| <= plateau, 0 on |t| >= 1, smoothstep in between
double plateau_bump(double t, double plateau);

// Tensor-product cutoff chi(x, y) on a rectangle, value `amplitude` on the
// inner `plateau` fraction of each half-width.
struct ChiSpec {
    double x_center = 0.0, x_halfwidth = 1.0;
    double y_center = 0.0, y_halfwidth = 1.0;
    double plateau = 0.5;
    double amplitude = 1.0;

    double operator()(double x, double y) const;
};

// Sampled amplitude a(x, xi) on a uniform grid over a rectangle, with a
// declared support sub-rectangle and declared sup norms of x-derivatives.
struct AmplitudeSpec {
    double x0 = 0, x1 = 1, xi0 = 0, xi1 = 1;
    int nx = 2, nxi = 2;
    std::vector<double> samples; // row-major, samples[i*nxi + j] = a(x_i, xi_j)
    double sx0 = 0, sx1 = 1, sxi0 = 0, sxi1 = 1; // declared support
    std::vector<double> c_k; // declared sup |d^k_x a|, k = 0..c_k.size()-1

    double eval(double x, double xi) const; // bilinear, 0 outside the rectangle
    // support + finite-difference bound checks; throws ConfigError
    void validate(double slack = 0.5) const;
};

// constant amplitude on a rectangle (its own support)
AmplitudeSpec plateau_amplitude(double x0, double x1, double xi0, double xi1,
                                double value = 1.0, int n = 17);
// sampled tensor bump with derivative bounds declared from the closed form
AmplitudeSpec bump_amplitude(double xc, double xhw, double xic, double xihw,
                             double plateau, double value = 1.0, int n = 129);

// Phase catalog plus the amplitude factor riding on it.
struct PhaseSpec {
    enum class Kind { linear, hyperbolic_circle, polynomial };
    Kind kind = Kind::linear;
    std::vector<std::vector<double>> poly; // c[i][j] * x^i * y^j
    AmplitudeSpec b;

    double phase(double x, double y) const;
    double phase_dxy(double x, double y) const;
};

// Lattice-aligned midpoint quadrature over the merged radius-(h^rho)
// neighborhood of the set.  Exact rational endpoints keep point selection
// reproducible across platforms.
struct QuadGrid {
    std::vector<Rat> points;        // (m + 1/2) * spacing
    std::vector<long long> lattice; // the m values
    Rat spacing;
};
QuadGrid quad_grid(const RegularSetApprox& set, const Rat& h, double rho,
                   int points_per_h);

NormResult amplitude_restricted_norm(const RegularSetApprox& x_set,
                                     const RegularSetApprox& y_set, const Rat& h,
                                     const AmplitudeSpec& a, double rho = 1.0,
                                     int points_per_h = 10);

NormResult phase_restricted_norm(const RegularSetApprox& x_set,
                                 const RegularSetApprox& y_set, const Rat& h,
                                 const PhaseSpec& spec, double rho = 1.0,
                                 int points_per_h = 10);

NormResult hyperbolic_norm(const RegularSetApprox& limit_set, const Rat& h,
                           const ChiSpec& chi, double rho = 1.0,
                           int points_per_h = 10);

// The plateau-amplitude quadrature matrix is, up to diagonal modulations, a
// submatrix of the size-(ppc^2 N) discrete transform; this builds that
// instance (h must be 1/N).
FupInstance induced_instance(const RegularSetApprox& x_set,
                             const RegularSetApprox& y_set, const Rat& h,
                             double rho = 1.0, int points_per_h = 10);

} // namespace fuplab
