#pragma once
#include <cstddef>
#include <vector>

#include "fuplab/regular_set.hpp"

namespace fuplab {

// log(10+|xi|)^{-(1+delta)/2}; strictly decreasing in |xi|.
double theta(double xi, double delta);

// Sampled frequency weight on a uniform grid.  Values can underflow double
// range (log omega ~ -3000 near the top annulus), so the log is primary and
// value() is derived.  Beyond the grid the weight follows the declared tail
// law |log omega(xi)| = tail_coeff * <xi>^tail_power, which admissibility
// integrates analytically.
struct WeightGrid {
    double xi_min = 0.0;
    double spacing = 0.25; // invariant: <= 1/4
    std::vector<double> log_values; // <= 0, finite
    std::vector<double> dlog;       // d/dxi log omega at the grid points
    double tail_coeff = 0.0;
    double tail_power = 0.0;

    size_t size() const { return log_values.size(); }
    double xi(size_t i) const { return xi_min + double(i) * spacing; }
    double value(size_t i) const;
    void check_valid() const; // ConfigError on any invariant breach
};

// One cutoff factor exp(-10 chi_J): plateau of height `size` on the cover
// interval, supported on center +- size.
struct CoverInterval {
    double center = 0.0;
    double size = 0.0;
};

struct AdaptedWeight {
    WeightGrid grid;
    std::vector<CoverInterval> covers;
    std::vector<long long> covers_per_annulus; // N_n for n = 1..n1
    double sup_dlog = 0.0;
    bool wt1_ok = false;       // log omega <= -<xi>^{1/2} on the whole grid
    bool wt2_ok = false;       // log omega <= -theta(xi)|xi| at grid points in Y
    double wt2_margin = 0.0;   // min over those points of the slack
    long long wt2_points = 0;
};

// Dyadic-annulus weight adapted to y: exp(-2<xi>^{1/2}) damped by
// exp(-10 chi_J) over a rho_n-lattice cover of y inside each annulus
// [2^n, 2^{n+1}], rho_n = n^{-(1+delta)/2} 2^n.  Re-verifies regularity of y
// at the given constant on scales [2, alpha1] first
// (FupError regularity-precondition-failed).
AdaptedWeight build_weight(const RegularSetApprox& y, double delta, double c_r);

struct AdmissibilityVerdict {
    bool admissible = false;
    double log_integral = 0.0; // grid trapezoid + analytic tail; inf if divergent
    double slope_sup = 0.0;
    bool tail_divergent = false;
};

// Checks int |log omega| / (1+xi^2) <= c0 and sup|d log omega| <= c0.
AdmissibilityVerdict admissibility_check(const WeightGrid& w, double c0);

// 10^5 + 10^7 c_r^2 sum_{n>=1} (2^n/rho_n)^{delta-2}, the reference budget the
// adapted weight's logarithmic integral is compared against; finite for every
// delta in (0,1) and independent of the set's frequency extent.
double c0_reference(double delta, double c_r);

} // namespace fuplab
