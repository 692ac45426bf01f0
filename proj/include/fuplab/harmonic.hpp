#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace fuplab {

// Slit strip: {|Im z| < r} minus the real segment I0 = [slit_lo, slit_hi],
// observed from the real point t.  The boundary splits into the two faces
// I+, I- of the slit and the two lines Im = +-r.
struct SlitDomainSpec {
    double r = 0.5;
    double slit_lo = -1.0;
    double slit_hi = 0.0;
    double t = 0.5;

    double slit_length() const { return slit_hi - slit_lo; }
    double dist_to_slit() const;
    void validate() const;
};

// Exit density of the slit plane C \ [0, ell] seen from the real point t, on
// one face of the slit, at z in (0, ell).
double slit_plane_density(double t, double ell, double z);
// Mass of one face over [0, z]; closed form, so bin masses are exact.
double slit_plane_cdf(double t, double ell, double z);

// Exit density of the unslit strip from the real point t on one of the two
// lines, at real coordinate x, and its integral over (-inf, x].
double strip_density(double t, double r, double x);
double strip_cdf(double t, double r, double x);

struct PieceHistogram {
    std::string name;          // "I+", "I-", "top", "bottom"
    std::vector<double> edges; // outermost edges may be +-infinity
    std::vector<long long> counts;
    long long total = 0;
};

struct ExitHistogram {
    long long n_paths = 0;
    std::vector<PieceHistogram> pieces;

    double mass(const std::string& piece) const;
    double sigma(const std::string& piece) const; // binomial error of that mass
};

enum class DomainKind { strip, slit_strip, slit_plane };

// Monte Carlo exit distribution; reproducible bit-for-bit for a given seed,
// independently of the worker count.
ExitHistogram brownian_exit(const SlitDomainSpec& spec, DomainKind kind, long long n_paths,
                            uint64_t seed, int bins_per_piece = 20);

struct LowerBoundResult {
    double mc_plus = 0.0, mc_minus = 0.0;
    double sigma_plus = 0.0, sigma_minus = 0.0;
    double bound = 0.0;
};
// MC mass of the two slit faces against the (|I0|/8) e^{-2/r} floor.
LowerBoundResult slit_strip_lower_bound(const SlitDomainSpec& spec, long long n_paths,
                                        uint64_t seed);

// F(z) = prod_j (z - root_j) * exp(i a z).  log|F| is subharmonic, and the
// line densities decay fast enough to integrate it.
struct EntireTestFn {
    double a = 0.0;
    std::vector<std::complex<double>> roots;

    void validate() const; // polynomial factors require the exponential factor
    double log_abs(std::complex<double> z) const;
};

struct SubharmonicCheck {
    double lhs = 0.0, rhs = 0.0, sigma = 0.0;
    bool holds() const { return lhs <= rhs + 3.0 * sigma; }
};
SubharmonicCheck subharmonic_bound_check(const SlitDomainSpec& spec, const EntireTestFn& f,
                                         long long n_paths, uint64_t seed);

struct ChiSquare {
    double stat = 0.0;
    int dof = 0;
    double p_value = 0.0;
};
// Pearson statistic of observed counts against expected counts (same length,
// expected all positive); dof = bins - 1.
ChiSquare chi_square(const std::vector<long long>& observed,
                     const std::vector<double>& expected);

} // namespace fuplab
