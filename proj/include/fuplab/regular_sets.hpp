#pragma once
#include <map>
#include <utility>
#include <vector>

#include "fuplab/regular_set.hpp"

namespace fuplab {

// Scans a deterministic family of test intervals: endpoints on the cell grid,
// sizes in geometric progression of ratio 2 through [alpha0, alpha1] plus the
// exact cell sizes.  Upper bound checked at every grid position (internally
// against 2^delta * c_r: a continuous-position sup is attained within one
// grid step of a tested window, which costs at most a factor 2 in size).
// Lower bound checked on intervals centered at cell midpoints, against 1/c_r.
RegularityCertificate verify_regularity(const RegularSetApprox& set, double delta,
                                        double c_r, const Rat& alpha0, const Rat& alpha1);

// y + lambda * X, weights kept rational with the lambda^delta mass factor
// accumulated exactly in lam_acc.  Certificate scales move to
// [lambda*alpha0, lambda*alpha1], constant unchanged.
RegularSetApprox affine_map(const RegularSetApprox& set, const Rat& lambda, const Rat& y);

// Certificate-level: C_R -> 2T*C_R, alpha1 -> T*alpha1.
RegularityCertificate raise_upper_scale(const RegularityCertificate& cert, double T);

// X + [-T*alpha0, T*alpha0] with the convolved measure, stored cell-averaged
// at the working resolution.  New certificate 4T*C_R on [2*alpha0, alpha1].
RegularSetApprox neighborhood(const RegularSetApprox& set, const Rat& T);

// Monotone C^1 map given as a sampled table with declared derivative bounds;
// evaluated by piecewise-linear interpolation, which keeps every image
// endpoint rational.
struct SampledMap {
    std::vector<Rat> x; // strictly increasing
    std::vector<Rat> y;

    Rat operator()(const Rat& t) const;
    // worst difference quotients, exact
    std::pair<Rat, Rat> quotient_range() const;
};

// F(X) with pulled-back measure; image cells rounded outward on the output
// grid.  Certificate C_F*C_R on [C_F*alpha0, alpha1/C_F].
RegularSetApprox nonlinear_image(const RegularSetApprox& set, const SampledMap& f,
                                 double c_f);

// X ∩ J for J ⊂ J' concentric, X∩J' ⊂ J.  Constant unchanged, upper scale
// capped at |J'|-|J|.
RegularSetApprox intersect_interval(const RegularSetApprox& set, const Rat& j_lo,
                                    const Rat& j_hi, const Rat& jp_lo, const Rat& jp_hi);

// Smallest l in {1..l_part} with X ∩ I_l empty (I_l the l-th equal piece of I).
long long missing_subinterval(const RegularSetApprox& set, const Rat& i_lo,
                              const Rat& i_hi, long long l_part);

// Disjoint pieces X∩J covering X, J = maximal runs of grid cells of size
// rho/l_part meeting X.  l_part defaults (0) to the ceil of (4C_R)^{2/(1-delta)}.
std::vector<RegularSetApprox> split_regular(const RegularSetApprox& set, const Rat& rho,
                                            long long l_part = 0);

struct CoverResult {
    std::vector<std::pair<Rat, Rat>> intervals;
    long long count = 0;
    double bound = 0.0; // 12 C_R^2 (|I|/rho)^delta
};
// Grid intervals rho*[j,j+1] carrying positive mass of X∩I.
CoverResult cover_count(const RegularSetApprox& set, const Rat& i_lo, const Rat& i_hi,
                        const Rat& rho);

struct LebesgueResult {
    double measured = 0.0;
    double bound = 0.0; // 24 C_R^2 alpha1^delta alpha0^{1-delta}
};
LebesgueResult lebesgue_bound(const RegularSetApprox& set);

// V_n -> V_{n+1} adjacency of the covering tree (positive-mass level cells).
// Throws child-count-violation if some parent has L or more children.
std::map<long long, std::vector<long long>> tree_children(const RegularSetApprox& set,
                                                          int n);

namespace detail {
struct ScanRatios {
    double up_raw;
    double lo_raw;
};
// Shared scan core: raw worst ratios over the deterministic interval family,
// with lower-bound centers optionally refined to `subdiv` virtual midpoints
// per cell (the generators measure reference constants that way).
ScanRatios scan_ratios(const RegularSetApprox& set, double delta, const Rat& alpha0,
                       const Rat& alpha1, int subdiv);
} // namespace detail

} // namespace fuplab
