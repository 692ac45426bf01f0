#pragma once
#include <array>
#include <vector>

#include "fuplab/regular_set.hpp"

namespace fuplab {

struct CantorSpec {
    long long base = 3;
    std::vector<int> alphabet; // subset of {0..base-1}
    int depth = 1;

    double delta() const;
    void validate() const;
};

// Base-L Cantor set with the self-similar uniform measure.  The attached
// certificate carries the constant measured once at depth 3 (position-refined
// lower scan, rounded up to a quarter step) and the full-depth verification
// result at that constant.
RegularSetApprox gen_cantor(const CantorSpec& spec);

// The depth-3 reference constant alone (exposed for tests).
double cantor_reference_constant(const CantorSpec& spec);

struct SchottkySpec {
    struct Disk {
        Rat center{0};
        Rat radius{1};
    };
    // 2r disjoint disks centered on the real line and r rational 2x2 matrices
    // (positive determinant; Moebius action is scale-invariant so det 1 is not
    // forced) sending the exterior of disks[pairing[i].first] onto the
    // interior of disks[pairing[i].second].
    std::vector<Disk> disks;
    std::vector<std::array<Rat, 4>> maps; // row-major a,b,c,d
    std::vector<std::pair<int, int>> pairing;
    int depth = 0;
    long long grid_base = 3;
    int grid_depth = 6;

    void validate() const; // disk disjointness + numeric pairing check
};

// Union of all depth-n image disks as intervals, snapped outward to the grid;
// weights proportional to (interval radius)^delta-hat per word, delta-hat from
// the box-count estimate.  Certificate measured on the result.
RegularSetApprox gen_schottky_cover(const SchottkySpec& spec);

// Raw word intervals at the given depth (exposed for the nesting tests).
std::vector<std::pair<Rat, Rat>> schottky_intervals(const SchottkySpec& spec, int depth);

struct DimensionEstimate {
    double dim = 0.0;
    double residual = 0.0;
};

// Least-squares slope of log(box count) vs log(1/rho) over dyadic scales.
DimensionEstimate estimate_dimension(const RegularSetApprox& set);

} // namespace fuplab
