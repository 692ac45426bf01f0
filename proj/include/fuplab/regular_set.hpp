#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "fuplab/rational.hpp"

namespace fuplab {

// Affine chart for a set: absolute position = origin + scale * (frame coord).
// scale == 0 marks a degenerate one-point set sitting at origin.
struct Frame {
    Rat origin{0};
    Rat scale{1};

    bool degenerate() const { return scale == 0; }
};

struct RegularityCertificate {
    double delta = 0.0;
    double c_r = 1.0;
    Rat alpha0{0};
    Rat alpha1{1};
    bool verified = false;
    double worst_ratio_upper = 0.0; // max mu(I)/|I|^delta over scan, / 2^delta
    double worst_ratio_lower = 0.0; // min mu(I)/|I|^delta over centered scan
};

// Finite base-L approximation of a set in [origin, origin+scale]-ish range:
// cells are level-`depth` grid indices (cell j spans [j, j+1]*L^-depth in
// frame coordinates, so absolute width is scale*L^-depth), each carrying a
// rational mass.  Masses are spread uniformly inside their cell except in the
// degenerate case, which is a point mass.
struct RegularSetApprox {
    long long base = 3;
    int depth = 0;
    Frame frame;
    std::vector<long long> cells;  // sorted, unique
    std::vector<Rat> weights;      // same length as cells
    // Affine maps scale mass by lambda^delta; lambda accumulates here exactly
    // and the (irrational) power is applied only when ratios are evaluated.
    Rat lam_acc{1};
    std::optional<RegularityCertificate> cert;

    bool degenerate() const { return frame.degenerate(); }

    Rat cell_width() const { return frame.scale / Rat(ipow(base, depth)); }
    Rat cell_left(size_t i) const { return frame.origin + Rat(cells[i]) * cell_width(); }
    Rat cell_right(size_t i) const { return frame.origin + Rat(cells[i] + 1) * cell_width(); }

    Rat total_mass() const {
        Rat s{0};
        for (const auto& w : weights) s += w;
        return s;
    }

    // Hull of the support, absolute coordinates.
    Rat support_min() const { return degenerate() ? frame.origin : cell_left(0); }
    Rat support_max() const {
        return degenerate() ? frame.origin : cell_right(cells.size() - 1);
    }

    // mu([a,b]) with cells read as uniform densities; closed-interval
    // convention only matters for the degenerate point mass.
    Rat measure(const Rat& a, const Rat& b) const;

    // Total mu-mass strictly assignable to [a,b) -- used by the positive-mass
    // cover/tree counts where touching at a single point must not count.
    bool positive_mass(const Rat& a, const Rat& b) const;

    // Closed-set intersection test: a shared endpoint counts.  Drives the
    // deterministic empty-subinterval search.
    bool intersects_closed(const Rat& a, const Rat& b) const;

    void check_valid() const; // throws FupError on malformed structure
};

} // namespace fuplab
