#pragma once
#include <string>
#include <utility>
#include <vector>

#include "fuplab/generators.hpp"

namespace fuplab {

// Discrete model of F_h at h = 1/N: the unitary N-point transform restricted
// to row set X_idx and column set Y_idx.
struct FupInstance {
    long long n = 1;
    std::vector<long long> x_idx;
    std::vector<long long> y_idx;

    void validate() const;
};

struct NormResult {
    double value = 0.0;
    std::string method; // dense-SVD | power-iteration
    int iterations = 0;
    double residual = 0.0;
};

// Largest singular value of [ exp(2 pi i jk / N) / sqrt(N) ], j in X, k in Y.
NormResult fourier_restricted_norm(const FupInstance& inst);

// Same norm after cyclically shifting both index sets; equal by conjugation
// with modulations.
std::pair<NormResult, NormResult> shift_invariance_check(const FupInstance& inst,
                                                         long long x0, long long y0);

struct ScanRow {
    int k = 0;
    long long n = 0;
    double norm = 0.0;
    double log_ratio = 0.0; // -log(norm)/log(N)
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double beta = 0.0;      // slope fit over the largest half of the k-range
    double beta_full = 0.0; // full-range fit
    double stderr_beta = 0.0;
};

// Norms of the self-dual Cantor family over a depth range (X at depth k on
// scales [1/N, 1], Y the same set dilated by N = L^k).
ScanResult scan_and_fit(const CantorSpec& spec_x, const CantorSpec& spec_y, int k_min,
                        int k_max);

// Fit helper shared with other scans: slope of -log(norm) against log(N).
ScanResult fit_scan_rows(const std::vector<ScanRow>& rows);

struct VolumeBaseline {
    double measured = 0.0;
    double paper = 0.0; // 24 C_R^2 N^{delta - 1/2}
    bool paper_applicable = false;
    double cauchy_schwarz = 0.0; // min(1, sqrt(|X||Y|/N))
};

// Both baselines; throws baseline-violated if the measured norm exceeds an
// applicable one beyond 1e-9.
VolumeBaseline volume_baseline(const FupInstance& inst, double delta, double c_r);

// Grid index set of a RegularSetApprox mapped onto {0..N-1}: the cells of the
// depth matching N = base^depth (frame [0,1]).
std::vector<long long> grid_indices(const RegularSetApprox& set);

namespace detail {
// Iterative path regardless of size, for cross-checking against the dense one.
NormResult fourier_restricted_norm_power(const FupInstance& inst);
} // namespace detail

} // namespace fuplab
