#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace fuplab {

inline constexpr int kDenseThreshold = 4096;
inline constexpr uint64_t kPowerSeed = 0x5EED;

// Largest singular value via the Gram matrix on the smaller side and a
// self-adjoint eigensolve (exact up to LAPACK-grade rounding).
double op_norm_dense(const Eigen::MatrixXcd& a);

struct PowerResult {
    double value = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

// Power iteration on A*A with a fixed-seed start vector; apply/apply_adj are
// y = A x and y = A* x.  Converges to relative residual `tol` on the Gram
// eigenpair.
PowerResult op_norm_power(
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply_adj,
    int n_cols, uint64_t seed, double tol = 1e-10, int max_iter = 200000);

// All eigenvalues of the Hermitian Toeplitz matrix with given first row.
Eigen::VectorXd toeplitz_eigenvalues(const Eigen::VectorXcd& first_row);

} // namespace fuplab
