#include "fuplab/linalg.hpp"

#include <cmath>

#include "fuplab/error.hpp"
#include "fuplab/rng.hpp"

namespace fuplab {

double op_norm_dense(const Eigen::MatrixXcd& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::MatrixXcd g;
    if (a.rows() >= a.cols())
        g = a.adjoint() * a;
    else
        g = a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, top));
}

PowerResult op_norm_power(
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply_adj,
    int n_cols, uint64_t seed, double tol, int max_iter) {
    Rng rng(seed);
    Eigen::VectorXcd v(n_cols);
    for (int i = 0; i < n_cols; ++i)
        v[i] = std::complex<double>(rng.uniform() - 0.5, rng.uniform() - 0.5);
    double nv = v.norm();
    if (nv == 0.0) throw FupError("degenerate-start", "zero start vector");
    v /= nv;

    Eigen::VectorXcd av, gv;
    PowerResult res;
    double lambda = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        apply(v, av);
        apply_adj(av, gv); // gv = A* A v
        lambda = gv.norm();
        res.iterations = it;
        if (lambda == 0.0) {
            res.value = 0.0;
            res.residual = 0.0;
            return res;
        }
        // residual of the Gram eigen equation at the Rayleigh estimate
        double ray = std::real(v.dot(gv));
        double rnorm = (gv - ray * v).norm() / std::abs(ray);
        gv /= lambda;
        v.swap(gv);
        if (rnorm <= tol) {
            res.value = std::sqrt(std::max(0.0, ray));
            res.residual = rnorm;
            return res;
        }
        res.residual = rnorm;
    }
    res.value = std::sqrt(std::max(0.0, lambda));
    return res;
}

Eigen::VectorXd toeplitz_eigenvalues(const Eigen::VectorXcd& first_row) {
    int n = int(first_row.size());
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = j >= i ? first_row[j - i] : std::conj(first_row[i - j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

} // namespace fuplab
