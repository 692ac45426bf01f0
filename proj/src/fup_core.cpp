#include "fuplab/fup_core.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fuplab/error.hpp"
#include "fuplab/linalg.hpp"

namespace fuplab {

namespace {

void check_indices(const std::vector<long long>& idx, long long n, const char* label) {
    if (idx.empty()) throw ConfigError(label, std::string(label) + " must be nonempty");
    long long prev = -1;
    for (long long v : idx) {
        if (v < 0 || v >= n)
            throw ConfigError(label, std::string(label) + " index out of [0, N)");
        if (v <= prev)
            throw ConfigError(label, std::string(label) + " must be strictly increasing");
        prev = v;
    }
}

// exp(2 pi i jk / N) with the product reduced mod N exactly.
std::complex<double> unit_phase(long long j, long long k, long long n) {
    long long r = static_cast<long long>(static_cast<__int128>(j) * k % n);
    double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
    return {std::cos(ang), std::sin(ang)};
}

Eigen::MatrixXcd dense_matrix(const FupInstance& inst) {
    const auto rows = static_cast<Eigen::Index>(inst.x_idx.size());
    const auto cols = static_cast<Eigen::Index>(inst.y_idx.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(inst.n));
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = scale * unit_phase(inst.x_idx[r], inst.y_idx[c], inst.n);
    return m;
}

// Matvecs through a length-N transform: scatter, full DFT, gather.  The
// +i kernel is FFTW's BACKWARD direction; the adjoint uses FORWARD.
struct FftApplier {
    explicit FftApplier(const FupInstance& inst) : inst_(inst) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * inst.n));
        plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(inst.n), buf_, buf_, FFTW_FORWARD,
                                     FFTW_ESTIMATE);
        plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(inst.n), buf_, buf_, FFTW_BACKWARD,
                                     FFTW_ESTIMATE);
        scale_ = 1.0 / std::sqrt(static_cast<double>(inst.n));
    }
    ~FftApplier() {
        fftw_destroy_plan(plan_fwd_);
        fftw_destroy_plan(plan_bwd_);
        fftw_free(buf_);
    }
    FftApplier(const FftApplier&) = delete;
    FftApplier& operator=(const FftApplier&) = delete;

    void apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
        scatter(inst_.y_idx, v);
        fftw_execute(plan_bwd_);
        gather(inst_.x_idx, out);
    }
    void apply_adj(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
        scatter(inst_.x_idx, v);
        fftw_execute(plan_fwd_);
        gather(inst_.y_idx, out);
    }

private:
    void scatter(const std::vector<long long>& idx, const Eigen::VectorXcd& v) const {
        std::fill_n(reinterpret_cast<std::complex<double>*>(buf_), inst_.n,
                    std::complex<double>(0.0, 0.0));
        auto* b = reinterpret_cast<std::complex<double>*>(buf_);
        for (size_t i = 0; i < idx.size(); ++i) b[idx[i]] = v(static_cast<Eigen::Index>(i));
    }
    void gather(const std::vector<long long>& idx, Eigen::VectorXcd& out) const {
        out.resize(static_cast<Eigen::Index>(idx.size()));
        auto* b = reinterpret_cast<std::complex<double>*>(buf_);
        for (size_t i = 0; i < idx.size(); ++i)
            out(static_cast<Eigen::Index>(i)) = scale_ * b[idx[i]];
    }

    const FupInstance& inst_;
    fftw_complex* buf_;
    fftw_plan plan_fwd_;
    fftw_plan plan_bwd_;
    double scale_;
};

NormResult norm_with_method(const FupInstance& inst, bool force_power) {
    inst.validate();
    const size_t min_side = std::min(inst.x_idx.size(), inst.y_idx.size());
    NormResult res;
    if (!force_power && min_side <= static_cast<size_t>(kDenseThreshold)) {
        res.value = op_norm_dense(dense_matrix(inst));
        res.method = "dense-SVD";
        return res;
    }
    FftApplier fft(inst);
    PowerResult pr = op_norm_power(
        [&fft](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) { fft.apply(v, out); },
        [&fft](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) { fft.apply_adj(v, out); },
        static_cast<int>(inst.y_idx.size()), kPowerSeed);
    res.value = pr.value;
    res.method = "power-iteration";
    res.iterations = pr.iterations;
    res.residual = pr.residual;
    return res;
}

} // namespace

void FupInstance::validate() const {
    if (n < 1) throw ConfigError("n", "N must be >= 1");
    check_indices(x_idx, n, "x_idx");
    check_indices(y_idx, n, "y_idx");
}

NormResult fourier_restricted_norm(const FupInstance& inst) {
    return norm_with_method(inst, false);
}

namespace detail {
NormResult fourier_restricted_norm_power(const FupInstance& inst) {
    return norm_with_method(inst, true);
}
} // namespace detail

std::pair<NormResult, NormResult> shift_invariance_check(const FupInstance& inst,
                                                         long long x0, long long y0) {
    auto shift = [&inst](const std::vector<long long>& idx, long long s) {
        std::vector<long long> out;
        out.reserve(idx.size());
        long long m = ((s % inst.n) + inst.n) % inst.n;
        for (long long v : idx) out.push_back((v + m) % inst.n);
        std::sort(out.begin(), out.end());
        return out;
    };
    FupInstance shifted{inst.n, shift(inst.x_idx, x0), shift(inst.y_idx, y0)};
    return {fourier_restricted_norm(inst), fourier_restricted_norm(shifted)};
}

ScanResult fit_scan_rows(const std::vector<ScanRow>& rows) {
    if (rows.size() < 3)
        throw FupError("insufficient-points", "scan fit needs at least 3 depths");
    auto slope_fit = [](const std::vector<ScanRow>& pts, double* stderr_out) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(pts.size());
        for (const ScanRow& r : pts) {
            double x = std::log(static_cast<double>(r.n));
            double y = -std::log(r.norm);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double denom = n * sxx - sx * sx;
        double slope = (n * sxy - sx * sy) / denom;
        if (stderr_out) {
            double intercept = (sy - slope * sx) / n;
            double ss = 0;
            for (const ScanRow& r : pts) {
                double x = std::log(static_cast<double>(r.n));
                double y = -std::log(r.norm);
                double e = y - slope * x - intercept;
                ss += e * e;
            }
            *stderr_out = pts.size() > 2
                              ? std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n))
                              : 0.0;
        }
        return slope;
    };
    ScanResult res;
    res.rows = rows;
    res.beta_full = slope_fit(rows, nullptr);
    std::vector<ScanRow> upper(rows.end() - static_cast<long>((rows.size() + 1) / 2),
                               rows.end());
    if (upper.size() < 2) upper = rows;
    res.beta = slope_fit(upper, &res.stderr_beta);
    return res;
}

ScanResult scan_and_fit(const CantorSpec& spec_x, const CantorSpec& spec_y, int k_min,
                        int k_max) {
    if (spec_x.base != spec_y.base)
        throw ConfigError("base", "row and column families must share a base");
    if (k_max - k_min + 1 < 3)
        throw FupError("insufficient-points", "scan fit needs at least 3 depths");
    std::vector<ScanRow> rows;
    for (int k = k_min; k <= k_max; ++k) {
        CantorSpec sx = spec_x;
        CantorSpec sy = spec_y;
        sx.depth = k;
        sy.depth = k;
        FupInstance inst;
        inst.n = to_ll(ipow(spec_x.base, k));
        inst.x_idx = grid_indices(gen_cantor(sx));
        inst.y_idx = grid_indices(gen_cantor(sy));
        ScanRow row;
        row.k = k;
        row.n = inst.n;
        row.norm = fourier_restricted_norm(inst).value;
        row.log_ratio = -std::log(row.norm) / std::log(static_cast<double>(inst.n));
        rows.push_back(row);
    }
    return fit_scan_rows(rows);
}

VolumeBaseline volume_baseline(const FupInstance& inst, double delta, double c_r) {
    VolumeBaseline vb;
    vb.measured = fourier_restricted_norm(inst).value;
    const double n = static_cast<double>(inst.n);
    vb.paper = 24.0 * c_r * c_r * std::pow(n, delta - 0.5);
    vb.paper_applicable = delta < 0.5;
    vb.cauchy_schwarz = std::min(
        1.0, std::sqrt(static_cast<double>(inst.x_idx.size()) *
                       static_cast<double>(inst.y_idx.size()) / n));
    if (vb.measured > vb.cauchy_schwarz + 1e-9 ||
        (vb.paper_applicable && vb.measured > vb.paper + 1e-9))
        throw FupError("baseline-violated", "restricted norm exceeds an applicable baseline");
    return vb;
}

std::vector<long long> grid_indices(const RegularSetApprox& set) {
    long long n = to_ll(ipow(set.base, set.depth));
    std::vector<long long> out;
    out.reserve(set.cells.size());
    for (long long c : set.cells) out.push_back(((c % n) + n) % n);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace fuplab
