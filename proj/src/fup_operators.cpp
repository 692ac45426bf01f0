#include "fuplab/fup_operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fuplab/error.hpp"
#include "fuplab/linalg.hpp"
#include "fuplab/parallel.hpp"

namespace fuplab {
namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;
constexpr double kDegeneratePhaseEps = 1e-8;
constexpr long long kMaxQuadPoints = 20'000'000;
constexpr long long kMaxMatrixEntries = 60'000'000;

Rat fatten_radius(const Rat& h, double rho) {
    if (!(rho > 0.0) || rho > 1.0) throw ConfigError("rho", "must lie in (0, 1]");
    if (rho == 1.0) return h;
    double r = std::pow(to_double(h), rho);
    if (!std::isfinite(r)) throw ConfigError("radius", "fattening radius is not finite");
    return rat_from_double(r);
}

std::vector<std::pair<Rat, Rat>> merged_support(const RegularSetApprox& set, const Rat& r) {
    std::vector<std::pair<Rat, Rat>> iv;
    if (set.degenerate()) {
        iv.emplace_back(set.frame.origin - r, set.frame.origin + r);
        return iv;
    }
    for (size_t i = 0; i < set.cells.size(); ++i) {
        if (!(set.weights[i] > 0)) continue;
        iv.emplace_back(set.cell_left(i) - r, set.cell_right(i) + r);
    }
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<Rat, Rat>> merged;
    for (const auto& p : iv) {
        if (!merged.empty() && p.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, p.second);
        else
            merged.push_back(p);
    }
    return merged;
}

std::vector<double> to_doubles(const std::vector<Rat>& pts) {
    std::vector<double> out;
    out.reserve(pts.size());
    for (const Rat& p : pts) out.push_back(to_double(p));
    return out;
}

// Fill the scaled kernel matrix and take its operator norm.
template <class K>
NormResult kernel_norm(const std::vector<double>& xs, const std::vector<double>& ys,
                       double scale, const K& kernel) {
    if (xs.empty() || ys.empty()) return NormResult{0.0, "dense-SVD", 0, 0.0};
    if ((long long)xs.size() * (long long)ys.size() > kMaxMatrixEntries)
        throw ConfigError("points_per_h", "quadrature matrix would not fit in memory");
    Eigen::MatrixXcd mat((Eigen::Index)xs.size(), (Eigen::Index)ys.size());
    parallel_chunks((long long)xs.size(), 8, [&](long long, long long r0, long long r1) {
        for (long long i = r0; i < r1; ++i)
            for (size_t j = 0; j < ys.size(); ++j)
                mat((Eigen::Index)i, (Eigen::Index)j) = scale * kernel(xs[(size_t)i], ys[j]);
    });
    if (std::min(mat.rows(), mat.cols()) <= kDenseThreshold)
        return NormResult{op_norm_dense(mat), "dense-SVD", 0, 0.0};
    auto apply = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) { out = mat * v; };
    auto adj = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) { out = mat.adjoint() * v; };
    PowerResult p = op_norm_power(apply, adj, (int)mat.cols(), kPowerSeed);
    return NormResult{p.value, "power-iteration", p.iterations, p.residual};
}

// The circle-phase kernel is singular where the two cutoff windows meet
// (modulo a full turn), so reject that configuration outright.
void check_off_diagonal(double ax0, double ax1, double ay0, double ay1) {
    for (double shift : {-kTwoPi, 0.0, kTwoPi}) {
        double lo = std::max(ax0 + shift, ay0);
        double hi = std::min(ax1 + shift, ay1);
        if (lo <= hi)
            throw FupError("support-touches-diagonal",
                           "cutoff windows meet modulo 2*pi where the phase is singular");
    }
}

std::complex<double> unit(double angle) {
    return {std::cos(angle), std::sin(angle)};
}

} // namespace

double smoothstep01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * (3.0 - 2.0 * t);
}

double plateau_bump(double t, double plateau) {
    double a = std::abs(t);
    if (a >= 1.0) return 0.0;
    if (a <= plateau) return 1.0;
    return smoothstep01((1.0 - a) / (1.0 - plateau));
}

double ChiSpec::operator()(double x, double y) const {
    return amplitude * plateau_bump((x - x_center) / x_halfwidth, plateau) *
           plateau_bump((y - y_center) / y_halfwidth, plateau);
}

double AmplitudeSpec::eval(double x, double xi) const {
    if (x < x0 || x > x1 || xi < xi0 || xi > xi1) return 0.0;
    double fx = (x - x0) / (x1 - x0) * (nx - 1);
    double fxi = (xi - xi0) / (xi1 - xi0) * (nxi - 1);
    int i = std::min((int)fx, nx - 2);
    int j = std::min((int)fxi, nxi - 2);
    double u = fx - i, v = fxi - j;
    auto s = [&](int a, int b) { return samples[(size_t)a * (size_t)nxi + (size_t)b]; };
    return (1 - u) * (1 - v) * s(i, j) + u * (1 - v) * s(i + 1, j) +
           (1 - u) * v * s(i, j + 1) + u * v * s(i + 1, j + 1);
}

void AmplitudeSpec::validate(double slack) const {
    if (nx < 2 || nxi < 2) throw ConfigError("amplitude", "needs at least a 2x2 sample grid");
    if (!(x1 > x0) || !(xi1 > xi0)) throw ConfigError("amplitude", "empty sample rectangle");
    if (samples.size() != (size_t)nx * (size_t)nxi)
        throw ConfigError("amplitude", "sample count does not match the grid");
    for (double v : samples)
        if (!std::isfinite(v)) throw ConfigError("amplitude", "non-finite sample");
    if (sx0 < x0 - 1e-12 || sx1 > x1 + 1e-12 || sxi0 < xi0 - 1e-12 || sxi1 > xi1 + 1e-12)
        throw ConfigError("amplitude", "declared support sticks out of the sample rectangle");
    double dx = (x1 - x0) / (nx - 1);
    double dxi = (xi1 - xi0) / (nxi - 1);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nxi; ++j) {
            double x = x0 + i * dx, xi = xi0 + j * dxi;
            bool outside = x < sx0 - 1e-12 || x > sx1 + 1e-12 || xi < sxi0 - 1e-12 ||
                           xi > sxi1 + 1e-12;
            if (outside && std::abs(samples[(size_t)i * (size_t)nxi + (size_t)j]) > 1e-12)
                throw ConfigError("amplitude", "nonzero sample outside the declared support");
        }
    int k_max = std::min<int>((int)c_k.size() - 1, nx - 1);
    for (int k = 0; k <= k_max; ++k) {
        double bound = c_k[(size_t)k] * (1.0 + slack) + 1e-12;
        double dxk = std::pow(dx, k);
        for (int i = 0; i + k < nx; ++i)
            for (int j = 0; j < nxi; ++j) {
                // k-th forward difference: sum (-1)^{k-t} C(k,t) f(x + t dx)
                double acc = 0.0;
                double sign = (k % 2 == 0) ? 1.0 : -1.0;
                double binom = 1.0;
                for (int t = 0; t <= k; ++t) {
                    acc += sign * binom * samples[(size_t)(i + t) * (size_t)nxi + (size_t)j];
                    sign = -sign;
                    binom = binom * (k - t) / (t + 1);
                }
                if (std::abs(acc) / dxk > bound)
                    throw ConfigError("amplitude",
                                      "x-derivative of order " + std::to_string(k) +
                                          " exceeds the declared bound");
            }
    }
}

AmplitudeSpec plateau_amplitude(double x0, double x1, double xi0, double xi1, double value,
                                int n) {
    AmplitudeSpec a;
    a.x0 = x0, a.x1 = x1, a.xi0 = xi0, a.xi1 = xi1;
    a.nx = a.nxi = n;
    a.samples.assign((size_t)n * (size_t)n, value);
    a.sx0 = x0, a.sx1 = x1, a.sxi0 = xi0, a.sxi1 = xi1;
    a.c_k = {std::abs(value)};
    return a;
}

AmplitudeSpec bump_amplitude(double xc, double xhw, double xic, double xihw, double plateau,
                             double value, int n) {
    AmplitudeSpec a;
    a.x0 = xc - xhw, a.x1 = xc + xhw;
    a.xi0 = xic - xihw, a.xi1 = xic + xihw;
    a.nx = a.nxi = n;
    a.samples.resize((size_t)n * (size_t)n);
    for (int i = 0; i < n; ++i) {
        double tx = -1.0 + 2.0 * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            double txi = -1.0 + 2.0 * j / (n - 1);
            a.samples[(size_t)i * (size_t)n + (size_t)j] =
                value * plateau_bump(tx, plateau) * plateau_bump(txi, plateau);
        }
    }
    a.sx0 = a.x0, a.sx1 = a.x1, a.sxi0 = a.xi0, a.sxi1 = a.xi1;
    // sup |s'| = 3/2 and sup |s''| = 6 for the cubic step, scaled by the ramp width
    double ramp = (1.0 - plateau) * xhw;
    a.c_k = {std::abs(value), std::abs(value) * 1.5 / ramp, std::abs(value) * 6.0 / (ramp * ramp)};
    return a;
}

double PhaseSpec::phase(double x, double y) const {
    switch (kind) {
        case Kind::linear:
            return -kTwoPi * x * y;
        case Kind::hyperbolic_circle:
            return std::log(4.0) + 2.0 * std::log(std::abs(std::sin(0.5 * (x - y))));
        case Kind::polynomial: {
            double acc = 0.0, xp = 1.0;
            for (size_t i = 0; i < poly.size(); ++i) {
                double yp = 1.0;
                for (size_t j = 0; j < poly[i].size(); ++j) {
                    acc += poly[i][j] * xp * yp;
                    yp *= y;
                }
                xp *= x;
            }
            return acc;
        }
    }
    return 0.0;
}

double PhaseSpec::phase_dxy(double x, double y) const {
    switch (kind) {
        case Kind::linear:
            return -kTwoPi;
        case Kind::hyperbolic_circle: {
            double s = std::sin(0.5 * (x - y));
            return 0.5 / (s * s);
        }
        case Kind::polynomial: {
            double acc = 0.0, xp = 1.0; // x^{i-1}
            for (size_t i = 1; i < poly.size(); ++i) {
                double yp = 1.0; // y^{j-1}
                for (size_t j = 1; j < poly[i].size(); ++j) {
                    acc += double(i) * double(j) * poly[i][j] * xp * yp;
                    yp *= y;
                }
                xp *= x;
            }
            return acc;
        }
    }
    return 0.0;
}

QuadGrid quad_grid(const RegularSetApprox& set, const Rat& h, double rho, int points_per_h) {
    if (points_per_h < 10)
        throw FupError("grid-too-coarse",
                       "fewer than 10 points per h leaves the h-scale oscillation under-resolved");
    if (!(h > 0)) throw ConfigError("h", "must be positive");
    set.check_valid();
    QuadGrid g;
    g.spacing = h / Rat(points_per_h);
    const Rat half(1, 2);
    long long total = 0;
    for (const auto& [a, b] : merged_support(set, fatten_radius(h, rho))) {
        BigInt mlo = rat_ceil(a / g.spacing - half);
        BigInt mhi = rat_floor(b / g.spacing - half);
        if (mhi < mlo) continue;
        long long lo = to_ll(mlo), hi = to_ll(mhi);
        total += hi - lo + 1;
        if (total > kMaxQuadPoints)
            throw ConfigError("points_per_h", "quadrature grid would not fit in memory");
        for (long long m = lo; m <= hi; ++m) {
            g.lattice.push_back(m);
            g.points.push_back((Rat(m) + half) * g.spacing);
        }
    }
    return g;
}

NormResult amplitude_restricted_norm(const RegularSetApprox& x_set,
                                     const RegularSetApprox& y_set, const Rat& h,
                                     const AmplitudeSpec& a, double rho, int points_per_h) {
    a.validate();
    QuadGrid gx = quad_grid(x_set, h, rho, points_per_h);
    QuadGrid gy = quad_grid(y_set, h, rho, points_per_h);
    std::vector<double> xs = to_doubles(gx.points), ys = to_doubles(gy.points);
    double hd = to_double(h);
    double scale = to_double(gx.spacing) / std::sqrt(hd);
    return kernel_norm(xs, ys, scale, [&](double x, double xi) {
        double w = a.eval(x, xi);
        if (w == 0.0) return std::complex<double>(0.0, 0.0);
        return w * unit(kTwoPi * x * xi / hd);
    });
}

NormResult phase_restricted_norm(const RegularSetApprox& x_set, const RegularSetApprox& y_set,
                                 const Rat& h, const PhaseSpec& spec, double rho,
                                 int points_per_h) {
    spec.b.validate();
    if (spec.kind == PhaseSpec::Kind::polynomial && spec.poly.empty())
        throw ConfigError("phase", "polynomial phase needs coefficients");
    if (spec.kind == PhaseSpec::Kind::hyperbolic_circle)
        check_off_diagonal(spec.b.sx0, spec.b.sx1, spec.b.sxi0, spec.b.sxi1);
    // The decay mechanism needs a non-stationary mixed derivative on the
    // amplitude support; reject phases that lose it there.
    const int n_chk = 33;
    for (int i = 0; i < n_chk; ++i)
        for (int j = 0; j < n_chk; ++j) {
            double x = spec.b.sx0 + (spec.b.sx1 - spec.b.sx0) * i / (n_chk - 1);
            double y = spec.b.sxi0 + (spec.b.sxi1 - spec.b.sxi0) * j / (n_chk - 1);
            if (std::abs(spec.phase_dxy(x, y)) < kDegeneratePhaseEps)
                throw FupError("degenerate-phase",
                               "mixed phase derivative vanishes on the amplitude support");
        }
    QuadGrid gx = quad_grid(x_set, h, rho, points_per_h);
    QuadGrid gy = quad_grid(y_set, h, rho, points_per_h);
    std::vector<double> xs = to_doubles(gx.points), ys = to_doubles(gy.points);
    double hd = to_double(h);
    double scale = to_double(gx.spacing) / std::sqrt(hd);
    return kernel_norm(xs, ys, scale, [&](double x, double y) {
        double w = spec.b.eval(x, y);
        if (w == 0.0) return std::complex<double>(0.0, 0.0);
        return w * unit(spec.phase(x, y) / hd);
    });
}

NormResult hyperbolic_norm(const RegularSetApprox& limit_set, const Rat& h, const ChiSpec& chi,
                           double rho, int points_per_h) {
    if (!(chi.x_halfwidth > 0) || !(chi.y_halfwidth > 0))
        throw ConfigError("chi", "halfwidths must be positive");
    if (!(chi.plateau > 0) || chi.plateau >= 1)
        throw ConfigError("chi", "plateau fraction must lie in (0, 1)");
    check_off_diagonal(chi.x_center - chi.x_halfwidth, chi.x_center + chi.x_halfwidth,
                       chi.y_center - chi.y_halfwidth, chi.y_center + chi.y_halfwidth);
    QuadGrid g = quad_grid(limit_set, h, rho, points_per_h);
    std::vector<double> xs, ys;
    for (const Rat& p : g.points) {
        double v = to_double(p);
        if (v >= chi.x_center - chi.x_halfwidth && v <= chi.x_center + chi.x_halfwidth)
            xs.push_back(v);
        if (v >= chi.y_center - chi.y_halfwidth && v <= chi.y_center + chi.y_halfwidth)
            ys.push_back(v);
    }
    double hd = to_double(h);
    double scale = to_double(g.spacing) / std::sqrt(kTwoPi * hd);
    return kernel_norm(xs, ys, scale, [&](double x, double y) {
        double w = chi(x, y);
        if (w == 0.0) return std::complex<double>(0.0, 0.0);
        double ph = std::log(4.0) + 2.0 * std::log(std::abs(std::sin(0.5 * (x - y))));
        return w * unit(ph / hd);
    });
}

FupInstance induced_instance(const RegularSetApprox& x_set, const RegularSetApprox& y_set,
                             const Rat& h, double rho, int points_per_h) {
    if (numerator(h) != 1 || denominator(h) < 1)
        throw ConfigError("h", "induced instance needs h = 1/N for an integer N");
    if (denominator(h) > BigInt(1'000'000'000))
        throw ConfigError("h", "induced instance would be astronomically large");
    long long n = to_ll(BigInt(denominator(h)));
    long long n2 = n * (long long)points_per_h * (long long)points_per_h;
    FupInstance inst;
    inst.n = n2;
    auto reduce = [&](const std::vector<long long>& ms) {
        std::vector<long long> idx;
        idx.reserve(ms.size());
        for (long long m : ms) {
            long long r = m % n2;
            if (r < 0) r += n2;
            idx.push_back(r);
        }
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        return idx;
    };
    inst.x_idx = reduce(quad_grid(x_set, h, rho, points_per_h).lattice);
    inst.y_idx = reduce(quad_grid(y_set, h, rho, points_per_h).lattice);
    inst.validate();
    return inst;
}

} // namespace fuplab
