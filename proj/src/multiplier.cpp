#include "fuplab/multiplier.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>

#include "fuplab/error.hpp"
#include "fuplab/linalg.hpp"
#include "fuplab/quad.hpp"

namespace fuplab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---- band-limited samples --------------------------------------------------

// integral over [u, v] of exp(2 pi i d x / p) dx, d integer, in the
// phase-symmetric form that keeps the Gram Hermitian to the last bit.
std::complex<double> segment_integral(long long d, double u, double v, double p) {
    if (d == 0) return {v - u, 0.0};
    double dd = static_cast<double>(d);
    double amp = std::sin(kPi * dd * (v - u) / p) * p / (kPi * dd);
    return std::polar(amp, kPi * dd * (u + v) / p);
}

double restriction_mass(const BandLimitedSample& f, double u, double v) {
    std::complex<double> acc{0.0, 0.0};
    size_t n = f.freqs.size();
    for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k)
            acc += f.coef[j] * std::conj(f.coef[k]) *
                   segment_integral(f.freqs[j] - f.freqs[k], u, v, f.period);
    return std::max(acc.real(), 0.0);
}

// ---- mollifier internals ---------------------------------------------------

double sinc(double t) {
    if (t == 0.0) return 1.0;
    return std::sin(kPi * t) / (kPi * t);
}

// Cardinal B-spline of order n on (0, n), by the two-term recursion.  The
// support clamp must be half-open: closing both ends zeroes the order-1
// indicator at every knot and the recursion then returns 0/0 at integer
// arguments (which is exactly where the grid lands).
double bspline(int n, double t) {
    if (t < 0.0 || t >= static_cast<double>(n)) return 0.0;
    if (n == 1) return 1.0;
    return (t * bspline(n - 1, t) + (static_cast<double>(n) - t) * bspline(n - 1, t - 1.0)) /
           static_cast<double>(n - 1);
}

int phi_order(Mollifier kind) { return kind == Mollifier::fejer2 ? 2 : 4; }

double phi_norm_const(Mollifier kind) {
    return kind == Mollifier::fejer2 ? 3.0 / 4.0 : 315.0 / 604.0;
}

// ---- torus indicator coefficients -------------------------------------------

// (1/period) * integral over the union of exp(-2 pi i xi x) dx.
std::complex<double> indicator_coef(const std::vector<std::pair<double, double>>& parts,
                                    double xi, double period) {
    std::complex<double> acc{0.0, 0.0};
    if (xi == 0.0) {
        for (const auto& [a, b] : parts) acc += (b - a) / period;
        return acc;
    }
    const std::complex<double> den = std::complex<double>(0.0, 2.0 * kPi * xi) * period;
    for (const auto& [a, b] : parts)
        acc += (std::polar(1.0, -2.0 * kPi * xi * a) - std::polar(1.0, -2.0 * kPi * xi * b)) / den;
    return acc;
}

std::vector<std::pair<double, double>> to_double_union(
    const std::vector<std::pair<Rat, Rat>>& u) {
    std::vector<std::pair<double, double>> parts;
    parts.reserve(u.size());
    for (const auto& [a, b] : u) parts.emplace_back(to_double(a), to_double(b));
    return parts;
}

long long checked_power(long long l, int e) {
    BigInt p = ipow(l, e);
    if (p > BigInt(1) << 60) throw ConfigError("level", "tree scale overflows the grid");
    return to_ll(p);
}

bool is_pow2(long long m) { return m > 0 && (m & (m - 1)) == 0; }

} // namespace

// ---- BandLimitedSample -------------------------------------------------------

double BandLimitedSample::norm() const {
    double s = 0.0;
    for (const auto& c : coef) s += std::norm(c);
    return std::sqrt(period * s);
}

void BandLimitedSample::check_valid() const {
    if (!(period > 0.0) || !std::isfinite(period))
        throw ConfigError("period", "must be positive and finite");
    if (freqs.size() != coef.size())
        throw ConfigError("sample", "frequency and coefficient lists differ in length");
    for (size_t j = 1; j < freqs.size(); ++j)
        if (freqs[j] <= freqs[j - 1])
            throw ConfigError("sample", "frequencies must be strictly increasing");
}

// ---- interpolation inequality --------------------------------------------------

InterpolationResult interpolation_check(const BandLimitedSample& f,
                                        const std::vector<WindowPair>& windows,
                                        double c0, double r, double kappa, double c) {
    f.check_valid();
    if (f.freqs.empty()) throw ConfigError("sample", "needs at least one coefficient");
    if (!(r > 0.0) || !(r < 1.0)) throw ConfigError("r", "needs 0 < r < 1");
    if (!(c > 0.0)) throw ConfigError("c", "must be positive");
    if (!(c0 > 0.0) || c0 > 1.0) throw ConfigError("c0", "needs 0 < c0 <= 1");
    const double kappa_max = std::exp(-c / r);
    if (!(kappa > 0.0) || kappa > kappa_max)
        throw ConfigError("kappa", "needs 0 < kappa <= exp(-c/r)");
    if (windows.empty()) throw ConfigError("windows", "needs at least one window");

    std::vector<WindowPair> w = windows;
    std::sort(w.begin(), w.end(), [](const WindowPair& x, const WindowPair& y) { return x.a < y.a; });
    for (size_t j = 0; j < w.size(); ++j) {
        if (w[j].a < -1e-12 || w[j].a + 1.0 > f.period + 1e-12)
            throw ConfigError("windows", "unit windows must sit inside one period");
        if (w[j].b < w[j].a - 1e-12 || w[j].b + c0 > w[j].a + 1.0 + 1e-12)
            throw ConfigError("windows", "subwindow escapes its unit window");
        if (j > 0 && w[j].a < w[j - 1].a + 1.0 - 1e-12)
            throw ConfigError("windows", "unit windows overlap");
    }

    double lhs = 0.0, inner = 0.0;
    for (const auto& win : w) {
        lhs += restriction_mass(f, win.a, win.a + 1.0);
        inner += restriction_mass(f, win.b, win.b + c0);
    }

    // log of period * sum exp(4 pi r |nu|/period) |c_nu|^2, via log-sum-exp.
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(f.freqs.size());
    for (size_t j = 0; j < f.freqs.size(); ++j) {
        if (f.coef[j] == std::complex<double>{0.0, 0.0}) continue;
        double t = 4.0 * kPi * r * std::abs(static_cast<double>(f.freqs[j])) / f.period +
                   2.0 * std::log(std::abs(f.coef[j]));
        terms.push_back(t);
        peak = std::max(peak, t);
    }
    InterpolationResult out;
    if (terms.empty()) { // f identically zero: 0 <= 0
        out.lhs_log = -std::numeric_limits<double>::infinity();
        out.rhs_log = -std::numeric_limits<double>::infinity();
        out.holds = true;
        return out;
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    const double fourier_log = std::log(f.period) + peak + std::log(acc);

    out.lhs_log = std::log(lhs);
    out.rhs_log = std::log(c / r) + kappa * std::log(inner) + (1.0 - kappa) * fourier_log;
    out.holds = out.lhs_log <= out.rhs_log;
    return out;
}

// ---- unique continuation --------------------------------------------------------

UcResult unique_continuation_constant(const RegularSetApprox& y, double c1, double a) {
    y.check_valid();
    if (!(c1 > 0.0) || c1 > 1.0) throw ConfigError("c1", "needs 0 < c1 <= 1");
    const double off = a < 0.0 ? (1.0 - c1) / 2.0 : a;
    if (off + c1 > 1.0 + 1e-12)
        throw ConfigError("window", "offset window must fit inside a unit cell");

    Rat smin = y.support_min(), smax = y.support_max();
    if (smin < Rat(0)) smin = -smin;
    if (smax < Rat(0)) smax = -smax;
    Rat alpha1 = y.cert ? y.cert->alpha1 : std::max(smin, smax);
    long long period = std::max<long long>(1, to_ll(rat_ceil(Rat(4) * alpha1)));

    // Frequencies nu with nu/period inside y, half-open per cell.  Sharing an
    // endpoint with the neighbor cell must not duplicate a frequency: the
    // duplicated column would make the Gram singular and the constant
    // collapse to rounding noise.
    std::vector<long long> freqs;
    if (y.degenerate()) {
        Rat q = y.frame.origin * Rat(period);
        if (q == Rat(rat_floor(q))) freqs.push_back(to_ll(rat_floor(q)));
    } else {
        for (size_t i = 0; i < y.cells.size(); ++i) {
            long long lo = to_ll(rat_ceil(y.cell_left(i) * Rat(period)));
            long long hi = to_ll(rat_ceil(y.cell_right(i) * Rat(period)));
            for (long long nu = lo; nu < hi; ++nu) freqs.push_back(nu);
        }
        std::sort(freqs.begin(), freqs.end());
        freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
    }
    if (freqs.empty()) throw FupError("empty-support", "no frequencies inside the set");

    // Classes nu mod period decouple on the periodized window union; group
    // the per-class integer offsets and solve each distinct Gram once.
    std::map<long long, std::vector<long long>> classes;
    for (long long nu : freqs) {
        long long rho = ((nu % period) + period) % period;
        classes[rho].push_back((nu - rho) / period);
    }
    std::map<std::vector<long long>, int> distinct;
    for (auto& [rho, ms] : classes) {
        std::sort(ms.begin(), ms.end());
        distinct[ms] += 1;
    }

    UcResult out;
    out.period = period;
    out.freq_count = static_cast<long long>(freqs.size());
    out.gram_count = static_cast<long long>(distinct.size());

    double lam_min = std::numeric_limits<double>::infinity();
    for (const auto& [ms, count] : distinct) {
        const long long n = static_cast<long long>(ms.size());
        if (n > kDenseThreshold) throw ConfigError("support", "class Gram too large");
        Eigen::MatrixXcd g(n, n);
        for (long long i = 0; i < n; ++i)
            for (long long j = 0; j < n; ++j) {
                long long d = ms[i] - ms[j];
                if (d == 0) {
                    g(i, j) = c1;
                } else {
                    double dd = static_cast<double>(d);
                    double amp = std::sin(kPi * dd * c1) / (kPi * dd);
                    g(i, j) = std::polar(amp, kPi * dd * (2.0 * off + c1));
                }
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
        lam_min = std::min(lam_min, es.eigenvalues()(0));
    }
    out.c3 = std::sqrt(std::max(lam_min, 0.0));
    return out;
}

// ---- coarse graining ----------------------------------------------------------

std::vector<std::pair<Rat, Rat>> coarse_grain(const RegularSetApprox& x, int n, long long l) {
    x.check_valid();
    if (l < 2) throw ConfigError("l", "tree base must be at least 2");
    if (n < 0 || n > 40) throw ConfigError("n", "tree level out of range");

    const Rat w = Rat(1) / Rat(ipow(l, n));
    const Rat fat = w / 10;

    std::set<BigInt> tiles;
    long long budget = 4000000;
    auto scan = [&](const Rat& lo, const Rat& hi) {
        BigInt t0 = rat_floor(lo / w);
        BigInt t1 = rat_ceil(hi / w);
        if (t1 == t0) t1 = t0 + 1; // degenerate: the tile owning the point
        for (BigInt t = t0; t < t1; ++t) {
            if (--budget < 0) throw ConfigError("n", "level too deep for the stored set");
            if (x.positive_mass(Rat(t) * w, Rat(t + 1) * w)) tiles.insert(t);
        }
    };
    if (x.degenerate()) {
        scan(x.frame.origin, x.frame.origin);
    } else {
        for (size_t i = 0; i < x.cells.size(); ++i) scan(x.cell_left(i), x.cell_right(i));
    }

    std::vector<std::pair<Rat, Rat>> merged;
    for (const BigInt& t : tiles) {
        Rat lo = Rat(t) * w - fat;
        Rat hi = Rat(t + 1) * w + fat;
        if (!merged.empty() && lo <= merged.back().second)
            merged.back().second = std::max(merged.back().second, hi);
        else
            merged.emplace_back(lo, hi);
    }
    return merged;
}

// ---- mollifier catalog -----------------------------------------------------------

double phi_value(Mollifier kind, double x) {
    const int p = phi_order(kind);
    double s = sinc(x / static_cast<double>(p));
    double s2 = s * s;
    double s4 = s2 * s2;
    return phi_norm_const(kind) * (p == 2 ? s4 : s4 * s4);
}

double phi_hat(Mollifier kind, double xi) {
    if (std::abs(xi) >= 1.0) return 0.0;
    const int p = phi_order(kind);
    return bspline(2 * p, static_cast<double>(p) * (xi + 1.0)) /
           bspline(2 * p, static_cast<double>(p));
}

double phi_tail(Mollifier kind, double radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw ConfigError("radius", "needs a finite radius >= 0");
    const int p = phi_order(kind);
    const double u0 = radius / static_cast<double>(p);
    // Integrate sinc^{2p} in unit blocks between its zeros; the blocks decay
    // like (pi k)^{-2p}, so 600 of them plus the mean-value remainder leave
    // relative error far below the quadrature's own.
    auto g = [p](double u) {
        double s = sinc(u);
        double s2 = s * s;
        double s4 = s2 * s2;
        return p == 2 ? s4 : s4 * s4;
    };
    double acc = 0.0;
    double start = u0;
    long long k0 = static_cast<long long>(std::floor(u0));
    for (long long k = k0; k < k0 + 600; ++k) {
        double lo = std::max(start, static_cast<double>(k));
        double hi = static_cast<double>(k + 1);
        if (hi <= lo) continue;
        double mag = std::pow(kPi * std::max({lo, 0.5}), -2.0 * p);
        acc += integrate(g, lo, hi, std::max(1e-8 * mag, 1e-300));
    }
    const double kend = static_cast<double>(k0 + 600);
    const double wallis = p == 2 ? 3.0 / 8.0 : 35.0 / 128.0;
    acc += wallis * std::pow(kPi, -2.0 * p) * std::pow(kend, 1.0 - 2.0 * p) /
           (2.0 * p - 1.0);
    return std::min(1.0, 2.0 * phi_norm_const(kind) * static_cast<double>(p) * acc);
}

// ---- smoothed cutoffs ---------------------------------------------------------------

PsiWeight build_psi(const RegularSetApprox& x, int n, int t, long long l, Mollifier kind,
                    long long m_grid, double period) {
    x.check_valid();
    if (t < 1) throw ConfigError("t", "needs t >= 1");
    if (!(period > 0.0) || !std::isfinite(period))
        throw ConfigError("period", "must be positive and finite");
    if (!is_pow2(m_grid) || m_grid < 16 || m_grid > (1LL << 24))
        throw ConfigError("m-grid", "needs a power of two in [16, 2^24]");

    auto u = coarse_grain(x, n + 1, l);

    PsiWeight out;
    out.period = period;
    out.c_phi_over_l = phi_tail(kind, static_cast<double>(checked_power(l, t - 1)) / 10.0);

    Rat total{0};
    for (const auto& [a, b] : u) total += b - a;
    if (total >= rat_from_double(period)) {
        // The fattened union already wraps the whole torus.
        out.values.assign(static_cast<size_t>(m_grid), 1.0);
        out.min_value = out.max_value = out.min_on_x = 1.0;
        return out;
    }
    if (u.back().second - u.front().first > rat_from_double(period))
        throw ConfigError("period", "fattened union wider than one period");

    const double scale = static_cast<double>(checked_power(l, n + t));
    const long long band = static_cast<long long>(std::ceil(scale * period));
    if (band >= m_grid / 2)
        throw ConfigError("m-grid", "grid cannot resolve the mollifier band");

    auto parts = to_double_union(u);
    fftw_complex* buf = static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * static_cast<size_t>(m_grid)));
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m_grid), buf, buf, FFTW_BACKWARD,
                                      FFTW_ESTIMATE);
    for (long long j = 0; j < m_grid; ++j) buf[j][0] = buf[j][1] = 0.0;
    for (long long nu = -band; nu <= band; ++nu) {
        double xi = static_cast<double>(nu) / period;
        double ph = phi_hat(kind, xi / scale);
        if (ph == 0.0 && nu != 0) continue;
        std::complex<double> cv = indicator_coef(parts, xi, period) * ph;
        long long slot = nu >= 0 ? nu : nu + m_grid;
        buf[slot][0] = cv.real();
        buf[slot][1] = cv.imag();
    }
    fftw_execute(plan);

    out.values.resize(static_cast<size_t>(m_grid));
    out.min_value = std::numeric_limits<double>::infinity();
    out.max_value = -out.min_value;
    for (long long j = 0; j < m_grid; ++j) {
        double v = buf[j][0];
        out.values[static_cast<size_t>(j)] = v;
        out.min_value = std::min(out.min_value, v);
        out.max_value = std::max(out.max_value, v);
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);

    // Worst sample over the set itself (grid points inside half-open cells).
    out.min_on_x = std::numeric_limits<double>::infinity();
    const Rat grid_rate = Rat(m_grid) / rat_from_double(period);
    auto visit = [&](const Rat& lo, const Rat& hi) {
        long long i0 = to_ll(rat_ceil(lo * grid_rate));
        long long i1 = to_ll(rat_ceil(hi * grid_rate));
        for (long long i = std::max<long long>(i0, 0); i < std::min(i1, m_grid); ++i)
            out.min_on_x = std::min(out.min_on_x, out.values[static_cast<size_t>(i)]);
    };
    if (x.degenerate()) {
        visit(x.frame.origin, x.frame.origin + Rat(1) / grid_rate);
    } else {
        for (size_t i = 0; i < x.cells.size(); ++i) visit(x.cell_left(i), x.cell_right(i));
    }
    return out;
}

// ---- contraction -----------------------------------------------------------------------

ContractionResult contraction_estimate(const RegularSetApprox& x, const RegularSetApprox& y,
                                       int n, int t, long long l, Mollifier kind,
                                       double period) {
    x.check_valid();
    y.check_valid();
    if (t < 1) throw ConfigError("t", "needs t >= 1");
    if (n < 0) throw ConfigError("n", "needs n >= 0");
    if (!(period > 0.0) || !std::isfinite(period))
        throw ConfigError("period", "must be positive and finite");

    auto u = coarse_grain(x, n + 1, l);
    Rat total{0};
    for (const auto& [a, b] : u) total += b - a;
    if (total >= rat_from_double(period)) {
        // Psi == 1 on the whole torus: multiplication is the identity.
        return {0.0, 1.0, 0};
    }
    if (u.back().second - u.front().first > rat_from_double(period))
        throw ConfigError("period", "fattened union wider than one period");

    // Band: frequencies nu/period in the closed 2 l^n neighborhood of y,
    // half-open on each merged component.
    const Rat fat = Rat(2) * Rat(ipow(l, n));
    std::vector<std::pair<Rat, Rat>> yiv;
    if (y.degenerate()) {
        yiv.emplace_back(y.frame.origin - fat, y.frame.origin + fat);
    } else {
        for (size_t i = 0; i < y.cells.size(); ++i)
            yiv.emplace_back(y.cell_left(i) - fat, y.cell_right(i) + fat);
    }
    std::sort(yiv.begin(), yiv.end());
    std::vector<std::pair<Rat, Rat>> ymg;
    for (auto& iv : yiv) {
        if (!ymg.empty() && iv.first <= ymg.back().second)
            ymg.back().second = std::max(ymg.back().second, iv.second);
        else
            ymg.push_back(iv);
    }
    const Rat period_rat = rat_from_double(period);
    std::vector<long long> bins;
    for (const auto& [a, b] : ymg) {
        long long lo = to_ll(rat_ceil(a * period_rat));
        long long hi = to_ll(rat_ceil(b * period_rat));
        for (long long nu = lo; nu < hi; ++nu) bins.push_back(nu);
    }
    if (bins.empty()) throw FupError("empty-support", "no frequencies inside the band");
    const long long nb = static_cast<long long>(bins.size());
    if (nb > kDenseThreshold) throw ConfigError("band", "band too large for a dense solve");

    const double scale = static_cast<double>(checked_power(l, n + t));
    auto parts = to_double_union(u);
    const long long span = bins.back() - bins.front();
    std::vector<std::complex<double>> coef(static_cast<size_t>(2 * span + 1));
    for (long long d = -span; d <= span; ++d) {
        double xi = static_cast<double>(d) / period;
        double ph = phi_hat(kind, xi / scale);
        coef[static_cast<size_t>(d + span)] =
            ph == 0.0 && d != 0 ? std::complex<double>{0.0, 0.0}
                                : indicator_coef(parts, xi, period) * ph;
    }

    Eigen::MatrixXcd a(nb, nb);
    for (long long i = 0; i < nb; ++i)
        for (long long j = 0; j < nb; ++j)
            a(i, j) = coef[static_cast<size_t>(bins[i] - bins[j] + span)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);

    ContractionResult out;
    out.band_size = nb;
    out.lambda_max = es.eigenvalues()(nb - 1);
    out.tau = 1.0 - out.lambda_max;
    return out;
}

// ---- iteration ----------------------------------------------------------------------------

IterateResult iterate_fup(const RegularSetApprox& x, const RegularSetApprox& y, long long l,
                          int t, int m_max, Mollifier kind, long long m_grid,
                          double period) {
    x.check_valid();
    y.check_valid();
    if (l < 2) throw ConfigError("l", "needs l >= 2");
    if (t < 1) throw ConfigError("t", "needs t >= 1");
    if (m_max < 1) throw ConfigError("m-max", "needs m_max >= 1");
    if (!is_pow2(m_grid) || m_grid < 1024 || m_grid > (1LL << 24))
        throw ConfigError("m-grid", "needs a power of two in [2^10, 2^24]");
    if (!(period > 0.0) || !std::isfinite(period))
        throw ConfigError("period", "must be positive and finite");
    if (x.support_min() < Rat(0) || x.support_max() > rat_from_double(period))
        throw ConfigError("x-range", "set must live inside [0, period]");

    IterateResult out;
    out.grid_points = m_grid;
    out.tau_fixture = kTauFixture;
    out.c_phi_over_l = phi_tail(kind, static_cast<double>(checked_power(l, t - 1)) / 10.0);
    out.pre_lhs = (1.0 - kTauFixture) / (1.0 - out.c_phi_over_l);
    out.pre_rhs = 1.0 - kTauFixture / 2.0;
    if (!(out.pre_lhs <= out.pre_rhs))
        throw FupError("iterate-precondition-failed",
                       "kernel tail exceeds the recorded contraction at this t");

    // Basis count: nu/period inside y, half-open per cell.  Every basis
    // exponential has unit modulus, so each reported sup over the basis is
    // attained identically across it and is computed once from the weights.
    long long basis = 0;
    if (y.degenerate()) {
        Rat q = y.frame.origin * rat_from_double(period);
        if (q == Rat(rat_floor(q))) basis = 1;
    } else {
        for (size_t i = 0; i < y.cells.size(); ++i)
            basis += to_ll(rat_ceil(y.cell_right(i) * rat_from_double(period))) -
                     to_ll(rat_ceil(y.cell_left(i) * rat_from_double(period)));
    }
    if (basis <= 0) throw FupError("empty-support", "no frequencies inside the set");
    out.basis_size = basis;

    // Spatial quadrature for x with fractional edge pixels.
    const double dx = period / static_cast<double>(m_grid);
    std::vector<double> wts(static_cast<size_t>(m_grid), 0.0);
    auto add_cell = [&](double a, double b) {
        double ia = a / dx, ib = b / dx;
        long long lo = static_cast<long long>(std::ceil(ia));
        long long hi = static_cast<long long>(std::floor(ib));
        for (long long j = std::max<long long>(lo, 0); j < std::min(hi, m_grid); ++j)
            wts[static_cast<size_t>(j)] += 1.0;
        if (lo > 0 && lo - 1 < m_grid) wts[static_cast<size_t>(lo - 1)] += lo - ia;
        if (hi >= 0 && hi < m_grid) wts[static_cast<size_t>(hi)] += ib - hi;
    };
    if (!x.degenerate())
        for (size_t i = 0; i < x.cells.size(); ++i)
            add_cell(to_double(x.cell_left(i)), to_double(x.cell_right(i)));

    double x_mass = 0.0;
    for (double v : wts) x_mass += v;
    x_mass *= dx;
    out.x_ratios.push_back(std::sqrt(x_mass / period));

    std::vector<double> running;
    double b_prev = 1.0;
    for (int stage = 1; stage < m_max; ++stage) {
        PsiWeight psi = build_psi(x, stage * t, t, l, kind, m_grid, period);
        if (running.empty()) {
            running = std::move(psi.values);
        } else {
            for (size_t j = 0; j < running.size(); ++j) running[j] *= psi.values[j];
        }
        double full = 0.0, on_x = 0.0;
        for (size_t j = 0; j < running.size(); ++j) {
            double sq = running[j] * running[j];
            full += sq;
            on_x += wts[j] * sq;
        }
        double b_cur = std::sqrt(full * dx / period);
        double ratio = b_cur / b_prev;
        if (!(ratio < 1.0))
            throw FupError("contraction-failed", "stage ratio reached one");
        out.full_ratios.push_back(ratio);
        out.x_ratios.push_back(std::sqrt(on_x * dx / period));
        b_prev = b_cur;
    }

    if (!out.full_ratios.empty()) {
        out.q = out.full_ratios.back() / (1.0 - out.c_phi_over_l);
        out.beta_empirical =
            -std::log(out.q) / (static_cast<double>(t) * std::log(static_cast<double>(l)));
    } else {
        out.q = 1.0;
        out.beta_empirical = 0.0;
    }
    return out;
}

} // namespace fuplab
