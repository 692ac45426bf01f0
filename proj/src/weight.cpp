#include "fuplab/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "fuplab/error.hpp"
#include "fuplab/quad.hpp"
#include "fuplab/regular_sets.hpp"

namespace fuplab {

namespace {

// C1 plateau cutoff: 1 on |t| <= 1/2, cubic ramp to 0 at |t| = 1, |chi'| <= 3.
double chi(double t) {
    double a = std::fabs(t);
    double s = std::clamp((a - 0.5) / 0.5, 0.0, 1.0);
    return 1.0 - (3.0 * s * s - 2.0 * s * s * s);
}

double dchi(double t) {
    double a = std::fabs(t);
    double s = std::clamp((a - 0.5) / 0.5, 0.0, 1.0);
    double d = -(6.0 * s - 6.0 * s * s) / 0.5;
    return t < 0.0 ? -d : d;
}

Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

} // namespace

double theta(double xi, double delta) {
    if (!(delta >= 0.0) || delta > 1.0) throw ConfigError("delta", "needs delta in [0,1]");
    return std::pow(std::log(10.0 + std::fabs(xi)), -(1.0 + delta) / 2.0);
}

double WeightGrid::value(size_t i) const { return std::exp(log_values.at(i)); }

void WeightGrid::check_valid() const {
    if (!(spacing > 0.0) || spacing > 0.25)
        throw ConfigError("weight-grid", "spacing must lie in (0, 1/4]");
    if (log_values.size() < 2 || dlog.size() != log_values.size())
        throw ConfigError("weight-grid", "needs matched log/dlog samples");
    for (double lv : log_values)
        if (!std::isfinite(lv) || lv > 0.0)
            throw ConfigError("weight-grid", "log omega must be finite and <= 0");
    for (double d : dlog)
        if (!std::isfinite(d)) throw ConfigError("weight-grid", "derivative sample not finite");
    if (!std::isfinite(tail_coeff) || tail_coeff < 0.0 || !std::isfinite(tail_power))
        throw ConfigError("weight-grid", "bad tail declaration");
}

AdaptedWeight build_weight(const RegularSetApprox& y, double delta, double c_r) {
    y.check_valid();
    if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("delta", "needs delta in (0,1)");
    if (!(c_r >= 1.0)) throw ConfigError("c_r", "needs c_r >= 1");

    Rat alpha1_rat = std::max(rat_abs(y.support_min()), rat_abs(y.support_max()));
    double alpha1 = to_double(alpha1_rat);

    AdaptedWeight out;
    int n1 = 0;
    RegularSetApprox yc = y;
    if (alpha1 >= 2.0) {
        RegularityCertificate cert = verify_regularity(y, delta, c_r, Rat(2), alpha1_rat);
        if (!cert.verified)
            throw FupError("regularity-precondition-failed",
                           "set is not delta-regular at this constant on [2, alpha1]");
        yc.cert = cert;
        n1 = (int)std::floor(std::log2(alpha1));
    }

    out.covers_per_annulus.assign((size_t)n1, 0);
    for (int n = 1; n <= n1; ++n) {
        // Snap rho to the 2^-20 dyadic grid.  The raw value can coincide with an
        // annulus edge (e.g. 9^{(1+delta)/2} = 6 exactly when 3^delta = 2, putting a
        // lattice point at 2^9), and whether the degenerate sliver window survives
        // would then hinge on the last ulp of pow().  On the dyadic grid the whole
        // lattice is exact in doubles and the enumeration is platform-independent.
        double rho = std::pow(double(n), -(1.0 + delta) / 2.0) * std::pow(2.0, double(n));
        rho = std::round(rho * 1048576.0) / 1048576.0;
        if (rho < 2.0) continue; // cannot happen for delta in (0,1); keep the guard
        Rat rho_rat(static_cast<long long>(std::llround(rho * 1048576.0)), 1048576);
        Rat p2n = Rat(ipow(2, n)), p2n1 = Rat(ipow(2, n + 1));
        const std::pair<Rat, Rat> halves[2] = {{p2n, p2n1}, {Rat(-p2n1), Rat(-p2n)}};
        for (const auto& half : halves) {
            CoverResult cov = cover_count(yc, half.first, half.second, rho_rat);
            for (const auto& iv : cov.intervals)
                out.covers.push_back({to_double(iv.first) + rho / 2.0, rho});
            out.covers_per_annulus[(size_t)n - 1] += cov.count;
        }
    }

    double w_raw = std::max(4.0, alpha1);
    for (const auto& cv : out.covers)
        w_raw = std::max(
            {w_raw, std::fabs(cv.center - cv.size), std::fabs(cv.center + cv.size)});
    long long w4 = (long long)std::ceil(4.0 * w_raw);

    WeightGrid& g = out.grid;
    g.xi_min = -double(w4) / 4.0;
    g.spacing = 0.25;
    size_t npts = (size_t)(2 * w4 + 1);
    g.log_values.resize(npts);
    g.dlog.resize(npts);
    g.tail_coeff = 2.0;
    g.tail_power = 0.5;

    out.wt1_ok = true;
    for (size_t i = 0; i < npts; ++i) {
        double xi = g.xi(i);
        double lw = -2.0 * std::sqrt(std::sqrt(1.0 + xi * xi));
        double dl = -2.0 * 0.5 * std::pow(1.0 + xi * xi, -0.75) * xi;
        for (const auto& cv : out.covers) {
            lw -= 10.0 * cv.size * chi((xi - cv.center) / cv.size);
            dl -= 10.0 * dchi((xi - cv.center) / cv.size);
        }
        g.log_values[i] = lw;
        g.dlog[i] = dl;
        if (lw > -std::sqrt(std::sqrt(1.0 + xi * xi)) + 1e-12) out.wt1_ok = false;
        out.sup_dlog = std::max(out.sup_dlog, std::fabs(dl));
    }

    // grid points inside y, closed-cell convention; exact via the quarter grid
    std::vector<char> in_y(npts, 0);
    auto mark = [&](const Rat& l, const Rat& r) {
        long long i0 = to_ll(rat_ceil(Rat(4) * l)) + w4;
        long long i1 = to_ll(rat_floor(Rat(4) * r)) + w4;
        for (long long i = std::max(i0, 0LL); i <= std::min(i1, (long long)npts - 1); ++i)
            in_y[(size_t)i] = 1;
    };
    if (y.degenerate())
        mark(y.frame.origin, y.frame.origin);
    else
        for (size_t c = 0; c < y.cells.size(); ++c) mark(y.cell_left(c), y.cell_right(c));

    out.wt2_ok = true;
    out.wt2_margin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < npts; ++i) {
        if (!in_y[i]) continue;
        ++out.wt2_points;
        double xi = g.xi(i);
        double slack = -theta(xi, delta) * std::fabs(xi) - g.log_values[i];
        out.wt2_margin = std::min(out.wt2_margin, slack);
        if (slack < -1e-12) out.wt2_ok = false;
    }
    if (out.wt2_points == 0) out.wt2_margin = 0.0;
    return out;
}

AdmissibilityVerdict admissibility_check(const WeightGrid& w, double c0) {
    w.check_valid();
    AdmissibilityVerdict v;

    double grid_part = 0.0;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
        double x0 = w.xi(i), x1 = w.xi(i + 1);
        double f0 = std::fabs(w.log_values[i]) / (1.0 + x0 * x0);
        double f1 = std::fabs(w.log_values[i + 1]) / (1.0 + x1 * x1);
        grid_part += 0.5 * (f0 + f1) * w.spacing;
    }

    double edge = std::max(std::fabs(w.xi_min), std::fabs(w.xi(w.size() - 1)));
    double c = w.tail_coeff, p = w.tail_power;
    v.slope_sup = std::fabs(c * p * edge * std::pow(1.0 + edge * edge, p / 2.0 - 1.0));
    for (double d : w.dlog) v.slope_sup = std::max(v.slope_sup, std::fabs(d));

    if (c == 0.0) {
        v.log_integral = grid_part;
    } else if (p >= 1.0) {
        v.tail_divergent = true;
        v.log_integral = std::numeric_limits<double>::infinity();
    } else {
        const double big = 1e9;
        double tail = integrate(
            [&](double xi) {
                return c * std::pow(1.0 + xi * xi, p / 2.0) / (1.0 + xi * xi);
            },
            edge, big);
        tail += c * std::pow(big, p - 1.0) / (1.0 - p);
        v.log_integral = grid_part + 2.0 * tail;
    }
    v.admissible = !v.tail_divergent && v.log_integral <= c0 && v.slope_sup <= c0;
    return v;
}

double c0_reference(double delta, double c_r) {
    if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("delta", "needs delta in (0,1)");
    double s = (1.0 + delta) * (1.0 - delta / 2.0); // > 1 throughout (0,1)
    double sum = 0.0;
    const long long cut = 1000000;
    for (long long n = 1; n <= cut; ++n) sum += std::pow(double(n), -s);
    sum += std::pow(double(cut), 1.0 - s) / (s - 1.0);
    return 1e5 + 1e7 * c_r * c_r * sum;
}

} // namespace fuplab
