#include "fuplab/regular_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fuplab/error.hpp"

namespace fuplab {

void RegularSetApprox::check_valid() const {
    if (cells.size() != weights.size())
        throw FupError("malformed-set", "cells/weights length mismatch");
    for (size_t i = 1; i < cells.size(); ++i)
        if (cells[i] <= cells[i - 1])
            throw FupError("malformed-set", "cells not sorted unique");
    for (const auto& w : weights)
        if (w < 0) throw FupError("malformed-set", "negative weight");
    if (degenerate() && cells.size() > 1)
        throw FupError("malformed-set", "degenerate frame with several cells");
}

Rat RegularSetApprox::measure(const Rat& a, const Rat& b) const {
    if (b < a) return Rat(0);
    if (degenerate()) {
        Rat s{0};
        if (a <= frame.origin && frame.origin <= b)
            for (const auto& w : weights) s += w;
        return s;
    }
    Rat w = cell_width();
    Rat s{0};
    for (size_t i = 0; i < cells.size(); ++i) {
        Rat l = cell_left(i), r = l + w;
        if (r <= a || l >= b) continue;
        Rat lo = std::max(a, l), hi = std::min(b, r);
        if (hi > lo) s += weights[i] * (hi - lo) / w;
    }
    return s;
}

bool RegularSetApprox::positive_mass(const Rat& a, const Rat& b) const {
    if (degenerate())
        return a <= frame.origin && frame.origin <= b && total_mass() > 0;
    Rat w = cell_width();
    for (size_t i = 0; i < cells.size(); ++i) {
        if (weights[i] == 0) continue;
        Rat l = cell_left(i), r = l + w;
        if (std::min(b, r) > std::max(a, l)) return true;
    }
    return false;
}

bool RegularSetApprox::intersects_closed(const Rat& a, const Rat& b) const {
    if (degenerate()) return a <= frame.origin && frame.origin <= b;
    Rat w = cell_width();
    for (size_t i = 0; i < cells.size(); ++i) {
        Rat l = cell_left(i);
        if (l <= b && l + w >= a) return true;
    }
    return false;
}

namespace {

// Scan workspace in integer units of (cell width)/(2*subdiv).  Window
// endpoints always land on this lattice, masses are plain double sums (no
// cancellation, relative error ~1e-15).
struct ScanGrid {
    std::vector<long long> starts; // cell start in u units, sorted
    std::vector<double> prefix;    // prefix[i] = total mass of cells < i
    long long cell_len = 2;        // cell length in u units
    double unit_abs = 0.0;         // absolute length of one u step
    double mass_mult = 1.0;        // lam_acc^delta

    double mass_below(long long u) const {
        auto it = std::upper_bound(starts.begin(), starts.end(), u);
        size_t i = it - starts.begin();
        double m = prefix[i];
        if (i > 0 && starts[i - 1] + cell_len > u) {
            double cellw = prefix[i] - prefix[i - 1];
            m -= cellw * double(starts[i - 1] + cell_len - u) / double(cell_len);
        }
        return m;
    }
    double mu(long long u0, long long u1) const { return mass_below(u1) - mass_below(u0); }
};

ScanGrid make_grid(const RegularSetApprox& set, double delta, int subdiv) {
    ScanGrid g;
    g.cell_len = 2LL * subdiv;
    g.starts.reserve(set.cells.size());
    g.prefix.reserve(set.cells.size() + 1);
    g.prefix.push_back(0.0);
    long long base_cell = set.cells.front();
    for (size_t i = 0; i < set.cells.size(); ++i) {
        g.starts.push_back(g.cell_len * (set.cells[i] - base_cell));
        g.prefix.push_back(g.prefix.back() + to_double(set.weights[i]));
    }
    g.unit_abs = to_double(set.cell_width()) / double(g.cell_len);
    g.mass_mult = std::pow(to_double(set.lam_acc), delta);
    return g;
}

// Window sizes in u units: ratio-2 progression from the smallest admissible
// grid size, plus the exact cell sizes L^{-j}.
std::vector<long long> size_family(const RegularSetApprox& set, const Rat& a0,
                                   const Rat& a1, int subdiv) {
    std::set<long long> sizes;
    Rat w = set.cell_width();
    Rat u = w / Rat(2 * subdiv);
    BigInt q = rat_ceil(a0 / w);
    if (q < 1) q = 1;
    Rat s = Rat(q) * w;
    while (s <= a1) {
        sizes.insert(to_ll(numerator(s / u)));
        s *= 2;
    }
    for (int j = 0; j <= set.depth; ++j) {
        Rat cs = set.frame.scale / Rat(ipow(set.base, j));
        if (cs >= a0 && cs <= a1) sizes.insert(to_ll(numerator(cs / u)));
    }
    return {sizes.begin(), sizes.end()};
}

} // namespace

namespace detail {

ScanRatios scan_ratios(const RegularSetApprox& set, double delta, const Rat& alpha0,
                       const Rat& alpha1, int subdiv) {
    ScanGrid grid = make_grid(set, delta, subdiv);
    std::vector<long long> sizes = size_family(set, alpha0, alpha1, subdiv);
    long long cl = grid.cell_len;

    double worst_up = 0.0, worst_lo = std::numeric_limits<double>::infinity();
    std::vector<long long> pos;
    for (long long s : sizes) {
        double s_abs = double(s) * grid.unit_abs;
        double sd = std::pow(s_abs, delta);
        // upper: grid-aligned windows; a sliding max is attained where a
        // window endpoint meets a cell edge, and those are grid positions
        pos.clear();
        for (long long st : grid.starts) {
            pos.push_back(st);
            pos.push_back(st + cl);
            pos.push_back(st - s);
            pos.push_back(st + cl - s);
        }
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
        for (long long x : pos) {
            double r = grid.mass_mult * grid.mu(x, x + s) / sd;
            if (r > worst_up) worst_up = r;
        }
        // lower: centered at cell midpoints (subdivided when subdiv > 1)
        long long h = s / 2;
        for (long long st : grid.starts) {
            for (int t = 0; t < subdiv; ++t) {
                long long c = st + 2 * t + 1;
                double r = grid.mass_mult * grid.mu(c - h, c + h) / sd;
                if (r < worst_lo) worst_lo = r;
            }
        }
    }
    if (!std::isfinite(worst_lo)) worst_lo = 0.0;
    return {worst_up, worst_lo};
}

} // namespace detail


RegularityCertificate verify_regularity(const RegularSetApprox& set, double delta,
                                        double c_r, const Rat& alpha0, const Rat& alpha1) {
    set.check_valid();
    if (set.cells.empty()) throw FupError("empty-set", "set has no cells");
    if (alpha0 > alpha1) throw FupError("precondition-violated", "alpha0 > alpha1");

    RegularityCertificate cert;
    cert.delta = delta;
    cert.c_r = c_r;
    cert.alpha0 = alpha0;
    cert.alpha1 = alpha1;

    double slack = std::pow(2.0, delta);
    constexpr double kTol = 1e-12;

    if (set.degenerate()) {
        // Point mass: every window containing the point sees the whole mass.
        double m = to_double(set.total_mass()) * std::pow(to_double(set.lam_acc), delta);
        double a0 = to_double(alpha0), a1 = to_double(alpha1);
        double up, lo;
        if (delta == 0.0) {
            up = lo = m;
        } else {
            if (alpha0 <= 0)
                throw FupError("resolution-too-coarse",
                               "alpha0 must be positive for a point mass at delta > 0");
            up = m / std::pow(a0, delta);
            lo = m / std::pow(a1, delta);
        }
        cert.worst_ratio_upper = up / slack;
        cert.worst_ratio_lower = lo;
        cert.verified = up <= slack * c_r * (1.0 + kTol) && lo * c_r >= 1.0 - kTol;
        return cert;
    }

    if (alpha0 < set.cell_width())
        throw FupError("resolution-too-coarse",
                       "alpha0 " + format_rat(alpha0) + " below cell width " +
                           format_rat(set.cell_width()));

    auto [worst_up, worst_lo] = detail::scan_ratios(set, delta, alpha0, alpha1, 1);

    cert.worst_ratio_upper = worst_up / slack;
    cert.worst_ratio_lower = worst_lo;
    cert.verified = worst_up <= slack * c_r * (1.0 + kTol) &&
                    worst_lo * c_r >= 1.0 - kTol;
    return cert;
}

RegularSetApprox affine_map(const RegularSetApprox& set, const Rat& lambda, const Rat& y) {
    if (lambda <= 0) throw FupError("precondition-violated", "lambda must be positive");
    RegularSetApprox out = set;
    out.frame.origin = y + lambda * set.frame.origin;
    out.frame.scale = lambda * set.frame.scale;
    out.lam_acc = set.lam_acc * lambda;
    if (set.cert) {
        RegularityCertificate c = *set.cert;
        c.alpha0 = lambda * c.alpha0;
        c.alpha1 = lambda * c.alpha1;
        out.cert = c;
    }
    return out;
}

RegularityCertificate raise_upper_scale(const RegularityCertificate& cert, double T) {
    if (T < 1.0) throw FupError("precondition-violated", "T must be >= 1");
    if (!cert.verified)
        throw FupError("precondition-violated", "input certificate not verified");
    RegularityCertificate out = cert;
    out.c_r = 2.0 * T * cert.c_r;
    out.alpha1 = cert.alpha1 * Rat(BigInt(std::llround(T * (1 << 20))), BigInt(1 << 20));
    return out;
}

RegularSetApprox neighborhood(const RegularSetApprox& set, const Rat& T) {
    if (T < 1) throw FupError("precondition-violated", "T must be >= 1");
    if (!set.cert) throw FupError("precondition-violated", "input has no certificate");
    const auto& c = *set.cert;
    if (c.alpha1 < 2 * c.alpha0)
        throw FupError("precondition-violated", "needs alpha1 >= 2*alpha0");

    Rat radius = T * c.alpha0;

    if (set.degenerate()) {
        // point fattened to an interval, uniform density
        RegularSetApprox out;
        out.base = set.base;
        out.depth = 0;
        out.frame.origin = set.frame.origin - radius;
        out.frame.scale = 2 * radius;
        out.cells = {0};
        out.weights = {set.total_mass()};
        out.lam_acc = set.lam_acc;
        RegularityCertificate nc = c;
        nc.c_r = 4.0 * to_double(T) * c.c_r;
        nc.alpha0 = 2 * c.alpha0;
        nc.verified = false;
        out.cert = nc;
        return out;
    }

    Rat w = set.cell_width();
    // Convolved density is piecewise linear; integrate it over each output
    // cell.  Work on the same grid, support rounded outward.
    long long rc = to_ll(rat_floor(radius / w)) + 1;

    long long lo = set.cells.front() - rc, hi = set.cells.back() + rc;
    std::vector<Rat> newmass(size_t(hi - lo + 1), Rat(0));

    // mu_new([a,b]) = (1/2R) * int_a^b mu([x-R, x+R]) dx.  For one source cell
    // [l, l+w] with weight wt, the contribution to [a,b] is
    // wt/(2Rw) * int_a^b overlap([x-R,x+R],[l,l+w]) dx; overlap is a trapezoid
    // in x, integrate exactly.
    auto trapez = [&](const Rat& a, const Rat& b, const Rat& l, const Rat& r,
                       const Rat& R) -> Rat {
        // int_a^b |[x-R,x+R] ∩ [l,r]| dx via min/max decomposition:
        // overlap(x) = min(x+R, r) - max(x-R, l), clipped at 0.
        // Integrate piecewise on breakpoints {r-R, l+R, l-R, r+R}.
        std::vector<Rat> bps = {a, b, r - R, l + R, l - R, r + R};
        std::sort(bps.begin(), bps.end());
        Rat total{0};
        for (size_t i = 0; i + 1 < bps.size(); ++i) {
            Rat x0 = std::max(a, bps[i]), x1 = std::min(b, bps[i + 1]);
            if (x1 <= x0) continue;
            Rat xm = (x0 + x1) / 2;
            Rat ov = std::min(xm + R, r) - std::max(xm - R, l);
            if (ov <= 0) continue;
            // linear on this piece, midpoint rule is exact
            total += ov * (x1 - x0);
        }
        return total;
    };

    for (size_t i = 0; i < set.cells.size(); ++i) {
        Rat l = set.cell_left(i), r = l + w;
        const Rat& wt = set.weights[i];
        long long jmin = set.cells[i] - rc, jmax = set.cells[i] + rc;
        for (long long j = jmin; j <= jmax; ++j) {
            Rat a = set.frame.origin + Rat(j) * w, b = a + w;
            Rat contrib = wt * trapez(a, b, l, r, radius) / (2 * radius * w);
            if (contrib > 0) newmass[size_t(j - lo)] += contrib;
        }
    }

    RegularSetApprox out;
    out.base = set.base;
    out.depth = set.depth;
    out.frame = set.frame;
    out.lam_acc = set.lam_acc;
    for (long long j = lo; j <= hi; ++j) {
        const Rat& m = newmass[size_t(j - lo)];
        if (m > 0) {
            out.cells.push_back(j);
            out.weights.push_back(m);
        }
    }
    RegularityCertificate nc = c;
    nc.c_r = 4.0 * to_double(T) * c.c_r;
    nc.alpha0 = 2 * c.alpha0;
    nc.verified = false;
    out.cert = nc;
    return out;
}

Rat SampledMap::operator()(const Rat& t) const {
    if (x.size() < 2 || t < x.front() || t > x.back())
        throw FupError("precondition-violated", "map evaluated outside sampled range");
    size_t lo = 0, hi = x.size() - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (x[mid] <= t)
            lo = mid;
        else
            hi = mid;
    }
    return y[lo] + (y[hi] - y[lo]) * (t - x[lo]) / (x[hi] - x[lo]);
}

std::pair<Rat, Rat> SampledMap::quotient_range() const {
    Rat qmin, qmax;
    bool first = true;
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        Rat q = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if (first || q < qmin) qmin = q;
        if (first || q > qmax) qmax = q;
        first = false;
    }
    return {qmin, qmax};
}

RegularSetApprox nonlinear_image(const RegularSetApprox& set, const SampledMap& f,
                                 double c_f) {
    if (c_f < 1.0) throw FupError("precondition-violated", "C_F must be >= 1");
    if (!set.cert) throw FupError("precondition-violated", "input has no certificate");
    const auto& c = *set.cert;
    if (to_double(c.alpha1) < c_f * c_f * to_double(c.alpha0))
        throw FupError("precondition-violated", "needs alpha1 >= C_F^2 * alpha0");

    auto [qmin, qmax] = f.quotient_range();
    if (to_double(qmin) < 1.0 / c_f - 1e-15 || to_double(qmax) > c_f + 1e-15)
        throw FupError("derivative-bound-violated",
                       "sampled derivative outside [1/C_F, C_F]");

    if (set.degenerate()) {
        RegularSetApprox out = set;
        out.frame.origin = f(set.frame.origin);
        RegularityCertificate nc = c;
        nc.c_r = c_f * c.c_r;
        nc.verified = false;
        out.cert = nc;
        return out;
    }

    // Output grid: same base/depth, frame scaled so the cell width matches the
    // input one (the image spans a comparable range by the derivative bounds).
    Rat w = set.cell_width();
    RegularSetApprox out;
    out.base = set.base;
    out.depth = set.depth;
    out.frame.origin = Rat(0);
    out.frame.scale = set.frame.scale;
    out.lam_acc = set.lam_acc;

    std::map<long long, Rat> acc;
    for (size_t i = 0; i < set.cells.size(); ++i) {
        Rat a = f(set.cell_left(i)), b = f(set.cell_right(i));
        if (b < a) std::swap(a, b);
        // outward rounding to the output grid
        BigInt ja = rat_floor(a / w);
        BigInt jb = rat_ceil(b / w);
        // spread the cell mass across covered output cells proportionally to
        // the image overlap (piecewise-linear pullback)
        Rat span = b - a;
        for (BigInt j = ja; j < jb; ++j) {
            Rat cl = Rat(j) * w, cr = cl + w;
            Rat ov = std::min(b, cr) - std::max(a, cl);
            if (ov <= 0) {
                if (span == 0 && cl <= a && a <= cr) ov = Rat(1); // point image
                else continue;
            }
            Rat frac = span == 0 ? Rat(1) : ov / span;
            acc[to_ll(j)] += set.weights[i] * frac;
        }
    }
    for (auto& [j, m] : acc) {
        out.cells.push_back(j);
        out.weights.push_back(m);
    }
    RegularityCertificate nc = c;
    nc.c_r = c_f * c.c_r;
    Rat cf_rat(BigInt(std::llround(c_f * (1 << 20))), BigInt(1 << 20));
    nc.alpha0 = c.alpha0 * cf_rat;
    nc.alpha1 = c.alpha1 / cf_rat;
    nc.verified = false;
    out.cert = nc;
    return out;
}

RegularSetApprox intersect_interval(const RegularSetApprox& set, const Rat& j_lo,
                                    const Rat& j_hi, const Rat& jp_lo, const Rat& jp_hi) {
    if (!set.cert) throw FupError("precondition-violated", "input has no certificate");
    const auto& c = *set.cert;
    if (jp_lo > j_lo || jp_hi < j_hi)
        throw FupError("precondition-violated", "J not contained in J'");
    if (j_lo + j_hi != jp_lo + jp_hi)
        throw FupError("precondition-violated", "J and J' not concentric");
    Rat margin = (jp_hi - jp_lo) - (j_hi - j_lo);
    if (margin < c.alpha0)
        throw FupError("precondition-violated", "|J'|-|J| below alpha0");
    if (!set.positive_mass(j_lo, j_hi))
        throw FupError("precondition-violated", "X ∩ J is empty");
    // X ∩ J' must lie inside J
    if (set.positive_mass(jp_lo, j_lo) || set.positive_mass(j_hi, jp_hi))
        throw FupError("precondition-violated", "X ∩ J' leaks outside J");

    RegularSetApprox out;
    out.base = set.base;
    out.depth = set.depth;
    out.frame = set.frame;
    out.lam_acc = set.lam_acc;
    if (set.degenerate()) {
        out = set;
    } else {
        Rat w = set.cell_width();
        for (size_t i = 0; i < set.cells.size(); ++i) {
            Rat l = set.cell_left(i), r = l + w;
            Rat ov = std::min(r, j_hi) - std::max(l, j_lo);
            if (ov <= 0) continue;
            out.cells.push_back(set.cells[i]);
            out.weights.push_back(set.weights[i] * ov / w);
        }
    }
    RegularityCertificate nc = c;
    nc.alpha1 = std::min(c.alpha1, margin);
    nc.verified = false;
    out.cert = nc;
    return out;
}

long long missing_subinterval(const RegularSetApprox& set, const Rat& i_lo,
                              const Rat& i_hi, long long l_part) {
    if (l_part < 1) throw FupError("precondition-violated", "L_part must be >= 1");
    Rat len = i_hi - i_lo;
    if (len <= 0) throw FupError("precondition-violated", "empty interval");
    bool pre_ok = true;
    if (set.cert) {
        const auto& c = *set.cert;
        if (c.delta < 1.0) {
            double thresh = std::pow(3.0 * c.c_r, 2.0 / (1.0 - c.delta));
            pre_ok = double(l_part) >= thresh && len / Rat(l_part) >= c.alpha0 &&
                     len <= c.alpha1;
        } else {
            pre_ok = false;
        }
    }
    for (long long l = 1; l <= l_part; ++l) {
        Rat a = i_lo + len * Rat(l - 1) / Rat(l_part);
        Rat b = i_lo + len * Rat(l) / Rat(l_part);
        if (!set.intersects_closed(a, b)) return l;
    }
    throw FupError("no-empty-cell",
                   pre_ok ? "no empty subinterval despite verified regularity; "
                            "certificate is unsound"
                          : "no empty subinterval; L_part below the admissible "
                            "threshold for this certificate");
}

std::vector<RegularSetApprox> split_regular(const RegularSetApprox& set, const Rat& rho,
                                            long long l_part) {
    if (!set.cert) throw FupError("precondition-violated", "input has no certificate");
    const auto& c = *set.cert;
    double lemma_part = c.delta < 1.0
                            ? std::ceil(std::pow(4.0 * c.c_r, 2.0 / (1.0 - c.delta)))
                            : std::numeric_limits<double>::infinity();
    if (l_part <= 0) {
        if (!std::isfinite(lemma_part) || lemma_part > 1e9)
            throw FupError("precondition-violated",
                           "default L_part overflows; pass one explicitly");
        l_part = static_cast<long long>(lemma_part);
    }
    if (rho > c.alpha1 || Rat(l_part) * c.alpha0 > rho)
        throw FupError("precondition-violated",
                       "needs L_part*alpha0 <= rho <= alpha1");

    Rat cellw = rho / Rat(l_part);
    // grid index range covering the support
    Rat smin = set.support_min(), smax = set.support_max();
    long long jmin = to_ll(rat_floor(smin / cellw)) - 1;
    long long jmax = to_ll(rat_floor(smax / cellw)) + 1;

    std::vector<std::pair<long long, long long>> runs; // [first, last] grid cells
    long long run_start = 0;
    bool in_run = false;
    for (long long j = jmin; j <= jmax + 1; ++j) {
        bool occ = j <= jmax &&
                   set.positive_mass(Rat(j) * cellw, Rat(j + 1) * cellw);
        if (occ && !in_run) {
            run_start = j;
            in_run = true;
        } else if (!occ && in_run) {
            runs.emplace_back(run_start, j - 1);
            in_run = false;
        }
    }

    std::vector<RegularSetApprox> pieces;
    double piece_cr = std::isfinite(lemma_part)
                          ? std::pow(4.0 * c.c_r, 2.0 / (1.0 - c.delta)) * c.c_r
                          : c.c_r;
    for (auto [a, b] : runs) {
        RegularSetApprox piece;
        piece.base = set.base;
        piece.depth = set.depth;
        piece.frame = set.frame;
        piece.lam_acc = set.lam_acc;
        Rat lo = Rat(a) * cellw, hi = Rat(b + 1) * cellw;
        if (set.degenerate()) {
            piece = set;
        } else {
            Rat w = set.cell_width();
            for (size_t i = 0; i < set.cells.size(); ++i) {
                Rat l = set.cell_left(i);
                if (std::min(l + w, hi) > std::max(l, lo)) {
                    piece.cells.push_back(set.cells[i]);
                    piece.weights.push_back(set.weights[i]);
                }
            }
        }
        RegularityCertificate nc = c;
        nc.c_r = piece_cr;
        nc.alpha1 = std::min(c.alpha1, rho);
        nc.verified = false;
        piece.cert = nc;
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

CoverResult cover_count(const RegularSetApprox& set, const Rat& i_lo, const Rat& i_hi,
                        const Rat& rho) {
    if (!set.cert) throw FupError("precondition-violated", "input has no certificate");
    const auto& c = *set.cert;
    Rat len = i_hi - i_lo;
    if (rho < c.alpha0 || rho > len || len > c.alpha1)
        throw FupError("precondition-violated", "needs alpha0 <= rho <= |I| <= alpha1");

    CoverResult res;
    long long jmin = to_ll(rat_floor(i_lo / rho)) - 1;
    long long jmax = to_ll(rat_floor(i_hi / rho)) + 1;
    for (long long j = jmin; j <= jmax; ++j) {
        Rat a = Rat(j) * rho, b = Rat(j + 1) * rho;
        Rat lo = std::max(a, i_lo), hi = std::min(b, i_hi);
        if (hi < lo) continue;
        if (set.positive_mass(lo, hi)) {
            res.intervals.emplace_back(a, b);
            ++res.count;
        }
    }
    res.bound = 12.0 * c.c_r * c.c_r * std::pow(to_double(len / rho), c.delta);
    return res;
}

LebesgueResult lebesgue_bound(const RegularSetApprox& set) {
    if (!set.cert) throw FupError("precondition-violated", "input has no certificate");
    const auto& c = *set.cert;
    if (c.alpha0 <= 0)
        throw FupError("precondition-violated", "needs alpha0 > 0");
    LebesgueResult r;
    if (!set.degenerate())
        r.measured = double(set.cells.size()) * to_double(set.cell_width());
    r.bound = 24.0 * c.c_r * c.c_r * std::pow(to_double(c.alpha1), c.delta) *
              std::pow(to_double(c.alpha0), 1.0 - c.delta);
    return r;
}

std::map<long long, std::vector<long long>> tree_children(const RegularSetApprox& set,
                                                          int n) {
    if (n < 0) throw FupError("precondition-violated", "level must be >= 0");
    long long L = set.base;
    // level-n cells have width scale*L^-n in frame coordinates; enumerate the
    // occupied ones through the cell list
    auto occupied = [&](int level) {
        std::set<long long> occ;
        if (set.degenerate()) {
            occ.insert(0); // point sits on a grid line: count both neighbors
            occ.insert(-1);
            return occ;
        }
        BigInt shift = ipow(L, set.depth - level);
        for (size_t i = 0; i < set.cells.size(); ++i) {
            if (set.weights[i] == 0) continue;
            BigInt j = BigInt(set.cells[i]) / shift;
            if (set.cells[i] < 0 && BigInt(set.cells[i]) % shift != 0) j -= 1;
            occ.insert(to_ll(j));
        }
        return occ;
    };
    if (!set.degenerate() && (n + 1 > set.depth))
        throw FupError("resolution-too-coarse", "level n+1 below set resolution");

    auto parents = occupied(n);
    auto children = occupied(n + 1);
    std::map<long long, std::vector<long long>> out;
    for (long long p : parents) out[p] = {};
    for (long long ch : children) {
        long long p = ch >= 0 ? ch / L : (ch - L + 1) / L;
        out[p].push_back(ch);
    }
    for (auto& [p, chs] : out) {
        if (chs.empty())
            throw FupError("child-count-violation",
                           "parent with no children at level " + std::to_string(n));
        if ((long long)chs.size() >= L)
            throw FupError("child-count-violation",
                           "parent with " + std::to_string(chs.size()) +
                               " children (= base), full interval behavior");
    }
    return out;
}

} // namespace fuplab
