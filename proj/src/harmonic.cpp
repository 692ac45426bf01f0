#include "fuplab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fuplab/error.hpp"
#include "fuplab/parallel.hpp"
#include "fuplab/quad.hpp"
#include "fuplab/rng.hpp"

namespace fuplab {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kAbsorbEps = 1e-6;
constexpr double kStepCap = 1e-2;
constexpr long long kChunk = 4096;
constexpr long long kMaxSteps = 10'000'000;

// piece indices used by the walkers
enum Piece : int { kSlitTop = 0, kSlitBottom = 1, kLineTop = 2, kLineBottom = 3 };

struct ExitRecord {
    double x = 0.0;
    int piece = 0;
};

double dist_to_segment(double x, double y, double lo, double hi) {
    double cx = std::clamp(x, lo, hi);
    return std::hypot(x - cx, y);
}

// Walk-on-spheres in C \ [lo, hi].  The largest disk around the current point
// has radius exactly the distance to the segment.  A far-field teleport keeps
// excursions bounded: from distance ~1e7 the exit law on the slit is the
// endpoint-singular (arcsine) law up to relative error far below MC noise.
ExitRecord walk_slit_plane(Rng& rng, double t, double lo, double hi) {
    double x = t, y = 0.0, y_prev = 0.0;
    const double ell = hi - lo;
    const double mid = 0.5 * (lo + hi);
    const double far = 1e7 * (ell + std::abs(t - mid) + 1.0);
    for (;;) {
        double d = dist_to_segment(x, y, lo, hi);
        if (d < kAbsorbEps)
            return {std::clamp(x, lo, hi), y_prev >= 0.0 ? kSlitTop : kSlitBottom};
        if (std::hypot(x - mid, y) > far) {
            double s = std::sin(0.5 * kPi * rng.uniform());
            double z = lo + ell * s * s;
            return {z, rng.uniform() < 0.5 ? kSlitTop : kSlitBottom};
        }
        double th = 2.0 * kPi * rng.uniform();
        y_prev = y;
        x += d * std::cos(th);
        y += d * std::sin(th);
    }
}

// Gaussian stepper for the (possibly slit) strip.  Steps adapt to the
// boundary distance; a step whose segment crosses a line or the slit exits at
// the interpolated crossing, and near-boundary points are absorbed outright.
ExitRecord walk_strip(Rng& rng, double t, double r, bool slit, double lo, double hi) {
    double x = t, y = 0.0;
    for (long long step = 0; step < kMaxSteps; ++step) {
        double d = r - std::abs(y);
        if (slit) {
            double ds = dist_to_segment(x, y, lo, hi);
            if (ds < kAbsorbEps)
                return {std::clamp(x, lo, hi), y >= 0.0 ? kSlitTop : kSlitBottom};
            d = std::min(d, ds);
        }
        if (r - std::abs(y) < kAbsorbEps) return {x, y > 0.0 ? kLineTop : kLineBottom};
        double sig = std::min(d / 4.0, kStepCap);
        double dx = sig * rng.gaussian();
        double dy = sig * rng.gaussian();
        double ny = y + dy;
        double lam_line = 2.0, lam_slit = 2.0;
        if (std::abs(ny) >= r) {
            double target = ny > 0.0 ? r : -r;
            lam_line = (target - y) / dy;
        }
        if (slit && y != 0.0 && (y > 0.0) != (ny > 0.0)) {
            double lam0 = -y / dy;
            double cross = x + lam0 * dx;
            if (cross >= lo && cross <= hi) lam_slit = lam0;
        }
        if (lam_slit <= 1.0 && lam_slit <= lam_line)
            return {x + lam_slit * dx, y > 0.0 ? kSlitTop : kSlitBottom};
        if (lam_line <= 1.0) return {x + lam_line * dx, ny > 0.0 ? kLineTop : kLineBottom};
        x += dx;
        y += dy;
    }
    return {x, y >= 0.0 ? kLineTop : kLineBottom}; // step guard; unreachable in practice
}

ExitRecord walk(Rng& rng, const SlitDomainSpec& spec, DomainKind kind) {
    switch (kind) {
        case DomainKind::slit_plane:
            return walk_slit_plane(rng, spec.t, spec.slit_lo, spec.slit_hi);
        case DomainKind::strip:
            return walk_strip(rng, spec.t, spec.r, false, 0.0, 0.0);
        case DomainKind::slit_strip:
            return walk_strip(rng, spec.t, spec.r, true, spec.slit_lo, spec.slit_hi);
    }
    return {};
}

size_t bin_of(const std::vector<double>& edges, double x) {
    size_t n = edges.size() - 1;
    for (size_t i = 0; i + 1 < n; ++i)
        if (x < edges[i + 1]) return i;
    return n - 1;
}

const PieceHistogram* find_piece(const ExitHistogram& h, const std::string& name) {
    for (const auto& p : h.pieces)
        if (p.name == name) return &p;
    throw ConfigError("piece", "no boundary piece named '" + name + "'");
}

} // namespace

double SlitDomainSpec::dist_to_slit() const {
    return std::abs(t - std::clamp(t, slit_lo, slit_hi));
}

void SlitDomainSpec::validate() const {
    if (!(r > 0.0) || r >= 1.0) throw ConfigError("r", "strip half-height must lie in (0, 1)");
    double len = slit_length();
    if (!(len > 0.0) || len > 1.0)
        throw ConfigError("slit", "slit length must lie in (0, 1]");
    if (t >= slit_lo && t <= slit_hi)
        throw FupError("point-on-slit", "observation point lies on the closed slit");
}

double slit_plane_density(double t, double ell, double z) {
    if (!(ell > 0.0)) throw ConfigError("ell", "slit length must be positive");
    if (t >= 0.0 && t <= ell)
        throw FupError("point-on-slit", "observation point lies on the closed slit");
    double d = std::min(std::abs(t), std::abs(t - ell));
    if (d < ell / 10.0)
        throw ConfigError("t", "observation point closer than |I0|/10 to the slit");
    if (!(z > 0.0) || !(z < ell))
        throw ConfigError("z", "evaluation point must lie strictly inside the slit");
    return std::sqrt(t * (t - ell) / (z * (ell - z))) / (2.0 * kPi * std::abs(t - z));
}

double slit_plane_cdf(double t, double ell, double z) {
    if (!(ell > 0.0)) throw ConfigError("ell", "slit length must be positive");
    if (t >= 0.0 && t <= ell)
        throw FupError("point-on-slit", "observation point lies on the closed slit");
    if (z <= 0.0) return 0.0;
    if (z >= ell) return 0.5;
    return std::atan(std::sqrt((t - ell) / t) * std::sqrt(z / (ell - z))) / kPi;
}

double strip_density(double t, double r, double x) {
    if (!(r > 0.0)) throw ConfigError("r", "strip half-height must be positive");
    return 1.0 / (4.0 * r * std::cosh(kPi * (x - t) / (2.0 * r)));
}

double strip_cdf(double t, double r, double x) {
    if (!(r > 0.0)) throw ConfigError("r", "strip half-height must be positive");
    return 0.25 + std::atan(std::tanh(kPi * (x - t) / (4.0 * r))) / kPi;
}

double ExitHistogram::mass(const std::string& piece) const {
    return double(find_piece(*this, piece)->total) / double(n_paths);
}

double ExitHistogram::sigma(const std::string& piece) const {
    double p = mass(piece);
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / double(n_paths));
}

ExitHistogram brownian_exit(const SlitDomainSpec& spec, DomainKind kind, long long n_paths,
                            uint64_t seed, int bins_per_piece) {
    spec.validate();
    if (n_paths < 1000) throw ConfigError("n_paths", "need at least 1000 paths");
    if (bins_per_piece < 4) throw ConfigError("bins", "need at least 4 bins per piece");

    ExitHistogram hist;
    hist.n_paths = n_paths;
    const double inf = std::numeric_limits<double>::infinity();

    auto slit_edges = [&] {
        std::vector<double> e(bins_per_piece + 1);
        for (int i = 0; i <= bins_per_piece; ++i)
            e[i] = spec.slit_lo + spec.slit_length() * i / bins_per_piece;
        return e;
    };
    auto line_edges = [&] {
        // interior range t +- 4r plus two tail bins; the sech tail keeps the
        // expected tail count well above the chi-square small-bin regime
        std::vector<double> e;
        e.push_back(-inf);
        int interior = bins_per_piece - 2;
        for (int i = 0; i <= interior; ++i)
            e.push_back(spec.t - 4.0 * spec.r + 8.0 * spec.r * i / interior);
        e.push_back(inf);
        return e;
    };

    if (kind != DomainKind::strip) {
        hist.pieces.push_back({"I+", slit_edges(), {}, 0});
        hist.pieces.push_back({"I-", slit_edges(), {}, 0});
    }
    if (kind != DomainKind::slit_plane) {
        hist.pieces.push_back({"top", line_edges(), {}, 0});
        hist.pieces.push_back({"bottom", line_edges(), {}, 0});
    }
    for (auto& p : hist.pieces) p.counts.assign(p.edges.size() - 1, 0);

    // map walker piece index -> histogram slot (absent pieces collect nothing)
    int slot[4] = {-1, -1, -1, -1};
    for (size_t i = 0; i < hist.pieces.size(); ++i) {
        const std::string& nm = hist.pieces[i].name;
        slot[nm == "I+" ? 0 : nm == "I-" ? 1 : nm == "top" ? 2 : 3] = int(i);
    }

    long long n_chunks = (n_paths + kChunk - 1) / kChunk;
    std::vector<std::vector<std::vector<long long>>> partial(
        (size_t)n_chunks,
        std::vector<std::vector<long long>>(hist.pieces.size()));
    for (auto& chunk : partial)
        for (size_t i = 0; i < hist.pieces.size(); ++i)
            chunk[i].assign(hist.pieces[i].counts.size(), 0);

    parallel_chunks(n_paths, kChunk, [&](long long c, long long b0, long long b1) {
        Rng rng(substream(seed, "bm-exit", (uint64_t)c));
        for (long long p = b0; p < b1; ++p) {
            ExitRecord rec = walk(rng, spec, kind);
            int s = slot[rec.piece];
            if (s < 0) continue; // cannot happen: walkers only exit on present pieces
            auto& counts = partial[(size_t)c][(size_t)s];
            counts[bin_of(hist.pieces[(size_t)s].edges, rec.x)] += 1;
        }
    });

    for (const auto& chunk : partial)
        for (size_t i = 0; i < hist.pieces.size(); ++i)
            for (size_t b = 0; b < chunk[i].size(); ++b) hist.pieces[i].counts[b] += chunk[i][b];
    for (auto& p : hist.pieces) {
        p.total = 0;
        for (long long c : p.counts) p.total += c;
    }
    return hist;
}

LowerBoundResult slit_strip_lower_bound(const SlitDomainSpec& spec, long long n_paths,
                                        uint64_t seed) {
    spec.validate();
    if (spec.dist_to_slit() > 1.0)
        throw ConfigError("t", "lower bound needs the observation point within distance 1");
    ExitHistogram hist = brownian_exit(spec, DomainKind::slit_strip, n_paths, seed);
    LowerBoundResult res;
    res.mc_plus = hist.mass("I+");
    res.mc_minus = hist.mass("I-");
    res.sigma_plus = hist.sigma("I+");
    res.sigma_minus = hist.sigma("I-");
    res.bound = spec.slit_length() / 8.0 * std::exp(-2.0 / spec.r);
    return res;
}

void EntireTestFn::validate() const {
    if (a == 0.0 && !roots.empty())
        throw ConfigError("test-function",
                          "polynomial factors without the exponential factor are unbounded "
                          "on the strip");
    if (!std::isfinite(a)) throw ConfigError("test-function", "non-finite frequency");
}

double EntireTestFn::log_abs(std::complex<double> z) const {
    double v = -a * z.imag(); // log |exp(iaz)|
    for (const auto& root : roots) {
        double m = std::abs(z - root);
        v += std::log(std::max(m, 1e-300));
    }
    return v;
}

SubharmonicCheck subharmonic_bound_check(const SlitDomainSpec& spec, const EntireTestFn& f,
                                         long long n_paths, uint64_t seed) {
    spec.validate();
    f.validate();
    if (n_paths < 1000) throw ConfigError("n_paths", "need at least 1000 paths");

    long long n_chunks = (n_paths + kChunk - 1) / kChunk;
    std::vector<double> sums((size_t)n_chunks, 0.0), sqs((size_t)n_chunks, 0.0);
    parallel_chunks(n_paths, kChunk, [&](long long c, long long b0, long long b1) {
        Rng rng(substream(seed, "subharmonic", (uint64_t)c));
        double s = 0.0, s2 = 0.0;
        for (long long p = b0; p < b1; ++p) {
            ExitRecord rec = walk(rng, spec, DomainKind::slit_strip);
            double im = rec.piece == kLineTop    ? spec.r
                        : rec.piece == kLineBottom ? -spec.r
                                                   : 0.0;
            double v = f.log_abs({rec.x, im});
            s += v;
            s2 += v * v;
        }
        sums[(size_t)c] = s;
        sqs[(size_t)c] = s2;
    });
    double sum = 0.0, sq = 0.0;
    for (long long c = 0; c < n_chunks; ++c) {
        sum += sums[(size_t)c];
        sq += sqs[(size_t)c];
    }
    SubharmonicCheck out;
    out.lhs = f.log_abs({spec.t, 0.0});
    out.rhs = sum / double(n_paths);
    double var = std::max(sq / double(n_paths) - out.rhs * out.rhs, 0.0);
    out.sigma = std::sqrt(var / double(n_paths));
    return out;
}

ChiSquare chi_square(const std::vector<long long>& observed, const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw ConfigError("chi-square", "observed/expected length mismatch");
    ChiSquare cs;
    for (size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0))
            throw ConfigError("chi-square", "expected counts must be positive");
        double d = double(observed[i]) - expected[i];
        cs.stat += d * d / expected[i];
    }
    cs.dof = int(observed.size()) - 1;
    cs.p_value = chi2_sf(cs.stat, double(cs.dof));
    return cs;
}

} // namespace fuplab
