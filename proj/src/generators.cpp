#include "fuplab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fuplab/error.hpp"
#include "fuplab/regular_sets.hpp"

namespace fuplab {

double CantorSpec::delta() const {
    return std::log(double(alphabet.size())) / std::log(double(base));
}

void CantorSpec::validate() const {
    if (base < 2) throw ConfigError("base", "must be >= 2");
    if (depth < 1) throw ConfigError("depth", "must be >= 1");
    if (alphabet.empty()) throw ConfigError("alphabet", "must be nonempty");
    std::set<int> seen;
    for (int a : alphabet) {
        if (a < 0 || a >= base)
            throw ConfigError("alphabet", "digit " + std::to_string(a) + " out of range");
        if (!seen.insert(a).second)
            throw ConfigError("alphabet", "duplicate digit " + std::to_string(a));
    }
    double cells = std::pow(double(alphabet.size()), depth);
    if (cells > 1e6) throw ConfigError("depth", "cell count exceeds 1e6");
}

namespace {

RegularSetApprox cantor_at_depth(const CantorSpec& spec, int depth) {
    RegularSetApprox set;
    set.base = spec.base;
    set.depth = depth;
    std::vector<int> digits(spec.alphabet);
    std::sort(digits.begin(), digits.end());
    std::vector<long long> cells = {0};
    for (int d = 0; d < depth; ++d) {
        std::vector<long long> next;
        next.reserve(cells.size() * digits.size());
        for (long long c : cells)
            for (int a : digits) next.push_back(c * spec.base + a);
        cells.swap(next);
    }
    std::sort(cells.begin(), cells.end());
    set.cells = std::move(cells);
    Rat w(1, ipow((long long)spec.alphabet.size(), depth));
    set.weights.assign(set.cells.size(), w);
    return set;
}

double quarter_ceil(double x) { return std::ceil(x * 4.0 - 1e-9) / 4.0; }

} // namespace

double cantor_reference_constant(const CantorSpec& spec) {
    CantorSpec ref = spec;
    ref.depth = 3;
    RegularSetApprox s3 = cantor_at_depth(ref, 3);
    double delta = spec.delta();
    auto raw = detail::scan_ratios(s3, delta, s3.cell_width(), Rat(1), 9);
    double need_up = raw.up_raw / std::pow(2.0, delta);
    double need_lo = raw.lo_raw > 0 ? 1.0 / raw.lo_raw : 1e9;
    return std::max(1.0, quarter_ceil(std::max(need_up, need_lo)));
}

RegularSetApprox gen_cantor(const CantorSpec& spec) {
    spec.validate();
    RegularSetApprox set = cantor_at_depth(spec, spec.depth);
    double cstar = cantor_reference_constant(spec);
    set.cert = verify_regularity(set, spec.delta(), cstar, set.cell_width(), Rat(1));
    return set;
}

void SchottkySpec::validate() const {
    if (disks.size() < 2 || disks.size() % 2 != 0)
        throw ConfigError("disks", "need an even number (>= 2) of disks");
    if (pairing.size() != maps.size() || maps.size() * 2 != disks.size())
        throw ConfigError("maps", "need one map per disk pair");
    if (depth < 0) throw ConfigError("depth", "must be >= 0");
    if (grid_base < 2 || grid_depth < 1)
        throw ConfigError("grid", "invalid grid parameters");
    for (const auto& d : disks)
        if (d.radius <= 0) throw ConfigError("disks", "radius must be positive");
    for (size_t i = 0; i < disks.size(); ++i)
        for (size_t j = i + 1; j < disks.size(); ++j) {
            Rat gap = abs(disks[i].center - disks[j].center);
            if (gap <= disks[i].radius + disks[j].radius)
                throw ConfigError("disks", "disks " + std::to_string(i) + "," +
                                               std::to_string(j) + " not disjoint");
        }
    // pairing check: endpoints of the domain circle map onto the endpoints of
    // the target circle, and the exterior point at infinity lands inside.
    for (size_t m = 0; m < maps.size(); ++m) {
        auto [ia, ib] = pairing[m];
        if (ia < 0 || ib < 0 || ia >= (int)disks.size() || ib >= (int)disks.size())
            throw ConfigError("pairing", "disk index out of range");
        const auto& M = maps[m];
        Rat det = M[0] * M[3] - M[1] * M[2];
        if (det <= 0) throw ConfigError("maps", "determinant must be positive");
        auto mob = [&](const Rat& z) { return (M[0] * z + M[1]) / (M[2] * z + M[3]); };
        const auto& A = disks[ia];
        const auto& B = disks[ib];
        Rat left = mob(A.center - A.radius), right = mob(A.center + A.radius);
        Rat lo = std::min(left, right), hi = std::max(left, right);
        if (lo != B.center - B.radius || hi != B.center + B.radius)
            throw ConfigError("maps", "map " + std::to_string(m) +
                                          " does not pair its disks");
        if (M[2] == 0)
            throw ConfigError("maps", "affine map cannot pair exterior to interior");
        Rat inf_img = M[0] / M[2];
        if (abs(inf_img - B.center) >= B.radius)
            throw ConfigError("maps", "map " + std::to_string(m) +
                                          " sends infinity outside the target disk");
    }
}

namespace {

struct Word {
    Rat lo, hi;
    int type; // base disk whose interior contains this interval
};

} // namespace

std::vector<std::pair<Rat, Rat>> schottky_intervals(const SchottkySpec& spec, int depth) {
    spec.validate();
    // directed maps: (matrix, domain disk to avoid, target disk)
    struct DirMap {
        std::array<Rat, 4> m;
        int avoid, target;
    };
    std::vector<DirMap> dir;
    for (size_t i = 0; i < spec.maps.size(); ++i) {
        const auto& M = spec.maps[i];
        auto [a, b] = spec.pairing[i];
        dir.push_back({M, a, b});
        dir.push_back({{M[3], -M[1], -M[2], M[0]}, b, a}); // inverse up to scale
    }

    std::vector<Word> level;
    for (size_t i = 0; i < spec.disks.size(); ++i)
        level.push_back({spec.disks[i].center - spec.disks[i].radius,
                         spec.disks[i].center + spec.disks[i].radius, (int)i});

    for (int d = 0; d < depth; ++d) {
        std::vector<Word> next;
        next.reserve(level.size() * (dir.size() - 1));
        for (const auto& w : level) {
            for (const auto& g : dir) {
                if (w.type == g.avoid) continue;
                if (g.m[2] != 0) {
                    Rat pole = -g.m[3] / g.m[2];
                    if (pole >= w.lo && pole <= w.hi)
                        throw FupError("disk-overlap",
                                       "map pole inside an iterated interval");
                }
                auto mob = [&](const Rat& z) {
                    return (g.m[0] * z + g.m[1]) / (g.m[2] * z + g.m[3]);
                };
                Rat a = mob(w.lo), b = mob(w.hi);
                if (b < a) std::swap(a, b);
                next.push_back({a, b, g.target});
            }
        }
        level.swap(next);
    }
    std::vector<std::pair<Rat, Rat>> out;
    out.reserve(level.size());
    for (const auto& w : level) out.emplace_back(w.lo, w.hi);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Box counts over the set's own grid ladder rho_m = scale * L^{-m}: level-m
// ancestor cells carrying positive mass.  Off-lattice (e.g. dyadic) grids add
// a touch-inflation factor that drifts across octaves and biases the slope,
// so the native ladder is the one that is exact set data.
std::vector<std::pair<double, double>> box_counts(const RegularSetApprox& set) {
    std::vector<std::pair<double, double>> pts; // (log 1/rho, log count)
    if (set.degenerate()) {
        for (int j = 0; j < 6; ++j) pts.emplace_back(j * std::log(2.0), 0.0);
        return pts;
    }
    const double log_l = std::log(static_cast<double>(set.base));
    const double log_scale = std::log(std::abs(to_double(set.frame.scale)));
    for (int m = 0; m <= set.depth; ++m) {
        BigInt div = ipow(set.base, set.depth - m);
        std::set<BigInt> ancestors;
        for (size_t i = 0; i < set.cells.size(); ++i) {
            if (set.weights[i] == 0) continue;
            BigInt c(set.cells[i]);
            BigInt a = c / div;
            if (c < 0 && c % div != 0) a -= 1;
            ancestors.insert(a);
        }
        pts.emplace_back(m * log_l - log_scale,
                         std::log(static_cast<double>(ancestors.size())));
    }
    return pts;
}

} // namespace

DimensionEstimate estimate_dimension(const RegularSetApprox& set) {
    auto pts = box_counts(set);
    if (pts.size() < 3)
        throw FupError("insufficient-scales",
                       "need at least 3 dyadic scales between alpha0 and alpha1");
    double n = double(pts.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    DimensionEstimate est;
    est.dim = denom == 0 ? 0.0 : (n * sxy - sx * sy) / denom;
    double icept = (sy - est.dim * sx) / n;
    double ss = 0;
    for (auto [x, y] : pts) {
        double r = y - (est.dim * x + icept);
        ss += r * r;
    }
    est.residual = std::sqrt(ss / n);
    return est;
}

RegularSetApprox gen_schottky_cover(const SchottkySpec& spec) {
    auto intervals = schottky_intervals(spec, spec.depth);

    // snap outward to the grid over the hull of the base disks
    Rat lo = spec.disks.front().center - spec.disks.front().radius;
    Rat hi = spec.disks.front().center + spec.disks.front().radius;
    for (const auto& d : spec.disks) {
        lo = std::min(lo, d.center - d.radius);
        hi = std::max(hi, d.center + d.radius);
    }
    RegularSetApprox set;
    set.base = spec.grid_base;
    set.depth = spec.grid_depth;
    set.frame.origin = lo;
    set.frame.scale = hi - lo;
    Rat w = set.cell_width();

    std::vector<std::pair<long long, long long>> spans; // cell ranges per word
    for (const auto& [a, b] : intervals) {
        long long ja = to_ll(rat_floor((a - lo) / w));
        long long jb = to_ll(rat_ceil((b - lo) / w));
        if (jb <= ja) jb = ja + 1;
        if (Rat(jb - ja) * w < b - a + 0)
            jb = ja + to_ll(rat_ceil((b - a) / w)) + 1;
        spans.emplace_back(ja, jb);
    }
    std::set<long long> cellset;
    for (auto [ja, jb] : spans)
        for (long long j = ja; j < jb; ++j) cellset.insert(j);
    if (cellset.empty()) throw FupError("empty-set", "no cells above resolution");

    // uniform first pass for the dimension estimate
    set.cells.assign(cellset.begin(), cellset.end());
    set.weights.assign(set.cells.size(), Rat(1, (long long)set.cells.size()));
    double dhat = estimate_dimension(set).dim;

    // reweight: word interval i carries mass ~ radius^dhat, spread uniformly
    std::map<long long, Rat> acc;
    Rat total(0);
    for (size_t i = 0; i < intervals.size(); ++i) {
        double rad = to_double(intervals[i].second - intervals[i].first) / 2.0;
        double m = std::pow(std::max(rad, 1e-300), dhat);
        Rat mr(BigInt(std::llround(m * (1LL << 40))), BigInt(1LL << 40));
        auto [ja, jb] = spans[i];
        Rat per = mr / Rat(jb - ja);
        for (long long j = ja; j < jb; ++j) acc[j] += per;
        total += mr;
    }
    set.cells.clear();
    set.weights.clear();
    for (auto& [j, m] : acc) {
        set.cells.push_back(j);
        set.weights.push_back(m / total);
    }

    // one-time constant measured on the result itself
    auto raw = detail::scan_ratios(set, dhat, w, set.frame.scale, 9);
    double need = std::max(raw.up_raw / std::pow(2.0, dhat),
                           raw.lo_raw > 0 ? 1.0 / raw.lo_raw : 1e9);
    double cstar = std::max(1.0, std::ceil(need * 4.0 - 1e-9) / 4.0);
    set.cert = verify_regularity(set, dhat, cstar, w, set.frame.scale);
    return set;
}

} // namespace fuplab
