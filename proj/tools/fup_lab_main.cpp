// fup-lab: one binary exposing every experiment in the library.
//
// Exit codes: 0 all assertions passed, 1 a computed quantity violated its
// bound (or a run-time failure), 2 malformed configuration.  Every --out
// artifact gets a manifest.json beside it echoing the full config; identical
// config and seed give byte-identical artifacts (manifest wall time aside).

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "fuplab/error.hpp"
#include "fuplab/fup_core.hpp"
#include "fuplab/fup_operators.hpp"
#include "fuplab/generators.hpp"
#include "fuplab/harmonic.hpp"
#include "fuplab/io.hpp"
#include "fuplab/multiplier.hpp"
#include "fuplab/regular_sets.hpp"
#include "fuplab/weight.hpp"

using namespace fuplab;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// "a/b", "a", or anything std::stod accepts (then as the exact double value).
Rat parse_rat_flex(const std::string& s) {
    if (s.find('/') != std::string::npos || s.find_first_of(".eE") == std::string::npos)
        return parse_rat(s);
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("number", "cannot parse '" + s + "'");
    return rat_from_double(v);
}

long long parse_count(const std::string& s) {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size() || !(v >= 0) || v > 9e18)
        throw ConfigError("count", "cannot parse '" + s + "'");
    return static_cast<long long>(v);
}

std::vector<int> parse_alphabet(const std::string& s) {
    std::vector<int> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t comma = s.find(',', start);
        std::string tok = s.substr(start, comma == std::string::npos ? comma : comma - start);
        try {
            size_t pos = 0;
            out.push_back(std::stoi(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("alphabet", "bad digit '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// "cantor:base:d0,d1,..:depth"
CantorSpec parse_cantor_colon(const std::string& s) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (;;) {
        size_t colon = s.find(':', start);
        parts.push_back(s.substr(start, colon == std::string::npos ? colon : colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 4 || parts[0] != "cantor")
        throw ConfigError("set", "expected cantor:base:alphabet:depth, got '" + s + "'");
    CantorSpec spec;
    try {
        spec.base = std::stoll(parts[1]);
        spec.depth = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("set", "bad base/depth in '" + s + "'");
    }
    spec.alphabet = parse_alphabet(parts[2]);
    spec.validate();
    return spec;
}

// A set argument is either a JSON file or an inline cantor spec.  Frequency-
// side sets are dilated so their cells have unit width.
RegularSetApprox load_set(const std::string& arg, bool dilate) {
    if (arg.rfind("cantor:", 0) == 0) {
        CantorSpec spec = parse_cantor_colon(arg);
        RegularSetApprox set = gen_cantor(spec);
        if (dilate) set = affine_map(set, Rat(ipow(spec.base, spec.depth)), Rat(0));
        return set;
    }
    return set_from_json(read_json_file(arg));
}

void emit(const Json& j, const std::string& out_path, const Json& config, uint64_t seed,
          double wall) {
    if (!out_path.empty()) {
        write_json_file(out_path, j);
        write_manifest(out_path, config, seed, wall);
    }
    std::cout << j.dump(2) << "\n";
}

AmplitudeSpec amplitude_from_json(const nlohmann::json& j) {
    std::string type = j.value("type", "plateau");
    if (type == "plateau")
        return plateau_amplitude(j.value("x0", 0.0), j.value("x1", 1.0), j.value("xi0", 0.0),
                                 j.value("xi1", 1.0), j.value("value", 1.0),
                                 j.value("n", 17));
    if (type == "bump")
        return bump_amplitude(j.value("xc", 0.5), j.value("xhw", 0.5), j.value("xic", 0.5),
                              j.value("xihw", 0.5), j.value("plateau", 0.5),
                              j.value("value", 1.0), j.value("n", 129));
    throw ConfigError("amplitude", "unknown type '" + type + "'");
}

PhaseSpec phase_from_json(const nlohmann::json& j) {
    PhaseSpec spec;
    std::string kind = j.value("kind", "linear");
    if (kind == "linear")
        spec.kind = PhaseSpec::Kind::linear;
    else if (kind == "hyperbolic_circle")
        spec.kind = PhaseSpec::Kind::hyperbolic_circle;
    else if (kind == "polynomial")
        spec.kind = PhaseSpec::Kind::polynomial;
    else
        throw ConfigError("phase", "unknown kind '" + kind + "'");
    if (j.contains("poly"))
        spec.poly = j.at("poly").get<std::vector<std::vector<double>>>();
    if (j.contains("amplitude")) spec.b = amplitude_from_json(j.at("amplitude"));
    return spec;
}

ChiSpec chi_from_json(const nlohmann::json& j) {
    ChiSpec chi;
    chi.x_center = j.value("x_center", 0.0);
    chi.x_halfwidth = j.value("x_halfwidth", 1.0);
    chi.y_center = j.value("y_center", 0.0);
    chi.y_halfwidth = j.value("y_halfwidth", 1.0);
    chi.plateau = j.value("plateau", 0.5);
    chi.amplitude = j.value("amplitude", 1.0);
    return chi;
}

Mollifier kernel_from_name(const std::string& name) {
    if (name == "fejer2") return Mollifier::fejer2;
    if (name == "fejer4") return Mollifier::fejer4;
    throw ConfigError("kernel", "unknown kernel '" + name + "'");
}

Json norm_to_json(const NormResult& r) {
    return Json{{"value", r.value},
                {"method", r.method},
                {"iterations", r.iterations},
                {"residual", r.residual}};
}

// ---- subcommand bodies -------------------------------------------------------

int run_gen_cantor(long long base, const std::string& alphabet, int depth,
                   const std::string& out) {
    double t0 = now_s();
    CantorSpec spec;
    spec.base = base;
    spec.alphabet = parse_alphabet(alphabet);
    spec.depth = depth;
    spec.validate();
    RegularSetApprox set = gen_cantor(spec);
    Json config{{"subcommand", "gen cantor"}, {"spec", cantor_to_json(spec)}, {"out", out}};
    Json summary{{"kind", "cantor"},
                 {"cells", set.cells.size()},
                 {"delta", spec.delta()},
                 {"certificate", cert_to_json(*set.cert)}};
    write_json_file(out, set_to_json(set));
    write_manifest(out, config, 0, now_s() - t0);
    std::cout << summary.dump(2) << "\n";
    return set.cert->verified ? 0 : 1;
}

int run_gen_schottky(const std::string& spec_path, int depth, const std::string& out) {
    double t0 = now_s();
    SchottkySpec spec = schottky_from_json(read_json_file(spec_path));
    if (depth >= 0) spec.depth = depth;
    spec.validate();
    RegularSetApprox set = gen_schottky_cover(spec);
    Json config{{"subcommand", "gen schottky"},
                {"spec", schottky_to_json(spec)},
                {"out", out}};
    Json summary{{"kind", "schottky"},
                 {"cells", set.cells.size()},
                 {"certificate", cert_to_json(*set.cert)}};
    write_json_file(out, set_to_json(set));
    write_manifest(out, config, 0, now_s() - t0);
    std::cout << summary.dump(2) << "\n";
    return set.cert->verified ? 0 : 1;
}

int run_verify(const std::string& set_arg, double delta, double c_r,
               const std::string& alpha0_s, const std::string& alpha1_s,
               const std::string& out) {
    double t0 = now_s();
    if (!(delta >= 0.0) || delta > 1.0)
        throw ConfigError("delta", "needs 0 <= delta <= 1");
    if (!(c_r >= 1.0) || !std::isfinite(c_r)) throw ConfigError("cr", "needs cr >= 1");
    RegularSetApprox set = load_set(set_arg, false);
    Rat alpha0 = alpha0_s.empty()
                     ? (set.cert ? set.cert->alpha0 : set.cell_width())
                     : parse_rat_flex(alpha0_s);
    Rat alpha1 = alpha1_s.empty()
                     ? (set.cert ? set.cert->alpha1 : set.support_max() - set.support_min())
                     : parse_rat_flex(alpha1_s);
    RegularityCertificate cert = verify_regularity(set, delta, c_r, alpha0, alpha1);
    Json config{{"subcommand", "verify"}, {"set", set_arg},     {"delta", delta},
                {"cr", c_r},              {"alpha0", format_rat(alpha0)},
                {"alpha1", format_rat(alpha1)}, {"out", out}};
    Json j = cert_to_json(cert);
    emit(j, out, config, 0, now_s() - t0);
    return cert.verified ? 0 : 1;
}

int run_fup_norm(const std::string& instance_path, double delta, double c_r,
                 const std::string& out) {
    double t0 = now_s();
    FupInstance inst = instance_from_json(read_json_file(instance_path));
    NormResult norm = fourier_restricted_norm(inst);
    Json j{{"n", inst.n},
           {"x_size", inst.x_idx.size()},
           {"y_size", inst.y_idx.size()},
           {"norm", norm_to_json(norm)}};
    bool ok = true;
    double cs = std::min(
        1.0, std::sqrt(double(inst.x_idx.size()) * double(inst.y_idx.size()) / double(inst.n)));
    j["bounds"] = Json{{"cauchy_schwarz", cs}};
    if (delta >= 0.0) {
        VolumeBaseline vb = volume_baseline(inst, delta, c_r); // throws if violated
        j["bounds"]["paper"] = vb.paper;
        j["bounds"]["paper_applicable"] = vb.paper_applicable;
    }
    ok = norm.value <= cs + 1e-9;
    j["within_bounds"] = ok;
    Json config{{"subcommand", "fup-norm"},
                {"instance", instance_path},
                {"delta", delta},
                {"cr", c_r},
                {"out", out}};
    emit(j, out, config, 0, now_s() - t0);
    return ok ? 0 : 1;
}

int run_fup_scan(const std::string& x_spec, const std::string& y_spec, int k_min, int k_max,
                 const std::string& out) {
    double t0 = now_s();
    CantorSpec sx = parse_cantor_colon("cantor:" + x_spec + ":1");
    CantorSpec sy = parse_cantor_colon("cantor:" + (y_spec.empty() ? x_spec : y_spec) + ":1");
    ScanResult scan = scan_and_fit(sx, sy, k_min, k_max);
    std::vector<std::vector<std::string>> rows;
    for (const ScanRow& r : scan.rows)
        rows.push_back({std::to_string(r.k), std::to_string(r.n), fmt_num(r.norm),
                        fmt_num(r.log_ratio)});
    write_csv(out, {"k", "N", "norm", "log_ratio"}, rows);
    Json config{{"subcommand", "fup-scan"}, {"cantor", x_spec},
                {"y_cantor", y_spec},       {"kmin", k_min},
                {"kmax", k_max},            {"out", out}};
    write_manifest(out, config, 0, now_s() - t0);
    Json j{{"rows", scan.rows.size()},
           {"beta", scan.beta},
           {"beta_full", scan.beta_full},
           {"stderr_beta", scan.stderr_beta}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_phase_norm(const std::string& x_arg, const std::string& y_arg, const std::string& h_s,
                   const std::string& phase_path, double rho, int ppc,
                   const std::string& out) {
    double t0 = now_s();
    RegularSetApprox x = load_set(x_arg, false);
    RegularSetApprox y = load_set(y_arg, false);
    Rat h = parse_rat_flex(h_s);
    PhaseSpec spec = phase_from_json(read_json_file(phase_path));
    NormResult norm = phase_restricted_norm(x, y, h, spec, rho, ppc);
    Json j{{"h", format_rat(h)}, {"rho", rho}, {"points_per_h", ppc},
           {"norm", norm_to_json(norm)}};
    Json config{{"subcommand", "phase-norm"}, {"x", x_arg},   {"y", y_arg},
                {"h", h_s},                   {"phase", phase_path},
                {"rho", rho},                 {"ppc", ppc},   {"out", out}};
    emit(j, out, config, 0, now_s() - t0);
    return 0;
}

int run_hyperbolic_norm(const std::string& set_arg, const std::string& h_s,
                        const std::string& chi_path, double rho, int ppc,
                        const std::string& out) {
    double t0 = now_s();
    RegularSetApprox set = load_set(set_arg, false);
    Rat h = parse_rat_flex(h_s);
    ChiSpec chi = chi_path.empty() ? ChiSpec{} : chi_from_json(read_json_file(chi_path));
    NormResult norm = hyperbolic_norm(set, h, chi, rho, ppc);
    Json j{{"h", format_rat(h)}, {"rho", rho}, {"points_per_h", ppc},
           {"norm", norm_to_json(norm)}};
    Json config{{"subcommand", "hyperbolic-norm"}, {"set", set_arg}, {"h", h_s},
                {"chi", chi_path},                 {"rho", rho},     {"ppc", ppc},
                {"out", out}};
    emit(j, out, config, 0, now_s() - t0);
    return 0;
}

Json piece_to_json(const ExitHistogram& hist, const std::string& name) {
    return Json{{"mass", hist.mass(name)}, {"sigma", hist.sigma(name)}};
}

int run_harmonic(const std::string& domain, double r, const std::string& slit_s, double t,
                 const std::string& paths_s, uint64_t seed, int bins, double fn_a,
                 const std::string& out) {
    double t0 = now_s();
    SlitDomainSpec spec;
    spec.r = r;
    spec.t = t;
    {
        size_t comma = slit_s.find(',');
        if (comma == std::string::npos)
            throw ConfigError("slit", "expected 'lo,hi', got '" + slit_s + "'");
        spec.slit_lo = std::stod(slit_s.substr(0, comma));
        spec.slit_hi = std::stod(slit_s.substr(comma + 1));
    }
    long long paths = parse_count(paths_s);
    Json config{{"subcommand", "harmonic check"},
                {"domain", domain},
                {"r", r},
                {"slit", slit_s},
                {"t", t},
                {"paths", paths},
                {"seed", seed},
                {"bins", bins},
                {"out", out}};
    Json j{{"domain", domain}, {"paths", paths}, {"seed", seed}};
    bool pass = false;

    if (domain == "strip" || domain == "slit-plane") {
        spec.validate();
        DomainKind kind = domain == "strip" ? DomainKind::strip : DomainKind::slit_plane;
        ExitHistogram hist = brownian_exit(spec, kind, paths, seed, bins);
        std::vector<long long> observed;
        std::vector<double> expected;
        for (const PieceHistogram& piece : hist.pieces) {
            for (size_t b = 0; b + 1 < piece.edges.size(); ++b) {
                auto cdf = [&](double z) {
                    if (kind == DomainKind::strip) return strip_cdf(spec.t, spec.r, z);
                    // face coordinates relative to the slit's left end
                    return slit_plane_cdf(spec.t - spec.slit_lo, spec.slit_length(),
                                          z - piece.edges.front());
                };
                observed.push_back(piece.counts[b]);
                expected.push_back(double(paths) * (cdf(piece.edges[b + 1]) - cdf(piece.edges[b])));
            }
            j["estimates"][piece.name] = piece_to_json(hist, piece.name);
        }
        ChiSquare chi = chi_square(observed, expected);
        pass = chi.p_value >= 0.01;
        j["estimates"]["chi_square"] =
            Json{{"stat", chi.stat}, {"dof", chi.dof}, {"p_value", chi.p_value}};
        j["paper_bounds"] = Json{{"p_threshold", 0.01}};
        j["verdicts"] = Json{{"chi_square_pass", pass}};
    } else if (domain == "slit-strip") {
        spec.validate();
        LowerBoundResult lb = slit_strip_lower_bound(spec, paths, seed);
        bool plus_ok = lb.mc_plus >= lb.bound - 3.0 * lb.sigma_plus;
        bool minus_ok = lb.mc_minus >= lb.bound - 3.0 * lb.sigma_minus;
        pass = plus_ok && minus_ok;
        j["estimates"] = Json{{"I+", lb.mc_plus}, {"I-", lb.mc_minus}};
        j["sigmas"] = Json{{"I+", lb.sigma_plus}, {"I-", lb.sigma_minus}};
        j["paper_bounds"] = Json{{"face_mass_floor", lb.bound}};
        j["verdicts"] = Json{{"I+", plus_ok}, {"I-", minus_ok}};
    } else if (domain == "subharmonic") {
        spec.validate();
        EntireTestFn f;
        f.a = fn_a;
        f.roots = {{0.3, 0.2}, {-0.4, 0.35}};
        SubharmonicCheck check = subharmonic_bound_check(spec, f, paths, seed);
        pass = check.holds();
        j["estimates"] = Json{{"lhs", check.lhs}, {"rhs", check.rhs}};
        j["sigmas"] = Json{{"rhs", check.sigma}};
        j["paper_bounds"] = Json{{"slack_sigmas", 3.0}};
        j["verdicts"] = Json{{"subharmonic", pass}};
    } else {
        throw ConfigError("domain", "unknown domain '" + domain + "'");
    }
    emit(j, out, config, seed, now_s() - t0);
    return pass ? 0 : 1;
}

int run_weight(const std::string& y_arg, double delta, double c_r, const std::string& out) {
    double t0 = now_s();
    RegularSetApprox y = load_set(y_arg, true);
    AdaptedWeight w = build_weight(y, delta, c_r);
    double c0 = c0_reference(delta, c_r);
    AdmissibilityVerdict adm = admissibility_check(w.grid, c0);
    bool pass = w.wt1_ok && w.wt2_ok && adm.admissible && w.sup_dlog <= 1e5;
    Json j{{"sup_dlog", w.sup_dlog},
           {"wt1_ok", w.wt1_ok},
           {"wt2_ok", w.wt2_ok},
           {"wt2_margin", w.wt2_margin},
           {"wt2_points", w.wt2_points},
           {"covers", w.covers.size()},
           {"covers_per_annulus", w.covers_per_annulus},
           {"admissibility",
            Json{{"log_integral", adm.log_integral},
                 {"slope_sup", adm.slope_sup},
                 {"admissible", adm.admissible}}},
           {"paper_bounds", Json{{"sup_dlog_max", 1e5}, {"c0_reference", c0}}},
           {"within_bounds", pass},
           {"grid", Json{{"xi_min", w.grid.xi_min},
                         {"spacing", w.grid.spacing},
                         {"size", w.grid.size()},
                         {"tail_coeff", w.grid.tail_coeff},
                         {"tail_power", w.grid.tail_power},
                         {"log_values", w.grid.log_values},
                         {"dlog", w.grid.dlog}}}};
    Json config{{"subcommand", "weight"}, {"y", y_arg}, {"delta", delta}, {"cr", c_r},
                {"out", out}};
    emit(j, out, config, 0, now_s() - t0);
    return pass ? 0 : 1;
}

int run_uc_constant(const std::string& y_arg, double c1, double offset,
                    const std::string& out) {
    double t0 = now_s();
    RegularSetApprox y = load_set(y_arg, true);
    UcResult uc = unique_continuation_constant(y, c1, offset);
    Json j{{"c3", uc.c3},
           {"c1", c1},
           {"period", uc.period},
           {"freq_count", uc.freq_count},
           {"gram_count", uc.gram_count},
           {"paper_bounds", Json{{"c3_positive", true}}}};
    Json config{{"subcommand", "uc-constant"}, {"y", y_arg}, {"c1", c1},
                {"offset", offset},            {"out", out}};
    emit(j, out, config, 0, now_s() - t0);
    return uc.c3 > 0.0 ? 0 : 1;
}

int run_iterate(const std::string& x_arg, const std::string& y_arg, long long l, int t,
                int m_max, const std::string& kernel, long long m_grid,
                const std::string& out) {
    double t0 = now_s();
    RegularSetApprox x = load_set(x_arg, false);
    RegularSetApprox y = load_set(y_arg, true);
    IterateResult it = iterate_fup(x, y, l, t, m_max, kernel_from_name(kernel), m_grid, 2.0);
    std::vector<std::vector<std::string>> rows;
    for (size_t m = 0; m < it.x_ratios.size(); ++m)
        rows.push_back({std::to_string(m + 1), fmt_num(it.x_ratios[m]),
                        m == 0 ? std::string() : fmt_num(it.full_ratios[m - 1])});
    write_csv(out, {"m", "x_ratio", "full_ratio"}, rows);
    Json config{{"subcommand", "iterate"}, {"x", x_arg},        {"y", y_arg},
                {"L", l},                  {"T", t},            {"m", m_max},
                {"kernel", kernel},        {"grid", m_grid},    {"out", out}};
    write_manifest(out, config, 0, now_s() - t0);
    Json j{{"q", it.q},
           {"beta_empirical", it.beta_empirical},
           {"basis_size", it.basis_size},
           {"c_phi_over_l", it.c_phi_over_l},
           {"pre_lhs", it.pre_lhs},
           {"pre_rhs", it.pre_rhs},
           {"tau_fixture", it.tau_fixture}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fup-lab: desk-scale fractal uncertainty experiments"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker count (FUP_LAB_THREADS overrides)");

    // gen
    CLI::App* gen = app.add_subcommand("gen", "generate a regular set");
    gen->require_subcommand(1);
    CLI::App* genc = gen->add_subcommand("cantor", "base-L alphabet Cantor set");
    long long gc_base = 3;
    std::string gc_alpha = "0,2", gc_out = "set.json";
    int gc_depth = 4;
    genc->add_option("--base", gc_base);
    genc->add_option("--alphabet", gc_alpha);
    genc->add_option("--depth", gc_depth);
    genc->add_option("--out", gc_out);
    CLI::App* gens = gen->add_subcommand("schottky", "Schottky limit-set cover");
    std::string gs_spec, gs_out = "set.json";
    int gs_depth = -1;
    gens->add_option("--spec", gs_spec)->required();
    gens->add_option("--depth", gs_depth);
    gens->add_option("--out", gs_out);

    // verify
    CLI::App* verify = app.add_subcommand("verify", "regularity certificate for a set");
    std::string v_set, v_a0, v_a1, v_out;
    double v_delta = 0.0, v_cr = 0.0;
    verify->add_option("--set", v_set)->required();
    verify->add_option("--delta", v_delta)->required();
    verify->add_option("--cr", v_cr)->required();
    verify->add_option("--alpha0", v_a0);
    verify->add_option("--alpha1", v_a1);
    verify->add_option("--out", v_out);

    // fup-norm
    CLI::App* fnorm = app.add_subcommand("fup-norm", "restricted transform norm");
    std::string fn_inst, fn_out;
    double fn_delta = -1.0, fn_cr = 1.0;
    fnorm->add_option("--instance", fn_inst)->required();
    fnorm->add_option("--delta", fn_delta);
    fnorm->add_option("--cr", fn_cr);
    fnorm->add_option("--out", fn_out);

    // fup-scan
    CLI::App* fscan = app.add_subcommand("fup-scan", "norm decay over a depth range");
    std::string fs_cantor, fs_y, fs_out = "scan.csv";
    int fs_kmin = 2, fs_kmax = 6;
    fscan->add_option("--cantor", fs_cantor)->required();
    fscan->add_option("--y-cantor", fs_y);
    fscan->add_option("--kmin", fs_kmin);
    fscan->add_option("--kmax", fs_kmax);
    fscan->add_option("--out", fs_out);

    // phase-norm
    CLI::App* pnorm = app.add_subcommand("phase-norm", "oscillatory-kernel norm");
    std::string pn_x, pn_y, pn_h, pn_phase, pn_out;
    double pn_rho = 1.0;
    int pn_ppc = 10;
    pnorm->set_help_flag("--help", "print help"); // frees -h for the scale flag
    pnorm->add_option("--x", pn_x)->required();
    pnorm->add_option("--y", pn_y)->required();
    pnorm->add_option("--h", pn_h)->required();
    pnorm->add_option("--phase", pn_phase)->required();
    pnorm->add_option("--rho", pn_rho);
    pnorm->add_option("--ppc", pn_ppc);
    pnorm->add_option("--out", pn_out);

    // hyperbolic-norm
    CLI::App* hnorm = app.add_subcommand("hyperbolic-norm", "circle-pair kernel norm");
    std::string hn_set, hn_h, hn_chi, hn_out;
    double hn_rho = 1.0;
    int hn_ppc = 10;
    hnorm->set_help_flag("--help", "print help");
    hnorm->add_option("--set", hn_set)->required();
    hnorm->add_option("--h", hn_h)->required();
    hnorm->add_option("--chi", hn_chi);
    hnorm->add_option("--rho", hn_rho);
    hnorm->add_option("--ppc", hn_ppc);
    hnorm->add_option("--out", hn_out);

    // harmonic
    CLI::App* harm = app.add_subcommand("harmonic", "harmonic-measure checks");
    harm->require_subcommand(1);
    CLI::App* hcheck = harm->add_subcommand("check", "MC against closed forms and bounds");
    std::string hc_domain = "strip", hc_slit = "-1,0", hc_paths = "1e5", hc_out;
    double hc_r = 0.5, hc_t = 0.5, hc_fn_a = 1.0;
    uint64_t hc_seed = 7;
    int hc_bins = 20;
    hcheck->add_option("--domain", hc_domain);
    hcheck->add_option("--r", hc_r);
    hcheck->add_option("--slit", hc_slit);
    hcheck->add_option("--t", hc_t);
    hcheck->add_option("--paths", hc_paths);
    hcheck->add_option("--seed", hc_seed);
    hcheck->add_option("--bins", hc_bins);
    hcheck->add_option("--fn-a", hc_fn_a);
    hcheck->add_option("--out", hc_out);

    // weight
    CLI::App* weight = app.add_subcommand("weight", "frequency weight adapted to a set");
    std::string w_y, w_out = "weight.json";
    double w_delta = 0.0, w_cr = 0.0;
    weight->add_option("--y", w_y)->required();
    weight->add_option("--delta", w_delta)->required();
    weight->add_option("--cr", w_cr)->required();
    weight->add_option("--out", w_out);

    // uc-constant
    CLI::App* uc = app.add_subcommand("uc-constant", "unique-continuation constant");
    std::string uc_y, uc_out;
    double uc_c1 = 0.25, uc_off = -1.0;
    uc->add_option("--y", uc_y)->required();
    uc->add_option("--c1", uc_c1);
    uc->add_option("--offset", uc_off);
    uc->add_option("--out", uc_out);

    // iterate
    CLI::App* iter = app.add_subcommand("iterate", "iterated-cutoff contraction run");
    std::string it_x, it_y, it_kernel = "fejer4", it_out = "steps.csv";
    long long it_l = 3, it_grid = 1LL << 22;
    int it_t = 5, it_m = 2;
    iter->add_option("--x", it_x)->required();
    iter->add_option("--y", it_y)->required();
    iter->add_option("--L", it_l);
    iter->add_option("--T", it_t);
    iter->add_option("--m", it_m);
    iter->add_option("--kernel", it_kernel);
    iter->add_option("--grid", it_grid);
    iter->add_option("--out", it_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (threads >= 1) setenv("FUP_LAB_THREADS", std::to_string(threads).c_str(), 0);

    try {
        if (genc->parsed()) return run_gen_cantor(gc_base, gc_alpha, gc_depth, gc_out);
        if (gens->parsed()) return run_gen_schottky(gs_spec, gs_depth, gs_out);
        if (verify->parsed()) return run_verify(v_set, v_delta, v_cr, v_a0, v_a1, v_out);
        if (fnorm->parsed()) return run_fup_norm(fn_inst, fn_delta, fn_cr, fn_out);
        if (fscan->parsed()) return run_fup_scan(fs_cantor, fs_y, fs_kmin, fs_kmax, fs_out);
        if (pnorm->parsed())
            return run_phase_norm(pn_x, pn_y, pn_h, pn_phase, pn_rho, pn_ppc, pn_out);
        if (hnorm->parsed())
            return run_hyperbolic_norm(hn_set, hn_h, hn_chi, hn_rho, hn_ppc, hn_out);
        if (hcheck->parsed())
            return run_harmonic(hc_domain, hc_r, hc_slit, hc_t, hc_paths, hc_seed, hc_bins,
                                hc_fn_a, hc_out);
        if (weight->parsed()) return run_weight(w_y, w_delta, w_cr, w_out);
        if (uc->parsed()) return run_uc_constant(uc_y, uc_c1, uc_off, uc_out);
        if (iter->parsed())
            return run_iterate(it_x, it_y, it_l, it_t, it_m, it_kernel, it_grid, it_out);
        std::cerr << "config error: no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const FupError& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error [json]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }
}
