#include "fuplab/io.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "fuplab/error.hpp"

namespace fuplab {

Json rat_to_json(const Rat& r) {
    if (denominator(r) == 1) {
        BigInt num = numerator(r);
        if (num >= std::numeric_limits<long long>::min() &&
            num <= std::numeric_limits<long long>::max())
            return to_ll(num);
    }
    return format_rat(r);
}

Rat rat_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_string()) return parse_rat(j.get<std::string>());
    throw ConfigError("rational", "expected integer or \"num/den\" string");
}

Json set_to_json(const RegularSetApprox& set) {
    Json j;
    j["base"] = set.base;
    j["depth"] = set.depth;
    j["frame"] = Json{{"origin", rat_to_json(set.frame.origin)},
                      {"scale", rat_to_json(set.frame.scale)}};
    j["cells"] = set.cells;
    Json w = Json::array();
    for (const Rat& r : set.weights) w.push_back(rat_to_json(r));
    j["weights"] = std::move(w);
    if (set.lam_acc != 1) j["mass_scale"] = rat_to_json(set.lam_acc);
    if (set.cert) j["certificate"] = cert_to_json(*set.cert);
    return j;
}

RegularSetApprox set_from_json(const nlohmann::json& j) {
    RegularSetApprox set;
    try {
        set.base = j.at("base").get<long long>();
        set.depth = j.at("depth").get<int>();
        set.frame.origin = rat_from_json(j.at("frame").at("origin"));
        set.frame.scale = rat_from_json(j.at("frame").at("scale"));
        set.cells = j.at("cells").get<std::vector<long long>>();
        for (const auto& w : j.at("weights")) set.weights.push_back(rat_from_json(w));
        if (j.contains("mass_scale")) set.lam_acc = rat_from_json(j.at("mass_scale"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("set", std::string("malformed set JSON: ") + e.what());
    }
    set.check_valid();
    return set;
}

Json cert_to_json(const RegularityCertificate& cert) {
    Json j;
    j["delta"] = cert.delta;
    j["c_r"] = cert.c_r;
    j["alpha0"] = rat_to_json(cert.alpha0);
    j["alpha1"] = rat_to_json(cert.alpha1);
    j["verified"] = cert.verified;
    j["worst_ratio_upper"] = cert.worst_ratio_upper;
    j["worst_ratio_lower"] = cert.worst_ratio_lower;
    return j;
}

Json cantor_to_json(const CantorSpec& spec) {
    return Json{{"base", spec.base}, {"alphabet", spec.alphabet}, {"depth", spec.depth}};
}

CantorSpec cantor_from_json(const nlohmann::json& j) {
    CantorSpec spec;
    try {
        spec.base = j.at("base").get<long long>();
        spec.alphabet = j.at("alphabet").get<std::vector<int>>();
        spec.depth = j.at("depth").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cantor", std::string("malformed Cantor spec: ") + e.what());
    }
    return spec;
}

Json schottky_to_json(const SchottkySpec& spec) {
    Json j;
    Json disks = Json::array();
    for (const auto& d : spec.disks)
        disks.push_back(Json{{"center", rat_to_json(d.center)},
                             {"radius", rat_to_json(d.radius)}});
    j["disks"] = std::move(disks);
    Json maps = Json::array();
    for (const auto& m : spec.maps)
        maps.push_back(Json::array({rat_to_json(m[0]), rat_to_json(m[1]),
                                    rat_to_json(m[2]), rat_to_json(m[3])}));
    j["maps"] = std::move(maps);
    Json pairing = Json::array();
    for (const auto& p : spec.pairing) pairing.push_back(Json::array({p.first, p.second}));
    j["pairing"] = std::move(pairing);
    j["depth"] = spec.depth;
    j["grid_base"] = spec.grid_base;
    j["grid_depth"] = spec.grid_depth;
    return j;
}

SchottkySpec schottky_from_json(const nlohmann::json& j) {
    SchottkySpec spec;
    try {
        for (const auto& d : j.at("disks"))
            spec.disks.push_back(
                {rat_from_json(d.at("center")), rat_from_json(d.at("radius"))});
        for (const auto& m : j.at("maps"))
            spec.maps.push_back({rat_from_json(m.at(0)), rat_from_json(m.at(1)),
                                 rat_from_json(m.at(2)), rat_from_json(m.at(3))});
        for (const auto& p : j.at("pairing"))
            spec.pairing.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        spec.depth = j.at("depth").get<int>();
        if (j.contains("grid_base")) spec.grid_base = j.at("grid_base").get<long long>();
        if (j.contains("grid_depth")) spec.grid_depth = j.at("grid_depth").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("schottky", std::string("malformed Schottky spec: ") + e.what());
    }
    return spec;
}

Json instance_to_json(const FupInstance& inst) {
    return Json{{"N", inst.n}, {"x", inst.x_idx}, {"y", inst.y_idx}};
}

FupInstance instance_from_json(const nlohmann::json& j) {
    FupInstance inst;
    try {
        inst.n = j.at("N").get<long long>();
        inst.x_idx = j.at("x").get<std::vector<long long>>();
        inst.y_idx = j.at("y").get<std::vector<long long>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("instance", std::string("malformed instance JSON: ") + e.what());
    }
    return inst;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("path", "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("path", path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw FupError("io-error", "cannot write " + path);
    out << j.dump(2) << "\n";
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw FupError("io-error", "cannot write " + path);
    for (size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

void write_manifest(const std::string& output_path, const Json& config, uint64_t seed,
                    double wall_seconds) {
    namespace fs = std::filesystem;
    fs::path out(output_path);
    fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
    Json j;
    j["tool"] = "fup-lab";
    j["version"] = kToolVersion;
    j["output"] = out.filename().string();
    j["config"] = config;
    j["seed"] = seed;
    j["wall_time_s"] = wall_seconds;
    auto now = std::chrono::system_clock::now();
    j["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    write_json_file((dir / "manifest.json").string(), j);
}

} // namespace fuplab
