#pragma once
#include <json.hpp>

#include <string>
#include <vector>

#include "fuplab/fup_core.hpp"
#include "fuplab/generators.hpp"
#include "fuplab/regular_set.hpp"

namespace fuplab {

inline constexpr const char* kToolVersion = "0.3.0";

using Json = nlohmann::ordered_json;

// Rationals travel as integers when exact or "num/den" strings otherwise.
Json rat_to_json(const Rat& r);
Rat rat_from_json(const nlohmann::json& j);

Json set_to_json(const RegularSetApprox& set);
RegularSetApprox set_from_json(const nlohmann::json& j);

Json cert_to_json(const RegularityCertificate& cert);

Json cantor_to_json(const CantorSpec& spec);
CantorSpec cantor_from_json(const nlohmann::json& j);

Json schottky_to_json(const SchottkySpec& spec);
SchottkySpec schottky_from_json(const nlohmann::json& j);

Json instance_to_json(const FupInstance& inst);
FupInstance instance_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Fixed 12-significant-digit formatting so reruns are byte-identical.
std::string fmt_num(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// manifest.json next to `output_path`: config echo, tool version, seed, wall
// time, timestamp.  Everything except wall_time_s/timestamp is deterministic.
void write_manifest(const std::string& output_path, const Json& config, uint64_t seed,
                    double wall_seconds);

} // namespace fuplab
