#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ontime/instance.hpp"

namespace ontime {

using Json = nlohmann::ordered_json;

inline constexpr const char* kInstanceSchema = "ontime.instance/1";

// git-describe style, fixed at configure time.
std::string version_string();

std::uint64_t fnv1a(std::string_view bytes);
// 16 hex digits of the FNV-1a hash of the compact dump.
std::string config_hash(const Json& config);

// Infinite values travel as the string "+inf".
Json number_to_json(double v);
double number_from_json(const Json& j);

Json to_json(const PlanningHorizon& h);
Json to_json(const FleetConfig& f);
Json to_json(const PeriodRealization& r);
Json to_json(const Instance& inst);

PlanningHorizon horizon_from_json(const Json& j);
FleetConfig fleet_from_json(const Json& j);
PeriodRealization realization_from_json(const Json& j);
Instance instance_from_json(const Json& j);

Instance read_instance(const std::string& path);
void write_instance(const std::string& path, const Instance& inst);

Json read_json(const std::string& path);
// Pretty-printed with a trailing newline.
void write_json(const std::string& path, const Json& j);

// SHA-256 of a file, lowercase hex.
std::string sha256_file(const std::string& path);
// Looks the file up in a "<digest>  <name>" list next to it; throws when the
// list is missing, has no entry, or the digest differs.
void verify_checksum(const std::string& path);

}  // namespace ontime
