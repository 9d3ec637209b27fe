#include "ontime/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#ifndef ONTIME_VERSION
#define ONTIME_VERSION "0.1.0"
#endif

namespace ontime {

std::string version_string() { return ONTIME_VERSION; }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

Json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::invalid_argument("expected a number or \"+inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

Json to_json(const PlanningHorizon& h) {
  return {{"num_periods", h.num_periods},
          {"period_length", h.period_length},
          {"start_time", h.start_time},
          {"prep_time", h.prep_time}};
}

Json to_json(const FleetConfig& f) {
  return {{"fleet_size", f.fleet_size},
          {"capacity", f.capacity},
          {"max_duration", number_to_json(f.max_duration)},
          {"service_time", f.service_time},
          {"speed_kmh", f.speed_kmh}};
}

Json to_json(const PeriodRealization& r) {
  Json orders = Json::array();
  for (const auto& o : r.orders) {
    Json e = {{"x", o.position.x}, {"y", o.position.y}, {"quantity", o.quantity}};
    if (o.location >= 0) e["location"] = o.location;
    orders.push_back(std::move(e));
  }
  return {{"period", r.period}, {"orders", std::move(orders)}};
}

Json to_json(const Instance& inst) {
  Json locations = Json::array();
  for (const auto& p : inst.locations) locations.push_back({p.x, p.y});
  Json realizations = Json::array();
  for (const auto& r : inst.realizations) realizations.push_back(to_json(r));
  return {{"schema", kInstanceSchema},
          {"horizon", to_json(inst.horizon)},
          {"fleet", to_json(inst.fleet)},
          {"depot", {inst.depot.x, inst.depot.y}},
          {"locations", std::move(locations)},
          {"realizations", std::move(realizations)}};
}

PlanningHorizon horizon_from_json(const Json& j) {
  PlanningHorizon h;
  h.num_periods = j.value("num_periods", h.num_periods);
  h.period_length = j.value("period_length", h.period_length);
  h.start_time = j.value("start_time", h.start_time);
  h.prep_time = j.value("prep_time", h.prep_time);
  return h;
}

FleetConfig fleet_from_json(const Json& j) {
  FleetConfig f;
  f.fleet_size = j.value("fleet_size", f.fleet_size);
  f.capacity = j.value("capacity", f.capacity);
  if (j.contains("max_duration")) f.max_duration = number_from_json(j.at("max_duration"));
  f.service_time = j.value("service_time", f.service_time);
  f.speed_kmh = j.value("speed_kmh", f.speed_kmh);
  return f;
}

PeriodRealization realization_from_json(const Json& j) {
  PeriodRealization r;
  r.period = j.at("period").get<int>();
  for (const auto& e : j.at("orders")) {
    Order o;
    o.position = {e.at("x").get<double>(), e.at("y").get<double>()};
    o.quantity = e.at("quantity").get<int>();
    o.location = e.value("location", -1);
    r.orders.push_back(o);
  }
  return r;
}

Instance instance_from_json(const Json& j) {
  if (j.value("schema", std::string()) != kInstanceSchema)
    throw std::invalid_argument(std::string("instance: schema must be \"") + kInstanceSchema + "\"");
  Instance inst;
  inst.horizon = horizon_from_json(j.at("horizon"));
  inst.fleet = fleet_from_json(j.at("fleet"));
  if (j.contains("depot")) inst.depot = {j["depot"].at(0).get<double>(), j["depot"].at(1).get<double>()};
  for (const auto& p : j.value("locations", Json::array()))
    inst.locations.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  for (const auto& r : j.value("realizations", Json::array()))
    inst.realizations.push_back(realization_from_json(r));
  inst.validate();
  return inst;
}

Instance read_instance(const std::string& path) { return instance_from_json(read_json(path)); }

void write_instance(const std::string& path, const Instance& inst) { write_json(path, to_json(inst)); }

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx.get(), buf, static_cast<size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

void verify_checksum(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path file(path);
  const fs::path list = file.parent_path() / "SHA256SUMS";
  std::ifstream in(list);
  if (!in) throw std::runtime_error("no SHA256SUMS next to " + path);
  std::string digest, name;
  while (in >> digest >> name) {
    if (!name.empty() && name[0] == '*') name.erase(0, 1);
    if (name != file.filename().string()) continue;
    if (digest != sha256_file(path)) throw std::runtime_error("checksum mismatch for " + path);
    return;
  }
  throw std::runtime_error(file.filename().string() + " is not listed in " + list.string());
}

}  // namespace ontime
