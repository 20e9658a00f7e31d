#include "disent/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace disent::io {

namespace {

const json* locate_instance(const json& j) {
  if (j.contains("atoms")) return &j;
  if (j.contains("result") && j["result"].is_object() &&
      j["result"].contains("instance"))
    return &j["result"]["instance"];
  if (j.contains("instance") && j["instance"].is_object() &&
      j["instance"].contains("atoms"))
    return &j["instance"];
  return nullptr;
}

double number_field(const json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_number())
    fail("malformed_json", std::string("missing or non-numeric field '") + name + "'");
  return j[name].get<double>();
}

}  // namespace

LoadedInstance parse_instance(const json& root) {
  const json* found = locate_instance(root);
  if (!found) fail("malformed_json", "no instance object found (expected 'atoms')");
  const json& j = *found;

  if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty())
    fail("malformed_json", "'atoms' must be a non-empty array");
  std::vector<std::string> ids;
  std::vector<double> mass;
  for (const auto& a : j["atoms"]) {
    if (!a.is_object() || !a.contains("id") || !a["id"].is_string())
      fail("malformed_json", "each atom needs a string 'id'");
    ids.push_back(a["id"].get<std::string>());
    mass.push_back(number_field(a, "mu"));
  }

  if (!j.contains("theta") || !j["theta"].is_array())
    fail("malformed_json", "'theta' must be an array of numbers");
  std::vector<double> theta;
  for (const auto& t : j["theta"]) {
    if (!t.is_number()) fail("malformed_json", "'theta' entries must be numbers");
    theta.push_back(t.get<double>());
  }

  const double q = number_field(j, "q");

  if (!j.contains("families") || !j["families"].is_array())
    fail("malformed_json", "'families' must be an array");
  std::vector<WeightFamily> families;
  for (const auto& fam : j["families"]) {
    if (!fam.is_array() || fam.empty())
      fail("malformed_json", "each family must be a non-empty array of weights");
    std::vector<std::string> keys;
    std::vector<std::vector<double>> values;
    for (const auto& w : fam) {
      if (!w.is_object() || !w.contains("key") || !w["key"].is_string() ||
          !w.contains("values") || !w["values"].is_array())
        fail("malformed_json", "each weight needs 'key' and 'values'");
      keys.push_back(w["key"].get<std::string>());
      std::vector<double> row;
      for (const auto& v : w["values"]) {
        if (!v.is_number())
          fail("malformed_json", "weight 'values' entries must be numbers");
        row.push_back(v.get<double>());
      }
      if (row.size() != ids.size())
        fail("dimension_mismatch", "weight vector length differs from atom count");
      values.push_back(std::move(row));
    }
    families.emplace_back(std::move(keys), std::move(values));
  }

  LoadedInstance out{
      ProblemInstance(MeasureSpace(std::move(ids), std::move(mass)),
                      std::move(families), GeometricWeights(std::move(theta)),
                      Exponent(q)),
      std::nullopt};

  if (j.contains("phi")) {
    const json& p = j["phi"];
    if (!p.is_object() || !p.contains("values") || !p["values"].is_array())
      fail("malformed_json", "'phi' must carry 'constant' and 'values'");
    Factorisation fact;
    fact.constant = number_field(p, "constant");
    for (const auto& row : p["values"]) {
      std::vector<double> v;
      for (const auto& x : row) {
        if (!x.is_number()) fail("malformed_json", "'phi' values must be numbers");
        v.push_back(x.get<double>());
      }
      if (v.size() != out.instance.space.size())
        fail("dimension_mismatch", "phi vector length differs from atom count");
      fact.phi.push_back(std::move(v));
    }
    if (fact.phi.size() != out.instance.slot_count())
      fail("dimension_mismatch", "phi slot count differs from instance");
    out.phi = std::move(fact);
  }
  return out;
}

LoadedInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot open input file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail("malformed_json", e.what());
  }
  return parse_instance(j);
}

json instance_to_json(const ProblemInstance& instance) {
  json j;
  j["atoms"] = json::array();
  for (std::size_t i = 0; i < instance.space.size(); ++i)
    j["atoms"].push_back(
        {{"id", instance.space.atoms[i]}, {"mu", instance.space.mass[i]}});
  j["theta"] = instance.weights.theta;
  j["q"] = instance.exponent.q;
  j["families"] = json::array();
  for (const auto& fam : instance.families) {
    json f = json::array();
    for (std::size_t k = 0; k < fam.key_count(); ++k)
      f.push_back({{"key", fam.keys[k]}, {"values", fam.values[k]}});
    j["families"].push_back(std::move(f));
  }
  return j;
}

std::string instance_digest(const ProblemInstance& instance) {
  const std::string s = instance_to_json(instance).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace disent::io
