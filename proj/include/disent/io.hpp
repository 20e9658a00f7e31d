#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "disent/core.hpp"

namespace disent::io {

using json = nlohmann::ordered_json;

struct LoadedInstance {
  ProblemInstance instance;
  std::optional<Factorisation> phi;  // optional user-supplied factorisation
};

// Accepts either a bare instance object ({"atoms": ..., "theta": ..., "q":
// ..., "families": ...}) or a run report wrapping one under result.instance,
// so emitted reports re-ingest directly.
LoadedInstance parse_instance(const json& j);
LoadedInstance load_instance_file(const std::string& path);

// Canonical emission: fixed field order, shortest round-trip numerals.
json instance_to_json(const ProblemInstance& instance);

// FNV-1a over the canonical serialization.
std::string instance_digest(const ProblemInstance& instance);

}  // namespace disent::io
