#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dsom/types.hpp"

namespace dsom {

// Parse failure with the JSON pointer (or line info) of the offending field.
struct ParseError : std::runtime_error {
  ParseError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path(path) {}
  std::string path;
};

struct Finding {
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
  std::string to_string() const;
};

// Reads the documented JSON instance format. Fills defaults for absent
// optional fields and records every fill in Instance::provenance.
Instance parse_instance(const std::string& text);

// Full, explicit serialization; parse_instance(serialize_instance(x)) == x.
std::string serialize_instance(const Instance& inst);

bool instances_equal(const Instance& a, const Instance& b);

ValidationReport validate_instance(const Instance& inst);

// The built-in 5-bus case with one aggregator of each kind. `mode` selects
// the scenario set and the real-time trading flags.
std::pair<Instance, ScenarioSet> builtin_case(CaseMode mode);

// Keeps the first `nhours` hours of every series (test/benchmark helper).
Instance truncate_horizon(const Instance& inst, int nhours);

// Scenario set for an already-loaded instance per the case mode.
ScenarioSet build_scenarios(const Instance& inst, CaseMode mode);

// FNV-1a over the serialized document; run manifests use it to identify
// instances.
std::string instance_hash(const Instance& inst);

}  // namespace dsom
