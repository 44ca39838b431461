#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "datagen.hpp"
#include "discount.hpp"

namespace ndcglab {

// Everything a run needs, resolved from one JSON config file. Output
// directory and worker count are command-line knobs, never part of the
// config, so manifests stay byte-identical across machines and thread
// counts.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;

  Discount discount = Discount::log_inverse();
  DistributionSpec world = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  bool world_binary = true;  // echo the world in the form it was written

  std::vector<ScorerSpec> scorers = {ScorerSpec::canonical()};  // curve
  ScorerSpec f0 = ScorerSpec::canonical();                      // distinguish
  ScorerSpec f1 = ScorerSpec::canonical();
  ScorerSpec nc_scorer = ScorerSpec::canonical();  // nonconverge

  std::vector<std::uint64_t> n_grid;  // curve, nonconverge
  std::vector<std::uint64_t> N_grid;  // distinguish thresholds
  std::uint32_t n_per_decade = 12;
  std::uint32_t trials = 50;

  double theta_hi = 0.6, theta_lo = 0.3;
  double floor_high = 0.3, floor_low = 0.05;

  std::string input;  // ingest
  std::uint64_t clicks_high = 1000, clicks_low = 100;
  std::vector<std::string> columns;
};

// Strict parse: unknown keys, missing keys, and type mismatches raise config
// errors naming the offending field. fallback_command fills in "command"
// when the file omits it; a mismatch between the two is an error.
RunConfig config_from_json(const nlohmann::ordered_json& j,
                           const std::string& fallback_command = "");

// Resolved echo with defaults filled in; stable key order. Feeding the
// result back through config_from_json reproduces the same RunConfig.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

// Reads a config file. A run manifest also loads: its embedded "config"
// object is unwrapped, so reruns need no separate file.
RunConfig load_config(const std::string& path, const std::string& cli_command = "");

}  // namespace ndcglab
