#pragma once

// Flat `section.key = value` run configuration used by the CLI.

#include "linmm/bus_sim.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace linmm {

using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError.
KeyValues parse_key_values(std::istream& in);

struct Expectations {
  std::optional<Outcome> outcome;
  std::optional<MacVerdict> mac;
  std::optional<ParseStatus> checksum;
};

struct RunConfig {
  PhyConfig phy;
  TransactionTiming timing;
  Topology topology;
  int request_id = 0x10;
  AttackScenario scenario;
  NoiseModel noise;
  Expectations expect;
  SweepSpec sweep;
  std::string canonical;  // sorted key=value text, hashed into the manifest

  /// Validates every section before anything runs.
  void validate() const;
};

RunConfig build_run_config(const KeyValues& kv);
RunConfig load_run_config(const std::string& path);

/// Lists what did not match; empty when every declared expectation holds.
std::vector<std::string> check_expectations(const Expectations& e, const SimReport& r);

std::string sha256_hex(const std::string& text);

}  // namespace linmm
