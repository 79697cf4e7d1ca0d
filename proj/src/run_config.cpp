#include "linmm/run_config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace linmm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: " + v);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used, 0);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: " + v);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');)
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

std::vector<std::uint8_t> to_bytes(const std::string& key, const std::string& v) {
  try {
    return from_hex(v);
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

Capability capability_from(const std::string& key, const std::string& v) {
  if (v == "lin_mm") return Capability::lin_mm;
  if (v == "legacy_lin") return Capability::legacy_lin;
  throw ConfigError(key + ": unknown capability " + v);
}

MacKey key_from(const std::string& key, const std::string& v) {
  try {
    return MacKey::from_hex(v);
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError("duplicate key " + key);
  }
  return kv;
}

RunConfig build_run_config(const KeyValues& kv) {
  RunConfig rc;
  std::set<std::string> used;
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    used.insert(k);
    return it->second;
  };
  auto num = [&](const std::string& k, double& dst) {
    if (auto v = get(k)) dst = to_double(k, *v);
  };
  auto integer = [&](const std::string& k, int& dst) {
    if (auto v = get(k)) dst = static_cast<int>(to_int(k, *v));
  };

  auto& p = rc.phy;
  num("phy.v_batt_v", p.v_batt);
  num("phy.baud_bps", p.baud);
  num("phy.tx_dominant_level", p.tx_dominant_level);
  num("phy.tx_recessive_level", p.tx_recessive_level);
  num("phy.rx_dominant_max", p.rx_dominant_max);
  num("phy.rx_recessive_min", p.rx_recessive_min);
  num("phy.f_c_hz", p.f_c);
  num("phy.a_c_v", p.a_c);
  num("phy.sample_rate_hz", p.sample_rate);
  num("phy.filter_low_hz", p.filter_low);
  num("phy.filter_high_hz", p.filter_high);
  integer("phy.filter_order", p.filter_order);
  num("phy.comparator_threshold_v", p.comparator_threshold);
  num("phy.comparator_rearm_fraction", p.comparator_rearm_fraction);
  integer("phy.pulse_threshold", p.pulse_threshold);
  num("phy.slew_tau_s", p.slew_tau);

  auto& t = rc.timing;
  integer("frame.break_bits", t.break_bits);
  integer("frame.break_delimiter_bits", t.break_delimiter_bits);
  integer("frame.inter_byte_space", t.inter_byte_space);
  integer("frame.response_space_bits", t.response_space_cells);
  integer("frame.lead_in_bits", t.lead_in_cells);
  integer("frame.trailing_bits", t.trailing_cells);

  std::optional<MacKey> network_key;
  if (auto v = get("mac.key")) network_key = key_from("mac.key", *v);

  Node master{"master", NodeRole::master, {}, Capability::lin_mm, {}, {}, {}};
  if (auto v = get("master.capability")) master.capability = capability_from("master.capability", *v);
  rc.topology.nodes.push_back(master);

  std::set<std::string> node_names;
  for (const auto& [k, v] : kv) {
    if (k.rfind("node.", 0) != 0) continue;
    const auto dot = k.find('.', 5);
    if (dot == std::string::npos) throw ConfigError("malformed node key " + k);
    node_names.insert(k.substr(5, dot - 5));
  }
  for (const auto& name : node_names) {
    const std::string pre = "node." + name + ".";
    Node n{name, NodeRole::slave, {}, Capability::lin_mm, network_key, {}, {}};
    if (auto v = get(pre + "ids"))
      for (const auto& id : split_list(*v)) n.ids.push_back(static_cast<int>(to_int(pre + "ids", id)));
    if (auto v = get(pre + "capability")) n.capability = capability_from(pre + "capability", *v);
    if (auto v = get(pre + "key")) n.key = key_from(pre + "key", *v);
    if (auto v = get(pre + "data")) n.data = to_bytes(pre + "data", *v);
    if (auto v = get(pre + "checksum")) {
      try {
        n.checksum_model = checksum_model_from_string(*v);
      } catch (const std::exception& e) {
        throw ConfigError(pre + "checksum: " + e.what());
      }
    }
    if (n.capability == Capability::legacy_lin) n.key.reset();
    rc.topology.nodes.push_back(std::move(n));
  }

  integer("transaction.id", rc.request_id);

  auto& s = rc.scenario;
  if (auto v = get("scenario.type")) s.type = attack_type_from_string(*v);
  if (auto v = get("scenario.forged_data")) s.forged_data = to_bytes("scenario.forged_data", *v);
  if (auto v = get("scenario.forged_carrier")) {
    if (*v == "none") s.forged_carrier = ForgedCarrier::none;
    else if (*v == "random") s.forged_carrier = ForgedCarrier::random;
    else throw ConfigError("scenario.forged_carrier: expected none or random");
  }
  if (auto v = get("scenario.attacker_seed")) s.attacker_seed = static_cast<std::uint64_t>(to_int("scenario.attacker_seed", *v));
  integer("scenario.redirect_id", s.redirect_id);
  if (auto v = get("scenario.mitm_mode")) s.mitm_mode = mitm_mode_from_string(*v);
  integer("scenario.rewrite_byte", s.rewrite_byte);
  if (auto v = get("scenario.rewrite_xor")) s.rewrite_xor = static_cast<std::uint8_t>(to_int("scenario.rewrite_xor", *v));
  if (auto v = get("scenario.relay_carrier")) s.relay_carrier = to_bool("scenario.relay_carrier", *v);
  if (auto v = get("scenario.replay_data")) s.replay_data = to_bytes("scenario.replay_data", *v);
  integer("scenario.dos_first_cell", s.dos_first_cell);
  integer("scenario.dos_cells", s.dos_cells);

  auto& nz = rc.noise;
  num("noise.sigma_v", nz.gaussian_sigma);
  num("noise.spike_rate_hz", nz.spike_rate);
  num("noise.spike_amplitude_v", nz.spike_amplitude);
  num("noise.spike_width_s", nz.spike_width);
  if (auto v = get("noise.seed")) nz.seed = static_cast<std::uint64_t>(to_int("noise.seed", *v));

  if (auto v = get("expect.outcome")) rc.expect.outcome = outcome_from_string(*v);
  if (auto v = get("expect.mac")) {
    if (*v == "pass") rc.expect.mac = MacVerdict::pass;
    else if (*v == "fail") rc.expect.mac = MacVerdict::fail;
    else if (*v == "absent") rc.expect.mac = MacVerdict::absent;
    else throw ConfigError("expect.mac: expected pass, fail or absent");
  }
  if (auto v = get("expect.checksum")) {
    bool found = false;
    for (auto st : {ParseStatus::ok, ParseStatus::framing_error, ParseStatus::checksum_error, ParseStatus::truncated})
      if (to_string(st) == *v) {
        rc.expect.checksum = st;
        found = true;
      }
    if (!found) throw ConfigError("expect.checksum: unknown verdict " + *v);
  }

  rc.sweep.sigmas = {0.0};
  if (auto v = get("sweep.sigmas_v")) {
    rc.sweep.sigmas.clear();
    for (const auto& x : split_list(*v)) rc.sweep.sigmas.push_back(to_double("sweep.sigmas_v", x));
  }
  integer("sweep.trials", rc.sweep.trials);
  integer("sweep.data_len", rc.sweep.data_len);

  for (const auto& [k, v] : kv)
    if (!used.count(k)) throw ConfigError("unknown configuration key: " + k);

  for (const auto& [k, v] : kv) rc.canonical += k + "=" + v + "\n";
  rc.validate();
  return rc;
}

void RunConfig::validate() const {
  phy.validate();
  topology.validate();
  noise.validate();
  (void)FrameId(request_id);
  if (timing.break_bits < kMinBreakBits) throw ConfigError("frame.break_bits must be at least 13");
  if (timing.break_delimiter_bits < 1 || timing.response_space_cells < 0 || timing.lead_in_cells < 1 ||
      timing.trailing_cells < 0 || timing.inter_byte_space < 0)
    throw ConfigError("frame timing values out of range");
  if (sweep.trials < 1) throw ConfigError("sweep.trials must be at least 1");
  if (sweep.data_len < 6 || sweep.data_len > 8) throw ConfigError("sweep.data_len must be 6..8");
  for (double s : sweep.sigmas)
    if (s < 0) throw ConfigError("sweep.sigmas_v must be non-negative");
  switch (scenario.type) {
    case AttackType::spoofing:
    case AttackType::response_collision:
      if (scenario.forged_data.empty() || scenario.forged_data.size() > 8)
        throw ConfigError("scenario.forged_data needs 1..8 bytes");
      break;
    case AttackType::header_collision:
      (void)FrameId(scenario.redirect_id);
      break;
    case AttackType::mitm:
      if (scenario.mitm_mode == MitmMode::replay && scenario.replay_data.empty())
        throw ConfigError("scenario.replay_data required for replay");
      break;
    default: break;
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  return build_run_config(parse_key_values(in));
}

std::vector<std::string> check_expectations(const Expectations& e, const SimReport& r) {
  std::vector<std::string> miss;
  if (e.outcome && *e.outcome != r.outcome)
    miss.push_back("outcome: expected " + to_string(*e.outcome) + ", got " + to_string(r.outcome));
  if (e.mac && *e.mac != r.mac_verdict)
    miss.push_back("mac: expected " + to_string(*e.mac) + ", got " + to_string(r.mac_verdict));
  if (e.checksum && *e.checksum != r.checksum_verdict)
    miss.push_back("checksum: expected " + to_string(*e.checksum) + ", got " + to_string(r.checksum_verdict));
  return miss;
}

std::string sha256_hex(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  return to_hex(std::span<const std::uint8_t>(md, len));
}

}  // namespace linmm
