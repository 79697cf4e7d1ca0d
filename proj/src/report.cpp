#include "linmm/report.hpp"

namespace linmm {

namespace {
std::string hex_byte(std::uint8_t b) { return "0x" + to_hex(std::span<const std::uint8_t>(&b, 1)); }
}  // namespace

nlohmann::ordered_json report_to_json(const SimReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = kReportSchema;
  j["scenario"] = r.scenario;
  j["intended_id"] = r.intended_id;
  j["intended_pid"] = hex_byte(r.intended_pid);
  j["observed_pid"] = r.observed_pid ? ordered_json(hex_byte(*r.observed_pid)) : ordered_json(nullptr);
  j["responder"] = r.responder;
  j["response_found"] = r.response_found;
  j["response_slot_time_s"] = r.response_slot_time;
  j["response_start_time_s"] = r.response_start_time;
  j["decoded_bytes"] = to_hex(r.decoded_bytes);
  j["checksum_verdict"] = to_string(r.checksum_verdict);
  j["error_byte_index"] = r.error_byte_index;
  j["master_expects_mac"] = r.master_expects_mac;
  j["mac_verdict"] = to_string(r.mac_verdict);
  j["mac_transmitted"] = r.mac_transmitted ? ordered_json(r.mac_transmitted->hex()) : ordered_json(nullptr);
  j["mac_reconstructed"] = r.mac_reconstructed ? ordered_json(r.mac_reconstructed->hex()) : ordered_json(nullptr);
  j["mac_slot_start_time_s"] = r.mac_slot_start_time;
  j["mac_available_time_s"] = r.mac_available_time;
  auto& col = j["collisions"] = ordered_json::array();
  for (const auto& c : r.collisions) col.push_back({{"node", c.node}, {"cell", c.cell}, {"time_s", c.time}});
  j["outcome"] = to_string(r.outcome);
  auto& tr = j["demod_trace"] = ordered_json::array();
  for (const auto& d : r.trace)
    tr.push_back({{"cell_index", d.cell_index},
                  {"pulse_count", d.pulse_count},
                  {"mac_bit", d.mac_bit},
                  {"decision_time_s", d.decision_time}});
  return j;
}

}  // namespace linmm
