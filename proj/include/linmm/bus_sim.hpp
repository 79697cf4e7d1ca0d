#pragma once

// Single-wire LIN bus with wired-AND combining, additive carriers and seeded
// noise, plus the attack scenarios the LIN-MM master is evaluated against.

#include "linmm/lin_frames.hpp"
#include "linmm/mac_engine.hpp"
#include "linmm/phy_config.hpp"
#include "linmm/phy_demod.hpp"
#include "linmm/waveform.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linmm {

enum class NodeRole { master, slave, attacker, mitm };
enum class Capability { legacy_lin, lin_mm };

struct Node {
  std::string name;
  NodeRole role = NodeRole::slave;
  std::vector<int> ids;  // frame ids this slave answers
  Capability capability = Capability::lin_mm;
  std::optional<MacKey> key;
  std::vector<std::uint8_t> data;  // response payload
  std::optional<ChecksumModel> checksum_model;  // default per id
};

struct Topology {
  std::vector<Node> nodes;

  /// Exactly one master, at most 15 slaves, no id answered twice, LIN-MM
  /// slaves carry a key and at least 6 data bytes (64 MAC cells).
  void validate() const;
  [[nodiscard]] const Node& master() const;
  [[nodiscard]] const Node* responder(int id) const;
};

struct NoiseModel {
  double gaussian_sigma = 0.0;  // V
  double spike_rate = 0.0;      // spikes per second
  double spike_amplitude = 0.0; // V, random sign
  double spike_width = 0.0;     // s, at least one sample
  std::uint64_t seed = 1;

  void validate() const;
  [[nodiscard]] bool silent() const { return gaussian_sigma == 0.0 && (spike_rate == 0.0 || spike_amplitude == 0.0); }
  /// Additive noise for n samples; a pure function of the model and n.
  [[nodiscard]] std::vector<double> render(std::size_t n, double sample_rate) const;
};

enum class AttackType { none, spoofing, response_collision, header_collision, mitm, dos };
enum class MitmMode { passthrough, rewrite, replay };
enum class ForgedCarrier { none, random };

struct AttackScenario {
  AttackType type = AttackType::none;
  // spoofing / response_collision
  std::vector<std::uint8_t> forged_data;
  ForgedCarrier forged_carrier = ForgedCarrier::none;
  std::uint64_t attacker_seed = 0;
  // header_collision
  int redirect_id = -1;
  // mitm
  MitmMode mitm_mode = MitmMode::passthrough;
  int rewrite_byte = 0;
  std::uint8_t rewrite_xor = 0x01;
  bool relay_carrier = true;
  std::vector<std::uint8_t> replay_data;  // payload of the earlier, captured cycle
  // dos: dominant assertion over response-relative cells
  int dos_first_cell = 0;
  int dos_cells = 90;
};

enum class Outcome { none, blocked, detected, succeeded };

struct TransactionTiming {
  int lead_in_cells = 4;
  int break_bits = kMinBreakBits;
  int break_delimiter_bits = 1;
  int response_space_cells = 4;
  int trailing_cells = 4;
  int inter_byte_space = 0;
};

struct CollisionEvent {
  std::string node;
  int cell = 0;  // index on the transaction timeline
  double time = 0.0;
};

struct SimReport {
  std::string scenario;
  int intended_id = 0;
  std::uint8_t intended_pid = 0;
  std::optional<std::uint8_t> observed_pid;
  std::string responder;
  bool master_expects_mac = false;

  bool response_found = false;
  double response_slot_time = 0.0;   // scheduled start of the response
  double response_start_time = 0.0;  // detected start bit
  std::vector<std::uint8_t> decoded_bytes;
  ParseStatus checksum_verdict = ParseStatus::truncated;
  int error_byte_index = -1;

  MacVerdict mac_verdict = MacVerdict::absent;
  std::optional<MacTag> mac_transmitted;
  std::optional<MacTag> mac_reconstructed;
  double mac_slot_start_time = 0.0;
  double mac_available_time = 0.0;
  DemodTrace trace;

  std::vector<CollisionEvent> collisions;
  Outcome outcome = Outcome::none;
  std::vector<std::uint8_t> legit_data;  // what the addressed slave would have sent

  Waveform bus;  // master-side bus, not serialised into JSON
};

/// Full-timeline transmission of one node.
struct Transmission {
  std::string node;
  int first_cell = 0;
  Bitstream bits;
  std::vector<std::uint8_t> carrier_gate;  // per cell of `bits`, empty = no carrier
  bool monitors = true;  // aborts on a readback mismatch
};

/// First cell (relative to sent) where observed differs, if any.
std::optional<int> transmit_monitor(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> observed);

/// Bus = min over driven levels + sum of carriers + noise; all inputs must share rate, start and length.
Waveform combine_bus(std::span<const Waveform> drives, std::span<const Waveform> carriers,
                     std::span<const double> noise);

struct SegmentResult {
  Waveform bus;
  Bitstream observed;  // mid-cell readback over the whole timeline
  std::vector<CollisionEvent> collisions;
  std::vector<int> abort_cell;  // per transmission, -1 if none
};

/// Simulates one bus segment with collision monitoring; transmitters that see
/// a mismatch at cell k drive cell k and go silent afterwards.
SegmentResult simulate_segment(const std::vector<Transmission>& tx, int total_cells, std::span<const double> noise,
                               const PhyConfig& cfg);

SimReport run_transaction(const Topology& topo, int request_id, const AttackScenario& scenario,
                          const NoiseModel& noise, const PhyConfig& cfg, const TransactionTiming& timing = {});

SimReport run_mitm(const Topology& topo, int request_id, const AttackScenario& scenario, const NoiseModel& noise,
                   const PhyConfig& cfg, const TransactionTiming& timing = {});

/// Forged payload that wins bitwise arbitration against `legit` (first
/// differing bit is dominant in the forgery). nullopt if legit is all zeros.
std::optional<std::vector<std::uint8_t>> make_winning_forgery(std::span<const std::uint8_t> legit, std::uint64_t seed);

/// True if a header carrying `attacker_pid` wins arbitration against `master_pid`.
bool pid_wins_arbitration(std::uint8_t attacker_pid, std::uint8_t master_pid);

struct BerRow {
  double sigma = 0.0;
  double mac_ber = 0.0;
  double frame_err_rate = 0.0;
  double mac_fail_rate = 0.0;
  int trials = 0;
  friend bool operator==(const BerRow&, const BerRow&) = default;
};

struct SweepSpec {
  NoiseModel base_noise;  // spike settings and seed; gaussian_sigma is overridden per row
  std::vector<double> sigmas;
  int trials = 100;
  int data_len = 8;
};

/// Per sigma: random key/payload/id per trial, scenario none. OpenMP over trials.
std::vector<BerRow> sweep_noise(const SweepSpec& spec, const PhyConfig& cfg, const TransactionTiming& timing = {});
/// Serial reference of sweep_noise; identical output.
std::vector<BerRow> sweep_noise_serial(const SweepSpec& spec, const PhyConfig& cfg,
                                       const TransactionTiming& timing = {});

void write_ber_csv(std::ostream& os, const std::vector<BerRow>& rows);

std::uint64_t splitmix64(std::uint64_t x);

std::string to_string(AttackType t);
std::string to_string(Outcome o);
std::string to_string(MitmMode m);
AttackType attack_type_from_string(const std::string& s);
Outcome outcome_from_string(const std::string& s);
MitmMode mitm_mode_from_string(const std::string& s);

}  // namespace linmm
