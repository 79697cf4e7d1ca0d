#pragma once

// Slave-side LIN-MM transmitter: LIN bit cells to bus voltages, the OOK
// carrier gated by the MAC bitstream, and their superposition.

#include "linmm/lin_frames.hpp"
#include "linmm/mac_engine.hpp"
#include "linmm/phy_config.hpp"
#include "linmm/waveform.hpp"

#include <limits>

namespace linmm {

inline constexpr int kMacBits = 64;

/// MAC bit i rides on response cell start_slot + i.
struct MacSlotMap {
  int start_slot = 0;

  void validate(int total_cells) const;
  /// Per-cell carrier gate for a response of `total_cells` cells.
  [[nodiscard]] std::vector<std::uint8_t> gate(MacTag mac, int total_cells) const;
};

/// Driven bus levels for each sample; recessive and dominant map to the
/// configured transmit fractions of v_batt. With slew_tau > 0 edges follow a
/// first-order response starting from `initial_level` volts (recessive if NaN).
Waveform bits_to_waveform(std::span<const std::uint8_t> bits, const PhyConfig& cfg, double t0 = 0.0,
                          double initial_level = std::numeric_limits<double>::quiet_NaN());

/// a_c * sin(2 pi f_c (t - t0)) inside MAC-1 cells, exactly 0 V elsewhere.
Waveform carrier_waveform(MacTag mac, const MacSlotMap& map, int total_cells, const PhyConfig& cfg,
                          double t0 = 0.0);

/// Same, for an explicit per-cell gate.
Waveform gated_carrier(std::span<const std::uint8_t> gate, const PhyConfig& cfg, double t0 = 0.0);

/// Pointwise sum; rate, start time and length must match.
Waveform superpose(const Waveform& a, const Waveform& b);

Waveform synth_linmm_response(const ResponseFrame& frame, MacTag mac, const PhyConfig& cfg,
                              const MacSlotMap& map = {}, int inter_byte_space = 0, double t0 = 0.0);

}  // namespace linmm
