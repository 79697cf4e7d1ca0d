#include "linmm/phy_synth.hpp"

#include "linmm/kernels.hpp"

#include <cmath>
#include <numbers>

namespace linmm {

void MacSlotMap::validate(int total_cells) const {
  if (start_slot < 0 || start_slot + kMacBits > total_cells)
    throw ConfigError("MAC slot map overflows the response (" + std::to_string(start_slot) + " + 64 > " +
                      std::to_string(total_cells) + ")");
}

std::vector<std::uint8_t> MacSlotMap::gate(MacTag mac, int total_cells) const {
  validate(total_cells);
  std::vector<std::uint8_t> g(static_cast<std::size_t>(total_cells), 0);
  for (int i = 0; i < kMacBits; ++i) g[static_cast<std::size_t>(start_slot + i)] = static_cast<std::uint8_t>(mac.bit(i));
  return g;
}

Waveform bits_to_waveform(std::span<const std::uint8_t> bits, const PhyConfig& cfg, double t0, double initial_level) {
  const int spb = cfg.samples_per_bit();
  Waveform w{cfg.sample_rate, t0, {}};
  w.samples.resize(bits.size() * static_cast<std::size_t>(spb));
  const double lo = cfg.dominant_volts(), hi = cfg.recessive_volts();
  if (cfg.slew_tau <= 0.0) {
    for (std::size_t c = 0; c < bits.size(); ++c)
      std::fill_n(w.samples.begin() + static_cast<std::ptrdiff_t>(c * spb), spb, bits[c] ? hi : lo);
    return w;
  }
  const double alpha = 1.0 - std::exp(-1.0 / (cfg.sample_rate * cfg.slew_tau));
  double v = std::isnan(initial_level) ? hi : initial_level;
  std::size_t i = 0;
  for (auto b : bits) {
    const double target = b ? hi : lo;
    for (int k = 0; k < spb; ++k, ++i) {
      v += alpha * (target - v);
      w.samples[i] = v;
    }
  }
  return w;
}

Waveform gated_carrier(std::span<const std::uint8_t> gate, const PhyConfig& cfg, double t0) {
  const int spb = cfg.samples_per_bit();
  Waveform w{cfg.sample_rate, t0, {}};
  w.samples.resize(gate.size() * static_cast<std::size_t>(spb));
  kernels::CarrierParams p{cfg.a_c, 2.0 * std::numbers::pi * cfg.f_c / cfg.sample_rate, spb};
  kernels::parallel::carrier_fill(w.samples, gate, p);
  return w;
}

Waveform carrier_waveform(MacTag mac, const MacSlotMap& map, int total_cells, const PhyConfig& cfg, double t0) {
  return gated_carrier(map.gate(mac, total_cells), cfg, t0);
}

Waveform superpose(const Waveform& a, const Waveform& b) {
  if (a.sample_rate != b.sample_rate) throw std::invalid_argument("superpose: sample rates differ");
  if (a.size() != b.size()) throw std::invalid_argument("superpose: lengths differ");
  if (std::abs(a.t0 - b.t0) > 0.5 / a.sample_rate) throw std::invalid_argument("superpose: start times differ");
  Waveform out = a;
  kernels::parallel::add_into(out.samples, b.samples);
  return out;
}

Waveform synth_linmm_response(const ResponseFrame& frame, MacTag mac, const PhyConfig& cfg, const MacSlotMap& map,
                              int inter_byte_space, double t0) {
  const Bitstream bits = serialize_response(frame, inter_byte_space);
  const int cells = static_cast<int>(bits.size());
  return superpose(bits_to_waveform(bits, cfg, t0), carrier_waveform(mac, map, cells, cfg, t0));
}

}  // namespace linmm
