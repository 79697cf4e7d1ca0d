#pragma once

// Master-side receive chain. The standard LIN threshold decoder and the
// LIN-MM demodulator (band-pass -> comparator -> per-cell pulse counter) both
// read the same bus samples.

#include "linmm/lin_frames.hpp"
#include "linmm/mac_engine.hpp"
#include "linmm/phy_config.hpp"
#include "linmm/phy_synth.hpp"
#include "linmm/waveform.hpp"

#include <array>
#include <iosfwd>
#include <optional>

namespace linmm {

/// Direct-form II transposed second-order section, a0 normalised to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
};

/// Cascade of biquads with its own state; one instance per bus stream.
class BandpassFilter {
 public:
  explicit BandpassFilter(std::vector<Biquad> sections);

  /// Butterworth band-pass from the configured corners (bilinear, prewarped).
  static BandpassFilter design(const PhyConfig& cfg);

  double step(double x);
  void reset();
  [[nodiscard]] const std::vector<Biquad>& sections() const { return sections_; }
  /// |H(e^{j 2 pi f / fs})| from the coefficients.
  [[nodiscard]] double magnitude(double f, double fs) const;

 private:
  std::vector<Biquad> sections_;
  std::vector<std::array<double, 2>> state_;
};

Waveform bandpass_filter(const Waveform& w, const PhyConfig& cfg);

/// Cell grid anchor: sample index (in the decoded waveform) where cell 0 begins.
struct BitClock {
  std::int64_t start_sample = 0;
};

/// Mid-cell threshold decisions for n_cells cells; the dead zone holds the
/// previous decision (recessive before the first cell).
Bitstream standard_lin_decode(const Waveform& w, const PhyConfig& cfg, BitClock clock, int n_cells);

/// First falling edge into the dominant band at or after `from`, confirmed by
/// four consecutive dominant samples; searches up to (excluding) `to`.
std::optional<std::int64_t> find_falling_edge(const Waveform& w, const PhyConfig& cfg, std::int64_t from,
                                              std::int64_t to);

struct PulseEvents {
  double sample_rate = 0.0;
  double t0 = 0.0;
  std::vector<std::int64_t> samples;  // strictly increasing

  [[nodiscard]] double time(std::size_t k) const { return t0 + static_cast<double>(samples[k]) / sample_rate; }
  [[nodiscard]] std::size_t size() const { return samples.size(); }
};

/// Rising crossings of comparator_threshold; re-arms once the input drops
/// below comparator_rearm_fraction x threshold.
PulseEvents comparator(const Waveform& w, const PhyConfig& cfg);

struct DemodRecord {
  int cell_index = 0;
  int pulse_count = 0;
  int mac_bit = 0;
  std::int64_t decision_sample = 0;
  double decision_time = 0.0;
};

using DemodTrace = std::vector<DemodRecord>;

struct MacReconstruction {
  Bitstream bits;  // MSB first
  DemodTrace trace;
};

/// Counts events in [cell start, cell end) for n_bits cells starting at the
/// clock; bit = 1 iff count >= pulse_threshold, decided at the cell end.
MacReconstruction reconstruct_mac(const PulseEvents& events, BitClock clock, int n_bits, const PhyConfig& cfg);

void write_demod_trace_csv(std::ostream& os, const DemodTrace& trace);

enum class MacVerdict { pass, fail, absent };
std::string to_string(MacVerdict v);

struct ReceiveOptions {
  int data_len = 8;
  ChecksumModel checksum_model = ChecksumModel::enhanced;
  int inter_byte_space = 0;
  MacSlotMap slot_map{};
  MacProfile mac_profile{};
  /// Window in which the response start bit is searched for (sample indices).
  std::int64_t search_from = 0;
  std::int64_t search_to = -1;  // -1 = end of waveform
};

struct ReceiveResult {
  bool response_found = false;
  std::int64_t response_start_sample = 0;
  double response_start_time = 0.0;
  Bitstream bits;
  ParseResult parse;
  Bitstream mac_bits;
  std::optional<MacTag> mac;
  MacVerdict mac_verdict = MacVerdict::absent;
  double mac_available_time = 0.0;
  DemodTrace trace;
};

/// Full LIN-MM master receive. Without a key the MAC verdict is `absent`
/// (legacy slave); with a key every decoded response is verified.
ReceiveResult receive_linmm_response(const Waveform& w, const PhyConfig& cfg, const std::optional<MacKey>& key,
                                      std::uint8_t pid, const ReceiveOptions& opt = {});

}  // namespace linmm
