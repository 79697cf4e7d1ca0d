#pragma once

#include <stdexcept>
#include <string>

namespace linmm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Electrical and modulation constants shared by transmitter and receiver.
/// Levels are fractions of v_batt; frequencies in Hz; times in seconds.
struct PhyConfig {
  double v_batt = 12.0;
  double baud = 19200.0;
  double tx_dominant_level = 0.20;
  double tx_recessive_level = 0.80;
  double rx_dominant_max = 0.40;
  double rx_recessive_min = 0.60;
  double f_c = 100000.0;
  double a_c = 1.2;
  double sample_rate = 1'920'000.0;
  double filter_low = 75000.0;
  double filter_high = 125000.0;
  int filter_order = 1;  // Butterworth prototype order; band-pass order is twice this
  // 0.5 x steady-state filtered carrier amplitude (1.2 V x |H(f_c)| = 1.1914 V).
  double comparator_threshold = 0.596;
  double comparator_rearm_fraction = 0.5;
  int pulse_threshold = 3;
  double slew_tau = 0.0;  // 0 = ideal rectangular edges

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  [[nodiscard]] int samples_per_bit() const;
  [[nodiscard]] double bit_period() const { return 1.0 / baud; }
  [[nodiscard]] double dominant_volts() const { return tx_dominant_level * v_batt; }
  [[nodiscard]] double recessive_volts() const { return tx_recessive_level * v_batt; }
  [[nodiscard]] double rx_dominant_volts() const { return rx_dominant_max * v_batt; }
  [[nodiscard]] double rx_recessive_volts() const { return rx_recessive_min * v_batt; }
};

}  // namespace linmm
