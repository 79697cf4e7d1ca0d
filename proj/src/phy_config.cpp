#include "linmm/phy_config.hpp"

#include <cmath>

namespace linmm {

namespace {
void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}
}  // namespace

int PhyConfig::samples_per_bit() const {
  const double ratio = sample_rate / baud;
  const double rounded = std::round(ratio);
  if (!(baud > 0.0) || !(sample_rate > 0.0) || rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
    throw ConfigError("sample_rate must be an integer multiple of baud");
  return static_cast<int>(rounded);
}

void PhyConfig::validate() const {
  require(v_batt > 0.0, "v_batt must be positive");
  require(baud > 0.0, "baud must be positive");
  require(0.0 <= tx_dominant_level && tx_dominant_level < rx_dominant_max, "tx_dominant_level must be below rx_dominant_max");
  require(rx_dominant_max <= rx_recessive_min, "rx_dominant_max must not exceed rx_recessive_min");
  require(rx_recessive_min < tx_recessive_level && tx_recessive_level <= 1.0, "tx_recessive_level must be above rx_recessive_min");
  require(f_c > 0.0 && a_c >= 0.0, "carrier frequency must be positive and amplitude non-negative");
  require(filter_low > 0.0 && filter_low < f_c && f_c < filter_high, "need filter_low < f_c < filter_high");
  require(sample_rate >= 10.0 * f_c, "sample_rate must be at least 10 x f_c");
  require(sample_rate >= 10.0 * filter_high, "sample_rate must be at least 10 x filter_high");
  require(dominant_volts() + a_c < rx_dominant_volts(), "carrier would lift dominant cells above the receiver dominant threshold");
  require(recessive_volts() - a_c > rx_recessive_volts(), "carrier would pull recessive cells below the receiver recessive threshold");
  require(filter_order >= 1 && filter_order <= 4, "filter_order must be 1..4");
  require(comparator_threshold > 0.0, "comparator_threshold must be positive");
  require(comparator_rearm_fraction > 0.0 && comparator_rearm_fraction < 1.0, "comparator_rearm_fraction must be in (0, 1)");
  require(pulse_threshold >= 1, "pulse_threshold must be at least 1");
  require(slew_tau >= 0.0, "slew_tau must be non-negative");
  (void)samples_per_bit();
}

}  // namespace linmm
