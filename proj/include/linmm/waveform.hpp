#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace linmm {

/// Uniformly sampled voltage signal; sample i is at t0 + i / sample_rate.
struct Waveform {
  double sample_rate = 0.0;
  double t0 = 0.0;
  std::vector<double> samples;

  [[nodiscard]] std::size_t size() const { return samples.size(); }
  [[nodiscard]] bool empty() const { return samples.empty(); }
  [[nodiscard]] double time(std::int64_t i) const { return t0 + static_cast<double>(i) / sample_rate; }
  [[nodiscard]] double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// `time_s,voltage_v`, one row per sample, 12 significant digits.
void write_waveform_csv(std::ostream& os, const Waveform& w);

}  // namespace linmm
