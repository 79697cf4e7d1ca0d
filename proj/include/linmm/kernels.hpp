#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `serial::` and an OpenMP version in `parallel::`; both produce bitwise
// identical output (each element depends only on its own index).

#include <cstdint>
#include <span>
#include <vector>

namespace linmm::kernels {

struct CarrierParams {
  double amplitude = 0.0;
  double radians_per_sample = 0.0;
  int samples_per_cell = 1;
};

namespace serial {
/// out[i] = amplitude * sin(radians_per_sample * i) inside cells whose gate is 1, else 0.
void carrier_fill(std::span<double> out, std::span<const std::uint8_t> cell_gate, const CarrierParams& p);
/// out[i] = min over drives[k][i].
void wired_and(std::span<const std::span<const double>> drives, std::span<double> out);
void add_into(std::span<double> acc, std::span<const double> x);
}  // namespace serial

namespace parallel {
void carrier_fill(std::span<double> out, std::span<const std::uint8_t> cell_gate, const CarrierParams& p);
void wired_and(std::span<const std::span<const double>> drives, std::span<double> out);
void add_into(std::span<double> acc, std::span<const double> x);
}  // namespace parallel

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots.
template <class Fn>
void for_each_trial_serial(std::int64_t n, Fn&& fn) {
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

template <class Fn>
void for_each_trial_parallel(std::int64_t n, Fn&& fn) {
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

int max_threads();

}  // namespace linmm::kernels
