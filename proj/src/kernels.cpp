#include "linmm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace linmm::kernels {

namespace {

inline double carrier_sample(std::int64_t i, std::span<const std::uint8_t> gate, const CarrierParams& p) {
  const auto cell = static_cast<std::size_t>(i / p.samples_per_cell);
  if (cell >= gate.size() || gate[cell] == 0) return 0.0;
  return p.amplitude * std::sin(p.radians_per_sample * static_cast<double>(i));
}

inline double min_at(std::span<const std::span<const double>> drives, std::size_t i) {
  double v = drives[0][i];
  for (std::size_t k = 1; k < drives.size(); ++k) v = std::min(v, drives[k][i]);
  return v;
}

void check_drives(std::span<const std::span<const double>> drives, std::span<double> out) {
  if (drives.empty()) throw std::invalid_argument("wired_and needs at least one driver");
  for (auto d : drives)
    if (d.size() != out.size()) throw std::invalid_argument("wired_and inputs are misaligned");
}

}  // namespace

namespace serial {

void carrier_fill(std::span<double> out, std::span<const std::uint8_t> gate, const CarrierParams& p) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = carrier_sample(static_cast<std::int64_t>(i), gate, p);
}

void wired_and(std::span<const std::span<const double>> drives, std::span<double> out) {
  check_drives(drives, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = min_at(drives, i);
}

void add_into(std::span<double> acc, std::span<const double> x) {
  if (acc.size() != x.size()) throw std::invalid_argument("add_into size mismatch");
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

}  // namespace serial

namespace parallel {

void carrier_fill(std::span<double> out, std::span<const std::uint8_t> gate, const CarrierParams& p) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = carrier_sample(i, gate, p);
}

void wired_and(std::span<const std::span<const double>> drives, std::span<double> out) {
  check_drives(drives, out);
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = min_at(drives, static_cast<std::size_t>(i));
}

void add_into(std::span<double> acc, std::span<const double> x) {
  if (acc.size() != x.size()) throw std::invalid_argument("add_into size mismatch");
  const auto n = static_cast<std::int64_t>(acc.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace linmm::kernels
