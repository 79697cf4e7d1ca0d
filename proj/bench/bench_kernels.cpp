// Serial reference vs OpenMP kernels: carrier synthesis, wired-AND
// combination and a Monte Carlo noise sweep. Also checks that both produce
// identical output before reporting timings.

#include "linmm/bus_sim.hpp"
#include "linmm/kernels.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

using namespace linmm;

namespace {

template <class Fn>
double seconds(int reps, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  %s\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", kernels::max_threads());

  const std::size_t cells = 200000;
  const int spb = 100;
  std::vector<std::uint8_t> gate(cells);
  std::mt19937_64 eng(7);
  for (auto& g : gate) g = static_cast<std::uint8_t>(eng() & 1u);
  std::vector<double> a(cells * spb), b(cells * spb);
  const kernels::CarrierParams p{1.2, 2.0 * std::numbers::pi * 100000.0 / 1.92e6, spb};
  const double cs = seconds(3, [&] { kernels::serial::carrier_fill(a, gate, p); });
  const double cp = seconds(3, [&] { kernels::parallel::carrier_fill(b, gate, p); });
  report("carrier_fill", cs, cp, a == b);

  std::vector<std::vector<double>> drives(4, std::vector<double>(cells * spb));
  for (auto& d : drives)
    for (auto& v : d) v = (eng() & 1u) ? 9.6 : 2.4;
  std::vector<std::span<const double>> spans(drives.begin(), drives.end());
  const double ws = seconds(5, [&] { kernels::serial::wired_and(spans, a); });
  const double wp = seconds(5, [&] { kernels::parallel::wired_and(spans, b); });
  report("wired_and", ws, wp, a == b);

  SweepSpec spec;
  spec.sigmas = {0.0, 0.5, 1.0};
  spec.trials = 200;
  spec.base_noise.seed = 11;
  PhyConfig cfg;
  std::vector<BerRow> rs, rp;
  const double ss = seconds(1, [&] { rs = sweep_noise_serial(spec, cfg); });
  const double sp = seconds(1, [&] { rp = sweep_noise(spec, cfg); });
  report("sweep_noise (600 tx)", ss, sp, rs == rp);
  return rs == rp ? 0 : 1;
}
