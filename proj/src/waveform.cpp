#include "linmm/waveform.hpp"

#include <cstdio>
#include <ostream>

namespace linmm {

void write_waveform_csv(std::ostream& os, const Waveform& w) {
  os << "time_s,voltage_v\n";
  char line[64];
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    std::snprintf(line, sizeof line, "%.12g,%.12g\n", w.time(static_cast<std::int64_t>(i)), w.samples[i]);
    os << line;
  }
}

}  // namespace linmm
