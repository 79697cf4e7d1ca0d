#include "linmm/phy_demod.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace linmm {

using cplx = std::complex<double>;

BandpassFilter::BandpassFilter(std::vector<Biquad> sections)
    : sections_(std::move(sections)), state_(sections_.size(), {0.0, 0.0}) {}

BandpassFilter BandpassFilter::design(const PhyConfig& cfg) {
  const double fs = cfg.sample_rate;
  const int order = cfg.filter_order;
  if (!(cfg.filter_low > 0.0 && cfg.filter_low < cfg.filter_high && 2.0 * cfg.filter_high < fs))
    throw ConfigError("band-pass corners must satisfy 0 < low < high < fs/2");

  const double wl = 2.0 * fs * std::tan(std::numbers::pi * cfg.filter_low / fs);
  const double wh = 2.0 * fs * std::tan(std::numbers::pi * cfg.filter_high / fs);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  std::vector<Biquad> sections;
  for (int k = 1; k <= order; ++k) {
    const cplx p = std::polar(1.0, std::numbers::pi * (2.0 * k + order - 1) / (2.0 * order));
    const cplx pb = p * bw;
    const cplx disc = std::sqrt(pb * pb - 4.0 * w0sq);
    for (const cplx s : {(pb + disc) / 2.0, (pb - disc) / 2.0}) {
      const cplx z = (2.0 * fs + s) / (2.0 * fs - s);
      if (std::abs(z) >= 1.0) throw ConfigError("band-pass design produced an unstable pole");
      if (z.imag() <= 0.0) continue;
      sections.push_back(Biquad{1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    }
  }
  if (static_cast<int>(sections.size()) != order) throw ConfigError("band-pass design failed to pair poles");

  BandpassFilter f(std::move(sections));
  // Unit gain at the prewarped geometric centre.
  const double centre = fs / std::numbers::pi * std::atan(std::sqrt(w0sq) / (2.0 * fs));
  const double g = 1.0 / f.magnitude(centre, fs);
  auto& s0 = f.sections_.front();
  s0.b0 *= g;
  s0.b1 *= g;
  s0.b2 *= g;
  return f;
}

double BandpassFilter::step(double x) {
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    const auto& c = sections_[i];
    auto& s = state_[i];
    const double y = c.b0 * x + s[0];
    s[0] = c.b1 * x - c.a1 * y + s[1];
    s[1] = c.b2 * x - c.a2 * y;
    x = y;
  }
  return x;
}

void BandpassFilter::reset() { std::fill(state_.begin(), state_.end(), std::array<double, 2>{0.0, 0.0}); }

double BandpassFilter::magnitude(double f, double fs) const {
  const cplx zi = std::polar(1.0, -2.0 * std::numbers::pi * f / fs);
  cplx h = 1.0;
  for (const auto& c : sections_)
    h *= (c.b0 + c.b1 * zi + c.b2 * zi * zi) / (1.0 + c.a1 * zi + c.a2 * zi * zi);
  return std::abs(h);
}

Waveform bandpass_filter(const Waveform& w, const PhyConfig& cfg) {
  auto f = BandpassFilter::design(cfg);
  Waveform out{w.sample_rate, w.t0, std::vector<double>(w.size())};
  for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] = f.step(w.samples[i]);
  return out;
}

Bitstream standard_lin_decode(const Waveform& w, const PhyConfig& cfg, BitClock clock, int n_cells) {
  const int spb = cfg.samples_per_bit();
  if (n_cells < 0) throw std::invalid_argument("negative cell count");
  const std::int64_t last = clock.start_sample + static_cast<std::int64_t>(n_cells) * spb;
  if (clock.start_sample < 0 || last > static_cast<std::int64_t>(w.size()))
    throw std::out_of_range("decode window exceeds waveform");
  const double lo = cfg.rx_dominant_volts(), hi = cfg.rx_recessive_volts();
  Bitstream bits(static_cast<std::size_t>(n_cells));
  std::uint8_t prev = 1;
  for (int k = 0; k < n_cells; ++k) {
    const double v = w.samples[static_cast<std::size_t>(clock.start_sample + std::int64_t{k} * spb + spb / 2)];
    if (v < lo)
      prev = 0;
    else if (v > hi)
      prev = 1;
    bits[static_cast<std::size_t>(k)] = prev;
  }
  return bits;
}

std::optional<std::int64_t> find_falling_edge(const Waveform& w, const PhyConfig& cfg, std::int64_t from,
                                              std::int64_t to) {
  constexpr int kConfirm = 4;
  const double lo = cfg.rx_dominant_volts();
  const auto n = static_cast<std::int64_t>(w.size());
  to = std::min(to < 0 ? n : to, n - kConfirm + 1);
  for (std::int64_t i = std::max<std::int64_t>(from, 1); i < to; ++i) {
    if (w.samples[static_cast<std::size_t>(i)] >= lo || w.samples[static_cast<std::size_t>(i - 1)] < lo) continue;
    bool held = true;
    for (int k = 1; k < kConfirm && held; ++k) held = w.samples[static_cast<std::size_t>(i + k)] < lo;
    if (held) return i;
  }
  return std::nullopt;
}

PulseEvents comparator(const Waveform& w, const PhyConfig& cfg) {
  PulseEvents ev{w.sample_rate, w.t0, {}};
  const double th = cfg.comparator_threshold;
  const double rearm = cfg.comparator_rearm_fraction * th;
  bool armed = true;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = w.samples[i];
    if (armed && v >= th) {
      ev.samples.push_back(static_cast<std::int64_t>(i));
      armed = false;
    } else if (!armed && v < rearm) {
      armed = true;
    }
  }
  return ev;
}

MacReconstruction reconstruct_mac(const PulseEvents& events, BitClock clock, int n_bits, const PhyConfig& cfg) {
  const int spb = cfg.samples_per_bit();
  MacReconstruction r;
  r.bits.resize(static_cast<std::size_t>(n_bits));
  r.trace.resize(static_cast<std::size_t>(n_bits));
  // Events are sorted; walk them once alongside the cell grid.
  auto it = std::lower_bound(events.samples.begin(), events.samples.end(), clock.start_sample);
  for (int k = 0; k < n_bits; ++k) {
    const std::int64_t cell_end = clock.start_sample + std::int64_t{k + 1} * spb;
    int count = 0;
    while (it != events.samples.end() && *it < cell_end) {
      ++count;
      ++it;
    }
    auto& rec = r.trace[static_cast<std::size_t>(k)];
    rec.cell_index = k;
    rec.pulse_count = count;
    rec.mac_bit = count >= cfg.pulse_threshold ? 1 : 0;
    rec.decision_sample = cell_end;
    rec.decision_time = events.t0 + static_cast<double>(cell_end) / events.sample_rate;
    r.bits[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(rec.mac_bit);
  }
  return r;
}

void write_demod_trace_csv(std::ostream& os, const DemodTrace& trace) {
  os << "cell_index,pulse_count,mac_bit,decision_time_s\n";
  char line[96];
  for (const auto& r : trace) {
    std::snprintf(line, sizeof line, "%d,%d,%d,%.12g\n", r.cell_index, r.pulse_count, r.mac_bit, r.decision_time);
    os << line;
  }
}

std::string to_string(MacVerdict v) {
  switch (v) {
    case MacVerdict::pass: return "pass";
    case MacVerdict::fail: return "fail";
    case MacVerdict::absent: return "absent";
  }
  return "unknown";
}

ReceiveResult receive_linmm_response(const Waveform& w, const PhyConfig& cfg, const std::optional<MacKey>& key,
                                     std::uint8_t pid, const ReceiveOptions& opt) {
  const int spb = cfg.samples_per_bit();
  const int cells = response_cells(opt.data_len, opt.inter_byte_space);
  // Frames too short for a tag are plain LIN; only the decode branch runs.
  const bool mac_fits = opt.slot_map.start_slot >= 0 && opt.slot_map.start_slot + kMacBits <= cells;
  if (mac_fits) opt.slot_map.validate(cells);

  ReceiveResult r;
  const auto start = find_falling_edge(w, cfg, opt.search_from, opt.search_to);
  if (!start || *start + std::int64_t{cells} * spb > static_cast<std::int64_t>(w.size())) {
    r.parse.status = ParseStatus::truncated;
    r.mac_verdict = key ? MacVerdict::fail : MacVerdict::absent;
    return r;
  }
  r.response_found = true;
  r.response_start_sample = *start;
  r.response_start_time = w.time(*start);
  const BitClock clock{*start};
  const BitClock mac_clock{*start + std::int64_t{opt.slot_map.start_slot} * spb};

  // Two independent branches over the same samples.
  MacReconstruction mac;
#pragma omp parallel sections if (w.size() > 200000)
  {
#pragma omp section
    { r.bits = standard_lin_decode(w, cfg, clock, cells); }
#pragma omp section
    {
      if (mac_fits) mac = reconstruct_mac(comparator(bandpass_filter(w, cfg), cfg), mac_clock, kMacBits, cfg);
    }
  }

  r.parse = parse_response(r.bits, opt.data_len, opt.checksum_model, pid, opt.inter_byte_space);
  if (!mac_fits) {
    r.mac_verdict = key ? MacVerdict::fail : MacVerdict::absent;
    return r;
  }
  r.mac_bits = mac.bits;
  r.trace = std::move(mac.trace);
  r.mac = MacTag::from_bits(r.mac_bits);
  r.mac_available_time = r.trace.back().decision_time;

  if (!key) {
    r.mac_verdict = MacVerdict::absent;
  } else if (r.parse.status == ParseStatus::framing_error) {
    r.mac_verdict = MacVerdict::fail;
  } else {
    std::vector<std::uint8_t> data(r.parse.raw.begin(), r.parse.raw.begin() + opt.data_len);
    r.mac_verdict = verify_tag(*key, auth_message(pid, data, opt.mac_profile), *r.mac) ? MacVerdict::pass
                                                                                         : MacVerdict::fail;
  }
  return r;
}

}  // namespace linmm
