#include "linmm/bus_sim.hpp"

#include "linmm/kernels.hpp"
#include "linmm/phy_synth.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <set>

namespace linmm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// ---- topology / noise ------------------------------------------------------

void Topology::validate() const {
  int masters = 0, slaves = 0;
  std::set<int> ids;
  for (const auto& n : nodes) {
    if (n.role == NodeRole::master) ++masters;
    if (n.role != NodeRole::slave) continue;
    ++slaves;
    for (int id : n.ids) {
      (void)FrameId(id);
      if (!ids.insert(id).second) throw ConfigError("frame id " + std::to_string(id) + " answered by two slaves");
    }
    if (n.data.empty() || n.data.size() > 8) throw ConfigError("slave " + n.name + " needs 1..8 data bytes");
    if (n.capability == Capability::lin_mm) {
      if (!n.key) throw ConfigError("LIN-MM slave " + n.name + " has no key");
      if (response_cells(static_cast<int>(n.data.size())) < kMacBits)
        throw ConfigError("LIN-MM slave " + n.name + " response too short for 64 MAC cells");
    }
  }
  if (masters != 1) throw ConfigError("a bus segment needs exactly one master");
  if (slaves > 15) throw ConfigError("at most 15 slaves per bus");
}

const Node& Topology::master() const {
  for (const auto& n : nodes)
    if (n.role == NodeRole::master) return n;
  throw ConfigError("no master node");
}

const Node* Topology::responder(int id) const {
  for (const auto& n : nodes)
    if (n.role == NodeRole::slave && std::find(n.ids.begin(), n.ids.end(), id) != n.ids.end()) return &n;
  return nullptr;
}

void NoiseModel::validate() const {
  if (gaussian_sigma < 0 || spike_rate < 0 || spike_amplitude < 0 || spike_width < 0)
    throw ConfigError("noise parameters must be non-negative");
}

std::vector<double> NoiseModel::render(std::size_t n, double sample_rate) const {
  std::vector<double> out(n, 0.0);
  if (gaussian_sigma > 0.0) {
    std::mt19937_64 eng(splitmix64(seed));
    std::normal_distribution<double> g(0.0, gaussian_sigma);
    for (auto& v : out) v = g(eng);
  }
  if (spike_rate > 0.0 && spike_amplitude > 0.0 && n > 0) {
    std::mt19937_64 eng(splitmix64(seed ^ 0x5370696B65ull));
    const double duration = static_cast<double>(n) / sample_rate;
    std::poisson_distribution<long> count(spike_rate * duration);
    std::uniform_int_distribution<std::size_t> where(0, n - 1);
    std::bernoulli_distribution sign(0.5);
    const auto width = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(spike_width * sample_rate)));
    for (long k = count(eng); k > 0; --k) {
      const std::size_t at = where(eng);
      const double a = sign(eng) ? spike_amplitude : -spike_amplitude;
      for (std::size_t i = at; i < std::min(n, at + width); ++i) out[i] += a;
    }
  }
  return out;
}

// ---- bus combination and monitoring ----------------------------------------

std::optional<int> transmit_monitor(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> observed) {
  const std::size_t n = std::min(sent.size(), observed.size());
  for (std::size_t i = 0; i < n; ++i)
    if (sent[i] != observed[i]) return static_cast<int>(i);
  return std::nullopt;
}

Waveform combine_bus(std::span<const Waveform> drives, std::span<const Waveform> carriers,
                     std::span<const double> noise) {
  if (drives.empty()) throw std::invalid_argument("combine_bus needs at least one driver");
  const auto& ref = drives.front();
  auto aligned = [&ref](const Waveform& w) {
    return w.sample_rate == ref.sample_rate && w.size() == ref.size() &&
           std::abs(w.t0 - ref.t0) <= 0.5 / ref.sample_rate;
  };
  std::vector<std::span<const double>> spans;
  for (const auto& d : drives) {
    if (!aligned(d)) throw std::invalid_argument("combine_bus: misaligned drive waveform");
    spans.emplace_back(d.samples);
  }
  Waveform bus{ref.sample_rate, ref.t0, std::vector<double>(ref.size())};
  kernels::parallel::wired_and(spans, bus.samples);
  for (const auto& c : carriers) {
    if (!aligned(c)) throw std::invalid_argument("combine_bus: misaligned carrier waveform");
    kernels::parallel::add_into(bus.samples, c.samples);
  }
  if (!noise.empty()) {
    if (noise.size() != bus.size()) throw std::invalid_argument("combine_bus: noise length mismatch");
    kernels::parallel::add_into(bus.samples, noise);
  }
  return bus;
}

SegmentResult simulate_segment(const std::vector<Transmission>& tx, int total_cells, std::span<const double> noise,
                               const PhyConfig& cfg) {
  const int spb = cfg.samples_per_bit();
  const auto n = static_cast<std::size_t>(total_cells) * static_cast<std::size_t>(spb);
  for (const auto& t : tx) {
    if (t.first_cell < 0 || t.first_cell + static_cast<int>(t.bits.size()) > total_cells)
      throw ConfigError("transmission of " + t.node + " falls outside the timeline");
    if (!t.carrier_gate.empty() && t.carrier_gate.size() != t.bits.size())
      throw ConfigError("carrier gate of " + t.node + " does not match its bits");
  }

  SegmentResult res;
  res.abort_cell.assign(tx.size(), -1);
  for (;;) {
    std::vector<Waveform> drives;
    std::vector<Waveform> carriers;
    drives.push_back(Waveform{cfg.sample_rate, 0.0, std::vector<double>(n, cfg.recessive_volts())});
    for (std::size_t k = 0; k < tx.size(); ++k) {
      const auto& t = tx[k];
      const int len = static_cast<int>(t.bits.size());
      const int stop = res.abort_cell[k] < 0 ? len : res.abort_cell[k] - t.first_cell + 1;
      Bitstream full(static_cast<std::size_t>(total_cells), 1);
      std::copy_n(t.bits.begin(), stop, full.begin() + t.first_cell);
      drives.push_back(bits_to_waveform(full, cfg));
      if (!t.carrier_gate.empty()) {
        std::vector<std::uint8_t> gate(t.carrier_gate.begin(), t.carrier_gate.begin() + stop);
        const Waveform part = gated_carrier(gate, cfg);
        Waveform c{cfg.sample_rate, 0.0, std::vector<double>(n, 0.0)};
        std::copy(part.samples.begin(), part.samples.end(),
                  c.samples.begin() + static_cast<std::ptrdiff_t>(t.first_cell) * spb);
        carriers.push_back(std::move(c));
      }
    }
    res.bus = combine_bus(drives, carriers, noise);
    res.observed = standard_lin_decode(res.bus, cfg, BitClock{0}, total_cells);

    int earliest = INT_MAX;
    std::vector<std::pair<std::size_t, int>> hits;
    for (std::size_t k = 0; k < tx.size(); ++k) {
      const auto& t = tx[k];
      if (!t.monitors || res.abort_cell[k] >= 0) continue;
      const auto mm = transmit_monitor(
          t.bits, std::span<const std::uint8_t>(res.observed).subspan(static_cast<std::size_t>(t.first_cell), t.bits.size()));
      if (!mm) continue;
      const int cell = t.first_cell + *mm;
      if (cell < earliest) {
        earliest = cell;
        hits.clear();
      }
      if (cell == earliest) hits.emplace_back(k, cell);
    }
    if (hits.empty()) break;
    for (auto [k, cell] : hits) {
      res.abort_cell[k] = cell;
      res.collisions.push_back(CollisionEvent{tx[k].node, cell, static_cast<double>(cell) / cfg.baud});
    }
  }
  return res;
}

// ---- arbitration helpers ---------------------------------------------------

std::optional<std::vector<std::uint8_t>> make_winning_forgery(std::span<const std::uint8_t> legit, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, int>> ones;
  for (std::size_t i = 0; i < legit.size(); ++i)
    for (int b = 0; b < 8; ++b)
      if ((legit[i] >> b) & 1u) ones.emplace_back(i, b);
  if (ones.empty()) return std::nullopt;
  std::mt19937_64 eng(splitmix64(seed));
  const auto [byte, bit] = ones[std::uniform_int_distribution<std::size_t>(0, ones.size() - 1)(eng)];
  std::vector<std::uint8_t> forged(legit.begin(), legit.end());
  std::uniform_int_distribution<int> rnd(0, 255);
  const auto keep = static_cast<std::uint8_t>((1u << bit) - 1u);  // bits sent before the winning bit
  const auto high = static_cast<std::uint8_t>(rnd(eng) & ~((keep << 1) | 1u));
  forged[byte] = static_cast<std::uint8_t>((legit[byte] & keep) | high);
  for (std::size_t i = byte + 1; i < forged.size(); ++i) forged[i] = static_cast<std::uint8_t>(rnd(eng));
  return forged;
}

bool pid_wins_arbitration(std::uint8_t attacker_pid, std::uint8_t master_pid) {
  const unsigned diff = attacker_pid ^ master_pid;
  if (diff == 0) return false;
  const int first = std::countr_zero(diff);  // LSB goes first on the wire
  return ((attacker_pid >> first) & 1u) == 0;
}

// ---- transactions ----------------------------------------------------------

namespace {

struct Layout {
  HeaderFrame header;
  int header_first = 0;
  int pid_first = 0;
  int response_first = 0;
  int total_cells = 0;
};

Layout make_layout(int request_id, const TransactionTiming& timing) {
  Layout l;
  l.header = HeaderFrame{timing.break_bits, timing.break_delimiter_bits, compute_pid(request_id)};
  l.header_first = timing.lead_in_cells;
  l.pid_first = l.header_first + timing.break_bits + timing.break_delimiter_bits + kCellsPerByte;
  l.response_first = l.header_first + header_cells(l.header) + timing.response_space_cells;
  l.total_cells = l.response_first + response_cells(8, timing.inter_byte_space) + timing.trailing_cells;
  return l;
}

ChecksumModel model_for(const Node* n, int id) {
  return (n && n->checksum_model) ? *n->checksum_model : default_checksum_model(id);
}

Transmission response_tx(const Node& slave, std::uint8_t pid, int first_cell, const TransactionTiming& timing,
                         const std::vector<std::uint8_t>& data, std::optional<MacTag>* mac_out) {
  const int id = id_of_pid(pid);
  Transmission t{slave.name, first_cell, serialize_response(make_response(data, model_for(&slave, id), pid),
                                                            timing.inter_byte_space), {}, true};
  if (slave.capability == Capability::lin_mm && slave.key) {
    const MacTag mac = compute_mac(*slave.key, pid, data);
    t.carrier_gate = MacSlotMap{}.gate(mac, static_cast<int>(t.bits.size()));
    if (mac_out) *mac_out = mac;
  }
  return t;
}

std::optional<std::uint8_t> readback_pid(const Bitstream& observed, const Layout& l) {
  auto sync = decode_byte_cells(std::span<const std::uint8_t>(observed).subspan(static_cast<std::size_t>(l.pid_first - kCellsPerByte), kCellsPerByte));
  auto pid = decode_byte_cells(std::span<const std::uint8_t>(observed).subspan(static_cast<std::size_t>(l.pid_first), kCellsPerByte));
  if (!sync || *sync != kSyncByte || !pid || !pid_parity_ok(*pid)) return std::nullopt;
  return pid;
}

void master_receive(SimReport& r, const Topology& topo, const Waveform& bus, const Layout& l, const PhyConfig& cfg,
                    const TransactionTiming& timing) {
  const int spb = cfg.samples_per_bit();
  r.response_slot_time = static_cast<double>(l.response_first) / cfg.baud;
  if (!r.observed_pid) return;
  const int id = id_of_pid(*r.observed_pid);
  const Node* expected = topo.responder(id);
  if (!expected) return;

  const bool master_mm = topo.master().capability == Capability::lin_mm;
  std::optional<MacKey> key;
  if (master_mm && expected->capability == Capability::lin_mm) key = expected->key;
  r.master_expects_mac = key.has_value();

  ReceiveOptions opt;
  opt.data_len = static_cast<int>(expected->data.size());
  opt.checksum_model = model_for(expected, id);
  opt.inter_byte_space = timing.inter_byte_space;
  opt.search_from = static_cast<std::int64_t>(l.response_first - timing.response_space_cells) * spb;
  opt.search_to = static_cast<std::int64_t>(l.response_first + 8) * spb;
  if (response_cells(opt.data_len, opt.inter_byte_space) < kMacBits && key) key.reset();

  const ReceiveResult rx = receive_linmm_response(bus, cfg, key, *r.observed_pid, opt);
  r.response_found = rx.response_found;
  r.checksum_verdict = rx.parse.status;
  r.error_byte_index = rx.parse.byte_index;
  r.decoded_bytes = rx.parse.raw;
  r.mac_verdict = key ? rx.mac_verdict : MacVerdict::absent;
  if (rx.response_found) {
    r.response_start_time = rx.response_start_time;
    r.mac_slot_start_time = rx.response_start_time;
    if (key) {
      r.mac_reconstructed = rx.mac;
      r.mac_available_time = rx.mac_available_time;
      r.trace = rx.trace;
    }
  }
}

bool accepted(const SimReport& r) {
  return r.checksum_verdict == ParseStatus::ok &&
         (r.mac_verdict == MacVerdict::pass || (!r.master_expects_mac && r.mac_verdict == MacVerdict::absent));
}

std::vector<std::uint8_t> accepted_data(const SimReport& r) {
  if (r.decoded_bytes.empty()) return {};
  return {r.decoded_bytes.begin(), r.decoded_bytes.end() - 1};
}

Outcome classify(bool attack, bool goal_met, const SimReport& r) {
  if (!attack) return Outcome::none;
  if (goal_met) return Outcome::succeeded;
  if (r.mac_verdict == MacVerdict::fail) return Outcome::blocked;
  return Outcome::detected;
}

}  // namespace

SimReport run_transaction(const Topology& topo, int request_id, const AttackScenario& sc, const NoiseModel& noise,
                          const PhyConfig& cfg, const TransactionTiming& timing) {
  cfg.validate();
  topo.validate();
  noise.validate();
  if (sc.type == AttackType::mitm) return run_mitm(topo, request_id, sc, noise, cfg, timing);

  const Layout l = make_layout(request_id, timing);
  const int spb = cfg.samples_per_bit();
  const auto noise_samples = noise.render(static_cast<std::size_t>(l.total_cells) * spb, cfg.sample_rate);

  SimReport r;
  r.scenario = to_string(sc.type);
  r.intended_id = request_id;
  r.intended_pid = l.header.pid;
  const Node* victim = topo.responder(request_id);
  if (victim) r.legit_data = victim->data;

  // Header phase: who owns the PID on the wire.
  std::vector<Transmission> tx;
  tx.push_back(Transmission{topo.master().name, l.header_first, serialize_header(l.header), {}, true});
  if (sc.type == AttackType::header_collision) {
    HeaderFrame forged = l.header;
    forged.pid = compute_pid(sc.redirect_id);
    tx.push_back(Transmission{"attacker", l.header_first, serialize_header(forged), {}, false});
  }
  r.observed_pid = readback_pid(simulate_segment(tx, l.total_cells, noise_samples, cfg).observed, l);

  // Response phase.
  const Node* responder = r.observed_pid ? topo.responder(id_of_pid(*r.observed_pid)) : nullptr;
  const bool victim_silent = sc.type == AttackType::spoofing;
  if (responder && !(victim_silent && responder == victim)) {
    r.responder = responder->name;
    tx.push_back(response_tx(*responder, *r.observed_pid, l.response_first, timing, responder->data, &r.mac_transmitted));
  }
  if (r.observed_pid && (sc.type == AttackType::spoofing || sc.type == AttackType::response_collision)) {
    const int id = id_of_pid(*r.observed_pid);
    Transmission att{"attacker", l.response_first,
                     serialize_response(make_response(sc.forged_data, model_for(responder, id), *r.observed_pid),
                                        timing.inter_byte_space),
                     {}, false};
    if (sc.forged_carrier == ForgedCarrier::random)
      att.carrier_gate = MacSlotMap{}.gate(MacTag(splitmix64(sc.attacker_seed)), static_cast<int>(att.bits.size()));
    tx.push_back(std::move(att));
  }
  if (sc.type == AttackType::dos) {
    const int first = l.response_first + sc.dos_first_cell;
    const int len = std::clamp(sc.dos_cells, 0, l.total_cells - first);
    tx.push_back(Transmission{"attacker", first, Bitstream(static_cast<std::size_t>(len), 0), {}, false});
  }

  SegmentResult seg = simulate_segment(tx, l.total_cells, noise_samples, cfg);
  r.collisions = seg.collisions;
  master_receive(r, topo, seg.bus, l, cfg, timing);
  r.bus = std::move(seg.bus);

  const bool ok = accepted(r);
  const auto data = accepted_data(r);
  bool goal = false;
  switch (sc.type) {
    case AttackType::none: break;
    case AttackType::spoofing: goal = ok && data == sc.forged_data; break;
    case AttackType::response_collision: goal = ok && data != r.legit_data; break;
    case AttackType::header_collision: goal = ok && r.observed_pid && id_of_pid(*r.observed_pid) != request_id; break;
    case AttackType::dos: goal = !(ok && data == r.legit_data); break;
    case AttackType::mitm: break;
  }
  r.outcome = classify(sc.type != AttackType::none, goal, r);
  return r;
}

SimReport run_mitm(const Topology& topo, int request_id, const AttackScenario& sc, const NoiseModel& noise,
                   const PhyConfig& cfg, const TransactionTiming& timing) {
  cfg.validate();
  topo.validate();
  noise.validate();
  const Layout l = make_layout(request_id, timing);
  const int spb = cfg.samples_per_bit();
  const auto n = static_cast<std::size_t>(l.total_cells) * spb;
  const auto master_noise = noise.render(n, cfg.sample_rate);
  NoiseModel slave_model = noise;
  slave_model.seed = splitmix64(noise.seed ^ 0x536C617665ull);
  const auto slave_noise = slave_model.render(n, cfg.sample_rate);

  SimReport r;
  r.scenario = "mitm_" + to_string(sc.mitm_mode);
  r.intended_id = request_id;
  r.intended_pid = l.header.pid;
  const Node* victim = topo.responder(request_id);
  if (victim) r.legit_data = victim->data;

  // Master segment, header only; the MitM forwards it bit-for-bit to the slave side.
  std::vector<Transmission> mtx{
      Transmission{topo.master().name, l.header_first, serialize_header(l.header), {}, true}};
  SegmentResult master_seg = simulate_segment(mtx, l.total_cells, master_noise, cfg);
  r.observed_pid = readback_pid(master_seg.observed, l);

  auto capture_slave_side = [&](const std::vector<std::uint8_t>& data, std::optional<MacTag>* mac) {
    std::vector<Transmission> stx{Transmission{"mitm", l.header_first, serialize_header(l.header), {}, true}};
    if (victim) stx.push_back(response_tx(*victim, l.header.pid, l.response_first, timing, data, mac));
    return simulate_segment(stx, l.total_cells, slave_noise, cfg);
  };

  if (victim) r.responder = victim->name;
  SegmentResult slave_seg = capture_slave_side(victim ? victim->data : std::vector<std::uint8_t>{}, &r.mac_transmitted);
  if (sc.mitm_mode == MitmMode::replay && victim) {
    std::optional<MacTag> old_mac;
    slave_seg = capture_slave_side(sc.replay_data, &old_mac);
    r.mac_transmitted = old_mac;
  }

  // Forward the response window onto the master segment.
  const auto win_from = static_cast<std::size_t>(l.response_first - timing.response_space_cells) * spb;
  std::vector<double> relay(slave_seg.bus.samples.begin() + static_cast<std::ptrdiff_t>(win_from),
                            slave_seg.bus.samples.end());
  if (sc.mitm_mode == MitmMode::rewrite && victim) {
    const int data_len = static_cast<int>(victim->data.size());
    const int cells = response_cells(data_len, timing.inter_byte_space);
    const auto start = find_falling_edge(slave_seg.bus, cfg, static_cast<std::int64_t>(win_from), -1);
    if (start && *start + std::int64_t{cells} * spb <= static_cast<std::int64_t>(n)) {
      const Bitstream orig = standard_lin_decode(slave_seg.bus, cfg, BitClock{*start}, cells);
      const ParseResult p = parse_response(orig, data_len, model_for(victim, request_id), l.header.pid,
                                           timing.inter_byte_space);
      if (!p.raw.empty()) {
        std::vector<std::uint8_t> data(p.raw.begin(), p.raw.begin() + data_len);
        data[static_cast<std::size_t>(std::clamp(sc.rewrite_byte, 0, data_len - 1))] ^= sc.rewrite_xor;
        const Bitstream forged =
            serialize_response(make_response(data, model_for(victim, request_id), l.header.pid), timing.inter_byte_space);
        const Waveform old_base = bits_to_waveform(orig, cfg);
        const Waveform new_base = bits_to_waveform(forged, cfg);
        const auto off = static_cast<std::size_t>(*start) - win_from;
        for (std::size_t i = 0; i < new_base.size(); ++i) {
          const double residue = relay[off + i] - old_base.samples[i];  // carrier + slave-side noise
          relay[off + i] = new_base.samples[i] + (sc.relay_carrier ? residue : 0.0);
        }
      }
    }
  }
  for (std::size_t i = 0; i < relay.size(); ++i)
    master_seg.bus.samples[win_from + i] = relay[i] + master_noise[win_from + i];

  r.collisions = master_seg.collisions;
  master_receive(r, topo, master_seg.bus, l, cfg, timing);
  r.bus = std::move(master_seg.bus);

  const bool ok = accepted(r);
  bool goal = false;
  bool attack = true;
  switch (sc.mitm_mode) {
    case MitmMode::passthrough: attack = false; break;
    case MitmMode::rewrite: goal = ok && accepted_data(r) != r.legit_data; break;
    case MitmMode::replay: goal = ok; break;
  }
  r.outcome = classify(attack, goal, r);
  return r;
}

// ---- noise sweep -----------------------------------------------------------

namespace {

struct TrialResult {
  int mac_bit_errors = 0;
  bool frame_error = false;
  bool mac_fail = false;
};

TrialResult run_sweep_trial(const SweepSpec& spec, std::size_t row, std::int64_t trial, const PhyConfig& cfg,
                            const TransactionTiming& timing) {
  const std::uint64_t seed = splitmix64(spec.base_noise.seed ^ splitmix64((static_cast<std::uint64_t>(row) << 32) ^
                                                                          static_cast<std::uint64_t>(trial)));
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  Block128 kb{};
  for (auto& b : kb) b = static_cast<std::uint8_t>(byte(eng));
  std::vector<std::uint8_t> data(static_cast<std::size_t>(spec.data_len));
  for (auto& b : data) b = static_cast<std::uint8_t>(byte(eng));
  const int id = std::uniform_int_distribution<int>(0, 0x3B)(eng);

  Topology topo;
  topo.nodes.push_back(Node{"master", NodeRole::master, {}, Capability::lin_mm, {}, {}, {}});
  topo.nodes.push_back(Node{"slave", NodeRole::slave, {id}, Capability::lin_mm, MacKey(kb), data, {}});
  NoiseModel nm = spec.base_noise;
  nm.gaussian_sigma = spec.sigmas[row];
  nm.seed = seed;

  const SimReport rep = run_transaction(topo, id, AttackScenario{}, nm, cfg, timing);
  TrialResult t;
  t.mac_bit_errors = rep.mac_reconstructed && rep.mac_transmitted
                         ? std::popcount(rep.mac_reconstructed->value() ^ rep.mac_transmitted->value())
                         : kMacBits;
  t.frame_error = !(rep.checksum_verdict == ParseStatus::ok && accepted_data(rep) == data);
  t.mac_fail = rep.mac_verdict != MacVerdict::pass;
  return t;
}

template <class ForEach>
std::vector<BerRow> sweep_impl(const SweepSpec& spec, const PhyConfig& cfg, const TransactionTiming& timing,
                               ForEach&& for_each) {
  if (spec.trials < 1) throw ConfigError("sweep needs at least one trial per point");
  cfg.validate();
  spec.base_noise.validate();
  std::vector<BerRow> rows;
  for (std::size_t row = 0; row < spec.sigmas.size(); ++row) {
    if (spec.sigmas[row] < 0) throw ConfigError("negative sigma in sweep");
    std::vector<TrialResult> results(static_cast<std::size_t>(spec.trials));
    for_each(spec.trials, [&](std::int64_t t) { results[static_cast<std::size_t>(t)] = run_sweep_trial(spec, row, t, cfg, timing); });
    long bit_errors = 0, frame_errors = 0, mac_fails = 0;
    for (const auto& t : results) {
      bit_errors += t.mac_bit_errors;
      frame_errors += t.frame_error;
      mac_fails += t.mac_fail;
    }
    const double trials = spec.trials;
    rows.push_back(BerRow{spec.sigmas[row], static_cast<double>(bit_errors) / (trials * kMacBits),
                          static_cast<double>(frame_errors) / trials, static_cast<double>(mac_fails) / trials,
                          spec.trials});
  }
  return rows;
}

}  // namespace

std::vector<BerRow> sweep_noise(const SweepSpec& spec, const PhyConfig& cfg, const TransactionTiming& timing) {
  return sweep_impl(spec, cfg, timing, [](std::int64_t n, auto&& fn) { kernels::for_each_trial_parallel(n, fn); });
}

std::vector<BerRow> sweep_noise_serial(const SweepSpec& spec, const PhyConfig& cfg, const TransactionTiming& timing) {
  return sweep_impl(spec, cfg, timing, [](std::int64_t n, auto&& fn) { kernels::for_each_trial_serial(n, fn); });
}

void write_ber_csv(std::ostream& os, const std::vector<BerRow>& rows) {
  os << "sigma_v,mac_ber,frame_err_rate,mac_fail_rate,trials\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%d\n", r.sigma, r.mac_ber, r.frame_err_rate,
                  r.mac_fail_rate, r.trials);
    os << line;
  }
}

// ---- names -----------------------------------------------------------------

std::string to_string(AttackType t) {
  switch (t) {
    case AttackType::none: return "none";
    case AttackType::spoofing: return "spoofing";
    case AttackType::response_collision: return "response_collision";
    case AttackType::header_collision: return "header_collision";
    case AttackType::mitm: return "mitm";
    case AttackType::dos: return "dos";
  }
  return "unknown";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::none: return "none";
    case Outcome::blocked: return "blocked";
    case Outcome::detected: return "detected";
    case Outcome::succeeded: return "succeeded";
  }
  return "unknown";
}

std::string to_string(MitmMode m) {
  switch (m) {
    case MitmMode::passthrough: return "passthrough";
    case MitmMode::rewrite: return "rewrite";
    case MitmMode::replay: return "replay";
  }
  return "unknown";
}

AttackType attack_type_from_string(const std::string& s) {
  for (auto t : {AttackType::none, AttackType::spoofing, AttackType::response_collision, AttackType::header_collision,
                 AttackType::mitm, AttackType::dos})
    if (to_string(t) == s) return t;
  throw ConfigError("unknown scenario type: " + s);
}

Outcome outcome_from_string(const std::string& s) {
  for (auto o : {Outcome::none, Outcome::blocked, Outcome::detected, Outcome::succeeded})
    if (to_string(o) == s) return o;
  throw ConfigError("unknown outcome: " + s);
}

MitmMode mitm_mode_from_string(const std::string& s) {
  for (auto m : {MitmMode::passthrough, MitmMode::rewrite, MitmMode::replay})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown mitm mode: " + s);
}

}  // namespace linmm
