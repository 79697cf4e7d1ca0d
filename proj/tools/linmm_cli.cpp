// linmm: command-line front end for the LIN-MM bus simulator.
//
//   linmm simulate --config run.cfg --out out/ [--seed N] [--export-waveform]
//   linmm figures  frame|propagation --config run.cfg --out out/ [--seed N]
//   linmm sweep    --config run.cfg --out out/ [--seed N] [--sigmas 0,0.5] [--trials N]
//
// Exit codes: 0 success, 1 declared expectation not met, 2 usage/config error.

#include "linmm/report.hpp"
#include "linmm/run_config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace linmm;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  // Written to a temporary sibling and renamed into place.
  void write(const std::string& name, const std::string& content) {
    const fs::path final_path = dir_ / name;
    const fs::path tmp = dir_ / (name + ".tmp");
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      os << content;
      if (!os) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, final_path);
    files_.push_back(name);
  }

  void manifest(const std::string& command, const RunConfig& rc) {
    nlohmann::ordered_json m;
    m["tool"] = "linmm";
    m["version"] = kToolVersion;
    m["command"] = command;
    m["config_sha256"] = sha256_hex(rc.canonical);
    m["seed"] = rc.noise.seed;
    m["outputs"] = files_;
    write("manifest.json", m.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

RunConfig load(const CommonArgs& a) {
  RunConfig rc = load_run_config(a.config);
  if (a.seed) {
    rc.noise.seed = *a.seed;
    rc.sweep.base_noise.seed = *a.seed;
    rc.canonical += "--seed=" + std::to_string(*a.seed) + "\n";
  }
  rc.sweep.base_noise.spike_rate = rc.noise.spike_rate;
  rc.sweep.base_noise.spike_amplitude = rc.noise.spike_amplitude;
  rc.sweep.base_noise.spike_width = rc.noise.spike_width;
  rc.sweep.base_noise.seed = rc.noise.seed;
  return rc;
}

SimReport simulate(const RunConfig& rc) {
  return run_transaction(rc.topology, rc.request_id, rc.scenario, rc.noise, rc.phy, rc.timing);
}

template <class Writer>
std::string to_text(Writer&& w) {
  std::ostringstream os;
  w(os);
  return os.str();
}

int cmd_simulate(const CommonArgs& a, bool export_waveform) {
  const RunConfig rc = load(a);
  const SimReport rep = simulate(rc);
  Outputs out(a.out);
  out.write("report.json", report_to_json(rep).dump(2) + "\n");
  if (export_waveform) {
    out.write("bus_waveform.csv", to_text([&](std::ostream& os) { write_waveform_csv(os, rep.bus); }));
    out.write("demod_trace.csv", to_text([&](std::ostream& os) { write_demod_trace_csv(os, rep.trace); }));
  }
  out.manifest("simulate", rc);

  std::printf("scenario=%s checksum=%s mac=%s outcome=%s\n", rep.scenario.c_str(),
              to_string(rep.checksum_verdict).c_str(), to_string(rep.mac_verdict).c_str(),
              to_string(rep.outcome).c_str());
  const auto misses = check_expectations(rc.expect, rep);
  for (const auto& m : misses) std::fprintf(stderr, "expectation not met: %s\n", m.c_str());
  return misses.empty() ? 0 : 1;
}

std::string figure_frame(const RunConfig& rc, const SimReport& rep) {
  const int spb = rc.phy.samples_per_bit();
  std::ostringstream os;
  os << "time_s,bus_voltage_v,mac_bit\n";
  const auto mac_first = static_cast<std::int64_t>(std::llround(rep.mac_slot_start_time * rc.phy.sample_rate));
  char line[96];
  for (std::size_t i = 0; i < rep.bus.size(); ++i) {
    const auto rel = static_cast<std::int64_t>(i) - mac_first;
    int bit = 0;
    if (rep.mac_transmitted && rep.response_found && rel >= 0 && rel < std::int64_t{kMacBits} * spb)
      bit = rep.mac_transmitted->bit(static_cast<int>(rel / spb));
    std::snprintf(line, sizeof line, "%.12g,%.12g,%d\n", rep.bus.time(static_cast<std::int64_t>(i)),
                  rep.bus.samples[i], bit);
    os << line;
  }
  return os.str();
}

std::string figure_propagation(const RunConfig& rc, const SimReport& rep) {
  const int spb = rc.phy.samples_per_bit();
  std::ostringstream os;
  os << "time_s,tx_mac_bit,rx_mac_bit\n";
  const auto mac_first = static_cast<std::int64_t>(std::llround(rep.mac_slot_start_time * rc.phy.sample_rate));
  std::size_t next = 0;
  int rx = 0;
  char line[96];
  for (std::size_t i = 0; i < rep.bus.size(); ++i) {
    const auto rel = static_cast<std::int64_t>(i) - mac_first;
    int tx = 0;
    if (rep.mac_transmitted && rep.response_found && rel >= 0 && rel < std::int64_t{kMacBits} * spb)
      tx = rep.mac_transmitted->bit(static_cast<int>(rel / spb));
    // The reconstructed bit is output at its decision instant and held.
    while (next < rep.trace.size() && mac_first + rep.trace[next].decision_sample <= static_cast<std::int64_t>(i))
      rx = rep.trace[next++].mac_bit;
    if (next == rep.trace.size() && !rep.trace.empty() &&
        static_cast<std::int64_t>(i) >= mac_first + rep.trace.back().decision_sample + spb)
      rx = 0;
    std::snprintf(line, sizeof line, "%.12g,%d,%d\n", rep.bus.time(static_cast<std::int64_t>(i)), tx, rx);
    os << line;
  }
  return os.str();
}

int cmd_figures(const CommonArgs& a, const std::string& which) {
  const RunConfig rc = load(a);
  const SimReport rep = simulate(rc);
  Outputs out(a.out);
  if (which == "frame")
    out.write("fig_frame.csv", figure_frame(rc, rep));
  else
    out.write("fig_propagation.csv", figure_propagation(rc, rep));
  out.manifest("figures " + which, rc);
  return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& sigmas, std::optional<int> trials) {
  RunConfig rc = load(a);
  if (!sigmas.empty()) {
    rc.sweep.sigmas.clear();
    std::stringstream ss(sigmas);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        rc.sweep.sigmas.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("bad sigma value: " + item);
      }
    }
    rc.canonical += "--sigmas=" + sigmas + "\n";
  }
  if (trials) {
    rc.sweep.trials = *trials;
    rc.canonical += "--trials=" + std::to_string(*trials) + "\n";
  }
  rc.validate();
  const auto rows = sweep_noise(rc.sweep, rc.phy, rc.timing);
  Outputs out(a.out);
  out.write("ber.csv", to_text([&](std::ostream& os) { write_ber_csv(os, rows); }));
  out.manifest("sweep", rc);

  std::printf("%10s %12s %14s %13s %7s\n", "sigma_v", "mac_ber", "frame_err_rate", "mac_fail_rate", "trials");
  for (const auto& r : rows)
    std::printf("%10.4g %12.4g %14.4g %13.4g %7d\n", r.sigma, r.mac_ber, r.frame_err_rate, r.mac_fail_rate, r.trials);
  return 0;
}

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config, "Run configuration file")->required();
  sub->add_option("--out", a.out, "Output directory");
  sub->add_option("--seed", a.seed, "Override noise.seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LIN-MM bus simulator"};
  app.require_subcommand(1);

  CommonArgs sim_args, fig_args, sweep_args;
  bool export_waveform = false;
  std::string figure;
  std::string sigmas;
  std::optional<int> trials;

  auto* sim = app.add_subcommand("simulate", "Run one configured transaction");
  add_common(sim, sim_args);
  sim->add_flag("--export-waveform", export_waveform, "Also write bus waveform and demodulator trace CSVs");

  auto* fig = app.add_subcommand("figures", "Emit figure datasets (frame, propagation)");
  fig->add_option("which", figure, "frame or propagation")->required()->check(CLI::IsMember({"frame", "propagation"}));
  add_common(fig, fig_args);

  auto* sweep = app.add_subcommand("sweep", "Gaussian noise sweep, BER table");
  add_common(sweep, sweep_args);
  sweep->add_option("--sigmas", sigmas, "Comma-separated noise sigmas in volts");
  sweep->add_option("--trials", trials, "Trials per sigma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(sim_args, export_waveform);
    if (*fig) return cmd_figures(fig_args, figure);
    if (*sweep) return cmd_sweep(sweep_args, sigmas, trials);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
