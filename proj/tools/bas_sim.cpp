// bas-sim: run scenarios, compare bundles, summarize captures, serve the API.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "bassim/attack/scenario.hpp"
#include "bassim/capture/flow_stats.hpp"
#include "bassim/harness/bundle.hpp"
#include "bassim/harness/diff.hpp"
#include "bassim/harness/live.hpp"
#include "bassim/harness/simulation.hpp"

namespace {

using namespace bassim;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeFault = 3;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

std::optional<std::optional<double>> parse_speed(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text == "max") return std::optional<double>{};
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (*end != '\0' || !(v > 0)) return std::nullopt;
  return std::optional<double>(v);
}

// Loads the scenario and applies command-line overrides; prints diagnostics.
std::optional<attack::ScenarioConfig> load(const std::string& path, const std::optional<std::uint64_t>& seed,
                                           const std::string& speed) {
  auto config = attack::load_scenario(path);
  if (!config) {
    std::cerr << path << ": " << config.error().to_string() << "\n";
    return std::nullopt;
  }
  if (seed) config->seed = *seed;
  if (!speed.empty()) {
    auto s = parse_speed(speed);
    if (!s) {
      std::cerr << "error: --speed must be a positive number or 'max'\n";
      return std::nullopt;
    }
    config->speed = *s;
  }
  return *config;
}

int cmd_run(const std::string& scenario, const std::string& out, const std::optional<std::uint64_t>& seed,
            const std::string& speed) {
  auto config = load(scenario, seed, speed);
  if (!config) return kConfigError;
  try {
    harness::write_resolved(*config, out);
    harness::Simulation sim(*config, harness::SimulationOptions{out, false});
    harness::Pacer pacer(config->speed);
    sim.start();
    pacer.reset(sim.now());
    while (!sim.done()) {
      const auto wait = pacer.remaining(sim.now() + SimTime::from_whole_seconds(1));
      if (wait > harness::Pacer::Clock::duration::zero()) std::this_thread::sleep_for(wait);
      sim.step();
    }
    sim.finish();
    harness::write_run_outputs(sim, out);
  } catch (const harness::ScenarioError& e) {
    std::cerr << scenario << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const harness::RuntimeFault& e) {
    std::cerr << "runtime fault: " << e.what() << "\n";
    return kRuntimeFault;
  } catch (const std::exception& e) {
    std::cerr << "runtime fault: " << e.what() << "\n";
    return kRuntimeFault;
  }
  return kOk;
}

int cmd_diff(const std::string& baseline, const std::string& attack, const std::string& out) {
  auto report = harness::diff_bundles(baseline, attack);
  if (!report) {
    std::cerr << "error: " << report.error() << "\n";
    return kConfigError;
  }
  const std::string json = report->to_json().dump(2) + "\n";
  std::cout << json;
  if (!out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    std::ofstream j(std::filesystem::path(out) / "diff.json", std::ios::binary);
    j << json;
    std::ofstream c(std::filesystem::path(out) / "diff.csv", std::ios::binary);
    c << report->csv();
    if (ec || !j || !c) {
      std::cerr << "error: cannot write diff output to '" << out << "'\n";
      return kRuntimeFault;
    }
  }
  return kOk;
}

int cmd_pcap_summary(const std::string& path) {
  auto packets = capture::read_pcap_file(path);
  if (!packets) {
    std::cerr << path << ": offset " << packets.error().offset << ": " << packets.error().message << "\n";
    return kConfigError;
  }
  auto stats = capture::summarize_pcap(*packets);
  if (!stats) {
    std::cerr << path << ": " << stats.error().message << "\n";
    return kConfigError;
  }
  std::cout << stats->dump();
  return kOk;
}

int cmd_serve(const std::string& scenario, const std::string& out, const std::optional<std::uint64_t>& seed,
              const std::string& speed, const std::string& host, int port, const std::string& static_dir,
              bool exit_at_end) {
  auto config = load(scenario, seed, speed.empty() ? "1" : speed);
  if (!config) return kConfigError;
  harness::ServeOptions opts;
  opts.out_dir = out;
  opts.host = host;
  opts.port = port;
  opts.speed = config->speed;
  opts.static_dir = static_dir;
  opts.exit_at_end = exit_at_end;
  if (const char* token = std::getenv("BAS_SIM_TOKEN"); token && *token) {
    opts.token = token;
  } else {
    std::cerr << "warning: BAS_SIM_TOKEN is not set; write, attack and sim-control requests will be refused\n";
  }
  opts.on_listening = [&host](int p) { std::cerr << "listening on http://" << host << ":" << p << "\n"; };
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    return harness::serve(*config, opts, g_stop);
  } catch (const harness::ScenarioError& e) {
    std::cerr << scenario << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime fault: " << e.what() << "\n";
    return kRuntimeFault;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Software-in-the-loop BACnet building automation testbed"};
  app.require_subcommand(1);

  std::string scenario, out, speed, host = "127.0.0.1", static_dir;
  std::optional<std::uint64_t> seed;
  int port = 8080;
  bool exit_at_end = false;

  auto* run = app.add_subcommand("run", "Run a scenario and write the dataset bundle");
  run->add_option("scenario", scenario, "Scenario TOML file")->required();
  run->add_option("--out", out, "Bundle directory")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--speed", speed, "Real-time multiple, or 'max'");

  std::string base_dir, attack_dir, diff_out;
  auto* diff = app.add_subcommand("diff", "Compare an attack bundle against a baseline bundle");
  diff->add_option("baseline", base_dir, "Baseline bundle directory")->required();
  diff->add_option("attack", attack_dir, "Attack bundle directory")->required();
  diff->add_option("--out", diff_out, "Directory for diff.json and diff.csv");

  std::string pcap_path;
  auto* pcap = app.add_subcommand("pcap-summary", "Flow statistics of a capture file");
  pcap->add_option("pcap", pcap_path, "Classic pcap file")->required();

  auto* serve = app.add_subcommand("serve", "Run a scenario behind the HTTP API");
  serve->add_option("scenario", scenario, "Scenario TOML file")->required();
  serve->add_option("--out", out, "Bundle directory")->required();
  serve->add_option("--seed", seed, "Override the scenario seed");
  serve->add_option("--speed", speed, "Real-time multiple, or 'max' (default 1)");
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--static", static_dir, "Directory of UI assets to serve at /");
  serve->add_flag("--exit-at-end", exit_at_end, "Stop serving once the scenario ends");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*run) return cmd_run(scenario, out, seed, speed);
  if (*diff) return cmd_diff(base_dir, attack_dir, diff_out);
  if (*pcap) return cmd_pcap_summary(pcap_path);
  if (*serve) return cmd_serve(scenario, out, seed, speed, host, port, static_dir, exit_at_end);
  return kConfigError;
}
