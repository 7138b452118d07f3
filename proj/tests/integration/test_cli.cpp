#include "doctest.h"

#include "bassim/capture/flow_stats.hpp"
#include "bassim/harness/bundle.hpp"
#include "json.hpp"
#include "support/run_util.hpp"

using namespace bassim;
using namespace bassim::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBin = BAS_SIM_BIN;

ProcessResult bas_sim(const std::string& args) { return run_command(shell_quote(kBin) + " " + args); }

const std::string kShortBaseline = R"(name = "short"
date = "2023-08-01"
duration_h = 1
seed = 11
weather = "synthetic"
speed = "max"
)";

const std::string kShortDos = kShortBaseline + R"(
[[attacks]]
type = "dos"
target_device = "ahu"
rate = 1.0
start = "00:10"
end = "00:20"
)";

// Runs a scenario text through the CLI into a fresh bundle directory.
fs::path run_scenario(const std::string& text, const std::string& name) {
  const fs::path dir = fresh_dir(name);
  const fs::path toml = write_text(dir / "scenario.toml", text);
  auto r = bas_sim("run " + shell_quote(toml.string()) + " --out " + shell_quote((dir / "out").string()));
  INFO(r.err);
  REQUIRE(r.code == 0);
  return dir / "out";
}

}  // namespace

TEST_CASE("usage and configuration errors exit with 2") {
  CHECK(bas_sim("").code == 2);
  CHECK(bas_sim("frobnicate").code == 2);
  CHECK(bas_sim("run").code == 2);
  CHECK(bas_sim("--help").code == 0);

  const fs::path dir = fresh_dir("cli_errors");
  auto missing = bas_sim("run " + shell_quote((dir / "absent.toml").string()) + " --out " + shell_quote(dir.string()));
  CHECK(missing.code == 2);

  const fs::path backwards = write_text(dir / "backwards.toml", R"(name = "x"
duration_h = 24

[[attacks]]
type = "dos"
target_device = "ahu"
start = "11:00"
end = "10:00"
)");
  auto r = bas_sim("run " + shell_quote(backwards.string()) + " --out " + shell_quote((dir / "o").string()));
  CHECK(r.code == 2);
  CHECK(r.err.find("line 4") != std::string::npos);
  CHECK(r.err.find("attack end must be after start") != std::string::npos);

  const fs::path bad_key = write_text(dir / "bad_key.toml", "name = \"x\"\ncolour = \"blue\"\n");
  r = bas_sim("run " + shell_quote(bad_key.string()) + " --out " + shell_quote((dir / "o2").string()));
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);

  const fs::path ok = write_text(dir / "ok.toml", kShortBaseline);
  r = bas_sim("run " + shell_quote(ok.string()) + " --out " + shell_quote((dir / "o3").string()) + " --speed fast");
  CHECK(r.code == 2);
  fs::remove_all(dir);
}

TEST_CASE("run writes a bundle whose flows match pcap-summary") {
  const fs::path out = run_scenario(kShortDos, "cli_dos");
  CHECK(harness::verify_bundle(out.string()).empty());

  auto summary = bas_sim("pcap-summary " + shell_quote((out / "traffic.pcap").string()));
  REQUIRE(summary.code == 0);
  CHECK(json::parse(summary.out) == json::parse(slurp(out / "flows.json")));
  const json flows = json::parse(summary.out);
  const json& attack = flows.at("192.168.1.66:47808 -> 10.13.254.5:47808");
  CHECK(attack.at("services").at("reinitialize-device") == 600);

  // A capture cut mid-record is reported with its byte offset.
  const std::string pcap = slurp(out / "traffic.pcap");
  const fs::path cut = write_text(out.parent_path() / "cut.pcap", pcap.substr(0, pcap.size() - 5));
  auto truncated = bas_sim("pcap-summary " + shell_quote(cut.string()));
  CHECK(truncated.code == 2);
  CHECK(truncated.err.find("offset ") != std::string::npos);
  CHECK(truncated.err.find("truncated") != std::string::npos);
  fs::remove_all(out.parent_path());
}

TEST_CASE("diff compares two bundles") {
  const fs::path base = run_scenario(kShortBaseline, "cli_base");
  const fs::path dos = run_scenario(kShortDos, "cli_dos2");

  auto self = bas_sim("diff " + shell_quote(base.string()) + " " + shell_quote(base.string()));
  REQUIRE(self.code == 0);
  for (const auto& [point, d] : json::parse(self.out)["points"].items()) CHECK(d["max_abs_dev"] == 0.0);

  const fs::path diff_out = base.parent_path() / "diff";
  auto r = bas_sim("diff " + shell_quote(base.string()) + " " + shell_quote(dos.string()) + " --out " +
                   shell_quote(diff_out.string()));
  REQUIRE(r.code == 0);
  const json report = json::parse(slurp(diff_out / "diff.json"));
  CHECK(report["window"]["start_s"] == 600.0);
  CHECK(report["window"]["end_s"] == 1200.0);
  // The flooded AHU misses its polls while it keeps rebooting.
  CHECK(report["points"]["ahu.analog-input:1"]["missing"]["attack"]["during"].get<int>() > 0);
  CHECK(report["points"]["vav1.analog-input:1"]["missing"]["attack"]["during"] == 0);
  CHECK(slurp(diff_out / "diff.csv").rfind("sim_time_s,point,baseline,attack,deviation\n", 0) == 0);

  // Different seeds do not pair up.
  std::string reseeded_text = kShortBaseline;
  reseeded_text.replace(reseeded_text.find("seed = 11"), 9, "seed = 12");
  const fs::path reseeded = run_scenario(reseeded_text, "cli_reseeded");
  CHECK(bas_sim("diff " + shell_quote(base.string()) + " " + shell_quote(reseeded.string())).code == 2);
  CHECK(bas_sim("diff " + shell_quote(base.string()) + " /nonexistent").code == 2);
  for (const auto& d : {base.parent_path(), dos.parent_path(), reseeded.parent_path()}) fs::remove_all(d);
}

TEST_CASE("independent dissector agrees with the capture") {
  const std::string python = PYTHON_EXE;
  if (python.empty()) {
    MESSAGE("python3 not found; skipped");
    return;
  }
  const fs::path out = run_scenario(kShortDos, "cli_oracle");
  auto r = run_command(shell_quote(python) + " " + shell_quote(std::string(BASSIM_SOURCE_DIR) + "/tests/oracles/bacnet_oracle.py") +
                       " pcap " + shell_quote((out / "traffic.pcap").string()) + " " +
                       shell_quote((out / "traffic.jsonl").string()));
  INFO(r.err);
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["packets"].get<int>() > 0);
  CHECK(report["bad_checksums"] == 0);
  CHECK(report["bad_udp_length"] == 0);
  CHECK(report["non_bacnet"] == 0);
  CHECK(report["dissect_failures"] == 0);
  CHECK(report["packets"] == report["jsonl_ip_lines"]);
  CHECK(report["timestamps_match"] == true);
  CHECK(report["reinit"].size() == 600);
  CHECK(report["pairs"]["192.168.1.66:47808 -> 10.13.254.5:47808"]["reinitialize-device"] == 600);
  fs::remove_all(out.parent_path());
}
