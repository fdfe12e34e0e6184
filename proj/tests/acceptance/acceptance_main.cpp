// One line per acceptance criterion: "AC<n> PASS|FAIL <detail>". Exit status
// is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vbasim/artmodel.hpp"
#include "vbasim/corpus.hpp"
#include "vbasim/environment.hpp"
#include "vbasim/errors.hpp"
#include "vbasim/mascarer.hpp"
#include "vbasim/report.hpp"
#include "../support/oracle.hpp"
#include "../support/worldgen.hpp"

using namespace vbasim;

namespace {

// Pinned tolerances and sizes.
constexpr double kMatrixBudgetSeconds = 5.0;
constexpr std::size_t kCorpusSize = 100;
constexpr std::uint64_t kCorpusSeed = 7;
constexpr std::size_t kCorpusRepeat = 10;
constexpr double kMeanCustomizeBudgetMs = 100.0;
constexpr double kPerManifestCeilingMs = 10000.0;
constexpr std::size_t kUidScenarios = 200;
constexpr std::size_t kArtSequences = 1000;
constexpr std::size_t kOracleWorldsPerMechanism = 50;
constexpr std::size_t kExpectedContacts = 3;
constexpr std::size_t kExpectedSms = 0;

const std::filesystem::path kRoot = VBASIM_SOURCE_DIR;
const std::filesystem::path kScenario = kRoot / "fixtures" / "default" / "scenario.json";
const std::filesystem::path kGolden = kRoot / "tests" / "golden" / "default_matrix.json";

struct Result {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::set<std::string> diff_keys(const std::map<std::string, char>& expected, const std::map<std::string, char>& got) {
  std::set<std::string> out;
  for (const auto& [key, letter] : expected) {
    auto it = got.find(key);
    if (it == got.end() || it->second != letter) out.insert(key);
  }
  return out;
}

std::string join(const std::set<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) out += (out.empty() ? "" : ",") + k;
  return "{" + out + "}";
}

Result ac1_bypass_matrix() {
  Result r;
  const auto start = std::chrono::steady_clock::now();
  const ScenarioInputs in = load_scenario(kScenario);
  const MatrixRun run = run_matrix(in, all_environments());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto diffs = diff_matrix(load_golden(kGolden), matrix_of(run.reports));
  if (!diffs.empty()) r.fail(std::to_string(diffs.size()) + " cell(s) differ from golden, first: " + diffs.front());
  for (const auto& report : run.reports) {
    const auto classic = report.classic_counts().virtual_detected;
    const Verdict singular = report.outcome(ProbeId::Singular).verdict;
    switch (report.environment) {
      case EnvironmentKind::Native:
        if (report.counts().virtual_detected != 0) r.fail("Native has VirtualDetected cells");
        break;
      case EnvironmentKind::NaiveContainer:
        if (classic != 16) r.fail("NaiveContainer detects " + std::to_string(classic) + "/18");
        if (singular != Verdict::VirtualDetected) r.fail("NaiveContainer SINGULAR not detected");
        break;
      case EnvironmentKind::MascaraContainer:
        if (classic != 0) r.fail("MascaraContainer detects " + std::to_string(classic) + "/18");
        if (singular != Verdict::VirtualDetected) r.fail("MascaraContainer SINGULAR not detected");
        break;
    }
  }
  if (seconds >= kMatrixBudgetSeconds) r.fail("matrix took " + std::to_string(seconds) + " s");
  if (r.pass) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "golden match, Native 0/19 V, Naive 16/18 V + SINGULAR V, Mascara 0/18 V + SINGULAR V, %.3f s < %.1f s",
                  seconds, kMatrixBudgetSeconds);
    r.detail = buf;
  }
  return r;
}

Result ac2_customization_laws() {
  Result r;
  const ScenarioInputs in = load_scenario(kScenario);
  const auto manifests = corpus::generate(kCorpusSize, kCorpusSeed);
  std::size_t violations = 0;
  for (const auto& victim : manifests) {
    const auto result = mascarer::customize(victim, in.addon_template, in.catalog);
    violations += mascarer::check_laws(victim, result).size();
  }
  const bench::BenchResult bench = bench::run(manifests, in.addon_template, in.catalog, kCorpusRepeat, 0);
  violations += bench.law_violations;
  if (violations != 0) r.fail(std::to_string(violations) + " law violation(s)");
  if (bench.manifests.size() != kCorpusSize) r.fail("bench covered " + std::to_string(bench.manifests.size()) + " manifests");
  double worst = 0.0;
  for (const auto& t : bench.manifests) worst = std::max(worst, t.stats.mean_ms);
  const double mean = bench.aggregate ? bench.aggregate->mean_ms : -1.0;
  if (!bench.aggregate || mean >= kMeanCustomizeBudgetMs) r.fail("mean per-add-on duration " + std::to_string(mean) + " ms");
  if (worst >= kPerManifestCeilingMs) r.fail("worst per-manifest mean " + std::to_string(worst) + " ms");
  if (r.pass) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%zu manifests x %zu repeats, 0 violations, mean %.4f ms < %.0f ms, worst %.4f ms < %.0f ms",
                  kCorpusSize, kCorpusRepeat, mean, kMeanCustomizeBudgetMs, worst, kPerManifestCeilingMs);
    r.detail = buf;
  }
  return r;
}

Result ac3_uid_paths() {
  Result r;
  vbasim::testing::WorldGen gen(2024);
  std::size_t plugins_checked = 0;
  for (std::size_t i = 0; i < kUidScenarios; ++i) {
    const ScenarioInputs in = gen.scenario();
    std::vector<World> worlds;
    worlds.push_back(build_naive_world(in));
    worlds.push_back(build_mascara_world(in));
    for (World& w : worlds) {
      Container& c = *w.container;
      std::set<Pid> pids = {c.container_pid()};
      for (const auto& [pkg, plugin] : c.plugins()) {
        ++plugins_checked;
        const SimProcess& proc = w.os.process(plugin.pid);
        const std::string where = "scenario " + std::to_string(i) + " " + std::string(to_string(w.kind)) + " " + pkg;
        if (proc.uid != c.uid()) r.fail(where + ": uid differs from container");
        if (!pids.insert(plugin.pid).second) r.fail(where + ": pid reused");
        if (plugin.data_dir != "/data/data/" + c.addon_package() + "/Plugin/" + pkg) r.fail(where + ": data_dir " + plugin.data_dir);
        const auto info = c.plugin_syscall(w.os, plugin.pid, ApiCall::get_application_info(pkg)).as<ApplicationInfo>();
        const bool hooked = w.kind == EnvironmentKind::MascaraContainer;
        const std::string want = hooked ? "/data/data/" + pkg : plugin.data_dir;
        if (info.data_dir != want) r.fail(where + ": reported data_dir " + info.data_dir + ", want " + want);
      }
    }
  }
  if (r.pass) {
    r.detail = std::to_string(kUidScenarios) + " scenarios, " + std::to_string(plugins_checked) +
               " plugin processes: shared uid, distinct pid, Plugin/ dir, native pattern through the data_dir hook";
  }
  return r;
}

Result ac4_hook_monotonicity() {
  Result r;
  const ScenarioInputs in = load_scenario(kScenario);
  const auto golden = load_golden(kGolden).at("MascaraContainer");
  auto row_for = [&](const MascaraOptions& options) {
    return matrix_of({run_all_probes(build_mascara_world(in, options))}).at("MascaraContainer");
  };
  MascaraOptions bare;
  bare.install_hooks = false;
  MascaraOptions no_exec;
  no_exec.skip_hooks = {std::string(hooks::kExecPs)};

  const auto bare_row = row_for(bare);
  const auto bare_diff = diff_keys(golden, bare_row);
  const std::set<std::string> want_bare = {"7", "8", "9", "11", "12"};
  if (bare_diff != want_bare) r.fail("without hookset flipped " + join(bare_diff) + ", want " + join(want_bare));
  for (const auto& key : want_bare) {
    if (golden.at(key) != 'C' || bare_row.at(key) != 'V') r.fail("mechanism " + key + " did not go C -> V");
  }
  const auto exec_diff = diff_keys(golden, row_for(no_exec));
  if (exec_diff != std::set<std::string>{"8"}) r.fail("without exec hook flipped " + join(exec_diff) + ", want {8}");
  if (r.pass) r.detail = "no hookset flips " + join(bare_diff) + " C->V; no exec hook flips " + join(exec_diff);
  return r;
}

Result ac5_exfiltration() {
  Result r;
  ScenarioInputs in = load_scenario(kScenario);
  in.victim.permissions = {std::string(perm::kReadContacts), std::string(perm::kInternet)};
  in.stores = {{"contacts", 3}, {"sms", 2}};
  const World w = build_mascara_world(in);
  std::vector<std::string> contacts;
  std::size_t sms = 0;
  std::size_t other = 0;
  for (const auto& rec : w.os.exfil_sink()) {
    if (rec.tag == "contacts") {
      contacts.push_back(rec.record);
    } else if (rec.tag == "sms" || rec.tag == "incoming_sms") {
      ++sms;
    } else {
      ++other;
    }
  }
  if (contacts.size() != kExpectedContacts) r.fail(std::to_string(contacts.size()) + " contact records");
  if (sms != kExpectedSms) r.fail(std::to_string(sms) + " sms records");
  if (other != 0) r.fail(std::to_string(other) + " records from other stores");
  // Oracle: the store's own contents, in order.
  if (contacts != w.os.data_stores().at("contacts")) r.fail("exfiltrated contacts differ from the store");
  if (r.pass) r.detail = "exfil_sink holds exactly 3 contact records and 0 sms records";
  return r;
}

Result ac6_art_model() {
  Result r;
  std::mt19937_64 rng(99);
  for (std::size_t i = 0; i < kArtSequences; ++i) {
    art::RuntimeModel hosted(art::RuntimeKind::Virtual);
    art::RuntimeModel native(art::RuntimeKind::Native);
    std::uint64_t closed_form = 0;
    const std::uint64_t n = 1 + rng() % 64;
    for (std::uint64_t k = 0; k < n; ++k) {
      const std::uint64_t loops = rng() % 1000;
      hosted.record_invocation("m", loops);
      native.record_invocation("m", loops);
      closed_form += 1 + loops;
    }
    if (hosted.method("m").hotness_count != 0) r.fail("AoT sequence " + std::to_string(i) + " moved the counter");
    if (native.method("m").hotness_count != closed_form) r.fail("Hybrid sequence " + std::to_string(i) + " off the closed form");
  }

  // Singular over the default scenario and the random acceptance scenarios.
  std::size_t judged = 0;
  auto judge = [&](const World& w) {
    const auto outcome = run_all_probes(w).outcome(ProbeId::Singular);
    const Verdict want = w.kind == EnvironmentKind::Native ? Verdict::Clean : Verdict::VirtualDetected;
    if (outcome.verdict != want) r.fail(std::string(to_string(w.kind)) + " SINGULAR " + std::string(to_string(outcome.verdict)));
    ++judged;
  };
  const ScenarioInputs in = load_scenario(kScenario);
  for (EnvironmentKind kind : all_environments()) judge(build_world(kind, in));
  vbasim::testing::WorldGen gen(2024);
  for (std::size_t i = 0; i < kUidScenarios; ++i) {
    const ScenarioInputs s = gen.scenario();
    for (EnvironmentKind kind : all_environments()) judge(build_world(kind, s));
  }
  if (r.pass) {
    r.detail = std::to_string(kArtSequences) + " sequences: AoT 0, Hybrid closed form exact; SINGULAR correct in " +
               std::to_string(judged) + " worlds";
  }
  return r;
}

Result ac7_oracle_equivalence() {
  Result r;
  vbasim::testing::WorldGen gen(777);
  std::size_t fired = 0;
  for (ProbeId id : all_probes()) {
    if (!is_classic(id)) continue;
    for (std::size_t i = 0; i < kOracleWorldsPerMechanism; ++i) {
      const World w = gen.any_world();
      const Verdict expected = vbasim::testing::oracle_verdict(w, id);
      World copy = w;
      WorldProbeEnvironment env(copy);
      ProbeOutcome got;
      try {
        got = run_probe(env, id);
      } catch (const std::exception& e) {
        got = {id, Verdict::Error, e.what()};
      }
      if (got.verdict == Verdict::VirtualDetected) ++fired;
      if (got.verdict != expected) {
        r.fail("mechanism " + probe_key(id) + " world " + std::to_string(i) + " (" + std::string(to_string(w.kind)) +
               "): probe " + std::string(to_string(got.verdict)) + ", oracle " + std::string(to_string(expected)) +
               " [" + got.evidence + "]");
      }
    }
  }
  if (r.pass) {
    r.detail = "18 mechanisms x " + std::to_string(kOracleWorldsPerMechanism) + " random worlds agree with the oracle (" +
               std::to_string(fired) + " detections)";
  }
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"AC1", ac1_bypass_matrix},     {"AC2", ac2_customization_laws}, {"AC3", ac3_uid_paths},
      {"AC4", ac4_hook_monotonicity}, {"AC5", ac5_exfiltration},       {"AC6", ac6_art_model},
      {"AC7", ac7_oracle_equivalence},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Result res;
    try {
      res = run();
    } catch (const std::exception& e) {
      res.fail(std::string("threw: ") + e.what());
    }
    std::printf("%s %s %s\n", name, res.pass ? "PASS" : "FAIL", res.detail.c_str());
    if (!res.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
