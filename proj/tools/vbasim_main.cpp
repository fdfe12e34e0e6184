// vbasim: add-on builder, detection matrix runner, corpus generator, bench.
//
// Exit codes: 0 ok, 2 input/schema error, 3 invariant violation,
// 4 golden mismatch.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vbasim/corpus.hpp"
#include "vbasim/environment.hpp"
#include "vbasim/errors.hpp"
#include "vbasim/mascarer.hpp"
#include "vbasim/report.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace vbasim;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitGolden = 4;

struct GlobalFlags {
  std::string format = "structured";
  std::string out;
  std::uint64_t seed = 7;
};

// Writes to --out when given, stdout otherwise.
void emit(const GlobalFlags& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + g.out);
  f << text;
}

std::string steps_document(const mascarer::CustomizationResult& r) {
  json doc;
  doc["addon"] = r.addon.package;
  doc["malicious"] = r.malicious.package;
  doc["addon_components"] = r.addon.component_count();
  doc["malicious_services"] = r.malicious.services.size();
  json renames = json::object();
  for (const auto& [from, to] : r.rename_map) renames[from] = to;
  doc["rename_map"] = std::move(renames);
  json steps = json::array();
  for (const auto& s : r.report) steps.push_back({{"step", s.step}, {"duration_ms", s.duration_ms}});
  doc["steps"] = std::move(steps);
  return doc.dump(2) + "\n";
}

struct BuildFlags {
  std::string victim, templ, catalog, out, malicious_out, report;
};

int cmd_build_addon(const GlobalFlags& g, BuildFlags f) {
  if (g.out.empty()) throw SchemaError("--out", "build-addon needs the add-on output path");
  f.out = g.out;
  const AppManifest victim = load_manifest_file(f.victim);
  const AppManifest templ = load_manifest_file(f.templ);
  const ServiceCatalog catalog = ServiceCatalog::from_manifest(load_manifest_file(f.catalog));
  const auto result = mascarer::customize(victim, templ, catalog);
  mascarer::enforce_laws(victim, result);
  save_manifest_file(result.addon, f.out);
  save_manifest_file(result.malicious, f.malicious_out);
  const std::string steps = steps_document(result);
  if (f.report.empty()) {
    std::cout << steps;
  } else {
    std::ofstream(f.report, std::ios::binary | std::ios::trunc) << steps;
  }
  return kExitOk;
}

struct MatrixFlags {
  std::string scenario;
  std::string mode = "all";
  std::string expect;
  std::string write_golden;
  bool no_hooks = false;
  std::vector<std::string> skip_hooks;
};

int cmd_run_matrix(const GlobalFlags& g, const MatrixFlags& f) {
  const ScenarioInputs in = load_scenario(f.scenario);
  std::vector<EnvironmentKind> envs;
  if (f.mode == "all") {
    envs = all_environments();
  } else if (auto kind = environment_from_string(f.mode)) {
    envs = {*kind};
  } else {
    throw SchemaError("--mode", "expected all, native, naive or mascara");
  }
  MascaraOptions options;
  options.install_hooks = !f.no_hooks;
  options.skip_hooks.insert(f.skip_hooks.begin(), f.skip_hooks.end());
  const MatrixRun run = run_matrix(in, envs, options);
  const std::string digest = scenario_digest(in);

  emit(g, g.format == "table" ? render_table(run.reports) : render_structured(run, digest));
  if (!f.write_golden.empty()) {
    std::ofstream(f.write_golden, std::ios::binary | std::ios::trunc) << render_golden(matrix_of(run.reports), digest);
  }
  if (f.expect.empty()) return kExitOk;
  const auto diffs = diff_matrix(load_golden(f.expect), matrix_of(run.reports));
  if (diffs.empty()) return kExitOk;
  std::cerr << diffs.size() << " cell(s) differ from " << f.expect << ":\n";
  for (const auto& d : diffs) std::cerr << "  " << d << '\n';
  return kExitGolden;
}

int cmd_gen_corpus(const GlobalFlags& g, std::size_t count) {
  if (g.out.empty()) throw SchemaError("--out", "gen-corpus needs an output directory");
  try {
    corpus::write(g.out, corpus::generate(count, g.seed));
  } catch (const std::filesystem::filesystem_error& e) {
    throw SchemaError("--out", e.what());
  }
  std::cerr << "wrote " << count << " manifest(s) to " << g.out << '\n';
  return kExitOk;
}

struct BenchFlags {
  std::string corpus_dir, templ, catalog;
  std::size_t repeat = 10;
  std::size_t hook_calls = 2000;
};

std::string render_bench_table(const bench::BenchResult& r) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %10s %10s %10s\n", "package", "mean_ms", "min_ms", "max_ms");
  out << line;
  for (const auto& m : r.manifests) {
    std::snprintf(line, sizeof(line), "%-24s %10.4f %10.4f %10.4f\n", m.package.c_str(), m.stats.mean_ms,
                  m.stats.min_ms, m.stats.max_ms);
    out << line;
  }
  if (r.aggregate) {
    std::snprintf(line, sizeof(line), "%-24s %10.4f %10.4f %10.4f\n", "aggregate", r.aggregate->mean_ms,
                  r.aggregate->min_ms, r.aggregate->max_ms);
    out << line;
  } else {
    out << "aggregate: absent (empty corpus)\n";
  }
  std::snprintf(line, sizeof(line), "hook dispatch: %.3f us (0 hooks) vs %.3f us (4 hooks) over %zu calls\n",
                r.hooks.mean_us_no_hooks, r.hooks.mean_us_four_hooks, r.hooks.calls);
  out << line << "law violations: " << r.law_violations << '\n';
  return out.str();
}

std::string render_bench_structured(const bench::BenchResult& r) {
  json doc;
  doc["repeat"] = r.repeat;
  json items = json::array();
  for (const auto& m : r.manifests) {
    items.push_back({{"package", m.package},
                     {"mean_ms", m.stats.mean_ms},
                     {"min_ms", m.stats.min_ms},
                     {"max_ms", m.stats.max_ms}});
  }
  doc["manifests"] = std::move(items);
  if (r.aggregate) {
    doc["aggregate"] = {{"mean_ms", r.aggregate->mean_ms}, {"min_ms", r.aggregate->min_ms},
                        {"max_ms", r.aggregate->max_ms}};
  } else {
    doc["aggregate"] = nullptr;
  }
  doc["law_violations"] = r.law_violations;
  doc["hook_dispatch"] = {{"calls", r.hooks.calls},
                          {"mean_us_no_hooks", r.hooks.mean_us_no_hooks},
                          {"mean_us_four_hooks", r.hooks.mean_us_four_hooks}};
  return doc.dump(2) + "\n";
}

int cmd_bench(const GlobalFlags& g, const BenchFlags& f) {
  std::vector<AppManifest> manifests;
  try {
    for (auto& [path, m] : corpus::read(f.corpus_dir)) manifests.push_back(std::move(m));
  } catch (const std::filesystem::filesystem_error& e) {
    throw SchemaError("--corpus", e.what());
  }
  const AppManifest templ = load_manifest_file(f.templ);
  const ServiceCatalog catalog = ServiceCatalog::from_manifest(load_manifest_file(f.catalog));
  const auto result = bench::run(manifests, templ, catalog, f.repeat, f.hook_calls);
  emit(g, g.format == "table" ? render_bench_table(result) : render_bench_structured(result));
  return result.law_violations == 0 ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Android app-virtualization simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--format", g.format, "structured or table")
      ->check(CLI::IsMember({"structured", "table"}));
  app.add_option("--out", g.out, "Output file (directory for gen-corpus)");
  app.add_option("--seed", g.seed, "Seed for generated content");

  BuildFlags bf;
  auto* build = app.add_subcommand("build-addon", "Customize the container template for a victim app");
  build->add_option("--victim", bf.victim)->required();
  build->add_option("--template", bf.templ)->required();
  build->add_option("--catalog", bf.catalog, "Payload service catalog manifest")->required();
  build->add_option("--malicious-out", bf.malicious_out)->required();
  build->add_option("--report", bf.report, "Step report destination (default stdout)");

  MatrixFlags mf;
  auto* matrix = app.add_subcommand("run-matrix", "Run all probes in each environment");
  matrix->add_option("--scenario", mf.scenario)->required();
  matrix->add_option("--mode", mf.mode, "all, native, naive or mascara");
  matrix->add_option("--expect", mf.expect, "Golden matrix to compare against");
  matrix->add_option("--write-golden", mf.write_golden, "Write the observed matrix as a golden file");
  matrix->add_flag("--no-hooks", mf.no_hooks, "Build the Mascara container without its hookset");
  matrix->add_option("--skip-hook", mf.skip_hooks, "Leave one named hook out (repeatable)");

  std::size_t count = 100;
  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic victim corpus");
  gen->add_option("--count", count)->required();

  BenchFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("bench", "Time the customization pipeline over a corpus");
  bench_cmd->add_option("--corpus", bench_flags.corpus_dir)->required();
  bench_cmd->add_option("--template", bench_flags.templ)->required();
  bench_cmd->add_option("--catalog", bench_flags.catalog)->required();
  bench_cmd->add_option("--repeat", bench_flags.repeat)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--hook-calls", bench_flags.hook_calls);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*build) return cmd_build_addon(g, bf);
    if (*matrix) return cmd_run_matrix(g, mf);
    if (*gen) return cmd_gen_corpus(g, count);
    if (*bench_cmd) return cmd_bench(g, bench_flags);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
