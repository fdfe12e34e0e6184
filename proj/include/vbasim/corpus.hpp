#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vbasim/manifest.hpp"

namespace vbasim::corpus {

inline constexpr std::size_t kMinComponents = 1;
inline constexpr std::size_t kMaxComponents = 12;

// The nine permissions the payload catalog can exploit.
const std::vector<std::string>& catalog_permissions();

// Deterministic in (count, seed). Every manifest validates, starts with a
// launcher activity and has a distinct package.
std::vector<AppManifest> generate(std::size_t count, std::uint64_t seed);

// Writes victim_NNN.json files; creates `dir` if needed.
void write(const std::filesystem::path& dir, const std::vector<AppManifest>& manifests);
// Every *.json in `dir`, sorted by filename.
std::vector<std::pair<std::filesystem::path, AppManifest>> read(const std::filesystem::path& dir);

}  // namespace vbasim::corpus

namespace vbasim::bench {

struct Stats {
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

struct ManifestTiming {
  std::string package;
  Stats stats;
};

struct HookOverhead {
  std::size_t calls = 0;
  double mean_us_no_hooks = 0.0;
  double mean_us_four_hooks = 0.0;
};

struct BenchResult {
  std::size_t repeat = 0;
  std::vector<ManifestTiming> manifests;
  // Absent for an empty corpus.
  std::optional<Stats> aggregate;
  std::size_t law_violations = 0;
  HookOverhead hooks;
};

// Runs the customization pipeline `repeat` times per manifest and checks
// the output laws each time.
BenchResult run(const std::vector<AppManifest>& corpus, const AppManifest& addon_template,
                const ServiceCatalog& catalog, std::size_t repeat, std::size_t hook_calls = 2000);

// Mean plugin_syscall latency on hooked call kinds, with and without the
// four bypass hooks installed.
HookOverhead measure_hook_overhead(const AppManifest& victim, const AppManifest& addon_template,
                                   std::size_t calls);

}  // namespace vbasim::bench
