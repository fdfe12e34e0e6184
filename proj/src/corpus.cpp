#include "vbasim/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>

#include "vbasim/container.hpp"
#include "vbasim/errors.hpp"
#include "vbasim/mascarer.hpp"

namespace vbasim::corpus {

const std::vector<std::string>& catalog_permissions() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> out = perm::dangerous();
    out.emplace_back(perm::kInternet);
    return out;
  }();
  return list;
}

namespace {

// Modulo draw instead of std::uniform_int_distribution: the latter's output
// is implementation-defined, and corpora must match across toolchains.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

const char* const kIntents[] = {"android.intent.action.BOOT_COMPLETED",
                                "android.provider.Telephony.SMS_RECEIVED",
                                "android.net.conn.CONNECTIVITY_CHANGE"};

}  // namespace

std::vector<AppManifest> generate(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<AppManifest> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char index[24];
    std::snprintf(index, sizeof(index), "%03zu", i);
    AppManifest m;
    m.package = "org.corpus.app" + std::string(index);
    m.label = "Corpus App " + std::string(index);
    m.version = static_cast<std::int64_t>(1 + draw(rng, 500));
    m.launcher_icon = "ic_launcher.png";
    for (const auto& p : catalog_permissions()) {
      if (draw(rng, 2) == 1) m.permissions.insert(p);
    }
    if (draw(rng, 4) == 0) m.native_components.insert("webview");

    const std::size_t n = kMinComponents + draw(rng, kMaxComponents - kMinComponents + 1);
    Component launcher;
    launcher.name = ".Main";
    launcher.kind = ComponentKind::Activity;
    launcher.launcher = true;
    m.activities.push_back(launcher);
    for (std::size_t k = 1; k < n; ++k) {
      Component c;
      c.kind = static_cast<ComponentKind>(draw(rng, 4));
      c.name = "." + std::string(to_string(c.kind)) + std::to_string(k);
      if (c.kind == ComponentKind::Receiver) c.intents.push_back(kIntents[draw(rng, 3)]);
      m.components_of(c.kind).push_back(std::move(c));
    }
    validate_manifest(m);
    out.push_back(std::move(m));
  }
  return out;
}

void write(const std::filesystem::path& dir, const std::vector<AppManifest>& manifests) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "victim_%03zu.json", i);
    save_manifest_file(manifests[i], dir / name);
  }
}

std::vector<std::pair<std::filesystem::path, AppManifest>> read(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::filesystem::path, AppManifest>> out;
  for (auto& f : files) {
    AppManifest m = load_manifest_file(f);
    out.emplace_back(std::move(f), std::move(m));
  }
  return out;
}

}  // namespace vbasim::corpus

namespace vbasim::bench {

namespace {

Stats summarize(const std::vector<double>& samples) {
  Stats s;
  if (samples.empty()) return s;
  s.min_ms = *std::min_element(samples.begin(), samples.end());
  s.max_ms = *std::max_element(samples.begin(), samples.end());
  double total = 0.0;
  for (double v : samples) total += v;
  s.mean_ms = total / static_cast<double>(samples.size());
  return s;
}

double mean_call_us(Container& c, SimOs& os, Pid pid, const std::string& own, std::size_t calls) {
  const ApiCall hooked[] = {ApiCall::get_running_app_processes(), ApiCall::get_application_info(own)};
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < calls; ++i) c.plugin_syscall(os, pid, hooked[i % 2]);
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::micro>(stop - start).count() / static_cast<double>(calls);
}

}  // namespace

HookOverhead measure_hook_overhead(const AppManifest& victim, const AppManifest& addon_template,
                                   std::size_t calls) {
  HookOverhead out;
  out.calls = calls;
  if (calls == 0) return out;
  SimOs os;
  os.install(addon_template);
  Container c = Container::create(os, addon_template);
  const Pid pid = c.load_plugin(os, victim, c.downloaded_apk_path(victim.package));
  out.mean_us_no_hooks = mean_call_us(c, os, pid, victim.package, calls);
  install_mascara_hookset(c, victim.package);
  out.mean_us_four_hooks = mean_call_us(c, os, pid, victim.package, calls);
  return out;
}

BenchResult run(const std::vector<AppManifest>& corpus, const AppManifest& addon_template,
                const ServiceCatalog& catalog, std::size_t repeat, std::size_t hook_calls) {
  BenchResult out;
  out.repeat = repeat;
  std::vector<double> means;
  for (const auto& victim : corpus) {
    std::vector<double> samples;
    for (std::size_t r = 0; r < repeat; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const auto result = mascarer::customize(victim, addon_template, catalog);
      const auto stop = std::chrono::steady_clock::now();
      samples.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
      out.law_violations += mascarer::check_laws(victim, result).size();
    }
    ManifestTiming t{victim.package, summarize(samples)};
    means.push_back(t.stats.mean_ms);
    out.manifests.push_back(std::move(t));
  }
  if (!means.empty()) out.aggregate = summarize(means);
  if (!corpus.empty()) out.hooks = measure_hook_overhead(corpus.front(), addon_template, hook_calls);
  return out;
}

}  // namespace vbasim::bench
