#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vbasim/manifest.hpp"

namespace vbasim::mascarer {

// The framework prefix that stub and payload class names start with.
inline constexpr std::string_view kFrameworkPrefix = "Plugin";

struct StepRecord {
  std::string step;
  double duration_ms = 0.0;
};

using RenameMap = std::map<std::string, std::string>;

struct CustomizationResult {
  AppManifest addon;
  AppManifest malicious;
  // Template component name -> name in the add-on, for every name that changed.
  RenameMap rename_map;
  std::vector<StepRecord> report;
};

// Victim label with all whitespace removed; the prefix substituted for "Plugin".
std::string victim_prefix(std::string_view victim_label);

// ".PluginServiceManager" -> ".TelegramServiceManager". Names whose simple
// part (after the last '.') does not start with the framework prefix are
// returned unchanged.
std::string rename_framework_prefix(std::string_view name, std::string_view prefix);

// Appends "_c<k>" with k >= 1 the smallest value not in `taken`. Returns
// `name` itself when it is free.
std::string resolve_collision(const std::string& name, const std::set<std::string>& taken);

AppManifest step1_permissions(const AppManifest& victim, const AppManifest& addon_template);
AppManifest step2_trim_malicious(const AppManifest& victim, const ServiceCatalog& catalog);
// Renames payload services the way stubs are renamed, keeping them clear of
// every victim component name.
AppManifest rename_malicious(const AppManifest& victim, const AppManifest& malicious);
std::pair<AppManifest, RenameMap> step3_components(const AppManifest& victim, const AppManifest& malicious,
                                                   const AppManifest& addon);
AppManifest step4_resources(const AppManifest& victim, const AppManifest& addon);

CustomizationResult customize(const AppManifest& victim, const AppManifest& addon_template,
                              const ServiceCatalog& catalog);

// Every law the output must satisfy; empty when all hold.
std::vector<std::string> check_laws(const AppManifest& victim, const CustomizationResult& result);
// Throws InvariantViolation listing the first violations.
void enforce_laws(const AppManifest& victim, const CustomizationResult& result);

}  // namespace vbasim::mascarer
