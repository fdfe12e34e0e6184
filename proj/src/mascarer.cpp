#include "vbasim/mascarer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <set>

#include "vbasim/errors.hpp"

namespace vbasim::mascarer {

namespace {

constexpr ComponentKind kKinds[] = {ComponentKind::Activity, ComponentKind::Service,
                                    ComponentKind::Receiver, ComponentKind::Provider};

std::set<std::string> component_names(const AppManifest& m) {
  std::set<std::string> names;
  for (auto kind : kKinds) {
    for (const auto& c : m.components_of(kind)) names.insert(c.name);
  }
  return names;
}

template <typename F>
auto timed(std::vector<StepRecord>& report, std::string step, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  auto out = body();
  const auto stop = std::chrono::steady_clock::now();
  report.push_back({std::move(step), std::chrono::duration<double, std::milli>(stop - start).count()});
  return out;
}

}  // namespace

std::string victim_prefix(std::string_view victim_label) {
  std::string out;
  for (char ch : victim_label) {
    if (!std::isspace(static_cast<unsigned char>(ch))) out.push_back(ch);
  }
  return out;
}

std::string rename_framework_prefix(std::string_view name, std::string_view prefix) {
  const auto dot = name.rfind('.');
  const std::size_t simple = dot == std::string_view::npos ? 0 : dot + 1;
  if (name.substr(simple).rfind(kFrameworkPrefix, 0) != 0) return std::string(name);
  std::string out(name.substr(0, simple));
  out += prefix;
  out += name.substr(simple + kFrameworkPrefix.size());
  return out;
}

std::string resolve_collision(const std::string& name, const std::set<std::string>& taken) {
  if (!taken.contains(name)) return name;
  for (std::size_t k = 1;; ++k) {
    std::string candidate = name + "_c" + std::to_string(k);
    if (!taken.contains(candidate)) return candidate;
  }
}

AppManifest step1_permissions(const AppManifest& victim, const AppManifest& addon_template) {
  AppManifest out = addon_template;
  out.permissions = extract_permissions(victim);
  out.permissions.insert(std::string(perm::kInstallShortcut));
  out.permissions.insert(std::string(perm::kKillBackgroundProcesses));
  out.features = victim.features;
  return out;
}

AppManifest step2_trim_malicious(const AppManifest& victim, const ServiceCatalog& catalog) {
  AppManifest out;
  out.package = catalog.package;
  out.label = catalog.label;
  out.version = 1;
  for (const auto& entry : catalog.entries) {
    const bool covered = std::all_of(entry.requires_permissions.begin(), entry.requires_permissions.end(),
                                     [&](const std::string& p) { return victim.permissions.contains(p); });
    if (!covered) continue;
    out.services.push_back(entry);
    out.permissions.insert(entry.requires_permissions.begin(), entry.requires_permissions.end());
  }
  return out;
}

AppManifest rename_malicious(const AppManifest& victim, const AppManifest& malicious) {
  const std::string prefix = victim_prefix(victim.label);
  std::set<std::string> taken = component_names(victim);
  AppManifest out = malicious;
  for (auto kind : kKinds) {
    for (auto& c : out.components_of(kind)) {
      c.name = resolve_collision(rename_framework_prefix(c.name, prefix), taken);
      taken.insert(c.name);
    }
  }
  return out;
}

std::pair<AppManifest, RenameMap> step3_components(const AppManifest& victim, const AppManifest& malicious,
                                                   const AppManifest& addon) {
  const std::string prefix = victim_prefix(victim.label);
  const bool addon_has_launcher = addon.launcher_activity() != nullptr;
  AppManifest out = addon;
  for (auto kind : kKinds) out.components_of(kind).clear();
  std::set<std::string> taken;
  RenameMap renames;

  for (auto kind : kKinds) {
    for (Component c : victim.components_of(kind)) {
      // The add-on keeps its own launcher; the victim's is reached via the shortcut.
      if (addon_has_launcher) c.launcher = false;
      c.stub = false;
      taken.insert(c.name);
      out.components_of(kind).push_back(std::move(c));
    }
  }
  for (auto kind : kKinds) {
    for (Component c : malicious.components_of(kind)) {
      c.name = resolve_collision(c.name, taken);
      taken.insert(c.name);
      out.components_of(kind).push_back(std::move(c));
    }
  }
  for (auto kind : kKinds) {
    for (Component c : addon.components_of(kind)) {
      const std::string original = c.name;
      c.name = resolve_collision(rename_framework_prefix(original, prefix), taken);
      taken.insert(c.name);
      if (c.name != original) renames.emplace(original, c.name);
      out.components_of(kind).push_back(std::move(c));
    }
  }
  validate_manifest(out);
  return {std::move(out), std::move(renames)};
}

AppManifest step4_resources(const AppManifest& victim, const AppManifest& addon) {
  const LauncherResources res = extract_launcher_resources(victim);
  AppManifest out = addon;
  out.shortcut_icon = res.icon;
  out.shortcut_label = res.label;
  return out;
}

CustomizationResult customize(const AppManifest& victim, const AppManifest& addon_template,
                              const ServiceCatalog& catalog) {
  validate_manifest(victim);
  validate_manifest(addon_template);
  CustomizationResult result;
  auto& report = result.report;

  AppManifest addon = timed(report, "permissions", [&] { return step1_permissions(victim, addon_template); });
  AppManifest malicious = timed(report, "trim_malicious", [&] {
    return rename_malicious(victim, step2_trim_malicious(victim, catalog));
  });
  auto [with_components, renames] =
      timed(report, "components", [&] { return step3_components(victim, malicious, addon); });
  result.addon = timed(report, "resources", [&] { return step4_resources(victim, with_components); });
  result.malicious = std::move(malicious);
  result.rename_map = std::move(renames);
  return result;
}

std::vector<std::string> check_laws(const AppManifest& victim, const CustomizationResult& result) {
  std::vector<std::string> violations;
  PermissionSet expected = victim.permissions;
  expected.insert(std::string(perm::kInstallShortcut));
  expected.insert(std::string(perm::kKillBackgroundProcesses));
  if (result.addon.permissions != expected) {
    violations.push_back("addon permissions differ from victim permissions plus the two extras");
  }
  for (const auto& p : result.malicious.permissions) {
    if (!victim.permissions.contains(p)) violations.push_back("malicious permission " + p + " not held by victim");
  }
  for (const auto& svc : result.malicious.services) {
    for (const auto& p : svc.requires_permissions) {
      if (!victim.permissions.contains(p)) {
        violations.push_back("malicious service " + svc.name + " requires " + p + " not held by victim");
      }
    }
  }
  if (!result.malicious.activities.empty() || !result.malicious.providers.empty()) {
    violations.push_back("malicious manifest declares graphical components or providers");
  }
  for (const auto& ref : extract_components(victim)) {
    const Component* c = result.addon.find_component(ref.name);
    if (c == nullptr || c->kind != ref.kind) {
      violations.push_back("victim component " + ref.name + " missing from addon with its kind");
    }
  }
  return violations;
}

void enforce_laws(const AppManifest& victim, const CustomizationResult& result) {
  const auto violations = check_laws(victim, result);
  if (violations.empty()) return;
  std::string message = std::to_string(violations.size()) + " law violation(s): " + violations.front();
  throw InvariantViolation(message);
}

}  // namespace vbasim::mascarer
