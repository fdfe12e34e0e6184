#include "vbasim/probes.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "vbasim/artmodel.hpp"
#include "vbasim/errors.hpp"
#include "vbasim/simos.hpp"

namespace vbasim {

std::string_view to_string(EnvironmentKind kind) noexcept {
  switch (kind) {
    case EnvironmentKind::Native:
      return "Native";
    case EnvironmentKind::NaiveContainer:
      return "NaiveContainer";
    case EnvironmentKind::MascaraContainer:
      return "MascaraContainer";
  }
  return "Native";
}

std::optional<EnvironmentKind> environment_from_string(std::string_view text) noexcept {
  if (text == "Native" || text == "native") return EnvironmentKind::Native;
  if (text == "NaiveContainer" || text == "naive") return EnvironmentKind::NaiveContainer;
  if (text == "MascaraContainer" || text == "mascara") return EnvironmentKind::MascaraContainer;
  return std::nullopt;
}

namespace {

VerdictCounts tally(const std::vector<ProbeOutcome>& outcomes, bool classic_only) {
  VerdictCounts c;
  for (const auto& o : outcomes) {
    if (classic_only && !is_classic(o.probe)) continue;
    switch (o.verdict) {
      case Verdict::VirtualDetected:
        ++c.virtual_detected;
        break;
      case Verdict::Clean:
        ++c.clean;
        break;
      case Verdict::Inconclusive:
        ++c.inconclusive;
        break;
      case Verdict::Error:
        ++c.error;
        break;
    }
  }
  return c;
}

}  // namespace

VerdictCounts DetectionReport::counts() const { return tally(outcomes, false); }
VerdictCounts DetectionReport::classic_counts() const { return tally(outcomes, true); }

const ProbeOutcome& DetectionReport::outcome(ProbeId id) const {
  for (const auto& o : outcomes) {
    if (o.probe == id) return o;
  }
  throw InvariantViolation("report for " + std::string(to_string(environment)) + " lacks probe " +
                           probe_key(id));
}

std::vector<PsLine> parse_ps(std::string_view text) {
  std::vector<PsLine> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string pid, uid, name, extra;
    if (!(fields >> pid >> uid >> name) || (fields >> extra)) continue;
    PsLine parsed;
    auto to_int = [](const std::string& s, std::int64_t& v) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc() && ptr == s.data() + s.size();
    };
    if (!to_int(pid, parsed.pid) || !to_int(uid, parsed.uid)) continue;
    parsed.name = std::move(name);
    out.push_back(std::move(parsed));
  }
  return out;
}

namespace {

ProbeOutcome make(ProbeId id, Verdict v, std::string evidence) { return {id, v, std::move(evidence)}; }

bool starts_with(std::string_view s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }
bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> undeclared_stores(const AppManifest& own) {
  std::vector<std::string> out;
  for (const auto& [store, guard] : stores::guards()) {
    if (!own.permissions.contains(guard)) out.push_back(store);
  }
  return out;
}

ProbeOutcome probe_resources(ProbeEnvironment& env, ProbeId id) {
  const auto stores = undeclared_stores(env.declared_manifest());
  if (stores.empty()) return make(id, Verdict::Inconclusive, "every guarded store is declared");
  for (const auto& store : stores) {
    try {
      env.call(ApiCall::access_resource(store));
      return make(id, Verdict::VirtualDetected, "read undeclared store " + store);
    } catch (const ApiError& e) {
      if (e.code() != ApiErrorCode::PermissionDenied) throw;
    }
  }
  return make(id, Verdict::Clean, "all " + std::to_string(stores.size()) + " undeclared stores denied");
}

ProbeOutcome probe_package_permissions(ProbeEnvironment& env) {
  const AppManifest& own = env.declared_manifest();
  try {
    const auto info = env.call(ApiCall::get_package_info(own.package)).as<PackageInfo>();
    if (info.permissions != own.permissions) {
      return make(ProbeId::M2, Verdict::VirtualDetected, "package permissions differ from declared");
    }
    return make(ProbeId::M2, Verdict::Clean, "package permissions match declared");
  } catch (const ApiError& e) {
    if (e.code() != ApiErrorCode::PackageNotFound) throw;
    return make(ProbeId::M2, Verdict::VirtualDetected, "own package is not installed");
  }
}

ProbeOutcome probe_check_permission(ProbeEnvironment& env) {
  const AppManifest& own = env.declared_manifest();
  std::size_t checked = 0;
  for (const auto& p : perm::dangerous()) {
    if (own.permissions.contains(p)) continue;
    ++checked;
    if (env.call(ApiCall::check_permission(p)).as<bool>()) {
      return make(ProbeId::M3, Verdict::VirtualDetected, "granted undeclared " + p);
    }
  }
  for (const auto& store : undeclared_stores(own)) {
    ++checked;
    try {
      env.call(ApiCall::access_resource(store));
      return make(ProbeId::M3, Verdict::VirtualDetected, "guarded action on " + store + " succeeded");
    } catch (const ApiError& e) {
      if (e.code() != ApiErrorCode::PermissionDenied) throw;
    }
  }
  if (checked == 0) return make(ProbeId::M3, Verdict::Inconclusive, "every dangerous permission is declared");
  return make(ProbeId::M3, Verdict::Clean, "no undeclared dangerous permission granted");
}

ProbeOutcome probe_installed(ProbeEnvironment& env) {
  const std::string& own = env.declared_manifest().package;
  const auto names = env.call(ApiCall::get_installed_packages()).as<StringList>();
  if (std::find(names.begin(), names.end(), own) == names.end()) {
    return make(ProbeId::M4, Verdict::VirtualDetected, own + " absent from installed packages");
  }
  return make(ProbeId::M4, Verdict::Clean, own + " installed");
}

std::optional<ComponentName> foreign_entry(const AppManifest& own, const ComponentList& entries) {
  for (const auto& e : entries) {
    if (e.package != own.package || own.find_component(e.name) == nullptr) return e;
  }
  return std::nullopt;
}

ProbeOutcome probe_tasks(ProbeEnvironment& env) {
  const AppManifest& own = env.declared_manifest();
  std::size_t seen = 0;
  for (const auto& call : {ApiCall::get_recent_tasks(), ApiCall::get_running_tasks()}) {
    const auto entries = env.call(call).as<ComponentList>();
    seen += entries.size();
    if (auto foreign = foreign_entry(own, entries)) {
      return make(ProbeId::M5, Verdict::VirtualDetected,
                  "foreign task " + foreign->package + "/" + foreign->name);
    }
  }
  return make(ProbeId::M5, Verdict::Clean, std::to_string(seen) + " task entries, all own");
}

ProbeOutcome probe_services(ProbeEnvironment& env) {
  const auto entries = env.call(ApiCall::get_running_services()).as<ComponentList>();
  if (auto foreign = foreign_entry(env.declared_manifest(), entries)) {
    return make(ProbeId::M6, Verdict::VirtualDetected,
                "foreign service " + foreign->package + "/" + foreign->name);
  }
  return make(ProbeId::M6, Verdict::Inconclusive, "service list is restricted to the caller");
}

ProbeOutcome probe_processes(ProbeEnvironment& env) {
  const std::string& own = env.declared_manifest().package;
  const auto procs = env.call(ApiCall::get_running_app_processes()).as<ProcessList>();
  for (const auto& p : procs) {
    if (p.name != own) return make(ProbeId::M7, Verdict::VirtualDetected, "same-uid process " + p.name);
  }
  return make(ProbeId::M7, Verdict::Clean, std::to_string(procs.size()) + " process(es), all named " + own);
}

ProbeOutcome probe_ps(ProbeEnvironment& env) {
  const auto lines = parse_ps(env.call(ApiCall::exec_shell("ps")).as<std::string>());
  std::map<std::int64_t, std::set<std::string>> names_by_uid;
  for (const auto& l : lines) names_by_uid[l.uid].insert(l.name);
  for (const auto& [uid, names] : names_by_uid) {
    if (names.size() > 1) {
      return make(ProbeId::M8, Verdict::VirtualDetected,
                  std::to_string(names.size()) + " distinct names under uid " + std::to_string(uid));
    }
  }
  return make(ProbeId::M8, Verdict::Clean, std::to_string(lines.size()) + " ps line(s)");
}

ProbeOutcome probe_app_info(ProbeEnvironment& env, ProbeId id) {
  const std::string& own = env.declared_manifest().package;
  const auto info = env.call(ApiCall::get_application_info(own)).as<ApplicationInfo>();
  if (id == ProbeId::M9) {
    if (info.data_dir != native_data_dir(own)) {
      return make(id, Verdict::VirtualDetected, "data_dir " + info.data_dir);
    }
    return make(id, Verdict::Clean, "data_dir " + info.data_dir);
  }
  if (info.source_dir != native_apk_path(own)) {
    return make(id, Verdict::VirtualDetected, "source_dir " + info.source_dir);
  }
  return make(id, Verdict::Clean, "source_dir " + info.source_dir);
}

ProbeOutcome probe_maps(ProbeEnvironment& env, ProbeId id) {
  const std::string& own = env.declared_manifest().package;
  std::vector<std::string> maps;
  try {
    maps = env.call(ApiCall::read_proc_maps()).as<StringList>();
  } catch (const ApiError& e) {
    if (e.code() != ApiErrorCode::AccessDenied) throw;
    return make(id, Verdict::Clean, "/proc/self/maps access denied");
  }
  const std::string own_segment = "/" + own + "/";
  const std::string own_app_dir = "/data/app/" + own + "/";
  for (const auto& path : maps) {
    const bool apk = ends_with(path, ".apk");
    if (id == ProbeId::M11 && apk && path.find(own_segment) == std::string::npos) {
      return make(id, Verdict::VirtualDetected, "foreign apk " + path);
    }
    if (id == ProbeId::M12 && !apk && starts_with(path, "/data/") && !starts_with(path, own_app_dir)) {
      return make(id, Verdict::VirtualDetected, "foreign library path " + path);
    }
  }
  return make(id, Verdict::Clean, std::to_string(maps.size()) + " mapping(s), all own");
}

ProbeOutcome probe_start_services(ProbeEnvironment& env) {
  const auto& services = env.declared_manifest().services;
  const std::size_t n = std::min<std::size_t>(3, services.size());
  if (n == 0) return make(ProbeId::M13, Verdict::Inconclusive, "no declared services to launch");
  for (std::size_t i = 0; i < n; ++i) {
    try {
      env.call(ApiCall::start_service(services[i].name));
    } catch (const ApiError& e) {
      if (e.code() != ApiErrorCode::ComponentNotRegistered) throw;
      return make(ProbeId::M13, Verdict::VirtualDetected,
                  "service #" + std::to_string(i + 1) + " " + services[i].name + " failed to start");
    }
  }
  return make(ProbeId::M13, Verdict::Clean, std::to_string(n) + " service(s) started");
}

ProbeOutcome probe_components(ProbeEnvironment& env) {
  const AppManifest& own = env.declared_manifest();
  PackageInfo info;
  try {
    info = env.call(ApiCall::get_package_info(own.package)).as<PackageInfo>();
  } catch (const ApiError& e) {
    if (e.code() != ApiErrorCode::PackageNotFound) throw;
    return make(ProbeId::M14, Verdict::VirtualDetected, "own package is not installed");
  }
  auto declared = extract_components(own);
  auto reported = info.components;
  std::sort(declared.begin(), declared.end());
  std::sort(reported.begin(), reported.end());
  if (declared != reported) {
    return make(ProbeId::M14, Verdict::VirtualDetected,
                std::to_string(reported.size()) + " reported vs " + std::to_string(declared.size()) +
                    " declared components");
  }
  return make(ProbeId::M14, Verdict::Clean, std::to_string(declared.size()) + " components match");
}

ProbeOutcome probe_receivers(ProbeEnvironment& env) {
  const auto& receivers = env.declared_manifest().receivers;
  if (receivers.empty()) return make(ProbeId::M15, Verdict::Inconclusive, "no declared receivers");
  for (const auto& r : receivers) {
    try {
      env.call(ApiCall::unregister_receiver(r.name));
    } catch (const ApiError& e) {
      if (e.code() == ApiErrorCode::StaticReceiver) {
        return make(ProbeId::M15, Verdict::Clean, r.name + " is statically registered");
      }
      if (e.code() == ApiErrorCode::UnknownReceiver) {
        return make(ProbeId::M15, Verdict::Inconclusive, r.name + " is not registered at all");
      }
      throw;
    }
  }
  for (const auto& r : receivers) {
    for (const auto& action : r.intents) {
      for (const auto& hit : env.call(ApiCall::send_broadcast(action)).as<ComponentList>()) {
        if (hit.name == r.name) {
          return make(ProbeId::M15, Verdict::Clean, r.name + " still receives " + action);
        }
      }
    }
  }
  return make(ProbeId::M15, Verdict::VirtualDetected,
              "all " + std::to_string(receivers.size()) + " receiver(s) unregistered dynamically");
}

ProbeOutcome probe_component_enabled(ProbeEnvironment& env) {
  const auto components = extract_components(env.declared_manifest());
  if (components.empty()) return make(ProbeId::M16, Verdict::Inconclusive, "no declared components");
  const std::string& name = components.front().name;
  try {
    env.call(ApiCall::set_component_enabled(name));
  } catch (const ApiError& e) {
    if (e.code() != ApiErrorCode::ComponentNotRegistered) throw;
    return make(ProbeId::M16, Verdict::VirtualDetected, name + " is not registered with the system");
  }
  return make(ProbeId::M16, Verdict::Clean, name + " toggled");
}

ProbeOutcome probe_native_sharing(ProbeEnvironment& env) {
  const AppManifest& own = env.declared_manifest();
  if (own.native_components.empty()) {
    return make(ProbeId::M17, Verdict::Clean, "no native components to share through");
  }
  for (const auto& native : own.native_components) {
    for (const auto& token : env.call(ApiCall::shared_native_data(native, own.package)).as<StringList>()) {
      if (token != own.package) {
        return make(ProbeId::M17, Verdict::VirtualDetected, native + " carries foreign token " + token);
      }
    }
  }
  return make(ProbeId::M17, Verdict::Clean, "native data holds only own tokens");
}

ProbeOutcome probe_lifecycle(ProbeEnvironment& env) {
  const auto frames = env.call(ApiCall::get_lifecycle_trace()).as<StringList>();
  for (const auto& f : frames) {
    if (f.find("Proxy") != std::string::npos || f.find("Hook") != std::string::npos) {
      return make(ProbeId::M18, Verdict::VirtualDetected, "proxy frame " + f);
    }
  }
  return make(ProbeId::M18, Verdict::Inconclusive,
              std::to_string(frames.size()) + " lifecycle frames, no distinguishing frame");
}

ProbeOutcome probe_singular(ProbeEnvironment& env) {
  const std::string sentinel(art::kDefaultSentinel);
  for (std::uint64_t i = 0; i < art::kMinInvocations; ++i) env.call(ApiCall::invoke_method(sentinel));
  const auto record = env.call(ApiCall::inspect_art_method(sentinel)).as<art::ArtMethodRecord>();
  return art::singular_check(record);
}

}  // namespace

ProbeOutcome run_probe(ProbeEnvironment& env, ProbeId id) {
  switch (id) {
    case ProbeId::M1:
      return probe_resources(env, id);
    case ProbeId::M2:
      return probe_package_permissions(env);
    case ProbeId::M3:
      return probe_check_permission(env);
    case ProbeId::M4:
      return probe_installed(env);
    case ProbeId::M5:
      return probe_tasks(env);
    case ProbeId::M6:
      return probe_services(env);
    case ProbeId::M7:
      return probe_processes(env);
    case ProbeId::M8:
      return probe_ps(env);
    case ProbeId::M9:
    case ProbeId::M10:
      return probe_app_info(env, id);
    case ProbeId::M11:
    case ProbeId::M12:
      return probe_maps(env, id);
    case ProbeId::M13:
      return probe_start_services(env);
    case ProbeId::M14:
      return probe_components(env);
    case ProbeId::M15:
      return probe_receivers(env);
    case ProbeId::M16:
      return probe_component_enabled(env);
    case ProbeId::M17:
      return probe_native_sharing(env);
    case ProbeId::M18:
      return probe_lifecycle(env);
    case ProbeId::Singular:
      return probe_singular(env);
  }
  throw InvariantViolation("unknown probe id");
}

}  // namespace vbasim
