#include "vbasim/environment.hpp"

#include <fstream>
#include <future>

#include <json.hpp>

#include "vbasim/errors.hpp"

namespace vbasim {

namespace {

using json = nlohmann::ordered_json;

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError(key, "missing field");
  return *it;
}

std::string require_string(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_string()) throw SchemaError(key, "expected a string");
  return v.get<std::string>();
}

Pid spawn_native(SimOs& os, const AppManifest& m) {
  const Pid pid = os.spawn_process(m.package, m.package, {native_apk_path(m.package), native_lib_dir(m.package)});
  if (const Component* launcher = m.launcher_activity()) os.syscall(pid, ApiCall::start_activity(launcher->name));
  return pid;
}

void start_plugin_launcher(Container& c, SimOs& os, Pid pid, const AppManifest& m) {
  const Component* launcher = m.launcher_activity();
  if (launcher == nullptr) return;
  try {
    c.plugin_syscall(os, pid, ApiCall::start_activity(launcher->name));
  } catch (const ApiError& e) {
    // No stub left to host it: the plugin runs without a visible activity.
    if (e.code() != ApiErrorCode::ComponentNotRegistered) throw;
  }
}

}  // namespace

ScenarioInputs load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string(), "cannot open scenario");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string(), e.what());
  }
  if (!doc.is_object()) throw SchemaError(path.string(), "scenario must be an object");
  static const std::set<std::string> known = {"victim", "template", "catalog_dir", "payload_package",
                                              "companion", "seed", "stores"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw SchemaError(key, "unknown scenario key");
  }
  const auto base = path.parent_path();
  ScenarioInputs out;
  out.victim = load_manifest_file(base / require_string(doc, "victim"));
  out.addon_template = load_manifest_file(base / require_string(doc, "template"));
  const auto catalog_dir = base / require_string(doc, "catalog_dir");
  const std::string payload = require_string(doc, "payload_package");
  out.catalog = ServiceCatalog::from_manifest(DirectoryCatalog(catalog_dir).fetch(payload));
  if (doc.contains("companion")) out.companion = load_manifest_file(base / require_string(doc, "companion"));
  const json& seed = require(doc, "seed");
  if (!seed.is_number_unsigned()) throw SchemaError("seed", "expected a non-negative integer");
  out.seed = seed.get<std::uint64_t>();
  if (doc.contains("stores")) {
    const json& stores = doc["stores"];
    if (!stores.is_object()) throw SchemaError("stores", "expected an object");
    for (const auto& [store, count] : stores.items()) {
      if (!count.is_number_unsigned()) throw SchemaError("stores." + store, "expected a non-negative integer");
      if (!stores::guard_of(store)) throw SchemaError("stores." + store, "unknown data store");
      out.stores[store] = count.get<std::size_t>();
    }
  }
  return out;
}

ApiReply WorldProbeEnvironment::call(const ApiCall& call) {
  if (world_.container) return world_.container->plugin_syscall(world_.os, world_.probe_pid, call);
  return world_.os.syscall(world_.probe_pid, call);
}

World build_native_world(const ScenarioInputs& in) {
  World w;
  w.kind = EnvironmentKind::Native;
  w.os.seed_stores(in.stores, in.seed);
  w.os.install(in.victim);
  w.probe_pid = spawn_native(w.os, in.victim);
  if (in.companion) {
    w.os.install(*in.companion);
    spawn_native(w.os, *in.companion);
  }
  w.declared = in.victim;
  return w;
}

World build_naive_world(const ScenarioInputs& in) {
  World w;
  w.kind = EnvironmentKind::NaiveContainer;
  w.os.seed_stores(in.stores, in.seed);
  w.os.install(in.addon_template);
  Container c = Container::create(w.os, in.addon_template);
  w.probe_pid = c.load_plugin(w.os, in.victim, c.downloaded_apk_path(in.victim.package));
  start_plugin_launcher(c, w.os, w.probe_pid, in.victim);
  if (in.companion) {
    const Pid pid = c.load_plugin(w.os, *in.companion, c.downloaded_apk_path(in.companion->package));
    start_plugin_launcher(c, w.os, pid, *in.companion);
  }
  c.set_foreground(in.victim.package);
  w.container = std::move(c);
  w.declared = in.victim;
  return w;
}

World build_mascara_world(const ScenarioInputs& in, const MascaraOptions& options,
                          mascarer::CustomizationResult* customization) {
  World w;
  w.kind = EnvironmentKind::MascaraContainer;
  w.os.seed_stores(in.stores, in.seed);
  w.os.install(in.victim);
  spawn_native(w.os, in.victim);

  mascarer::CustomizationResult result = mascarer::customize(in.victim, in.addon_template, in.catalog);
  mascarer::enforce_laws(in.victim, result);
  w.os.install(result.addon);
  Container c = Container::create(w.os, result.addon);
  if (options.install_hooks) {
    install_mascara_hookset(c, in.victim.package);
    for (const auto& name : options.skip_hooks) {
      if (c.remove_hooks(name) + c.remove_hooks("mascara." + name) == 0) {
        throw SchemaError("skip_hooks", "no installed hook named " + name);
      }
    }
  }
  MemoryCatalog source;
  source.put(result.malicious);
  c.first_run(w.os, in.victim.package, source, result.malicious.package);
  for (std::size_t i = 0; i < options.ticks; ++i) c.tick_services(w.os);

  w.probe_pid = c.find_plugin(in.victim.package)->pid;
  w.container = std::move(c);
  w.declared = in.victim;
  if (customization != nullptr) *customization = std::move(result);
  return w;
}

World build_world(EnvironmentKind kind, const ScenarioInputs& in, const MascaraOptions& options) {
  switch (kind) {
    case EnvironmentKind::Native:
      return build_native_world(in);
    case EnvironmentKind::NaiveContainer:
      return build_naive_world(in);
    case EnvironmentKind::MascaraContainer:
      return build_mascara_world(in, options);
  }
  throw InvariantViolation("unknown environment kind");
}

DetectionReport run_all_probes(const World& world) {
  DetectionReport report;
  report.environment = world.kind;
  for (ProbeId id : all_probes()) {
    World copy = world;
    WorldProbeEnvironment env(copy);
    try {
      report.outcomes.push_back(run_probe(env, id));
    } catch (const std::exception& e) {
      report.outcomes.push_back({id, Verdict::Error, e.what()});
    }
  }
  return report;
}

const std::vector<EnvironmentKind>& all_environments() {
  static const std::vector<EnvironmentKind> kinds = {EnvironmentKind::Native, EnvironmentKind::NaiveContainer,
                                                     EnvironmentKind::MascaraContainer};
  return kinds;
}

MatrixRun run_matrix(const ScenarioInputs& in, const std::vector<EnvironmentKind>& environments,
                     const MascaraOptions& options) {
  struct Built {
    DetectionReport report;
    std::optional<mascarer::CustomizationResult> customization;
    RunLog run_log;
  };
  std::vector<std::future<Built>> jobs;
  for (EnvironmentKind kind : environments) {
    jobs.push_back(std::async(std::launch::async, [kind, &in, &options] {
      Built b;
      World w;
      if (kind == EnvironmentKind::MascaraContainer) {
        mascarer::CustomizationResult result;
        w = build_mascara_world(in, options, &result);
        b.customization = std::move(result);
        b.run_log = w.container->run_log();
      } else {
        w = build_world(kind, in, options);
      }
      b.report = run_all_probes(w);
      return b;
    }));
  }
  MatrixRun out;
  for (auto& job : jobs) {
    Built b = job.get();
    out.reports.push_back(std::move(b.report));
    if (b.customization) {
      out.customization = std::move(b.customization);
      out.run_log = std::move(b.run_log);
    }
  }
  return out;
}

}  // namespace vbasim
