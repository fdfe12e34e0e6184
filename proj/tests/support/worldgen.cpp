#include "worldgen.hpp"

#include "vbasim/corpus.hpp"
#include "vbasim/simos.hpp"

namespace vbasim::testing {

namespace {

const char* const kActions[] = {"android.provider.Telephony.SMS_RECEIVED", "android.intent.action.BOOT_COMPLETED",
                                "org.example.PING"};

}  // namespace

AppManifest WorldGen::manifest(const std::string& package, bool with_launcher) {
  AppManifest m;
  m.package = package;
  m.label = next(3) == 0 ? "Some App" : "App" + std::to_string(next(100));
  m.version = static_cast<std::int64_t>(next(50));
  m.launcher_icon = "ic_" + std::to_string(next(10)) + ".png";
  for (const auto& p : corpus::catalog_permissions()) {
    if (coin()) m.permissions.insert(p);
  }
  if (next(3) == 0) m.native_components.insert("webview");
  if (next(5) == 0) m.native_components.insert("media");
  std::size_t serial = 0;
  auto name = [&](const char* stem) { return "." + std::string(stem) + std::to_string(serial++); };
  if (with_launcher || coin()) {
    m.activities.push_back({".Main", ComponentKind::Activity, true, false, {}, {}, {}});
  }
  for (std::uint64_t i = next(3); i > 0; --i) {
    m.activities.push_back({name("Screen"), ComponentKind::Activity, false, false, {}, {}, {}});
  }
  for (std::uint64_t i = next(5); i > 0; --i) {
    m.services.push_back({name("Worker"), ComponentKind::Service, false, false, {}, {}, {}});
  }
  for (std::uint64_t i = next(3); i > 0; --i) {
    Component r{name("Listener"), ComponentKind::Receiver, false, false, {}, {}, {}};
    for (std::uint64_t k = next(3); k > 0; --k) r.intents.push_back(kActions[next(3)]);
    m.receivers.push_back(std::move(r));
  }
  for (std::uint64_t i = next(2); i > 0; --i) {
    m.providers.push_back({name("Store"), ComponentKind::Provider, false, false, {}, {}, {}});
  }
  validate_manifest(m);
  return m;
}

AppManifest WorldGen::container_template() {
  AppManifest t;
  t.package = "com.host.container";
  t.label = "Host";
  t.version = 1;
  t.launcher_icon = "ic_host.png";
  if (next(4) == 0) {
    for (const auto& p : corpus::catalog_permissions()) {
      if (coin()) t.permissions.insert(p);
    }
  } else {
    t.permissions.insert(perm::all_known().begin(), perm::all_known().end());
  }
  t.activities.push_back({".PluginLauncherActivity", ComponentKind::Activity, true, false, {}, {}, {}});
  for (std::uint64_t i = next(4); i > 0; --i) {
    t.activities.push_back({".PluginActivityStub0" + std::to_string(i), ComponentKind::Activity, false, true, {}, {}, {}});
  }
  for (std::uint64_t i = next(3); i > 0; --i) {
    t.services.push_back({".PluginServiceStub0" + std::to_string(i), ComponentKind::Service, false, true, {}, {}, {}});
  }
  t.services.push_back({".PluginServiceManager", ComponentKind::Service, false, false, {}, {}, {}});
  if (coin()) t.providers.push_back({".PluginProviderStub", ComponentKind::Provider, false, true, {}, {}, {}});
  validate_manifest(t);
  return t;
}

ServiceCatalog WorldGen::payload_catalog() {
  ServiceCatalog c;
  c.package = "org.payload.variant";
  c.label = "Payload";
  std::size_t i = 0;
  for (const auto& [store, guard] : stores::guards()) {
    if (next(4) == 0) continue;
    Component s{".Plugin" + std::to_string(i++) + "Service", ComponentKind::Service, false, false, {}, {}, {}};
    s.requires_permissions = {guard, std::string(perm::kInternet)};
    s.payload = store;
    c.entries.push_back(std::move(s));
  }
  return c;
}

ScenarioInputs WorldGen::scenario() {
  ScenarioInputs in;
  const std::uint64_t id = counter_++;
  in.victim = manifest("org.victim.v" + std::to_string(id), true);
  in.addon_template = container_template();
  in.catalog = payload_catalog();
  if (coin()) in.companion = manifest("org.companion.c" + std::to_string(id), coin());
  in.seed = rng_();
  for (const auto& [store, guard] : stores::guards()) {
    if (coin()) in.stores[store] = next(4);
  }
  return in;
}

World WorldGen::world(EnvironmentKind kind) {
  const ScenarioInputs in = scenario();
  switch (kind) {
    case EnvironmentKind::Native: {
      World w = build_native_world(in);
      for (const auto& s : in.victim.services) {
        if (coin()) w.os.syscall(w.probe_pid, ApiCall::start_service(s.name));
      }
      return w;
    }
    case EnvironmentKind::NaiveContainer: {
      World w = build_naive_world(in);
      for (const auto& s : in.victim.services) {
        if (next(3) != 0) continue;
        try {
          w.container->plugin_syscall(w.os, w.probe_pid, ApiCall::start_service(s.name));
        } catch (const ApiError&) {
          // Out of stubs; the world simply has fewer running services.
        }
      }
      return w;
    }
    case EnvironmentKind::MascaraContainer: {
      MascaraOptions options;
      options.install_hooks = next(5) != 0;
      for (auto name : hooks::mascara_hook_names()) {
        if (next(3) == 0) options.skip_hooks.insert(std::string(name));
      }
      options.ticks = next(3);
      return build_mascara_world(in, options);
    }
  }
  return build_native_world(in);
}

World WorldGen::any_world() { return world(static_cast<EnvironmentKind>(next(3))); }

}  // namespace vbasim::testing
