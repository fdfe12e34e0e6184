#include "vbasim/container.hpp"

#include <algorithm>
#include <cstdio>

#include "vbasim/errors.hpp"

namespace vbasim {

std::string_view to_string(HookLayer layer) noexcept {
  return layer == HookLayer::Proxy ? "Proxy" : "LowLevel";
}

std::string_view to_string(HookMode mode) noexcept {
  switch (mode) {
    case HookMode::Before:
      return "Before";
    case HookMode::After:
      return "After";
    case HookMode::Replace:
      return "Replace";
  }
  return "?";
}

std::size_t RunLog::warnings() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const RunLogEntry& e) { return e.warning; }));
}

std::filesystem::path DirectoryCatalog::file_for(const std::filesystem::path& dir,
                                                 std::string_view package) {
  return dir / (std::string(package) + ".json");
}

AppManifest DirectoryCatalog::fetch(std::string_view package) const {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir_, ec)) {
    throw CatalogFetchError("catalog source " + dir_.string() + " does not exist");
  }
  const auto file = file_for(dir_, package);
  if (!std::filesystem::is_regular_file(file, ec)) {
    throw CatalogFetchError("catalog source has no variant " + std::string(package));
  }
  try {
    return load_manifest_file(file);
  } catch (const Error& e) {
    throw CatalogFetchError("catalog variant " + std::string(package) + " is unreadable: " + e.what());
  }
}

void MemoryCatalog::put(AppManifest manifest) {
  std::string key = manifest.package;
  variants_.insert_or_assign(std::move(key), std::move(manifest));
}

AppManifest MemoryCatalog::fetch(std::string_view package) const {
  auto it = variants_.find(package);
  if (it == variants_.end()) throw CatalogFetchError("catalog has no variant " + std::string(package));
  return it->second;
}

Container Container::create(SimOs& os, const AppManifest& addon) {
  const PackageRecord& record = os.package(addon.package);
  Container c;
  c.addon_package_ = addon.package;
  c.addon_ = record.manifest;
  c.uid_ = record.uid;
  c.plugin_data_root_ = record.data_dir + "/Plugin";
  for (auto kind : {ComponentKind::Activity, ComponentKind::Service, ComponentKind::Provider}) {
    for (const auto& comp : c.addon_.components_of(kind)) {
      if (comp.stub) c.stubs_.push_back(comp);
    }
  }
  c.container_pid_ = os.spawn_process(addon.package, addon.package,
                                      {record.apk_path, native_lib_dir(addon.package)});
  return c;
}

std::string Container::plugin_data_dir(std::string_view plugin_package) const {
  return plugin_data_root_ + "/" + std::string(plugin_package);
}

std::string Container::downloaded_apk_path(std::string_view plugin_package) const {
  return plugin_data_dir(plugin_package) + "/apk/base-1.apk";
}

const PluginRecord* Container::find_plugin(std::string_view package) const {
  auto it = plugins_.find(package);
  return it == plugins_.end() ? nullptr : &it->second;
}

const PluginRecord* Container::plugin_for_pid(Pid pid) const {
  for (const auto& [name, plugin] : plugins_) {
    if (plugin.pid == pid) return &plugin;
  }
  return nullptr;
}

Pid Container::load_plugin(SimOs& os, const AppManifest& plugin, std::string plugin_apk_path) {
  validate_manifest(plugin);
  if (plugins_.contains(plugin.package)) {
    throw AlreadyLoadedError(plugin.package + " is already loaded in " + addon_package_);
  }
  const SimProcess& host = os.process(container_pid_);
  const std::string data_dir = plugin_data_dir(plugin.package);

  // An APK read straight from an installed app keeps that app's native lib
  // dir; anything the container unpacked itself gets libs under the plugin dir.
  std::string lib_dir = data_dir + "/lib";
  const std::string installed_prefix = "/data/app/" + plugin.package + "/";
  if (plugin_apk_path.rfind(installed_prefix, 0) == 0) lib_dir = native_lib_dir(plugin.package);

  std::vector<std::string> maps;
  for (const auto& entry : host.memory_maps) maps.push_back(entry);
  maps.push_back(plugin_apk_path);
  maps.push_back(lib_dir);

  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), ":PluginP%02zu", plugins_.size());
  const Pid pid = os.fork_process(container_pid_, addon_package_ + suffix, std::move(maps),
                                  art::RuntimeKind::Virtual);

  os.add_data_dir_entry(addon_package_, "Plugin");
  for (const auto& receiver : plugin.receivers) {
    const Component* declared = addon_.find_component(receiver.name);
    if (declared != nullptr && declared->kind == ComponentKind::Receiver) continue;
    os.register_dynamic_receiver(pid, receiver.name, receiver.intents);
  }
  for (const auto& native : plugin.native_components) os.shared_native_data(pid, native, plugin.package);

  PluginRecord record;
  record.manifest = plugin;
  record.pid = pid;
  record.apk_path = std::move(plugin_apk_path);
  record.data_dir = data_dir;
  plugins_.emplace(plugin.package, std::move(record));
  return pid;
}

void Container::set_foreground(std::string_view package) {
  if (!plugins_.contains(package)) {
    throw UnknownPackageError(std::string(package) + " is not loaded in " + addon_package_);
  }
  foreground_ = std::string(package);
}

void Container::install_hook(HookSpec hook) {
  (hook.layer == HookLayer::Proxy ? proxy_hooks_ : lowlevel_hooks_).push_back(std::move(hook));
}

std::size_t Container::remove_hooks(std::string_view name) {
  std::size_t removed = 0;
  for (auto* list : {&proxy_hooks_, &lowlevel_hooks_}) {
    removed += std::erase_if(*list, [&](const HookSpec& h) { return h.name == name; });
  }
  return removed;
}

std::string Container::rewrite_request_name(std::string_view plugin_package, ComponentKind kind,
                                            std::string_view name) {
  for (const auto& b : bindings_) {
    if (b.plugin_package == plugin_package && b.kind == kind && b.plugin_component == name) return b.stub;
  }
  auto taken = [&](std::string_view stub) {
    return std::any_of(bindings_.begin(), bindings_.end(),
                       [&](const StubBinding& b) { return b.stub == stub; });
  };
  std::optional<std::string> chosen;
  const Component* same = addon_.find_component(name);
  if (same != nullptr && same->kind == kind && !taken(name)) {
    chosen = std::string(name);
  } else {
    for (const auto& stub : stubs_) {
      if (stub.kind == kind && !taken(stub.name)) {
        chosen = stub.name;
        break;
      }
    }
  }
  if (!chosen) return std::string(name);
  bindings_.push_back({std::string(plugin_package), kind, std::string(name), *chosen});
  return *chosen;
}

std::optional<ComponentName> Container::rewrite_reply_name(std::string_view framework_name) const {
  for (const auto& b : bindings_) {
    if (b.stub == framework_name) return ComponentName{b.plugin_package, b.plugin_component};
  }
  return std::nullopt;
}

void Container::rewrite_reply(ComponentList& entries) const {
  for (auto& entry : entries) {
    if (entry.package != addon_package_) continue;
    if (auto original = rewrite_reply_name(entry.name)) entry = *original;
  }
}

ApiReply Container::baseline(SimOs& os, const PluginRecord& plugin, const ApiCall& call) {
  auto component_call = [&](ComponentKind kind) {
    ApiCall outgoing = call;
    const Component* declared = plugin.manifest.find_component(call.target);
    if (declared != nullptr && declared->kind == kind) {
      outgoing.target = rewrite_request_name(plugin.manifest.package, kind, call.target);
    }
    return os.syscall(plugin.pid, outgoing);
  };

  switch (call.kind) {
    case ApiKind::StartActivity:
      return component_call(ComponentKind::Activity);
    case ApiKind::StartService: {
      ApiReply reply = component_call(ComponentKind::Service);
      auto& started = plugins_.at(plugin.manifest.package).started_services;
      if (std::find(started.begin(), started.end(), call.target) == started.end()) {
        started.push_back(call.target);
      }
      return reply;
    }
    case ApiKind::AcquireProvider:
      return component_call(ComponentKind::Provider);
    case ApiKind::GetApplicationInfo:
      // A loaded plugin's ApplicationInfo comes from the container's own records.
      if (const PluginRecord* target = find_plugin(call.target)) {
        return {ApplicationInfo{target->manifest.package, target->apk_path, target->data_dir}};
      }
      return os.syscall(plugin.pid, call);
    case ApiKind::GetRecentTasks:
    case ApiKind::GetRunningTasks:
    case ApiKind::GetRunningServices: {
      ApiReply reply = os.syscall(plugin.pid, call);
      rewrite_reply(reply.as<ComponentList>());
      return reply;
    }
    default:
      return os.syscall(plugin.pid, call);
  }
}

namespace {

Exchange apply_or_throw(const HookSpec& hook, Exchange exchange) {
  HookOutcome outcome = hook.transform(std::move(exchange));
  if (auto* refusal = std::get_if<Refusal>(&outcome)) {
    throw ApiError(refusal->code, refusal->detail + " [" + hook.name + "]");
  }
  return std::get<Exchange>(std::move(outcome));
}

}  // namespace

ApiReply Container::plugin_syscall(SimOs& os, Pid caller, const ApiCall& call) {
  const PluginRecord* plugin = plugin_for_pid(caller);
  if (plugin == nullptr) {
    throw UnknownProcessError("pid " + std::to_string(caller) + " is not a plugin of " + addon_package_);
  }
  const ApiKind kind = call.kind;
  Exchange exchange{call, ApiReply{}};
  bool replaced = false;

  for (const auto* layer : {&lowlevel_hooks_, &proxy_hooks_}) {
    for (const auto& hook : *layer) {
      if (replaced) break;
      if (hook.target != kind || hook.mode == HookMode::After) continue;
      exchange = apply_or_throw(hook, std::move(exchange));
      if (hook.mode == HookMode::Replace) replaced = true;
    }
  }

  if (!replaced) exchange.reply = baseline(os, *plugin, exchange.call);

  // After hooks unwind in reverse: proxy layer first, then low-level.
  for (const auto* layer : {&proxy_hooks_, &lowlevel_hooks_}) {
    for (auto it = layer->rbegin(); it != layer->rend(); ++it) {
      if (it->target != kind || it->mode != HookMode::After) continue;
      exchange = apply_or_throw(*it, std::move(exchange));
    }
  }
  return std::move(exchange.reply);
}

const RunLog& Container::first_run(SimOs& os, std::string_view victim_package,
                                   const CatalogSource& source, std::string_view payload_package) {
  const PackageRecord& victim = os.package(victim_package);
  const AppManifest victim_manifest = victim.manifest;
  const std::string victim_apk = victim.apk_path;

  const auto killed = os.kill_background_processes(container_pid_, victim_package);
  run_log_.add("kill_background_processes",
               "stopped " + std::to_string(killed) + " process(es) of " + std::string(victim_package));

  std::string label = addon_.shortcut_label;
  std::string icon = addon_.shortcut_icon;
  if (label.empty() || icon.empty()) {
    label = victim_manifest.label;
    icon = victim_manifest.launcher_icon;
  }
  Shortcut planted{label, icon, addon_package_};
  const auto& existing = os.shortcuts();
  const bool duplicate = std::find(existing.begin(), existing.end(), planted) != existing.end();
  os.create_shortcut(container_pid_, label, icon, addon_package_);
  run_log_.add("create_shortcut", "'" + label + "' (" + icon + ") -> " + addon_package_);
  if (duplicate) run_log_.add("create_shortcut", "an identical shortcut already existed", true);

  AppManifest payload = source.fetch(payload_package);
  run_log_.add("fetch_payload", payload.package + " with " + std::to_string(payload.services.size()) +
                                    " service(s)");

  const Pid payload_pid = load_plugin(os, payload, downloaded_apk_path(payload.package));
  payload_package_ = payload.package;
  run_log_.add("load_payload", payload.package + " as pid " + std::to_string(payload_pid));
  for (const auto& svc : payload.services) {
    try {
      plugin_syscall(os, payload_pid, ApiCall::start_service(svc.name));
      run_log_.add("start_service", svc.name);
    } catch (const ApiError& e) {
      run_log_.add("start_service", svc.name + " failed: " + e.what(), true);
    }
  }

  const Pid victim_pid = load_plugin(os, victim_manifest, victim_apk);
  set_foreground(victim_manifest.package);
  run_log_.add("load_victim", victim_manifest.package + " as foreground pid " + std::to_string(victim_pid));
  if (const Component* launcher = victim_manifest.launcher_activity()) {
    try {
      plugin_syscall(os, victim_pid, ApiCall::start_activity(launcher->name));
    } catch (const ApiError& e) {
      run_log_.add("start_activity", launcher->name + " failed: " + e.what(), true);
    }
  }
  return run_log_;
}

void Container::tick_services(SimOs& os) {
  if (!payload_package_) return;
  const PluginRecord* payload = find_plugin(*payload_package_);
  if (payload == nullptr) return;
  const Pid pid = payload->pid;
  const AppManifest manifest = payload->manifest;
  const std::vector<std::string> started = payload->started_services;
  for (const auto& name : started) {
    const Component* svc = manifest.find_component(name);
    if (svc == nullptr || svc->payload.empty()) continue;
    std::vector<std::string> records;
    try {
      records = plugin_syscall(os, pid, ApiCall::access_resource(svc->payload)).as<StringList>();
    } catch (const ApiError& e) {
      run_log_.add("tick_services", name + ": " + e.what(), true);
      continue;
    }
    std::size_t& cursor = exfil_cursor_[name];
    for (; cursor < records.size(); ++cursor) {
      try {
        plugin_syscall(os, pid, ApiCall::network_send(svc->payload, records[cursor]));
      } catch (const ApiError& e) {
        run_log_.add("tick_services", name + ": " + e.what(), true);
        break;
      }
    }
  }
}

namespace hooks {

const std::vector<std::string_view>& mascara_hook_names() {
  static const std::vector<std::string_view> names = {kProcessNames, kExecPs, kAppInfoDataDir, kProcMaps};
  return names;
}

HookSpec process_names(std::string victim_package) {
  HookSpec h;
  h.name = std::string(kProcessNames);
  h.layer = HookLayer::Proxy;
  h.target = ApiKind::GetRunningAppProcesses;
  h.mode = HookMode::After;
  h.transform = [victim = std::move(victim_package)](Exchange ex) -> HookOutcome {
    for (auto& proc : ex.reply.as<ProcessList>()) proc.name = victim;
    return ex;
  };
  return h;
}

HookSpec exec_ps_to_ls() {
  HookSpec h;
  h.name = std::string(kExecPs);
  h.layer = HookLayer::LowLevel;
  h.target = ApiKind::ExecShell;
  h.mode = HookMode::Before;
  h.transform = [](Exchange ex) -> HookOutcome {
    if (ex.call.target == "ps") ex.call.target = "ls";
    return ex;
  };
  return h;
}

HookSpec app_info_native_data_dir() {
  HookSpec h;
  h.name = std::string(kAppInfoDataDir);
  h.layer = HookLayer::Proxy;
  h.target = ApiKind::GetApplicationInfo;
  h.mode = HookMode::After;
  h.transform = [](Exchange ex) -> HookOutcome {
    auto& info = ex.reply.as<ApplicationInfo>();
    info.data_dir = native_data_dir(info.package);
    return ex;
  };
  return h;
}

HookSpec deny_proc_maps() {
  HookSpec h;
  h.name = std::string(kProcMaps);
  h.layer = HookLayer::LowLevel;
  h.target = ApiKind::ReadProcMaps;
  h.mode = HookMode::Replace;
  h.transform = [](Exchange) -> HookOutcome {
    return Refusal{ApiErrorCode::AccessDenied, "/proc/self/maps is not readable"};
  };
  return h;
}

}  // namespace hooks

void install_mascara_hookset(Container& container, std::string_view victim_package) {
  container.install_hook(hooks::process_names(std::string(victim_package)));
  container.install_hook(hooks::exec_ps_to_ls());
  container.install_hook(hooks::app_info_native_data_dir());
  container.install_hook(hooks::deny_proc_maps());
}

}  // namespace vbasim
