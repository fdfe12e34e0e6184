#include "vbasim/simos.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "vbasim/errors.hpp"

namespace vbasim {

std::string native_data_dir(std::string_view package) { return "/data/data/" + std::string(package); }
std::string native_apk_path(std::string_view package) {
  return "/data/app/" + std::string(package) + "/base.apk";
}
std::string native_lib_dir(std::string_view package) {
  return "/data/app/" + std::string(package) + "/lib/arm64";
}

namespace stores {

const std::vector<std::pair<std::string, std::string>>& guards() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"contacts", std::string(perm::kReadContacts)},
      {"sms", std::string(perm::kReadSms)},
      {"incoming_sms", std::string(perm::kReceiveSms)},
      {"call_log", std::string(perm::kReadCallLog)},
      {"phone_state", std::string(perm::kReadPhoneState)},
      {"location", std::string(perm::kAccessFineLocation)},
      {"camera_roll", std::string(perm::kCamera)},
      {"audio", std::string(perm::kRecordAudio)},
  };
  return table;
}

std::optional<std::string> guard_of(std::string_view store) {
  for (const auto& [name, permission] : guards()) {
    if (name == store) return permission;
  }
  return std::nullopt;
}

std::vector<std::string> seed_records(std::string_view store, std::size_t count, std::uint64_t seed) {
  // FNV-1a over the store name keeps each store's stream independent of the others.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : store) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::mt19937_64 rng(seed ^ h);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::ostringstream os;
    os << store << '#' << i << ':' << std::hex << (rng() & 0xffffffffULL);
    out.push_back(os.str());
  }
  return out;
}

}  // namespace stores

const std::vector<std::string>& lifecycle_callbacks() {
  static const std::vector<std::string> names = {
      "Activity.onCreate",  "Activity.onStart",       "Activity.onResume", "Activity.onPause",
      "Activity.onStop",    "Activity.onRestart",     "Activity.onDestroy", "Service.onCreate",
      "Service.onStartCommand", "Service.onBind",     "Service.onDestroy", "BroadcastReceiver.onReceive",
      "ContentProvider.onCreate",
  };
  return names;
}

const PackageRecord& SimOs::install(const AppManifest& manifest) {
  validate_manifest(manifest);
  if (registry_.contains(manifest.package)) {
    throw AlreadyInstalledError(manifest.package + " is already installed");
  }
  PackageRecord record;
  record.manifest = manifest;
  record.uid = next_uid_++;
  record.apk_path = native_apk_path(manifest.package);
  record.data_dir = native_data_dir(manifest.package);
  record.granted_permissions = manifest.permissions;
  for (const auto& r : manifest.receivers) record.static_receivers.insert(r.name);
  data_dir_entries_[manifest.package] = {"cache", "code_cache", "databases", "files", "shared_prefs"};
  return registry_.emplace(manifest.package, std::move(record)).first->second;
}

void SimOs::publish_native_tokens(Uid uid, const AppManifest& manifest) {
  for (const auto& native : manifest.native_components) {
    auto& tokens = native_blobs_[{uid, native}];
    if (std::find(tokens.begin(), tokens.end(), manifest.package) == tokens.end()) {
      tokens.push_back(manifest.package);
    }
  }
}

Pid SimOs::spawn_process(std::string_view package, std::string name, std::vector<std::string> maps) {
  const PackageRecord* record = find_package(package);
  if (record == nullptr) throw UnknownPackageError(std::string(package) + " is not installed");
  SimProcess proc;
  proc.pid = next_pid_++;
  proc.uid = record->uid;
  proc.name = std::move(name);
  proc.owner_package = record->manifest.package;
  proc.memory_maps = std::move(maps);
  proc.runtime = art::RuntimeModel(art::RuntimeKind::Native);
  publish_native_tokens(record->uid, record->manifest);
  const Pid pid = proc.pid;
  processes_.emplace(pid, std::move(proc));
  return pid;
}

Pid SimOs::fork_process(Pid parent, std::string name, std::vector<std::string> maps,
                        art::RuntimeKind runtime) {
  const SimProcess& from = process(parent);
  SimProcess proc;
  proc.pid = next_pid_++;
  proc.uid = from.uid;
  proc.name = std::move(name);
  proc.owner_package = from.owner_package;
  proc.memory_maps = std::move(maps);
  proc.runtime = art::RuntimeModel(runtime);
  const Pid pid = proc.pid;
  processes_.emplace(pid, std::move(proc));
  return pid;
}

void SimOs::kill_process(Pid pid) { processes_.erase(pid); }

const PackageRecord* SimOs::find_package(std::string_view package) const {
  auto it = registry_.find(package);
  return it == registry_.end() ? nullptr : &it->second;
}

const PackageRecord& SimOs::package(std::string_view package) const {
  const PackageRecord* record = find_package(package);
  if (record == nullptr) throw UnknownPackageError(std::string(package) + " is not installed");
  return *record;
}

const SimProcess* SimOs::find_process(Pid pid) const {
  auto it = processes_.find(pid);
  return it == processes_.end() ? nullptr : &it->second;
}

const SimProcess& SimOs::process(Pid pid) const {
  const SimProcess* proc = find_process(pid);
  if (proc == nullptr) throw UnknownProcessError("no process with pid " + std::to_string(pid));
  return *proc;
}

SimProcess& SimOs::process(Pid pid) {
  return const_cast<SimProcess&>(static_cast<const SimOs&>(*this).process(pid));
}

const PackageRecord& SimOs::owner_of(const SimProcess& proc) const { return package(proc.owner_package); }

PermissionSet SimOs::granted_for_uid(Uid uid) const {
  PermissionSet out;
  for (const auto& [name, record] : registry_) {
    if (record.uid == uid) out.insert(record.granted_permissions.begin(), record.granted_permissions.end());
  }
  return out;
}

bool SimOs::check_permission(Pid caller, std::string_view permission) const {
  return granted_for_uid(process(caller).uid).contains(std::string(permission));
}

void SimOs::require_permission(const SimProcess& caller, std::string_view permission,
                               std::string_view action) const {
  if (!granted_for_uid(caller.uid).contains(std::string(permission))) {
    throw ApiError(ApiErrorCode::PermissionDenied,
                   std::string(action) + " requires " + std::string(permission) + " (uid " +
                       std::to_string(caller.uid) + ")");
  }
}

PackageInfo SimOs::package_info(std::string_view package) const {
  const PackageRecord* record = find_package(package);
  if (record == nullptr) {
    throw ApiError(ApiErrorCode::PackageNotFound, std::string(package) + " is not installed");
  }
  PackageInfo info;
  info.package = record->manifest.package;
  info.version = record->manifest.version;
  info.permissions = record->manifest.permissions;
  info.components = extract_components(record->manifest);
  return info;
}

ApplicationInfo SimOs::application_info(std::string_view package) const {
  const PackageRecord* record = find_package(package);
  if (record == nullptr) {
    throw ApiError(ApiErrorCode::PackageNotFound, std::string(package) + " is not installed");
  }
  return {record->manifest.package, record->apk_path, record->data_dir};
}

ComponentList SimOs::tasks_for(const SimProcess& caller) const {
  // Post-API-21 semantics: only tasks owned by the caller's own package.
  ComponentList out;
  for (const auto& [pid, proc] : processes_) {
    if (proc.owner_package != caller.owner_package) continue;
    for (const auto& c : proc.running_task_components) out.push_back({proc.owner_package, c.name});
  }
  return out;
}

ComponentList SimOs::services_for(const SimProcess& caller) const {
  ComponentList out;
  for (const auto& name : caller.running_services) out.push_back({caller.owner_package, name});
  return out;
}

ProcessList SimOs::processes_for_uid(Uid uid) const {
  ProcessList out;
  for (const auto& [pid, proc] : processes_) {
    if (proc.uid == uid) out.push_back({proc.pid, proc.uid, proc.name});
  }
  return out;
}

const Component& SimOs::require_declared(const SimProcess& caller, std::string_view name,
                                         std::optional<ComponentKind> kind) const {
  const AppManifest& owner = owner_of(caller).manifest;
  const Component* c = owner.find_component(name);
  if (c == nullptr || (kind && c->kind != *kind)) {
    throw ApiError(ApiErrorCode::ComponentNotRegistered,
                   "component " + std::string(name) + " is not declared by " + owner.package);
  }
  return *c;
}

void SimOs::register_dynamic_receiver(Pid caller, std::string name, std::vector<std::string> intents) {
  const SimProcess& proc = process(caller);
  DynamicReceiver entry;
  entry.package = proc.owner_package;
  entry.intents = std::move(intents);
  dynamic_receivers_[{proc.uid, std::move(name)}] = std::move(entry);
}

void SimOs::unregister_receiver(Pid caller, std::string_view name) {
  const SimProcess& proc = process(caller);
  for (const auto& [pkg, record] : registry_) {
    if (record.uid == proc.uid && record.static_receivers.contains(std::string(name))) {
      throw ApiError(ApiErrorCode::StaticReceiver,
                     std::string(name) + " is declared statically by " + pkg);
    }
  }
  auto it = dynamic_receivers_.find({proc.uid, std::string(name)});
  if (it == dynamic_receivers_.end() || !it->second.registered) {
    throw ApiError(ApiErrorCode::UnknownReceiver, std::string(name) + " is not registered");
  }
  it->second.registered = false;
}

ComponentList SimOs::send_broadcast(std::string_view action) const {
  ComponentList delivered;
  auto listens = [&](const std::vector<std::string>& intents) {
    return std::find(intents.begin(), intents.end(), action) != intents.end();
  };
  for (const auto& [pkg, record] : registry_) {
    for (const auto& r : record.manifest.receivers) {
      if (listens(r.intents)) delivered.push_back({pkg, r.name});
    }
  }
  for (const auto& [key, entry] : dynamic_receivers_) {
    if (entry.registered && listens(entry.intents)) delivered.push_back({entry.package, key.second});
  }
  return delivered;
}

std::vector<std::string> SimOs::access_resource(Pid caller, std::string_view store) const {
  const SimProcess& proc = process(caller);
  auto guard = stores::guard_of(store);
  if (!guard) throw ApiError(ApiErrorCode::UnknownStore, "no data store named " + std::string(store));
  require_permission(proc, *guard, "reading " + std::string(store));
  auto it = data_stores_.find(store);
  return it == data_stores_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> SimOs::read_proc_maps(Pid caller) const { return process(caller).memory_maps; }

std::string SimOs::exec_shell(Pid caller, std::string_view cmd) const {
  const SimProcess& proc = process(caller);
  std::ostringstream out;
  if (cmd == "ps") {
    for (const auto& info : processes_for_uid(proc.uid)) {
      out << info.pid << ' ' << info.uid << ' ' << info.name << '\n';
    }
  } else if (cmd == "ls") {
    auto it = data_dir_entries_.find(proc.owner_package);
    if (it != data_dir_entries_.end()) {
      for (const auto& entry : it->second) out << entry << '\n';
    }
  } else {
    throw ApiError(ApiErrorCode::UnknownCommand, "unsupported command '" + std::string(cmd) + "'");
  }
  return out.str();
}

void SimOs::create_shortcut(Pid caller, std::string label, std::string icon, std::string target_package) {
  require_permission(process(caller), perm::kInstallShortcut, "create_shortcut");
  shortcuts_.push_back({std::move(label), std::move(icon), std::move(target_package)});
}

std::int64_t SimOs::kill_background_processes(Pid caller, std::string_view package) {
  require_permission(process(caller), perm::kKillBackgroundProcesses, "kill_background_processes");
  std::int64_t killed = 0;
  for (auto it = processes_.begin(); it != processes_.end();) {
    if (it->second.owner_package == package && it->first != caller) {
      it = processes_.erase(it);
      ++killed;
    } else {
      ++it;
    }
  }
  return killed;
}

void SimOs::network_send(Pid caller, std::string tag, std::string record) {
  const SimProcess& proc = process(caller);
  require_permission(proc, perm::kInternet, "network_send");
  exfil_sink_.push_back({std::move(tag), std::move(record), proc.owner_package});
}

std::vector<std::string> SimOs::shared_native_data(Pid caller, const std::string& native_component,
                                                   const std::string& token) {
  const SimProcess& proc = process(caller);
  auto& tokens = native_blobs_[{proc.uid, native_component}];
  if (!token.empty() && std::find(tokens.begin(), tokens.end(), token) == tokens.end()) {
    tokens.push_back(token);
  }
  return tokens;
}

void SimOs::seed_stores(const StoreSeedCounts& counts, std::uint64_t seed) {
  for (const auto& [store, count] : counts) {
    if (!stores::guard_of(store)) {
      throw ApiError(ApiErrorCode::UnknownStore, "no data store named " + store);
    }
    data_stores_[store] = stores::seed_records(store, count, seed);
  }
}

void SimOs::set_store(std::string store, std::vector<std::string> records) {
  if (!stores::guard_of(store)) throw ApiError(ApiErrorCode::UnknownStore, "no data store named " + store);
  data_stores_[std::move(store)] = std::move(records);
}

void SimOs::add_data_dir_entry(std::string_view package, std::string entry) {
  data_dir_entries_[std::string(package)].insert(std::move(entry));
}

ApiReply SimOs::syscall(Pid caller, const ApiCall& call) {
  SimProcess& proc = process(caller);
  switch (call.kind) {
    case ApiKind::GetInstalledPackages: {
      StringList names;
      for (const auto& [name, record] : registry_) names.push_back(name);
      return {names};
    }
    case ApiKind::GetPackageInfo:
      return {package_info(call.target)};
    case ApiKind::CheckPermission:
      return {check_permission(caller, call.target)};
    case ApiKind::GetRecentTasks:
    case ApiKind::GetRunningTasks:
      return {tasks_for(proc)};
    case ApiKind::GetRunningServices:
      return {services_for(proc)};
    case ApiKind::GetRunningAppProcesses:
      return {processes_for_uid(proc.uid)};
    case ApiKind::GetApplicationInfo:
      return {application_info(call.target)};
    case ApiKind::SetComponentEnabled:
      require_declared(proc, call.target, std::nullopt);
      return {Ack{}};
    case ApiKind::ExecShell:
      return {exec_shell(caller, call.target)};
    case ApiKind::ReadProcMaps:
      return {read_proc_maps(caller)};
    case ApiKind::RegisterReceiver:
      register_dynamic_receiver(caller, call.target, call.args);
      return {Ack{}};
    case ApiKind::UnregisterReceiver:
      unregister_receiver(caller, call.target);
      return {Ack{}};
    case ApiKind::SendBroadcast:
      return {send_broadcast(call.target)};
    case ApiKind::AccessResource:
      return {access_resource(caller, call.target)};
    case ApiKind::CreateShortcut:
      if (call.args.size() != 2) throw ApiError(ApiErrorCode::BadArgument, "create_shortcut needs icon and target");
      create_shortcut(caller, call.target, call.args[0], call.args[1]);
      return {Ack{}};
    case ApiKind::KillBackgroundProcesses:
      return {kill_background_processes(caller, call.target)};
    case ApiKind::StartActivity: {
      const Component& c = require_declared(proc, call.target, ComponentKind::Activity);
      auto& tasks = proc.running_task_components;
      ComponentRef ref{ComponentKind::Activity, c.name};
      if (std::find(tasks.begin(), tasks.end(), ref) == tasks.end()) tasks.push_back(ref);
      return {Ack{}};
    }
    case ApiKind::StartService: {
      const Component& c = require_declared(proc, call.target, ComponentKind::Service);
      auto& running = proc.running_services;
      if (std::find(running.begin(), running.end(), c.name) == running.end()) running.push_back(c.name);
      return {Ack{}};
    }
    case ApiKind::AcquireProvider:
      require_declared(proc, call.target, ComponentKind::Provider);
      return {Ack{}};
    case ApiKind::NetworkSend:
      if (call.args.size() != 1) throw ApiError(ApiErrorCode::BadArgument, "network_send needs a record");
      network_send(caller, call.target, call.args[0]);
      return {Ack{}};
    case ApiKind::SharedNativeData:
      return {shared_native_data(caller, call.target, call.args.empty() ? std::string() : call.args[0])};
    case ApiKind::GetLifecycleTrace: {
      // Framework-side dispatch frames; the same on every device.
      StringList frames;
      for (const auto& cb : lifecycle_callbacks()) frames.push_back("android.app.ActivityThread -> " + cb);
      return {frames};
    }
    case ApiKind::InvokeMethod:
      proc.runtime.record_invocation(call.target, call.count);
      return {Ack{}};
    case ApiKind::InspectArtMethod:
      return {proc.runtime.method(call.target)};
  }
  throw ApiError(ApiErrorCode::BadArgument, "unsupported call");
}

}  // namespace vbasim
