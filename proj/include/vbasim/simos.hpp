#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vbasim/api.hpp"
#include "vbasim/artmodel.hpp"
#include "vbasim/manifest.hpp"

namespace vbasim {

inline constexpr Uid kFirstAppUid = 10000;

std::string native_data_dir(std::string_view package);
std::string native_apk_path(std::string_view package);
std::string native_lib_dir(std::string_view package);

struct PackageRecord {
  AppManifest manifest;
  Uid uid = 0;
  std::string apk_path;
  std::string data_dir;
  PermissionSet granted_permissions;
  std::set<std::string> static_receivers;
};

struct SimProcess {
  Pid pid = 0;
  Uid uid = 0;
  std::string name;
  // Package the framework attributes this process to.
  std::string owner_package;
  std::vector<std::string> memory_maps;
  std::vector<ComponentRef> running_task_components;
  std::vector<std::string> running_services;
  art::RuntimeModel runtime;
};

struct Shortcut {
  std::string label;
  std::string icon;
  std::string target_package;

  friend bool operator==(const Shortcut&, const Shortcut&) = default;
};

struct ExfilRecord {
  std::string tag;
  std::string record;
  std::string sender_package;

  friend bool operator==(const ExfilRecord&, const ExfilRecord&) = default;
};

struct DynamicReceiver {
  std::string package;
  std::vector<std::string> intents;
  bool registered = true;
};

// Data store name -> number of seeded records.
using StoreSeedCounts = std::map<std::string, std::size_t>;

namespace stores {
// Every store the simulated device exposes, with its guarding permission.
const std::vector<std::pair<std::string, std::string>>& guards();
std::optional<std::string> guard_of(std::string_view store);
// Deterministic record set for one store.
std::vector<std::string> seed_records(std::string_view store, std::size_t count, std::uint64_t seed);
}  // namespace stores

// The 13 framework lifecycle callbacks (activity, service, receiver,
// provider) whose dispatch frames the runtime records.
const std::vector<std::string>& lifecycle_callbacks();

// One simulated device. All operations run sequentially against this value;
// copies are fully independent worlds.
class SimOs {
 public:
  SimOs() = default;

  const PackageRecord& install(const AppManifest& manifest);
  Pid spawn_process(std::string_view package, std::string name, std::vector<std::string> maps);
  // Forks a child of `parent` that keeps the parent's uid and owner package.
  Pid fork_process(Pid parent, std::string name, std::vector<std::string> maps,
                   art::RuntimeKind runtime);
  void kill_process(Pid pid);

  // Single entry point for every ApiCall issued by a process.
  ApiReply syscall(Pid caller, const ApiCall& call);

  void register_dynamic_receiver(Pid caller, std::string name, std::vector<std::string> intents);
  void unregister_receiver(Pid caller, std::string_view name);
  ComponentList send_broadcast(std::string_view action) const;
  std::vector<std::string> access_resource(Pid caller, std::string_view store) const;
  std::vector<std::string> read_proc_maps(Pid caller) const;
  std::string exec_shell(Pid caller, std::string_view cmd) const;
  void create_shortcut(Pid caller, std::string label, std::string icon, std::string target_package);
  std::int64_t kill_background_processes(Pid caller, std::string_view package);
  void network_send(Pid caller, std::string tag, std::string record);
  std::vector<std::string> shared_native_data(Pid caller, const std::string& native_component,
                                              const std::string& token);
  bool check_permission(Pid caller, std::string_view permission) const;

  void seed_stores(const StoreSeedCounts& counts, std::uint64_t seed);
  void set_store(std::string store, std::vector<std::string> records);
  void add_data_dir_entry(std::string_view package, std::string entry);

  const PackageRecord* find_package(std::string_view package) const;
  const PackageRecord& package(std::string_view package) const;
  const SimProcess* find_process(Pid pid) const;
  const SimProcess& process(Pid pid) const;
  SimProcess& process(Pid pid);
  PermissionSet granted_for_uid(Uid uid) const;

  const std::map<std::string, PackageRecord, std::less<>>& registry() const noexcept { return registry_; }
  const std::map<Pid, SimProcess>& processes() const noexcept { return processes_; }
  const std::vector<Shortcut>& shortcuts() const noexcept { return shortcuts_; }
  const std::vector<ExfilRecord>& exfil_sink() const noexcept { return exfil_sink_; }
  const std::map<std::string, std::vector<std::string>, std::less<>>& data_stores() const noexcept {
    return data_stores_;
  }
  const std::map<std::pair<Uid, std::string>, DynamicReceiver>& dynamic_receivers() const noexcept {
    return dynamic_receivers_;
  }
  const std::map<std::pair<Uid, std::string>, std::vector<std::string>>& native_blobs() const noexcept {
    return native_blobs_;
  }

 private:
  const PackageRecord& owner_of(const SimProcess& proc) const;
  PackageInfo package_info(std::string_view package) const;
  ApplicationInfo application_info(std::string_view package) const;
  ComponentList tasks_for(const SimProcess& caller) const;
  ComponentList services_for(const SimProcess& caller) const;
  ProcessList processes_for_uid(Uid uid) const;
  const Component& require_declared(const SimProcess& caller, std::string_view name,
                                    std::optional<ComponentKind> kind) const;
  void require_permission(const SimProcess& caller, std::string_view permission,
                          std::string_view action) const;
  void publish_native_tokens(Uid uid, const AppManifest& manifest);

  std::map<std::string, PackageRecord, std::less<>> registry_;
  std::map<Pid, SimProcess> processes_;
  Pid next_pid_ = 1;
  Uid next_uid_ = kFirstAppUid;
  std::vector<Shortcut> shortcuts_;
  std::map<std::pair<Uid, std::string>, DynamicReceiver> dynamic_receivers_;
  std::map<std::string, std::vector<std::string>, std::less<>> data_stores_;
  std::vector<ExfilRecord> exfil_sink_;
  std::map<std::pair<Uid, std::string>, std::vector<std::string>> native_blobs_;
  std::map<std::string, std::set<std::string>, std::less<>> data_dir_entries_;
};

}  // namespace vbasim
