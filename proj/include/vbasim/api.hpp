#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vbasim/artmodel.hpp"
#include "vbasim/errors.hpp"
#include "vbasim/manifest.hpp"

namespace vbasim {

using Pid = std::int64_t;
using Uid = std::int64_t;

// Probe-visible system API. Each kind corresponds to one Android framework
// call (or, for the last few, an in-process runtime query).
enum class ApiKind {
  GetInstalledPackages,
  GetPackageInfo,
  CheckPermission,
  GetRecentTasks,
  GetRunningTasks,
  GetRunningServices,
  GetRunningAppProcesses,
  GetApplicationInfo,
  SetComponentEnabled,
  ExecShell,
  ReadProcMaps,
  RegisterReceiver,
  UnregisterReceiver,
  SendBroadcast,
  AccessResource,
  CreateShortcut,
  KillBackgroundProcesses,
  StartActivity,
  StartService,
  AcquireProvider,
  NetworkSend,
  SharedNativeData,
  GetLifecycleTrace,
  InvokeMethod,
  InspectArtMethod,
};

std::string_view to_string(ApiKind kind) noexcept;

struct ApiCall {
  ApiKind kind = ApiKind::GetInstalledPackages;
  // Package, permission, component, command, store, action or method name.
  std::string target;
  // Receiver intents, shortcut (icon, target), native-data token, payload.
  std::vector<std::string> args;
  std::uint64_t count = 0;

  static ApiCall get_installed_packages();
  static ApiCall get_package_info(std::string package);
  static ApiCall check_permission(std::string permission);
  static ApiCall get_recent_tasks();
  static ApiCall get_running_tasks();
  static ApiCall get_running_services();
  static ApiCall get_running_app_processes();
  static ApiCall get_application_info(std::string package);
  static ApiCall set_component_enabled(std::string component);
  static ApiCall exec_shell(std::string cmd);
  static ApiCall read_proc_maps();
  static ApiCall register_receiver(std::string name, std::vector<std::string> intents);
  static ApiCall unregister_receiver(std::string name);
  static ApiCall send_broadcast(std::string action);
  static ApiCall access_resource(std::string store);
  static ApiCall create_shortcut(std::string label, std::string icon, std::string target_package);
  static ApiCall kill_background_processes(std::string package);
  static ApiCall start_activity(std::string component);
  static ApiCall start_service(std::string component);
  static ApiCall acquire_provider(std::string component);
  static ApiCall network_send(std::string tag, std::string record);
  static ApiCall shared_native_data(std::string native_component, std::string token);
  static ApiCall get_lifecycle_trace();
  static ApiCall invoke_method(std::string method, std::uint64_t loop_iterations = 0);
  static ApiCall inspect_art_method(std::string method);

  friend bool operator==(const ApiCall&, const ApiCall&) = default;
};

struct PackageInfo {
  std::string package;
  std::int64_t version = 0;
  PermissionSet permissions;
  std::vector<ComponentRef> components;

  friend bool operator==(const PackageInfo&, const PackageInfo&) = default;
};

struct ApplicationInfo {
  std::string package;
  std::string source_dir;
  std::string data_dir;

  friend bool operator==(const ApplicationInfo&, const ApplicationInfo&) = default;
};

struct ProcessInfo {
  Pid pid = 0;
  Uid uid = 0;
  std::string name;

  friend bool operator==(const ProcessInfo&, const ProcessInfo&) = default;
};

// A component as the framework names it: owning package plus class name.
struct ComponentName {
  std::string package;
  std::string name;

  friend bool operator==(const ComponentName&, const ComponentName&) = default;
  friend auto operator<=>(const ComponentName&, const ComponentName&) = default;
};

using Ack = std::monostate;
using StringList = std::vector<std::string>;
using ComponentList = std::vector<ComponentName>;
using ProcessList = std::vector<ProcessInfo>;

struct ApiReply {
  std::variant<Ack, bool, std::int64_t, std::string, StringList, ComponentList, ProcessList,
               PackageInfo, ApplicationInfo, art::ArtMethodRecord>
      value;

  template <typename T>
  const T& as() const& {
    if (const T* p = std::get_if<T>(&value)) return *p;
    throw ApiError(ApiErrorCode::BadArgument, "reply holds a different payload type");
  }
  template <typename T>
  T& as() & {
    if (T* p = std::get_if<T>(&value)) return *p;
    throw ApiError(ApiErrorCode::BadArgument, "reply holds a different payload type");
  }
  // By value on temporaries, so `for (x : env.call(c).as<T>())` cannot dangle.
  template <typename T>
  T as() && {
    return std::move(as<T>());
  }
  template <typename T>
  bool holds() const noexcept {
    return std::holds_alternative<T>(value);
  }
};

}  // namespace vbasim
