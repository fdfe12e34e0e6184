#include "vbasim/api.hpp"

namespace vbasim {

std::string_view to_string(ApiKind kind) noexcept {
  switch (kind) {
    case ApiKind::GetInstalledPackages: return "get_installed_packages";
    case ApiKind::GetPackageInfo: return "get_package_info";
    case ApiKind::CheckPermission: return "check_permission";
    case ApiKind::GetRecentTasks: return "get_recent_tasks";
    case ApiKind::GetRunningTasks: return "get_running_tasks";
    case ApiKind::GetRunningServices: return "get_running_services";
    case ApiKind::GetRunningAppProcesses: return "get_running_app_processes";
    case ApiKind::GetApplicationInfo: return "get_application_info";
    case ApiKind::SetComponentEnabled: return "set_component_enabled";
    case ApiKind::ExecShell: return "exec_shell";
    case ApiKind::ReadProcMaps: return "read_proc_maps";
    case ApiKind::RegisterReceiver: return "register_receiver";
    case ApiKind::UnregisterReceiver: return "unregister_receiver";
    case ApiKind::SendBroadcast: return "send_broadcast";
    case ApiKind::AccessResource: return "access_resource";
    case ApiKind::CreateShortcut: return "create_shortcut";
    case ApiKind::KillBackgroundProcesses: return "kill_background_processes";
    case ApiKind::StartActivity: return "start_activity";
    case ApiKind::StartService: return "start_service";
    case ApiKind::AcquireProvider: return "acquire_provider";
    case ApiKind::NetworkSend: return "network_send";
    case ApiKind::SharedNativeData: return "shared_native_data";
    case ApiKind::GetLifecycleTrace: return "get_lifecycle_trace";
    case ApiKind::InvokeMethod: return "invoke_method";
    case ApiKind::InspectArtMethod: return "inspect_art_method";
  }
  return "unknown";
}

namespace {
ApiCall make(ApiKind kind, std::string target = {}, std::vector<std::string> args = {},
             std::uint64_t count = 0) {
  ApiCall call;
  call.kind = kind;
  call.target = std::move(target);
  call.args = std::move(args);
  call.count = count;
  return call;
}
}  // namespace

ApiCall ApiCall::get_installed_packages() { return make(ApiKind::GetInstalledPackages); }
ApiCall ApiCall::get_package_info(std::string package) {
  return make(ApiKind::GetPackageInfo, std::move(package));
}
ApiCall ApiCall::check_permission(std::string permission) {
  return make(ApiKind::CheckPermission, std::move(permission));
}
ApiCall ApiCall::get_recent_tasks() { return make(ApiKind::GetRecentTasks); }
ApiCall ApiCall::get_running_tasks() { return make(ApiKind::GetRunningTasks); }
ApiCall ApiCall::get_running_services() { return make(ApiKind::GetRunningServices); }
ApiCall ApiCall::get_running_app_processes() { return make(ApiKind::GetRunningAppProcesses); }
ApiCall ApiCall::get_application_info(std::string package) {
  return make(ApiKind::GetApplicationInfo, std::move(package));
}
ApiCall ApiCall::set_component_enabled(std::string component) {
  return make(ApiKind::SetComponentEnabled, std::move(component));
}
ApiCall ApiCall::exec_shell(std::string cmd) { return make(ApiKind::ExecShell, std::move(cmd)); }
ApiCall ApiCall::read_proc_maps() { return make(ApiKind::ReadProcMaps); }
ApiCall ApiCall::register_receiver(std::string name, std::vector<std::string> intents) {
  return make(ApiKind::RegisterReceiver, std::move(name), std::move(intents));
}
ApiCall ApiCall::unregister_receiver(std::string name) {
  return make(ApiKind::UnregisterReceiver, std::move(name));
}
ApiCall ApiCall::send_broadcast(std::string action) {
  return make(ApiKind::SendBroadcast, std::move(action));
}
ApiCall ApiCall::access_resource(std::string store) {
  return make(ApiKind::AccessResource, std::move(store));
}
ApiCall ApiCall::create_shortcut(std::string label, std::string icon, std::string target_package) {
  return make(ApiKind::CreateShortcut, std::move(label), {std::move(icon), std::move(target_package)});
}
ApiCall ApiCall::kill_background_processes(std::string package) {
  return make(ApiKind::KillBackgroundProcesses, std::move(package));
}
ApiCall ApiCall::start_activity(std::string component) {
  return make(ApiKind::StartActivity, std::move(component));
}
ApiCall ApiCall::start_service(std::string component) {
  return make(ApiKind::StartService, std::move(component));
}
ApiCall ApiCall::acquire_provider(std::string component) {
  return make(ApiKind::AcquireProvider, std::move(component));
}
ApiCall ApiCall::network_send(std::string tag, std::string record) {
  return make(ApiKind::NetworkSend, std::move(tag), {std::move(record)});
}
ApiCall ApiCall::shared_native_data(std::string native_component, std::string token) {
  return make(ApiKind::SharedNativeData, std::move(native_component), {std::move(token)});
}
ApiCall ApiCall::get_lifecycle_trace() { return make(ApiKind::GetLifecycleTrace); }
ApiCall ApiCall::invoke_method(std::string method, std::uint64_t loop_iterations) {
  return make(ApiKind::InvokeMethod, std::move(method), {}, loop_iterations);
}
ApiCall ApiCall::inspect_art_method(std::string method) {
  return make(ApiKind::InspectArtMethod, std::move(method));
}

}  // namespace vbasim
