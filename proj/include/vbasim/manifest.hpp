#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vbasim {

using PermissionSet = std::set<std::string>;

namespace perm {
inline constexpr std::string_view kInternet = "android.permission.INTERNET";
inline constexpr std::string_view kReadContacts = "android.permission.READ_CONTACTS";
inline constexpr std::string_view kReadSms = "android.permission.READ_SMS";
inline constexpr std::string_view kReceiveSms = "android.permission.RECEIVE_SMS";
inline constexpr std::string_view kReadPhoneState = "android.permission.READ_PHONE_STATE";
inline constexpr std::string_view kReadCallLog = "android.permission.READ_CALL_LOG";
inline constexpr std::string_view kCamera = "android.permission.CAMERA";
inline constexpr std::string_view kRecordAudio = "android.permission.RECORD_AUDIO";
inline constexpr std::string_view kAccessFineLocation = "android.permission.ACCESS_FINE_LOCATION";
inline constexpr std::string_view kInstallShortcut = "com.android.launcher.permission.INSTALL_SHORTCUT";
inline constexpr std::string_view kKillBackgroundProcesses =
    "android.permission.KILL_BACKGROUND_PROCESSES";

// The eight permissions the simulator treats as dangerous.
const std::vector<std::string>& dangerous();
bool is_dangerous(std::string_view permission);

// Every permission the simulated platform knows about. The unmodified
// container template declares all of them.
const std::vector<std::string>& all_known();
}  // namespace perm

enum class ComponentKind { Activity, Service, Receiver, Provider };

std::string_view to_string(ComponentKind kind) noexcept;
// Singular lowercase ("activity") and plural ("activities") spellings are both accepted.
ComponentKind component_kind_from_string(std::string_view text);

struct Component {
  std::string name;
  ComponentKind kind = ComponentKind::Activity;
  bool launcher = false;                 // activities only
  bool stub = false;                     // container placeholder (activities, services, providers)
  std::vector<std::string> intents;      // receivers only
  PermissionSet requires_permissions;    // services only
  std::string payload;                   // services only: data store the service reads

  friend bool operator==(const Component&, const Component&) = default;
};

struct AppManifest {
  std::string package;
  std::string label;
  std::int64_t version = 0;
  PermissionSet permissions;
  std::set<std::string> features;
  std::vector<Component> activities;
  std::vector<Component> services;
  std::vector<Component> receivers;
  std::vector<Component> providers;
  std::string launcher_icon;
  // Victim launcher resources copied in for the fake shortcut.
  std::string shortcut_icon;
  std::string shortcut_label;
  std::set<std::string> native_components;

  std::vector<Component>& components_of(ComponentKind kind);
  const std::vector<Component>& components_of(ComponentKind kind) const;
  std::size_t component_count() const;
  const Component* find_component(std::string_view name) const;
  const Component* launcher_activity() const;

  friend bool operator==(const AppManifest&, const AppManifest&) = default;
};

struct ComponentRef {
  ComponentKind kind;
  std::string name;

  friend bool operator==(const ComponentRef&, const ComponentRef&) = default;
  friend auto operator<=>(const ComponentRef&, const ComponentRef&) = default;
};

struct LauncherResources {
  std::string icon;
  std::string label;

  friend bool operator==(const LauncherResources&, const LauncherResources&) = default;
};

// Parses and validates one manifest document. Throws SchemaError,
// DuplicateComponentError or MultipleLauncherError.
AppManifest parse_manifest(std::string_view text);

// Canonical document text: fixed key order, sorted sets, two-space indent,
// trailing newline.
std::string serialize_manifest(const AppManifest& manifest);

// Checks the structural invariants parse_manifest enforces; used on
// manifests built in memory.
void validate_manifest(const AppManifest& manifest);

AppManifest load_manifest_file(const std::filesystem::path& path);
void save_manifest_file(const AppManifest& manifest, const std::filesystem::path& path);

PermissionSet extract_permissions(const AppManifest& manifest);
// Activities, services, receivers, providers; declaration order within each.
std::vector<ComponentRef> extract_components(const AppManifest& manifest);
LauncherResources extract_launcher_resources(const AppManifest& manifest);

// The malicious APK's service set; every entry exfiltrates over INTERNET.
struct ServiceCatalog {
  std::string package;
  std::string label;
  std::vector<Component> entries;

  static ServiceCatalog from_manifest(const AppManifest& manifest);
  PermissionSet permissions() const;
};

}  // namespace vbasim
