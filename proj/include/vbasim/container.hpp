#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vbasim/api.hpp"
#include "vbasim/manifest.hpp"
#include "vbasim/simos.hpp"

namespace vbasim {

enum class HookLayer { Proxy, LowLevel };
enum class HookMode { Before, After, Replace };

std::string_view to_string(HookLayer layer) noexcept;
std::string_view to_string(HookMode mode) noexcept;

// One request/reply pair travelling through the dispatch layers. The reply
// is empty (Ack) until the underlying call or a Replace hook produces it.
struct Exchange {
  ApiCall call;
  ApiReply reply;
};

// A hook-synthesized failure, surfaced to the plugin as ApiError.
struct Refusal {
  ApiErrorCode code = ApiErrorCode::AccessDenied;
  std::string detail;
};

using HookOutcome = std::variant<Exchange, Refusal>;
using HookTransform = std::function<HookOutcome(Exchange)>;

struct HookSpec {
  std::string name;
  HookLayer layer = HookLayer::Proxy;
  ApiKind target = ApiKind::GetInstalledPackages;
  HookMode mode = HookMode::Before;
  HookTransform transform;
};

struct RunLogEntry {
  std::string step;
  std::string detail;
  bool warning = false;
};

struct RunLog {
  std::vector<RunLogEntry> entries;

  void add(std::string step, std::string detail, bool warning = false) {
    entries.push_back({std::move(step), std::move(detail), warning});
  }
  std::size_t warnings() const;
};

// Where the container fetches the malicious APK at first run.
class CatalogSource {
 public:
  virtual ~CatalogSource() = default;
  // Throws CatalogFetchError when the variant is not available.
  virtual AppManifest fetch(std::string_view package) const = 0;
};

// One manifest document per variant: <dir>/<package>.json
class DirectoryCatalog final : public CatalogSource {
 public:
  explicit DirectoryCatalog(std::filesystem::path dir) : dir_(std::move(dir)) {}
  AppManifest fetch(std::string_view package) const override;
  static std::filesystem::path file_for(const std::filesystem::path& dir, std::string_view package);

 private:
  std::filesystem::path dir_;
};

class MemoryCatalog final : public CatalogSource {
 public:
  void put(AppManifest manifest);
  AppManifest fetch(std::string_view package) const override;

 private:
  std::map<std::string, AppManifest, std::less<>> variants_;
};

struct PluginRecord {
  AppManifest manifest;
  Pid pid = 0;
  std::string apk_path;
  std::string data_dir;
  std::vector<std::string> started_services;
};

// A stub (or identically-named add-on component) lent to a plugin component.
struct StubBinding {
  std::string plugin_package;
  ComponentKind kind = ComponentKind::Activity;
  std::string plugin_component;
  std::string stub;
};

// The virtual environment hosted by an installed add-on.
class Container {
 public:
  // Spawns the host process (pid0) of the installed add-on. No plugins, no hooks.
  static Container create(SimOs& os, const AppManifest& addon);

  Pid load_plugin(SimOs& os, const AppManifest& plugin, std::string plugin_apk_path);
  ApiReply plugin_syscall(SimOs& os, Pid caller, const ApiCall& call);

  void install_hook(HookSpec hook);
  // Removes every hook with the given name from both layers.
  std::size_t remove_hooks(std::string_view name);

  void set_foreground(std::string_view package);
  const std::optional<std::string>& foreground() const noexcept { return foreground_; }

  // The add-on's first activation: kill the victim, plant the shortcut,
  // fetch and start the payload, then host the victim in the foreground.
  const RunLog& first_run(SimOs& os, std::string_view victim_package, const CatalogSource& source,
                          std::string_view payload_package);
  // Advances every running payload service by one round.
  void tick_services(SimOs& os);

  // Request-side name rewriting; allocates a binding when needed. Returns the
  // name unchanged when no stub is available.
  std::string rewrite_request_name(std::string_view plugin_package, ComponentKind kind,
                                   std::string_view name);
  std::optional<ComponentName> rewrite_reply_name(std::string_view framework_name) const;

  const std::string& addon_package() const noexcept { return addon_package_; }
  const AppManifest& addon_manifest() const noexcept { return addon_; }
  Pid container_pid() const noexcept { return container_pid_; }
  Uid uid() const noexcept { return uid_; }
  const std::string& plugin_data_root() const noexcept { return plugin_data_root_; }
  std::string plugin_data_dir(std::string_view plugin_package) const;
  std::string downloaded_apk_path(std::string_view plugin_package) const;
  const std::map<std::string, PluginRecord, std::less<>>& plugins() const noexcept { return plugins_; }
  const PluginRecord* find_plugin(std::string_view package) const;
  const PluginRecord* plugin_for_pid(Pid pid) const;
  const std::vector<Component>& stub_components() const noexcept { return stubs_; }
  const std::vector<HookSpec>& proxy_hooks() const noexcept { return proxy_hooks_; }
  const std::vector<HookSpec>& lowlevel_hooks() const noexcept { return lowlevel_hooks_; }
  const std::vector<StubBinding>& bindings() const noexcept { return bindings_; }
  const RunLog& run_log() const noexcept { return run_log_; }
  const std::optional<std::string>& payload_package() const noexcept { return payload_package_; }

 private:
  Container() = default;

  ApiReply baseline(SimOs& os, const PluginRecord& plugin, const ApiCall& call);
  void rewrite_reply(ComponentList& entries) const;

  std::string addon_package_;
  AppManifest addon_;
  Pid container_pid_ = 0;
  Uid uid_ = 0;
  std::string plugin_data_root_;
  std::map<std::string, PluginRecord, std::less<>> plugins_;
  std::vector<Component> stubs_;
  std::vector<HookSpec> proxy_hooks_;
  std::vector<HookSpec> lowlevel_hooks_;
  std::vector<StubBinding> bindings_;
  std::optional<std::string> foreground_;
  std::optional<std::string> payload_package_;
  std::map<std::string, std::size_t, std::less<>> exfil_cursor_;
  RunLog run_log_;
};

namespace hooks {
inline constexpr std::string_view kProcessNames = "mascara.process_names";
inline constexpr std::string_view kExecPs = "mascara.exec_ps";
inline constexpr std::string_view kAppInfoDataDir = "mascara.app_info_data_dir";
inline constexpr std::string_view kProcMaps = "mascara.proc_maps";

const std::vector<std::string_view>& mascara_hook_names();

HookSpec process_names(std::string victim_package);
HookSpec exec_ps_to_ls();
HookSpec app_info_native_data_dir();
HookSpec deny_proc_maps();
}  // namespace hooks

// Installs the four bypass hooks: process-name rewrite, ps->ls, native
// data_dir pattern, and /proc/self/maps denial.
void install_mascara_hookset(Container& container, std::string_view victim_package);

}  // namespace vbasim
