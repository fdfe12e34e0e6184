#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vbasim/container.hpp"
#include "vbasim/mascarer.hpp"
#include "vbasim/probes.hpp"
#include "vbasim/simos.hpp"

namespace vbasim {

struct ScenarioInputs {
  AppManifest victim;
  AppManifest addon_template;
  ServiceCatalog catalog;
  // Second app running beside the victim (natively, or as another plugin).
  std::optional<AppManifest> companion;
  std::uint64_t seed = 0;
  StoreSeedCounts stores;
};

// Scenario document: {"victim", "template", "catalog_dir", "payload_package",
// "companion"?, "seed", "stores"}; paths are relative to the document.
ScenarioInputs load_scenario(const std::filesystem::path& path);

// A self-contained device plus the process the probe app runs in. Copies are
// independent.
struct World {
  EnvironmentKind kind = EnvironmentKind::Native;
  SimOs os;
  std::optional<Container> container;
  Pid probe_pid = 0;
  AppManifest declared;
};

// Routes probe calls through the container when there is one.
class WorldProbeEnvironment final : public ProbeEnvironment {
 public:
  explicit WorldProbeEnvironment(World& world) : world_(world) {}
  const AppManifest& declared_manifest() const override { return world_.declared; }
  ApiReply call(const ApiCall& call) override;

 private:
  World& world_;
};

struct MascaraOptions {
  bool install_hooks = true;
  // Hook names left out of the hookset, full ("mascara.exec_ps") or short ("exec_ps").
  // A name matching no installed hook is a SchemaError.
  std::set<std::string> skip_hooks;
  std::size_t ticks = 1;
};

World build_native_world(const ScenarioInputs& in);
World build_naive_world(const ScenarioInputs& in);
World build_mascara_world(const ScenarioInputs& in, const MascaraOptions& options = {},
                          mascarer::CustomizationResult* customization = nullptr);
World build_world(EnvironmentKind kind, const ScenarioInputs& in, const MascaraOptions& options = {});

// Each probe runs on its own copy of `world`. Only simulator misconfiguration
// (a non-API exception) yields Verdict::Error.
DetectionReport run_all_probes(const World& world);

struct MatrixRun {
  std::vector<DetectionReport> reports;
  std::optional<mascarer::CustomizationResult> customization;
  RunLog run_log;
};

// Builds each requested environment from scratch; environments run in parallel.
MatrixRun run_matrix(const ScenarioInputs& in, const std::vector<EnvironmentKind>& environments,
                     const MascaraOptions& options = {});

const std::vector<EnvironmentKind>& all_environments();

}  // namespace vbasim
