#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vbasim/api.hpp"
#include "vbasim/manifest.hpp"
#include "vbasim/verdict.hpp"

namespace vbasim {

// Everything a detection probe is allowed to see: what its own app declared
// and the system API entry point. Nothing else about the world leaks through.
class ProbeEnvironment {
 public:
  virtual ~ProbeEnvironment() = default;
  virtual const AppManifest& declared_manifest() const = 0;
  // Throws ApiError exactly as the OS (or a hook) reports it.
  virtual ApiReply call(const ApiCall& call) = 0;
};

enum class EnvironmentKind { Native, NaiveContainer, MascaraContainer };

std::string_view to_string(EnvironmentKind kind) noexcept;
std::optional<EnvironmentKind> environment_from_string(std::string_view text) noexcept;

struct VerdictCounts {
  std::size_t virtual_detected = 0;
  std::size_t clean = 0;
  std::size_t inconclusive = 0;
  std::size_t error = 0;
};

struct DetectionReport {
  EnvironmentKind environment = EnvironmentKind::Native;
  // One entry per ProbeId, in all_probes() order.
  std::vector<ProbeOutcome> outcomes;

  VerdictCounts counts() const;
  // Counts over mechanisms 1..18 only.
  VerdictCounts classic_counts() const;
  const ProbeOutcome& outcome(ProbeId id) const;
};

// Runs one mechanism against `env`. ApiError replies are interpreted per
// mechanism; any other exception propagates to the caller.
ProbeOutcome run_probe(ProbeEnvironment& env, ProbeId id);

// Parses "pid uid name" lines; anything else is skipped.
struct PsLine {
  std::int64_t pid = 0;
  std::int64_t uid = 0;
  std::string name;
};
std::vector<PsLine> parse_ps(std::string_view text);

}  // namespace vbasim
