#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "vbasim/verdict.hpp"

namespace vbasim::art {

enum class CompileMode { AoT, Hybrid };
enum class RuntimeKind { Native, Virtual };

std::string_view to_string(CompileMode mode) noexcept;
std::string_view to_string(RuntimeKind kind) noexcept;

inline constexpr std::uint64_t kMinInvocations = 10;
inline constexpr std::string_view kDefaultSentinel = "ActivityThread.currentActivityThread";

struct ArtMethodRecord {
  std::string method_name;
  CompileMode compile_mode = CompileMode::Hybrid;
  // Invocations plus loop iterations; stays 0 for AoT-compiled methods.
  std::uint64_t hotness_count = 0;
  // Warmup bookkeeping, counted in every mode.
  std::uint64_t invocations = 0;

  friend bool operator==(const ArtMethodRecord&, const ArtMethodRecord&) = default;
};

// Per-process view of the runtime's method table. Native processes run the
// framework methods under the hybrid JIT; container-hosted processes see
// them AoT-compiled.
class RuntimeModel {
 public:
  explicit RuntimeModel(RuntimeKind kind = RuntimeKind::Native) : kind_(kind) {}

  RuntimeKind kind() const noexcept { return kind_; }
  CompileMode default_mode() const noexcept {
    return kind_ == RuntimeKind::Native ? CompileMode::Hybrid : CompileMode::AoT;
  }

  void record_invocation(std::string_view method_name, std::uint64_t loop_iterations = 0);
  // Creates the record with the runtime's default mode if missing.
  const ArtMethodRecord& method(std::string_view method_name);
  const ArtMethodRecord* find(std::string_view method_name) const;
  // Registers a method with an explicit mode (e.g. app code AoT-compiled at install).
  void declare(std::string_view method_name, CompileMode mode);

  const std::map<std::string, ArtMethodRecord, std::less<>>& methods() const noexcept {
    return methods_;
  }

 private:
  ArtMethodRecord& slot(std::string_view method_name);

  RuntimeKind kind_;
  std::map<std::string, ArtMethodRecord, std::less<>> methods_;
};

// Hotness-count detector. Throws InsufficientWarmupError when the sentinel
// has fewer than kMinInvocations recorded invocations.
ProbeOutcome singular_check(const ArtMethodRecord& sentinel);
ProbeOutcome singular_check(const RuntimeModel& runtime,
                            std::string_view sentinel = kDefaultSentinel);

}  // namespace vbasim::art
