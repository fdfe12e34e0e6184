#include "vbasim/artmodel.hpp"

#include "vbasim/errors.hpp"

namespace vbasim::art {

std::string_view to_string(CompileMode mode) noexcept {
  return mode == CompileMode::AoT ? "AoT" : "Hybrid";
}

std::string_view to_string(RuntimeKind kind) noexcept {
  return kind == RuntimeKind::Native ? "Native" : "Virtual";
}

ArtMethodRecord& RuntimeModel::slot(std::string_view method_name) {
  auto it = methods_.find(method_name);
  if (it == methods_.end()) {
    ArtMethodRecord record;
    record.method_name = std::string(method_name);
    record.compile_mode = default_mode();
    it = methods_.emplace(record.method_name, std::move(record)).first;
  }
  return it->second;
}

void RuntimeModel::record_invocation(std::string_view method_name, std::uint64_t loop_iterations) {
  ArtMethodRecord& record = slot(method_name);
  ++record.invocations;
  if (record.compile_mode == CompileMode::Hybrid) record.hotness_count += 1 + loop_iterations;
}

const ArtMethodRecord& RuntimeModel::method(std::string_view method_name) { return slot(method_name); }

const ArtMethodRecord* RuntimeModel::find(std::string_view method_name) const {
  auto it = methods_.find(method_name);
  return it == methods_.end() ? nullptr : &it->second;
}

void RuntimeModel::declare(std::string_view method_name, CompileMode mode) {
  ArtMethodRecord& record = slot(method_name);
  record.compile_mode = mode;
  if (mode == CompileMode::AoT) record.hotness_count = 0;
}

ProbeOutcome singular_check(const ArtMethodRecord& sentinel) {
  if (sentinel.invocations < kMinInvocations) {
    throw InsufficientWarmupError(sentinel.method_name + " invoked " +
                                  std::to_string(sentinel.invocations) + " time(s), need " +
                                  std::to_string(kMinInvocations));
  }
  ProbeOutcome out;
  out.probe = ProbeId::Singular;
  out.evidence = sentinel.method_name + " hotness_count=" + std::to_string(sentinel.hotness_count);
  out.verdict = sentinel.hotness_count == 0 ? Verdict::VirtualDetected : Verdict::Clean;
  return out;
}

ProbeOutcome singular_check(const RuntimeModel& runtime, std::string_view sentinel) {
  const ArtMethodRecord* record = runtime.find(sentinel);
  if (record == nullptr) {
    throw InsufficientWarmupError(std::string(sentinel) + " has never been invoked");
  }
  return singular_check(*record);
}

}  // namespace vbasim::art
