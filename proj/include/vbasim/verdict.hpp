#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace vbasim {

// Detection mechanisms 1..18 plus the hotness-count detector.
enum class ProbeId : int {
  M1 = 1, M2, M3, M4, M5, M6, M7, M8, M9, M10, M11, M12, M13, M14, M15, M16, M17, M18,
  Singular = 19,
};

inline constexpr std::size_t kProbeCount = 19;

const std::array<ProbeId, kProbeCount>& all_probes();
// Report key: "1".."18" and "SINGULAR".
std::string probe_key(ProbeId id);
std::optional<ProbeId> probe_from_key(std::string_view key);
bool is_classic(ProbeId id) noexcept;

enum class Verdict { VirtualDetected, Clean, Inconclusive, Error };

std::string_view to_string(Verdict v) noexcept;
// V / C / I / E
char verdict_letter(Verdict v) noexcept;
std::optional<Verdict> verdict_from_letter(char letter) noexcept;

struct ProbeOutcome {
  ProbeId probe = ProbeId::M1;
  Verdict verdict = Verdict::Inconclusive;
  std::string evidence;
};

}  // namespace vbasim
