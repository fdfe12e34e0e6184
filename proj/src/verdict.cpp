#include "vbasim/verdict.hpp"

#include <charconv>

namespace vbasim {

const std::array<ProbeId, kProbeCount>& all_probes() {
  static const std::array<ProbeId, kProbeCount> ids = [] {
    std::array<ProbeId, kProbeCount> out{};
    for (std::size_t i = 0; i < kProbeCount; ++i) out[i] = static_cast<ProbeId>(i + 1);
    return out;
  }();
  return ids;
}

std::string probe_key(ProbeId id) {
  if (id == ProbeId::Singular) return "SINGULAR";
  return std::to_string(static_cast<int>(id));
}

std::optional<ProbeId> probe_from_key(std::string_view key) {
  if (key == "SINGULAR") return ProbeId::Singular;
  int value = 0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), value);
  if (ec != std::errc() || ptr != key.data() + key.size() || value < 1 || value > 18) {
    return std::nullopt;
  }
  return static_cast<ProbeId>(value);
}

bool is_classic(ProbeId id) noexcept { return id != ProbeId::Singular; }

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::VirtualDetected:
      return "VirtualDetected";
    case Verdict::Clean:
      return "Clean";
    case Verdict::Inconclusive:
      return "Inconclusive";
    case Verdict::Error:
      return "Error";
  }
  return "Error";
}

char verdict_letter(Verdict v) noexcept { return to_string(v).front(); }

std::optional<Verdict> verdict_from_letter(char letter) noexcept {
  switch (letter) {
    case 'V':
      return Verdict::VirtualDetected;
    case 'C':
      return Verdict::Clean;
    case 'I':
      return Verdict::Inconclusive;
    case 'E':
      return Verdict::Error;
    default:
      return std::nullopt;
  }
}

}  // namespace vbasim
