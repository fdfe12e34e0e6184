#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vbasim/environment.hpp"

namespace vbasim {

inline constexpr std::string_view kToolVersion = "0.3.0";

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 1469598103934665603ULL);

// Stable across runs: covers the canonical manifest text, seed and store counts.
std::string scenario_digest(const ScenarioInputs& in);

// environment name -> probe key -> verdict letter
using VerdictMatrix = std::map<std::string, std::map<std::string, char>>;

VerdictMatrix matrix_of(const std::vector<DetectionReport>& reports);

// Self-contained structured report (JSON text, trailing newline).
std::string render_structured(const MatrixRun& run, const std::string& digest);

// Fixed-width table: one row per environment, one column per probe.
std::string render_table(const std::vector<DetectionReport>& reports);
VerdictMatrix parse_table(std::string_view text);
VerdictMatrix parse_structured_matrix(std::string_view text);

// Golden document: {"scenario_digest": ..., "matrix": {env: {probe: letter}}}.
VerdictMatrix load_golden(const std::filesystem::path& path);
std::string render_golden(const VerdictMatrix& matrix, const std::string& digest);

// One line per differing cell ("env/probe: expected X, got Y"), restricted to
// the environments present in `actual`.
std::vector<std::string> diff_matrix(const VerdictMatrix& expected, const VerdictMatrix& actual);

}  // namespace vbasim
