#include "vbasim/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "vbasim/errors.hpp"

namespace vbasim {

using json = nlohmann::ordered_json;

namespace {

constexpr int kEnvWidth = 18;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int column_width(const std::string& key) { return static_cast<int>(std::max<std::size_t>(key.size(), 2)) + 1; }

VerdictMatrix matrix_from_json(const json& m) {
  if (!m.is_object()) throw SchemaError("matrix", "expected an object");
  VerdictMatrix out;
  for (const auto& [env, row] : m.items()) {
    if (!row.is_object()) throw SchemaError("matrix." + env, "expected an object");
    for (const auto& [key, cell] : row.items()) {
      const std::string field = "matrix." + env + "." + key;
      if (!probe_from_key(key)) throw SchemaError(field, "unknown probe key");
      if (!cell.is_string() || cell.get<std::string>().size() != 1 ||
          !verdict_from_letter(cell.get<std::string>()[0])) {
        throw SchemaError(field, "expected one of V, C, I, E");
      }
      out[env][key] = cell.get<std::string>()[0];
    }
  }
  return out;
}

json matrix_to_json(const VerdictMatrix& matrix) {
  json out = json::object();
  for (const auto& [env, row] : matrix) {
    json r = json::object();
    for (ProbeId id : all_probes()) {
      const std::string key = probe_key(id);
      auto it = row.find(key);
      if (it != row.end()) r[key] = std::string(1, it->second);
    }
    out[env] = std::move(r);
  }
  return out;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string scenario_digest(const ScenarioInputs& in) {
  std::uint64_t h = fnv1a(serialize_manifest(in.victim));
  h = fnv1a(serialize_manifest(in.addon_template), h);
  AppManifest catalog;
  catalog.package = in.catalog.package;
  catalog.label = in.catalog.label;
  catalog.services = in.catalog.entries;
  h = fnv1a(serialize_manifest(catalog), h);
  if (in.companion) h = fnv1a(serialize_manifest(*in.companion), h);
  h = fnv1a("seed=" + std::to_string(in.seed), h);
  for (const auto& [store, count] : in.stores) h = fnv1a(store + "=" + std::to_string(count), h);
  return hex64(h);
}

VerdictMatrix matrix_of(const std::vector<DetectionReport>& reports) {
  VerdictMatrix out;
  for (const auto& r : reports) {
    auto& row = out[std::string(to_string(r.environment))];
    for (const auto& o : r.outcomes) row[probe_key(o.probe)] = verdict_letter(o.verdict);
  }
  return out;
}

std::string render_structured(const MatrixRun& run, const std::string& digest) {
  json doc;
  doc["tool"] = "vbasim";
  doc["version"] = std::string(kToolVersion);
  doc["scenario_digest"] = digest;
  json envs = json::array();
  for (const auto& r : run.reports) {
    json e;
    e["environment"] = std::string(to_string(r.environment));
    json outcomes = json::array();
    for (const auto& o : r.outcomes) {
      outcomes.push_back({{"probe", probe_key(o.probe)},
                          {"verdict", std::string(to_string(o.verdict))},
                          {"letter", std::string(1, verdict_letter(o.verdict))},
                          {"evidence", o.evidence}});
    }
    e["outcomes"] = std::move(outcomes);
    const auto c = r.counts();
    e["summary"] = {{"VirtualDetected", c.virtual_detected},
                    {"Clean", c.clean},
                    {"Inconclusive", c.inconclusive},
                    {"Error", c.error}};
    envs.push_back(std::move(e));
  }
  doc["environments"] = std::move(envs);
  doc["matrix"] = matrix_to_json(matrix_of(run.reports));
  json log = json::array();
  for (const auto& entry : run.run_log.entries) {
    log.push_back({{"step", entry.step}, {"detail", entry.detail}, {"warning", entry.warning}});
  }
  doc["run_log"] = std::move(log);
  json steps = json::array();
  if (run.customization) {
    for (const auto& s : run.customization->report) {
      steps.push_back({{"step", s.step}, {"duration_ms", s.duration_ms}});
    }
  }
  doc["pipeline_steps"] = std::move(steps);
  return doc.dump(2) + "\n";
}

std::string render_table(const std::vector<DetectionReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(kEnvWidth) << "environment";
  for (ProbeId id : all_probes()) {
    const std::string key = probe_key(id);
    out << std::right << std::setw(column_width(key)) << key;
  }
  out << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(kEnvWidth) << to_string(r.environment);
    for (ProbeId id : all_probes()) {
      const std::string key = probe_key(id);
      out << std::right << std::setw(column_width(key)) << verdict_letter(r.outcome(id).verdict);
    }
    out << '\n';
  }
  return out.str();
}

VerdictMatrix parse_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw SchemaError("table", "empty table");
  std::vector<std::string> keys;
  {
    std::istringstream h(header);
    std::string token;
    h >> token;  // "environment"
    while (h >> token) keys.push_back(token);
  }
  VerdictMatrix out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string env;
    if (!(row >> env)) continue;
    for (const auto& key : keys) {
      std::string cell;
      if (!(row >> cell) || cell.size() != 1) throw SchemaError("table." + env + "." + key, "missing cell");
      out[env][key] = cell[0];
    }
  }
  return out;
}

VerdictMatrix parse_structured_matrix(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("report", e.what());
  }
  if (!doc.contains("matrix")) throw SchemaError("matrix", "missing field");
  return matrix_from_json(doc["matrix"]);
}

VerdictMatrix load_golden(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string(), "cannot open golden file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_structured_matrix(buf.str());
}

std::string render_golden(const VerdictMatrix& matrix, const std::string& digest) {
  json doc;
  doc["scenario_digest"] = digest;
  doc["matrix"] = matrix_to_json(matrix);
  return doc.dump(2) + "\n";
}

std::vector<std::string> diff_matrix(const VerdictMatrix& expected, const VerdictMatrix& actual) {
  std::vector<std::string> diffs;
  for (const auto& [env, row] : actual) {
    auto exp_row = expected.find(env);
    if (exp_row == expected.end()) {
      diffs.push_back(env + ": environment missing from golden");
      continue;
    }
    for (ProbeId id : all_probes()) {
      const std::string key = probe_key(id);
      auto a = row.find(key);
      auto e = exp_row->second.find(key);
      const char got = a == row.end() ? '-' : a->second;
      const char want = e == exp_row->second.end() ? '-' : e->second;
      if (got != want) {
        diffs.push_back(env + "/" + key + ": expected " + std::string(1, want) + ", got " + std::string(1, got));
      }
    }
  }
  return diffs;
}

}  // namespace vbasim
