#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vbasim/corpus.hpp"
#include "vbasim/environment.hpp"
#include "vbasim/errors.hpp"
#include "vbasim/mascarer.hpp"
#include "vbasim/report.hpp"

namespace py = pybind11;
using namespace vbasim;

namespace {

py::dict customize_texts(const std::string& victim_text, const std::string& template_text,
                         const std::string& catalog_text) {
  const AppManifest victim = parse_manifest(victim_text);
  const auto result = mascarer::customize(victim, parse_manifest(template_text),
                                          ServiceCatalog::from_manifest(parse_manifest(catalog_text)));
  py::dict out;
  out["addon"] = serialize_manifest(result.addon);
  out["malicious"] = serialize_manifest(result.malicious);
  out["rename_map"] = result.rename_map;
  py::list steps;
  for (const auto& s : result.report) steps.append(py::make_tuple(s.step, s.duration_ms));
  out["steps"] = steps;
  out["violations"] = mascarer::check_laws(victim, result);
  return out;
}

py::dict matrix_for(const std::string& scenario_path, const std::string& mode, bool hooks,
                    const std::vector<std::string>& skip_hooks) {
  const ScenarioInputs in = load_scenario(scenario_path);
  std::vector<EnvironmentKind> envs = all_environments();
  if (mode != "all") {
    auto kind = environment_from_string(mode);
    if (!kind) throw SchemaError("mode", "expected all, native, naive or mascara");
    envs = {*kind};
  }
  MascaraOptions options;
  options.install_hooks = hooks;
  options.skip_hooks.insert(skip_hooks.begin(), skip_hooks.end());
  MatrixRun run;
  {
    py::gil_scoped_release release;
    run = run_matrix(in, envs, options);
  }
  const std::string digest = scenario_digest(in);
  py::dict out;
  py::dict matrix;
  for (const auto& [env, row] : matrix_of(run.reports)) {
    py::dict r;
    for (const auto& [key, letter] : row) r[py::str(key)] = std::string(1, letter);
    matrix[py::str(env)] = r;
  }
  out["matrix"] = matrix;
  out["digest"] = digest;
  out["report"] = render_structured(run, digest);
  out["table"] = render_table(run.reports);
  return out;
}

std::vector<std::string> corpus_texts(std::size_t count, std::uint64_t seed) {
  std::vector<std::string> out;
  for (const auto& m : corpus::generate(count, seed)) out.push_back(serialize_manifest(m));
  return out;
}

std::string singular_for(const std::string& runtime, std::uint64_t invocations, std::uint64_t loops) {
  if (runtime != "native" && runtime != "virtual") throw SchemaError("runtime", "expected native or virtual");
  art::RuntimeKind kind = runtime == "native" ? art::RuntimeKind::Native : art::RuntimeKind::Virtual;
  art::RuntimeModel model(kind);
  for (std::uint64_t i = 0; i < invocations; ++i) model.record_invocation(art::kDefaultSentinel, loops);
  return std::string(to_string(art::singular_check(model).verdict));
}

}  // namespace

PYBIND11_MODULE(_vbasim, m) {
  m.doc() = "Android app-virtualization simulator: customization pipeline, probes, detection matrix.";

  auto base = py::register_exception<Error>(m, "VbasimError", PyExc_RuntimeError);
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());
  py::register_exception<InsufficientWarmupError>(m, "InsufficientWarmupError", base.ptr());

  m.attr("version") = std::string(kToolVersion);

  m.def("canonicalize_manifest", [](const std::string& text) { return serialize_manifest(parse_manifest(text)); },
        py::arg("text"), "Parse a manifest document and return its canonical text.");
  m.def("customize", &customize_texts, py::arg("victim"), py::arg("template"), py::arg("catalog"),
        "Run the add-on customization pipeline on three manifest documents.");
  m.def("run_matrix", &matrix_for, py::arg("scenario"), py::arg("mode") = "all", py::arg("hooks") = true,
        py::arg("skip_hooks") = std::vector<std::string>{},
        "Build the environments of a scenario file and run every probe.");
  m.def("generate_corpus", &corpus_texts, py::arg("count"), py::arg("seed"),
        "Synthetic victim manifests as canonical documents.");
  m.def("singular_check", &singular_for, py::arg("runtime"), py::arg("invocations"), py::arg("loops") = 0,
        "Warm the sentinel method in a native or virtual runtime and return the verdict name.");
}
