#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "vbasim/environment.hpp"
#include "vbasim/errors.hpp"
#include "vbasim/probes.hpp"
#include "vbasim/report.hpp"

using namespace vbasim;

namespace {

const std::filesystem::path kRoot = VBASIM_SOURCE_DIR;

const ScenarioInputs& default_scenario() {
  static const ScenarioInputs in = load_scenario(kRoot / "fixtures" / "default" / "scenario.json");
  return in;
}

// Scripted environment: each call kind answers from a table.
class ScriptedEnv final : public ProbeEnvironment {
 public:
  using Handler = std::function<ApiReply(const ApiCall&)>;

  explicit ScriptedEnv(AppManifest own) : own_(std::move(own)) {}
  void on(ApiKind kind, Handler h) { handlers_[kind] = std::move(h); }
  const AppManifest& declared_manifest() const override { return own_; }
  ApiReply call(const ApiCall& call) override {
    auto it = handlers_.find(call.kind);
    if (it == handlers_.end()) throw ApiError(ApiErrorCode::BadArgument, "unscripted call");
    return it->second(call);
  }

 private:
  AppManifest own_;
  std::map<ApiKind, Handler> handlers_;
};

AppManifest own_app() {
  AppManifest m;
  m.package = "org.probe";
  m.activities.push_back({".Main", ComponentKind::Activity, true, false, {}, {}, {}});
  return m;
}

ScriptedEnv::Handler fails(ApiErrorCode code) {
  return [code](const ApiCall&) -> ApiReply { throw ApiError(code, "scripted"); };
}

}  // namespace

TEST_CASE("parse_ps keeps well-formed lines only") {
  const auto lines = parse_ps("12 10001 org.a\nnot a line at all\n13 x org.b\n14 10001 org.a:remote\n\ncache\n");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].pid == 12);
  CHECK(lines[1].name == "org.a:remote");
  CHECK(parse_ps("cache\nfiles\nshared_prefs\n").empty());
}

TEST_CASE("the default scenario reproduces the golden matrix") {
  const MatrixRun run = run_matrix(default_scenario(), all_environments());
  const VerdictMatrix golden = load_golden(kRoot / "tests" / "golden" / "default_matrix.json");
  CHECK(diff_matrix(golden, matrix_of(run.reports)).empty());
  for (const auto& report : run.reports) {
    CHECK(report.outcomes.size() == kProbeCount);
    for (std::size_t i = 0; i < kProbeCount; ++i) CHECK(report.outcomes[i].probe == all_probes()[i]);
    CHECK(report.counts().error == 0);
    for (const auto& o : report.outcomes) CHECK_FALSE(o.evidence.empty());
  }
}

TEST_CASE("golden digest identifies the default scenario") {
  std::ifstream in(kRoot / "tests" / "golden" / "default_matrix.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find(scenario_digest(default_scenario())) != std::string::npos);
}

TEST_CASE("no probe fires natively, none fires under Mascara, singular sees the container") {
  const MatrixRun run = run_matrix(default_scenario(), all_environments());
  for (const auto& report : run.reports) {
    CAPTURE(to_string(report.environment));
    const auto& singular = report.outcome(ProbeId::Singular);
    switch (report.environment) {
      case EnvironmentKind::Native:
        CHECK(report.counts().virtual_detected == 0);
        CHECK(singular.verdict == Verdict::Clean);
        break;
      case EnvironmentKind::NaiveContainer:
        CHECK(report.classic_counts().virtual_detected == 16);
        CHECK(singular.verdict == Verdict::VirtualDetected);
        break;
      case EnvironmentKind::MascaraContainer:
        CHECK(report.classic_counts().virtual_detected == 0);
        CHECK(singular.verdict == Verdict::VirtualDetected);
        break;
    }
    CHECK(report.outcome(ProbeId::M6).verdict == Verdict::Inconclusive);
    CHECK(report.outcome(ProbeId::M18).verdict == Verdict::Inconclusive);
  }
}

TEST_CASE("installed-package and data-dir probes against each container") {
  const World naive = build_naive_world(default_scenario());
  const World mascara = build_mascara_world(default_scenario());
  {
    World w = naive;
    WorldProbeEnvironment env(w);
    CHECK(run_probe(env, ProbeId::M4).verdict == Verdict::VirtualDetected);
    const auto m9 = run_probe(env, ProbeId::M9);
    CHECK(m9.verdict == Verdict::VirtualDetected);
    CHECK(m9.evidence.find("/Plugin/") != std::string::npos);
  }
  {
    World w = mascara;
    WorldProbeEnvironment env(w);
    CHECK(run_probe(env, ProbeId::M4).verdict == Verdict::Clean);
    CHECK(run_probe(env, ProbeId::M9).verdict == Verdict::Clean);
  }
}

TEST_CASE("removing hooks flips the hooked mechanisms") {
  MascaraOptions bare;
  bare.install_hooks = false;
  const World w = build_mascara_world(default_scenario(), bare);
  const DetectionReport report = run_all_probes(w);
  for (ProbeId id : {ProbeId::M7, ProbeId::M8, ProbeId::M9, ProbeId::M11, ProbeId::M12}) {
    CHECK(report.outcome(id).verdict == Verdict::VirtualDetected);
  }
  MascaraOptions no_exec;
  no_exec.skip_hooks = {"exec_ps"};
  const DetectionReport partial = run_all_probes(build_mascara_world(default_scenario(), no_exec));
  CHECK(partial.classic_counts().virtual_detected == 1);
  CHECK(partial.outcome(ProbeId::M8).verdict == Verdict::VirtualDetected);

  MascaraOptions bogus;
  bogus.skip_hooks = {"no_such_hook"};
  CHECK_THROWS_AS(build_mascara_world(default_scenario(), bogus), SchemaError);
}

TEST_CASE("probe runs never mutate the world they were given") {
  const World w = build_naive_world(default_scenario());
  const auto before = w.os.dynamic_receivers().size();
  const auto processes = w.os.processes().size();
  run_all_probes(w);
  CHECK(w.os.dynamic_receivers().size() == before);
  CHECK(w.os.processes().size() == processes);
  const DetectionReport again = run_all_probes(w);
  CHECK(again.outcome(ProbeId::M15).verdict == Verdict::VirtualDetected);
}

TEST_CASE("scripted replies: each mechanism reads its reply the documented way") {
  SUBCASE("2: missing package is detection") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::GetPackageInfo, fails(ApiErrorCode::PackageNotFound));
    CHECK(run_probe(env, ProbeId::M2).verdict == Verdict::VirtualDetected);
  }
  SUBCASE("4: own package listed is clean") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::GetInstalledPackages, [](const ApiCall&) { return ApiReply{StringList{"a", "org.probe"}}; });
    CHECK(run_probe(env, ProbeId::M4).verdict == Verdict::Clean);
  }
  SUBCASE("5: a foreign task is detection") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::GetRecentTasks, [](const ApiCall&) { return ApiReply{ComponentList{{"org.other", ".X"}}}; });
    env.on(ApiKind::GetRunningTasks, [](const ApiCall&) { return ApiReply{ComponentList{}}; });
    CHECK(run_probe(env, ProbeId::M5).verdict == Verdict::VirtualDetected);
  }
  SUBCASE("6: own-only service list is inconclusive") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::GetRunningServices, [](const ApiCall&) { return ApiReply{ComponentList{}}; });
    CHECK(run_probe(env, ProbeId::M6).verdict == Verdict::Inconclusive);
  }
  SUBCASE("8: ls output parses to zero ps lines") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::ExecShell, [](const ApiCall&) { return ApiReply{std::string("cache\nfiles\n")}; });
    CHECK(run_probe(env, ProbeId::M8).verdict == Verdict::Clean);
  }
  SUBCASE("8: two names under one uid is detection") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::ExecShell, [](const ApiCall&) { return ApiReply{std::string("1 10 a\n2 10 b\n")}; });
    CHECK(run_probe(env, ProbeId::M8).verdict == Verdict::VirtualDetected);
  }
  SUBCASE("10: a source dir outside /data/app is detection") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::GetApplicationInfo, [](const ApiCall& c) {
      return ApiReply{ApplicationInfo{c.target, "/data/data/host/Plugin/x/base-1.apk", "/data/data/" + c.target}};
    });
    CHECK(run_probe(env, ProbeId::M10).verdict == Verdict::VirtualDetected);
  }
  SUBCASE("11/12: denied maps are clean, foreign entries are not") {
    ScriptedEnv denied(own_app());
    denied.on(ApiKind::ReadProcMaps, fails(ApiErrorCode::AccessDenied));
    CHECK(run_probe(denied, ProbeId::M11).verdict == Verdict::Clean);
    CHECK(run_probe(denied, ProbeId::M12).verdict == Verdict::Clean);
    ScriptedEnv open(own_app());
    open.on(ApiKind::ReadProcMaps, [](const ApiCall&) {
      return ApiReply{StringList{"/data/app/org.probe/base.apk", "/data/data/host/Plugin/org.probe/lib"}};
    });
    CHECK(run_probe(open, ProbeId::M11).verdict == Verdict::Clean);
    CHECK(run_probe(open, ProbeId::M12).verdict == Verdict::VirtualDetected);
  }
  SUBCASE("13: a refused service start is detection") {
    AppManifest own = own_app();
    for (const char* s : {".S1", ".S2", ".S3", ".S4"}) own.services.push_back({s, ComponentKind::Service, false, false, {}, {}, {}});
    ScriptedEnv env(own);
    int started = 0;
    env.on(ApiKind::StartService, [&started](const ApiCall&) -> ApiReply {
      if (++started == 2) throw ApiError(ApiErrorCode::ComponentNotRegistered, "no stub");
      return ApiReply{};
    });
    CHECK(run_probe(env, ProbeId::M13).verdict == Verdict::VirtualDetected);
  }
  SUBCASE("15: a static receiver is clean") {
    AppManifest own = own_app();
    own.receivers.push_back({".R", ComponentKind::Receiver, false, false, {"act"}, {}, {}});
    ScriptedEnv env(own);
    env.on(ApiKind::UnregisterReceiver, fails(ApiErrorCode::StaticReceiver));
    CHECK(run_probe(env, ProbeId::M15).verdict == Verdict::Clean);
  }
  SUBCASE("16: an unregistered component is detection") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::SetComponentEnabled, fails(ApiErrorCode::ComponentNotRegistered));
    CHECK(run_probe(env, ProbeId::M16).verdict == Verdict::VirtualDetected);
  }
  SUBCASE("17: foreign tokens are detection, no natives is clean") {
    CHECK(run_probe(*std::make_unique<ScriptedEnv>(own_app()), ProbeId::M17).verdict == Verdict::Clean);
    AppManifest own = own_app();
    own.native_components = {"webview"};
    ScriptedEnv env(own);
    env.on(ApiKind::SharedNativeData, [](const ApiCall&) { return ApiReply{StringList{"org.probe", "org.other"}}; });
    CHECK(run_probe(env, ProbeId::M17).verdict == Verdict::VirtualDetected);
  }
  SUBCASE("unexpected API errors propagate") {
    ScriptedEnv env(own_app());
    env.on(ApiKind::GetPackageInfo, fails(ApiErrorCode::AccessDenied));
    CHECK_THROWS_AS(run_probe(env, ProbeId::M2), ApiError);
  }
}
