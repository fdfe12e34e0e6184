#include <doctest.h>

#include <random>

#include "vbasim/artmodel.hpp"
#include "vbasim/errors.hpp"

using namespace vbasim;
using namespace vbasim::art;

TEST_CASE("hybrid counts invocations plus loop iterations") {
  RuntimeModel native(RuntimeKind::Native);
  for (int i = 0; i < 5; ++i) native.record_invocation("m");
  CHECK(native.method("m").hotness_count == 5);
  native.record_invocation("n", 3);
  CHECK(native.method("n").hotness_count == 4);
  CHECK(native.method("n").compile_mode == CompileMode::Hybrid);
}

TEST_CASE("AoT never moves") {
  RuntimeModel hosted(RuntimeKind::Virtual);
  for (int i = 0; i < 5; ++i) hosted.record_invocation("m", 7);
  CHECK(hosted.method("m").hotness_count == 0);
  CHECK(hosted.method("m").invocations == 5);
  CHECK(hosted.method("m").compile_mode == CompileMode::AoT);
}

TEST_CASE("declare overrides the runtime default") {
  RuntimeModel native(RuntimeKind::Native);
  native.declare("app.Code", CompileMode::AoT);
  native.record_invocation("app.Code");
  CHECK(native.method("app.Code").hotness_count == 0);
}

TEST_CASE("singular separates native from hosted runtimes after warmup") {
  RuntimeModel native(RuntimeKind::Native);
  RuntimeModel hosted(RuntimeKind::Virtual);
  for (std::uint64_t i = 0; i < kMinInvocations; ++i) {
    native.record_invocation(kDefaultSentinel);
    hosted.record_invocation(kDefaultSentinel);
  }
  CHECK(singular_check(native).verdict == Verdict::Clean);
  CHECK(singular_check(hosted).verdict == Verdict::VirtualDetected);
  CHECK(singular_check(hosted).probe == ProbeId::Singular);
}

TEST_CASE("singular refuses to judge a cold sentinel") {
  RuntimeModel native(RuntimeKind::Native);
  CHECK_THROWS_AS(singular_check(native), InsufficientWarmupError);
  for (std::uint64_t i = 0; i + 1 < kMinInvocations; ++i) native.record_invocation(kDefaultSentinel);
  CHECK_THROWS_AS(singular_check(native), InsufficientWarmupError);
  native.record_invocation(kDefaultSentinel);
  CHECK_NOTHROW(singular_check(native));
}

TEST_CASE("random sequences: AoT stays zero, hybrid matches the closed form") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 200; ++round) {
    RuntimeModel native(RuntimeKind::Native);
    RuntimeModel hosted(RuntimeKind::Virtual);
    std::uint64_t expected = 0;
    const auto n = rng() % 40;
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t loops = rng() % 100;
      native.record_invocation("m", loops);
      hosted.record_invocation("m", loops);
      expected += 1 + loops;
    }
    if (n == 0) continue;
    CHECK(native.method("m").hotness_count == expected);
    CHECK(hosted.method("m").hotness_count == 0);
  }
}
