#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "qmetro/fisher.hpp"
#include "qmetro/scenario.hpp"

using namespace qmetro;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static std::atomic<int> counter{0};
    path = (std::filesystem::temp_directory_path() /
            ("qmetro_test_" + std::to_string(getpid()) + "_" +
             std::to_string(counter++) + ".json"))
               .string();
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("shipped scenarios are listed") {
    const auto names = list_scenarios();
    auto has = [&](const char* n) {
      return std::find(names.begin(), names.end(), n) != names.end();
    };
    CHECK(has("qubit_phase_pure"));
    CHECK(has("qubit_phase_mixed"));
    CHECK(has("weak_value_2qubit"));
    CHECK(has("binomial_phase"));
    CHECK(has("random_channel"));
  }

  TEST_CASE("loading a builtin by name") {
    const Scenario s = load_scenario("qubit_phase_pure", 1);
    CHECK(s.name == "qubit_phase_pure");
    CHECK(s.selection.has_value());
    CHECK(s.povm.has_value());
    CHECK(s.interval.has_value());
    CHECK(!s.hash.empty());
    // The family evaluates and carries unit information (pure equator state).
    CHECK(qfi(s.family(), s.x) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(load_scenario("qubit_phase_pure", 9).hash == s.hash);
  }

  TEST_CASE("mixed builtin carries the squared Bloch length") {
    const Scenario s = load_scenario("qubit_phase_mixed", 1);
    CHECK(qfi(s.family(), s.x) == doctest::Approx(0.25).epsilon(1e-9));
  }

  TEST_CASE("scenarios round-trip through the schema") {
    const Scenario s = load_scenario("weak_value_2qubit", 1);
    TempFile tmp(scenario_to_json(s));
    const Scenario back = load_scenario(tmp.path, 1);
    CHECK(max_abs_diff(*s.generator, *back.generator) < 1e-15);
    CHECK(max_abs_diff(s.base->mat(), back.base->mat()) < 1e-15);
    REQUIRE(back.selection.has_value());
    CHECK(back.selection->favorable() == s.selection->favorable());
    CHECK(back.selection->num_outcomes() == s.selection->num_outcomes());
    for (std::size_t a = 0; a < s.selection->num_outcomes(); ++a)
      CHECK(max_abs_diff(s.selection->povm_element(a), back.selection->povm_element(a)) < 1e-14);
    CHECK(back.x == s.x);
  }

  TEST_CASE("random template materializes deterministically from the seed") {
    const Scenario a = load_scenario("random_channel", 7);
    const Scenario b = load_scenario("random_channel", 7);
    const Scenario c = load_scenario("random_channel", 8);
    CHECK(max_abs_diff(*a.generator, *b.generator) == 0.0);
    CHECK(max_abs_diff(*a.generator, *c.generator) > 1e-3);
    REQUIRE(a.selection.has_value());
    CHECK(a.selection->num_outcomes() == 3);
    // Materialized templates serialize to a concrete scenario.
    TempFile tmp(scenario_to_json(a));
    const Scenario back = load_scenario(tmp.path, 99);
    CHECK(max_abs_diff(*a.generator, *back.generator) < 1e-15);
  }

  TEST_CASE("missing and malformed files fail with a diagnostic") {
    CHECK_THROWS_AS(load_scenario("no_such_scenario", 1), Error);

    TempFile bad("{ this is not json");
    CHECK_THROWS_WITH_AS(load_scenario(bad.path, 1),
                         doctest::Contains("parse error"), Error);

    TempFile wrong_schema(R"({"schema": 2, "family": {"kind": "analytic_unitary"}})");
    CHECK_THROWS_WITH_AS(load_scenario(wrong_schema.path, 1),
                         doctest::Contains("schema"), Error);

    TempFile ragged(R"({"schema": 1, "family": {"kind": "analytic_unitary",
      "generator": [[[0.5,0],[0,0]],[[0,0]]],
      "base": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}})");
    CHECK_THROWS_AS(load_scenario(ragged.path, 1), Error);
  }

  TEST_CASE("content hash is stable and content-sensitive") {
    CHECK(fnv1a_hex("abc") == fnv1a_hex("abc"));
    CHECK(fnv1a_hex("abc") != fnv1a_hex("abd"));
    CHECK(fnv1a_hex("abc").size() == 16);
  }

  TEST_CASE("random verification instances respect their bounds") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      const VerifyInstance inst = random_instance({.max_dim = 4, .max_outcomes = 3, .max_kraus = 2},
                                                  seed);
      CHECK(inst.dim >= 2);
      CHECK(inst.dim <= 4);
      CHECK(inst.num_outcomes >= 2);
      CHECK(inst.num_outcomes <= 3);
      for (std::size_t k : inst.kraus_per_outcome) {
        CHECK(k >= 1);
        CHECK(k <= 2);
      }
      CHECK(!inst.selection.favorable().empty());
      CHECK(inst.x >= -1.0);
      CHECK(inst.x <= 1.0);
    }
  }
}
