#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qmetro/states.hpp"

namespace qmetro {

/// A concrete, serializable experiment setup: an analytic unitary family
/// plus (optionally) a selection measurement, a readout POVM, and the
/// identifiable interval for estimation runs. Random templates are
/// materialized into this form at load time, so every loaded scenario
/// round-trips through the JSON schema (documented in docs/scenario-schema.md).
struct Scenario {
  std::string name;
  double x = 0.5;
  double fd_step = kDefaultFdStep;
  std::optional<ComplexMatrix> generator;
  std::optional<DensityMatrix> base;
  std::optional<SelectionMeasurement> selection;
  std::optional<POVM> povm;
  std::optional<std::array<double, 2>> interval;
  std::string hash;  // FNV-1a digest of the canonicalized source JSON

  ParametrizedState family() const;
};

/// Load from an explicit path, or from the scenario directory when given a
/// bare name (with or without the .json suffix). The seed materializes
/// random templates.
Scenario load_scenario(const std::string& name_or_path, std::uint64_t seed);

/// Serialize back to the schema (templates come out materialized).
std::string scenario_to_json(const Scenario& s);

/// Directory holding the shipped scenario files: QMETRO_SCENARIO_DIR when
/// set, else the build-time default.
std::string scenario_dir();

std::vector<std::string> list_scenarios();

std::string fnv1a_hex(const std::string& bytes);

/// Random verification instances: Ginibre base state, GUE generator, Haar
/// selection measurement, random nonempty favorable set, random x.
struct RandomInstanceSpec {
  std::size_t max_dim = 4;
  std::size_t max_outcomes = 3;
  std::size_t max_kraus = 2;
};

struct VerifyInstance {
  std::size_t dim;
  std::size_t rank;
  std::size_t num_outcomes;
  std::vector<std::size_t> kraus_per_outcome;
  double x;
  ParametrizedState family;
  SelectionMeasurement selection;
};

VerifyInstance random_instance(const RandomInstanceSpec& spec, std::uint64_t seed);

}  // namespace qmetro
