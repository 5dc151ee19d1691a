#pragma once

#include <cstdint>
#include <string>

#include "qmetro/fisher.hpp"
#include "qmetro/postselect.hpp"

namespace qmetro {

/// Identifiable interval plus estimator knobs. The interval is part of the
/// scenario: the Cramer-Rao comparison presumes local identifiability.
struct MleOptions {
  double x_min = 0.0;
  double x_max = 1.0;
  int grid_points = 512;
  int golden_iters = 60;
};

struct ExperimentReport {
  double x_true = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t repetitions = 0;
  double mse = 0.0;
  double crb = 0.0;    // 1 / (N * I_cl)
  double ratio = 0.0;  // mse / crb
  std::string estimator = "MLE-grid-refined";
  std::uint64_t rng_seed = 0;
  std::uint64_t boundary_hits = 0;      // estimates pinned to an interval edge
  bool degenerate_boundary = false;     // more than 5% of reps pinned
  std::uint64_t zero_survivor_reps = 0; // probabilistic arm only
  double mean_survivors = 0.0;          // probabilistic arm only
};

/// Grid-then-golden-section maximum-likelihood estimation against the POVM
/// outcome distribution p(k|x) = Tr[rho(x) Y_k]. Throws Unidentifiable when
/// the outcome distribution carries no information at x_true.
ExperimentReport simulate_mle(const ParametrizedState& ps, const POVM& povm, double x_true,
                              std::uint64_t n_trials, std::uint64_t repetitions,
                              std::uint64_t rng_seed, const MleOptions& options);

/// Binomial normal-approximation statistic |1-2p| / sqrt(N p (1-p)) with the
/// 0.3 rule-of-thumb cutoff. Computed from the canonical (min, max) pair of
/// (p, 1-p), so it is exactly symmetric under p <-> 1-p.
struct NormalRule {
  double statistic = 0.0;
  bool ok = false;
};

NormalRule normal_rule(double p, std::uint64_t n_trials);

/// sqrt(p_success) * snr: the success-probability-corrected signal-to-noise
/// figure for nondeterministic protocols.
double root_prob_snr(double snr, double p_success);

/// Probabilistic protocol (selection, keep favorable, MLE on survivors with
/// the renormalized likelihood) against the deterministic protocol (the full
/// two-stage measurement on every trial). Both arms share the same draws, so
/// a favorable set covering all outcomes reproduces simulate_mle exactly.
struct PairedExperiment {
  ExperimentReport probabilistic;
  ExperimentReport deterministic;
};

PairedExperiment gamble_mse_experiment(const ParametrizedState& ps,
                                       const SelectionMeasurement& sel, const POVM& povm_cond,
                                       double x_true, std::uint64_t n_trials,
                                       std::uint64_t repetitions, std::uint64_t rng_seed,
                                       const MleOptions& options);

}  // namespace qmetro
