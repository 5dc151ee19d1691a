#pragma once

#include <optional>
#include <vector>

#include "qmetro/fisher.hpp"
#include "qmetro/states.hpp"

namespace qmetro {

inline constexpr double kZeroProbability = 1e-12;
/// Block label used for the lumped unfavorable outcome.
inline constexpr int kRejectLabel = -1;

/// Post-measurement state conditioned on one outcome. `state` is absent when
/// the outcome probability vanishes (ZeroProbability case, handled not fatal).
struct ConditionalState {
  double prob = 0.0;
  std::optional<DensityMatrix> state;
};

ConditionalState conditional_state(const ParametrizedState& ps, const SelectionMeasurement& sel,
                                   std::size_t alpha, double x);

enum class EnsembleKind { Full, Lumped, Conditioned };

struct EnsembleBlock {
  int label = 0;               // outcome index, or kRejectLabel for the lump
  double prob = 0.0;           // p(a|x); for Conditioned, q(a|x) = p(a|x)/p(ok|x)
  DensityMatrix state;         // conditional system state (dump state for the lump)
  double conditional_qfi = 0.0;
};

/// Block-diagonal system (x) ancilla state, stored as its blocks. The ancilla
/// labels are computational basis vectors indexed by block position, so the
/// full matrix is only materialized by assemble_state for verification paths.
struct PostselectionEnsemble {
  EnsembleKind kind = EnsembleKind::Full;
  std::vector<EnsembleBlock> blocks;
  double success_prob = 1.0;  // p(ok|x)
  std::optional<DensityMatrix> dump;  // Lumped only
};

/// All outcomes recorded in the ancilla, with the selection probabilities.
PostselectionEnsemble build_joint(const ParametrizedState& ps, const SelectionMeasurement& sel,
                                  double x);

/// Unfavorable outcomes lumped into one block damped to an x-independent dump
/// state (zero information). Default dump is |0><0| in the system dimension;
/// every reported quantity is independent of this choice.
PostselectionEnsemble build_lumped(const ParametrizedState& ps, const SelectionMeasurement& sel,
                                   double x, std::optional<DensityMatrix> dump_state = {});

/// Renormalized on the favorable outcomes; block weights q(a|x) = p(a|x)/p(ok|x).
PostselectionEnsemble build_conditioned(const ParametrizedState& ps,
                                        const SelectionMeasurement& sel, double x);

/// Decomposition of the ensemble's Fisher information into the classical
/// information of the outcome distribution plus the average conditional
/// quantum information, with the favorable-vs-unfavorable binary term.
struct FisherBreakdown {
  double i_cl_outcomes = 0.0;
  double avg_conditional_qfi = 0.0;
  double total = 0.0;
  double binary_i_cl = 0.0;
  std::vector<EnsembleBlock> per_block;
};

FisherBreakdown fisher_breakdown(const PostselectionEnsemble& ens, const ParametrizedState& ps,
                                 const SelectionMeasurement& sel, double x);

/// The assembled block-diagonal state (direct sum of prob * state blocks) at
/// x. Verification path: its directly computed QFI must reproduce
/// FisherBreakdown::total.
ComplexMatrix assemble_state(const ParametrizedState& ps, const SelectionMeasurement& sel,
                             EnsembleKind kind, double x,
                             std::optional<DensityMatrix> dump_state = {});

double assembled_qfi(const ParametrizedState& ps, const SelectionMeasurement& sel,
                     EnsembleKind kind, double x, std::optional<DensityMatrix> dump_state = {});

/// The ordered chain of Fisher informations: input state >= joint record >=
/// lumped record >= success-weighted conditioned record.
struct FisherChain {
  double i_rho = 0.0;
  double i_joint = 0.0;
  double i_lumped = 0.0;
  double i_conditioned = 0.0;           // unweighted
  double weighted_conditioned = 0.0;    // p(ok|x) * i_conditioned
  double success_prob = 1.0;
  std::vector<double> margins;          // 3 consecutive differences
  bool ordered_ok = false;
};

FisherChain fisher_chain(const ParametrizedState& ps, const SelectionMeasurement& sel, double x);

/// Chain plus the three breakdowns it was computed from.
struct ChainWitness {
  FisherChain chain;
  FisherBreakdown joint;
  FisherBreakdown lumped;
  FisherBreakdown conditioned;
};

ChainWitness fisher_chain_detailed(const ParametrizedState& ps, const SelectionMeasurement& sel,
                                   double x);

/// Slack used by the chain check: margins must be >= -1e-8 * max(1, i_rho).
double chain_slack(double i_rho);

/// Explicit dilation of the selection measurement: isometry
/// V|q> = sum_{a,j} M_{a,j}|q> (x) |f_{a,j}>, completed to a unitary, then
/// dephased two ways on the ancilla:
///  - `intermediate`: outcome-subspace dephasing only (keeps intra-outcome
///    coherence, so it is NOT the recorded state yet);
///  - `final_state`: suboutcome erasure onto |f_{a,0}>, which matches the
///    directly assembled joint record `direct` entrywise.
/// `evolved_qfi` is the information of the pre-dephasing unitary family,
/// which must equal the input family's (the dilation is reversible).
struct PurificationRoundtrip {
  ComplexMatrix isometry;
  ComplexMatrix unitary;
  ComplexMatrix evolved;
  ComplexMatrix intermediate;
  ComplexMatrix final_state;
  ComplexMatrix direct;
  double evolved_qfi = 0.0;
};

PurificationRoundtrip purify_and_decohere(const ParametrizedState& ps,
                                          const SelectionMeasurement& sel, double x);

}  // namespace qmetro
