#include "qmetro/postselect.hpp"

#include <cmath>
#include <limits>

namespace qmetro {

namespace {

double margin_of(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && a > 0 && b > 0) return 0.0;
  return a - b;
}

/// QFI of the conditional family x -> F_a[rho(x)] / p(a|x), finite-differenced
/// through the whole construction (probabilities and states both move with x).
double conditional_qfi(const ParametrizedState& ps, const SelectionMeasurement& sel,
                       std::size_t alpha, double x) {
  auto family = ParametrizedState::custom(
      [&ps, &sel, alpha](double t) {
        ComplexMatrix m = sel.apply_outcome(alpha, ps.evaluate(t).mat());
        const double p = m.trace().real();
        if (p < kZeroProbability)
          fail(ErrorCode::ZeroProbability, "conditional family hit a vanishing outcome");
        return DensityMatrix::unchecked((m * cplx(1.0 / p)).hermitized());
      },
      ps.fd_step());
  return qfi(family, x);
}

std::vector<double> raw_probs(const ParametrizedState& ps, const SelectionMeasurement& sel,
                              double x) {
  return sel.outcome_probabilities(ps.evaluate(x).mat());
}

}  // namespace

ConditionalState conditional_state(const ParametrizedState& ps, const SelectionMeasurement& sel,
                                   std::size_t alpha, double x) {
  if (alpha >= sel.num_outcomes()) fail(ErrorCode::OutOfRange, "conditional_state: bad outcome");
  ComplexMatrix m = sel.apply_outcome(alpha, ps.evaluate(x).mat());
  ConditionalState out;
  out.prob = m.trace().real();
  if (out.prob >= kZeroProbability)
    out.state = DensityMatrix::unchecked((m * cplx(1.0 / out.prob)).hermitized());
  return out;
}

PostselectionEnsemble build_joint(const ParametrizedState& ps, const SelectionMeasurement& sel,
                                  double x) {
  PostselectionEnsemble ens;
  ens.kind = EnsembleKind::Full;
  double p_ok = 0.0;
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a) {
    ConditionalState cs = conditional_state(ps, sel, a, x);
    EnsembleBlock block;
    block.label = static_cast<int>(a);
    block.prob = cs.prob;
    if (cs.state) {
      block.state = *cs.state;
      block.conditional_qfi = conditional_qfi(ps, sel, a, x);
    } else {
      block.state = DensityMatrix::maximally_mixed(sel.dim());
      block.conditional_qfi = 0.0;
    }
    if (sel.is_favorable(a)) p_ok += cs.prob;
    ens.blocks.push_back(std::move(block));
  }
  ens.success_prob = p_ok;
  return ens;
}

PostselectionEnsemble build_lumped(const ParametrizedState& ps, const SelectionMeasurement& sel,
                                   double x, std::optional<DensityMatrix> dump_state) {
  if (sel.favorable().empty()) fail(ErrorCode::FavorableSetEmpty, "build_lumped: empty favorable set");
  DensityMatrix dump = dump_state ? std::move(*dump_state)
                                  : DensityMatrix::basis_state(sel.dim(), 0);
  if (dump.dim() != sel.dim())
    fail(ErrorCode::DimensionMismatch, "build_lumped: dump state dimension mismatch");

  PostselectionEnsemble ens;
  ens.kind = EnsembleKind::Lumped;
  const std::vector<std::size_t> rejects = sel.unfavorable();
  double p_reject = 0.0;
  if (!rejects.empty()) {
    std::vector<double> p = raw_probs(ps, sel, x);
    for (std::size_t a : rejects) p_reject += p[a];
    EnsembleBlock reject;
    reject.label = kRejectLabel;
    reject.prob = p_reject;
    reject.state = dump;
    reject.conditional_qfi = 0.0;  // dump state carries no parameter dependence
    ens.blocks.push_back(std::move(reject));
    ens.dump = std::move(dump);
  }
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a) {
    if (!sel.is_favorable(a)) continue;
    ConditionalState cs = conditional_state(ps, sel, a, x);
    EnsembleBlock block;
    block.label = static_cast<int>(a);
    block.prob = cs.prob;
    if (cs.state) {
      block.state = *cs.state;
      block.conditional_qfi = conditional_qfi(ps, sel, a, x);
    } else {
      block.state = DensityMatrix::maximally_mixed(sel.dim());
      block.conditional_qfi = 0.0;
    }
    ens.blocks.push_back(std::move(block));
  }
  ens.success_prob = 1.0 - p_reject;
  return ens;
}

PostselectionEnsemble build_conditioned(const ParametrizedState& ps,
                                        const SelectionMeasurement& sel, double x) {
  std::vector<double> p = raw_probs(ps, sel, x);
  double p_ok = 0.0;
  for (std::size_t a : sel.favorable()) p_ok += p[a];
  if (p_ok <= kZeroProbability)
    fail(ErrorCode::VanishingSuccessProbability, "build_conditioned: p(ok|x) vanishes");

  PostselectionEnsemble ens;
  ens.kind = EnsembleKind::Conditioned;
  ens.success_prob = p_ok;
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a) {
    if (!sel.is_favorable(a)) continue;
    ConditionalState cs = conditional_state(ps, sel, a, x);
    EnsembleBlock block;
    block.label = static_cast<int>(a);
    block.prob = cs.prob / p_ok;
    if (cs.state) {
      block.state = *cs.state;
      block.conditional_qfi = conditional_qfi(ps, sel, a, x);
    } else {
      block.state = DensityMatrix::maximally_mixed(sel.dim());
      block.conditional_qfi = 0.0;
    }
    ens.blocks.push_back(std::move(block));
  }
  return ens;
}

FisherBreakdown fisher_breakdown(const PostselectionEnsemble& ens, const ParametrizedState& ps,
                                 const SelectionMeasurement& sel, double x) {
  const double h = ps.fd_step();
  if (h < 1e-9) fail(ErrorCode::StepTooSmall, "fisher_breakdown: fd step below 1e-9");
  const std::vector<double> p0 = raw_probs(ps, sel, x);
  const std::vector<double> phi = raw_probs(ps, sel, x + h);
  const std::vector<double> plo = raw_probs(ps, sel, x - h);
  std::vector<double> dp(p0.size());
  for (std::size_t a = 0; a < p0.size(); ++a) dp[a] = (phi[a] - plo[a]) / (2.0 * h);

  double p_ok = 0.0, dp_ok = 0.0;
  for (std::size_t a : sel.favorable()) {
    p_ok += p0[a];
    dp_ok += dp[a];
  }
  const double p_reject = 1.0 - p_ok;
  const double dp_reject = -dp_ok;

  // Outcome distribution aligned with the ensemble's blocks. The conditioned
  // derivatives come from the quotient rule on the same dp, which keeps the
  // decomposition identities exact to rounding rather than to fd truncation.
  std::vector<double> probs, dprobs;
  probs.reserve(ens.blocks.size());
  dprobs.reserve(ens.blocks.size());
  for (const EnsembleBlock& block : ens.blocks) {
    if (block.label == kRejectLabel) {
      probs.push_back(p_reject);
      dprobs.push_back(dp_reject);
      continue;
    }
    const auto a = static_cast<std::size_t>(block.label);
    if (ens.kind == EnsembleKind::Conditioned) {
      probs.push_back(p0[a] / p_ok);
      dprobs.push_back((dp[a] * p_ok - p0[a] * dp_ok) / (p_ok * p_ok));
    } else {
      probs.push_back(p0[a]);
      dprobs.push_back(dp[a]);
    }
  }

  FisherBreakdown out;
  out.i_cl_outcomes = classical_fisher(probs, dprobs);
  out.avg_conditional_qfi = 0.0;
  for (const EnsembleBlock& block : ens.blocks) {
    if (block.prob <= kZeroProbability) continue;  // weight-zero term
    out.avg_conditional_qfi += block.prob * block.conditional_qfi;
  }
  out.total = out.i_cl_outcomes + out.avg_conditional_qfi;
  out.binary_i_cl = classical_fisher({p_ok, p_reject}, {dp_ok, dp_reject});
  out.per_block = ens.blocks;
  return out;
}

ComplexMatrix assemble_state(const ParametrizedState& ps, const SelectionMeasurement& sel,
                             EnsembleKind kind, double x, std::optional<DensityMatrix> dump_state) {
  const std::size_t d = sel.dim();
  const ComplexMatrix rho = ps.evaluate(x).mat();

  // Slot layout mirrors build_*: Lumped puts the reject block first.
  std::vector<ComplexMatrix> slots;
  if (kind == EnsembleKind::Full) {
    for (std::size_t a = 0; a < sel.num_outcomes(); ++a)
      slots.push_back(sel.apply_outcome(a, rho));
  } else if (kind == EnsembleKind::Lumped) {
    const DensityMatrix dump =
        dump_state ? std::move(*dump_state) : DensityMatrix::basis_state(d, 0);
    if (!sel.unfavorable().empty()) {
      double p_reject = 0.0;
      std::vector<double> p = sel.outcome_probabilities(rho);
      for (std::size_t a : sel.unfavorable()) p_reject += p[a];
      slots.push_back(dump.mat() * cplx(p_reject));
    }
    for (std::size_t a = 0; a < sel.num_outcomes(); ++a)
      if (sel.is_favorable(a)) slots.push_back(sel.apply_outcome(a, rho));
  } else {
    std::vector<double> p = sel.outcome_probabilities(rho);
    double p_ok = 0.0;
    for (std::size_t a : sel.favorable()) p_ok += p[a];
    if (p_ok <= kZeroProbability)
      fail(ErrorCode::VanishingSuccessProbability, "assemble_state: p(ok|x) vanishes");
    for (std::size_t a = 0; a < sel.num_outcomes(); ++a)
      if (sel.is_favorable(a)) slots.push_back(sel.apply_outcome(a, rho) * cplx(1.0 / p_ok));
  }

  ComplexMatrix out(slots.size() * d, slots.size() * d);
  for (std::size_t b = 0; b < slots.size(); ++b)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(b * d + i, b * d + j) = slots[b](i, j);
  return out;
}

double assembled_qfi(const ParametrizedState& ps, const SelectionMeasurement& sel,
                     EnsembleKind kind, double x, std::optional<DensityMatrix> dump_state) {
  auto family = ParametrizedState::custom(
      [&ps, &sel, kind, dump_state](double t) {
        return DensityMatrix::unchecked(
            assemble_state(ps, sel, kind, t, dump_state).hermitized());
      },
      ps.fd_step());
  return qfi(family, x);
}

double chain_slack(double i_rho) { return 1e-8 * std::max(1.0, i_rho); }

ChainWitness fisher_chain_detailed(const ParametrizedState& ps, const SelectionMeasurement& sel,
                                   double x) {
  ChainWitness w;
  FisherChain& chain = w.chain;
  chain.i_rho = qfi(ps, x);

  const PostselectionEnsemble joint = build_joint(ps, sel, x);
  const PostselectionEnsemble lumped = build_lumped(ps, sel, x);
  const PostselectionEnsemble conditioned = build_conditioned(ps, sel, x);

  w.joint = fisher_breakdown(joint, ps, sel, x);
  w.lumped = fisher_breakdown(lumped, ps, sel, x);
  w.conditioned = fisher_breakdown(conditioned, ps, sel, x);

  chain.i_joint = w.joint.total;
  chain.i_lumped = w.lumped.total;
  chain.i_conditioned = w.conditioned.total;
  chain.success_prob = conditioned.success_prob;
  chain.weighted_conditioned = chain.success_prob * chain.i_conditioned;

  chain.margins = {margin_of(chain.i_rho, chain.i_joint),
                   margin_of(chain.i_joint, chain.i_lumped),
                   margin_of(chain.i_lumped, chain.weighted_conditioned)};
  const double slack = chain_slack(chain.i_rho);
  chain.ordered_ok = true;
  for (double m : chain.margins)
    if (!(m >= -slack)) chain.ordered_ok = false;
  return w;
}

FisherChain fisher_chain(const ParametrizedState& ps, const SelectionMeasurement& sel, double x) {
  return fisher_chain_detailed(ps, sel, x).chain;
}

PurificationRoundtrip purify_and_decohere(const ParametrizedState& ps,
                                          const SelectionMeasurement& sel, double x) {
  const std::size_t d = sel.dim();
  std::vector<std::size_t> offset(sel.num_outcomes());
  std::size_t total = 0;
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a) {
    offset[a] = total;
    total += sel.outcomes()[a].size();
  }
  const std::size_t big = d * total;

  PurificationRoundtrip out;

  // Isometry V[(q', f), q] = M_f(q', q), joint index (q', f) = q'*total + f.
  out.isometry = ComplexMatrix(big, d);
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a)
    for (std::size_t j = 0; j < sel.outcomes()[a].size(); ++j) {
      const std::size_t f = offset[a] + j;
      const ComplexMatrix& m = sel.outcomes()[a][j];
      for (std::size_t qp = 0; qp < d; ++qp)
        for (std::size_t q = 0; q < d; ++q) out.isometry(qp * total + f, q) = m(qp, q);
    }

  // Complete to a unitary. The isometry columns sit at joint inputs (q, a=0);
  // the rest are filled by Gram-Schmidt over the canonical basis in fixed
  // order, so the completion is deterministic.
  out.unitary = ComplexMatrix(big, big);
  std::vector<std::size_t> filled;
  filled.reserve(big);
  for (std::size_t q = 0; q < d; ++q) {
    const std::size_t col = q * total;
    for (std::size_t i = 0; i < big; ++i) out.unitary(i, col) = out.isometry(i, q);
    filled.push_back(col);
  }
  std::size_t next_canonical = 0;
  for (std::size_t q = 0; q < d; ++q) {
    for (std::size_t a = 1; a < total; ++a) {
      const std::size_t col = q * total + a;
      bool placed = false;
      while (next_canonical < big && !placed) {
        std::vector<cplx> v(big);
        v[next_canonical] = 1.0;
        ++next_canonical;
        for (int pass = 0; pass < 2; ++pass) {
          for (std::size_t pc : filled) {
            cplx overlap = 0.0;
            for (std::size_t i = 0; i < big; ++i)
              overlap += std::conj(out.unitary(i, pc)) * v[i];
            for (std::size_t i = 0; i < big; ++i) v[i] -= overlap * out.unitary(i, pc);
          }
        }
        double norm2 = 0.0;
        for (const auto& e : v) norm2 += std::norm(e);
        if (norm2 > 1e-16) {
          const double inv = 1.0 / std::sqrt(norm2);
          for (std::size_t i = 0; i < big; ++i) out.unitary(i, col) = v[i] * inv;
          filled.push_back(col);
          placed = true;
        }
      }
      if (!placed)
        fail(ErrorCode::CompletionFailure,
             "purify_and_decohere: could not complete the isometry to a unitary");
    }
  }

  const ComplexMatrix rho = ps.evaluate(x).mat();
  out.evolved = out.isometry * rho * out.isometry.adjoint();

  // Which outcome block an ancilla index belongs to.
  std::vector<std::size_t> block_of(total);
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a)
    for (std::size_t j = 0; j < sel.outcomes()[a].size(); ++j) block_of[offset[a] + j] = a;

  // Outcome-subspace dephasing: drop coherences between different outcomes,
  // keep them within each outcome.
  out.intermediate = ComplexMatrix(big, big);
  for (std::size_t i = 0; i < big; ++i)
    for (std::size_t j = 0; j < big; ++j)
      if (block_of[i % total] == block_of[j % total]) out.intermediate(i, j) = out.evolved(i, j);

  // Suboutcome erasure onto |f_{a,0}>: trace the j index within each outcome.
  out.final_state = ComplexMatrix(big, big);
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a) {
    const std::size_t f0 = offset[a];
    for (std::size_t qp = 0; qp < d; ++qp)
      for (std::size_t q = 0; q < d; ++q) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < sel.outcomes()[a].size(); ++j) {
          const std::size_t f = offset[a] + j;
          s += out.evolved(qp * total + f, q * total + f);
        }
        out.final_state(qp * total + f0, q * total + f0) = s;
      }
  }

  // Direct assembly of the recorded joint state for comparison.
  out.direct = ComplexMatrix(big, big);
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a) {
    const std::size_t f0 = offset[a];
    const ComplexMatrix fa = sel.apply_outcome(a, rho);
    for (std::size_t qp = 0; qp < d; ++qp)
      for (std::size_t q = 0; q < d; ++q) out.direct(qp * total + f0, q * total + f0) = fa(qp, q);
  }

  const ComplexMatrix v_iso = out.isometry;
  auto evolved_family = ParametrizedState::custom(
      [&ps, v_iso](double t) {
        return DensityMatrix::unchecked(
            (v_iso * ps.evaluate(t).mat() * v_iso.adjoint()).hermitized());
      },
      ps.fd_step());
  out.evolved_qfi = qfi(evolved_family, x);
  return out;
}

}  // namespace qmetro
