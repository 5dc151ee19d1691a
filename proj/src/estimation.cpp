#include "qmetro/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmetro/parallel.hpp"

namespace qmetro {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> clean_distribution(std::vector<double> p) {
  double total = 0.0;
  for (double& v : p) {
    v = std::max(0.0, v);
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

/// One uniform per trial, scanned through the cumulative distribution.
std::vector<std::uint64_t> sample_counts(Prng& rng, std::uint64_t n_trials,
                                         const std::vector<double>& cdf) {
  std::vector<std::uint64_t> counts(cdf.size(), 0);
  for (std::uint64_t t = 0; t < n_trials; ++t) {
    const double u = rng.next_double();
    std::size_t k = 0;
    while (k + 1 < cdf.size() && u >= cdf[k]) ++k;
    ++counts[k];
  }
  return counts;
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    cdf[k] = acc;
  }
  cdf.back() = 1.0 + 1e-12;  // guard the final bin against round-off
  return cdf;
}

double log_likelihood(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs) {
  double ll = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    if (probs[k] <= 0.0) return kNegInf;
    ll += static_cast<double>(counts[k]) * std::log(probs[k]);
  }
  return ll;
}

/// Grid scan followed by golden-section refinement of the bracketing cell.
struct MleSolver {
  MleOptions opts;
  std::function<std::vector<double>(double)> probs_at;
  std::vector<double> grid_x;
  std::vector<std::vector<double>> grid_probs;

  void prepare() {
    const int g = std::max(3, opts.grid_points);
    grid_x.resize(g);
    grid_probs.resize(g);
    for (int i = 0; i < g; ++i) {
      grid_x[i] = opts.x_min + (opts.x_max - opts.x_min) * static_cast<double>(i) /
                                   static_cast<double>(g - 1);
      grid_probs[i] = probs_at(grid_x[i]);
    }
  }

  double estimate(const std::vector<std::uint64_t>& counts) const {
    std::size_t best = 0;
    double best_ll = kNegInf;
    for (std::size_t i = 0; i < grid_x.size(); ++i) {
      const double ll = log_likelihood(counts, grid_probs[i]);
      if (ll > best_ll) {
        best_ll = ll;
        best = i;
      }
    }
    double a = grid_x[best == 0 ? 0 : best - 1];
    double b = grid_x[std::min(grid_x.size() - 1, best + 1)];
    auto f = [&](double x) { return log_likelihood(counts, probs_at(x)); };
    const double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < opts.golden_iters && b - a > 1e-12; ++it) {
      if (fc < fd) {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = f(d);
      } else {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = f(c);
      }
    }
    return 0.5 * (a + b);
  }
};

struct RepOutcomes {
  std::vector<double> sq_err;
  std::vector<std::uint8_t> boundary;
};

double edge_tolerance(const MleOptions& opts) { return 1e-6 * (opts.x_max - opts.x_min); }

}  // namespace

ExperimentReport simulate_mle(const ParametrizedState& ps, const POVM& povm, double x_true,
                              std::uint64_t n_trials, std::uint64_t repetitions,
                              std::uint64_t rng_seed, const MleOptions& options) {
  if (n_trials == 0 || repetitions == 0)
    fail(ErrorCode::OutOfRange, "simulate_mle: need trials and repetitions >= 1");
  if (!(options.x_min < options.x_max) || x_true <= options.x_min || x_true >= options.x_max)
    fail(ErrorCode::OutOfRange, "simulate_mle: x_true must lie inside the interval");

  const double i_cl = povm_classical_fisher(ps, povm, x_true);
  if (!(i_cl > 1e-12))
    fail(ErrorCode::Unidentifiable, "simulate_mle: outcome distribution carries no information");

  MleSolver solver;
  solver.opts = options;
  solver.probs_at = [&ps, &povm](double x) {
    return clean_distribution(povm.probabilities(ps.evaluate(x)));
  };
  solver.prepare();

  const std::vector<double> cdf = cumulative(solver.probs_at(x_true));
  const double edge_tol = edge_tolerance(options);

  RepOutcomes out;
  out.sq_err.assign(repetitions, 0.0);
  out.boundary.assign(repetitions, 0);
  const Prng master(rng_seed);
  parallel_for(repetitions, [&](std::size_t rep) {
    Prng rng = master.substream(rep);
    const std::vector<std::uint64_t> counts = sample_counts(rng, n_trials, cdf);
    const double xhat = solver.estimate(counts);
    const double err = xhat - x_true;
    out.sq_err[rep] = err * err;
    out.boundary[rep] =
        (xhat - options.x_min < edge_tol || options.x_max - xhat < edge_tol) ? 1 : 0;
  });

  ExperimentReport report;
  report.x_true = x_true;
  report.n_trials = n_trials;
  report.repetitions = repetitions;
  report.rng_seed = rng_seed;
  double sum_sq = 0.0;
  for (double s : out.sq_err) sum_sq += s;
  for (std::uint8_t b : out.boundary) report.boundary_hits += b;
  report.mse = sum_sq / static_cast<double>(repetitions);
  report.crb = 1.0 / (static_cast<double>(n_trials) * i_cl);
  report.ratio = report.mse / report.crb;
  report.degenerate_boundary =
      report.boundary_hits * 20 > repetitions;  // more than 5% pinned
  return report;
}

NormalRule normal_rule(double p, std::uint64_t n_trials) {
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::DegenerateP, "normal_rule: p must lie strictly inside (0, 1)");
  if (n_trials == 0) fail(ErrorCode::OutOfRange, "normal_rule: need N >= 1");
  // (sqrt((1-p)/p) - sqrt(p/(1-p))) collapses to (1-2p)/sqrt(p(1-p)). Both
  // values are derived from hi = max(p, 1-p); since hi >= 1/2, the
  // complement 1 - hi is exact, which makes p <-> 1-p symmetry exact in
  // floats.
  const double hi = std::max(p, 1.0 - p);
  const double lo = 1.0 - hi;
  NormalRule rule;
  rule.statistic = (hi - lo) / std::sqrt(static_cast<double>(n_trials) * lo * hi);
  rule.ok = rule.statistic < 0.3;
  return rule;
}

double root_prob_snr(double snr, double p_success) {
  if (snr < 0.0) fail(ErrorCode::OutOfRange, "root_prob_snr: snr must be nonnegative");
  if (p_success < 0.0 || p_success > 1.0)
    fail(ErrorCode::OutOfRange, "root_prob_snr: p_success must lie in [0, 1]");
  return std::sqrt(p_success) * snr;
}

PairedExperiment gamble_mse_experiment(const ParametrizedState& ps,
                                       const SelectionMeasurement& sel, const POVM& povm_cond,
                                       double x_true, std::uint64_t n_trials,
                                       std::uint64_t repetitions, std::uint64_t rng_seed,
                                       const MleOptions& options) {
  if (povm_cond.dim() != sel.dim())
    fail(ErrorCode::DimensionMismatch, "gamble_mse_experiment: POVM dimension mismatch");

  // Combined two-stage measurement: element (a, k) is
  // sum_j M^dagger_{a,j} Y_k M_{a,j}; measuring it on every trial is the
  // deterministic protocol.
  std::vector<ComplexMatrix> combined;
  std::vector<std::uint8_t> favorable_flag;
  for (std::size_t a = 0; a < sel.num_outcomes(); ++a)
    for (std::size_t k = 0; k < povm_cond.size(); ++k) {
      ComplexMatrix e(sel.dim(), sel.dim());
      for (const auto& m : sel.outcomes()[a])
        e += m.adjoint() * povm_cond.elements()[k] * m;
      combined.push_back(e.hermitized());
      favorable_flag.push_back(sel.is_favorable(a) ? 1 : 0);
    }
  const POVM combined_povm(combined);

  PairedExperiment paired;
  paired.deterministic =
      simulate_mle(ps, combined_povm, x_true, n_trials, repetitions, rng_seed, options);

  // Probabilistic arm: identical draws, favorable outcomes kept, MLE against
  // the renormalized likelihood q(a,k|x) = p(a,k|x) / p(ok|x). When every
  // outcome is favorable the division is skipped entirely, so this arm
  // reduces to simulate_mle bit for bit.
  const bool keep_all = sel.favorable().size() == sel.num_outcomes();
  auto joint_probs = [&](double x) {
    return clean_distribution(combined_povm.probabilities(ps.evaluate(x)));
  };
  auto conditioned_probs = [&](double x) {
    std::vector<double> p = joint_probs(x);
    if (keep_all) return p;
    double p_ok = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (favorable_flag[i]) p_ok += p[i];
    std::vector<double> q;
    q.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      if (favorable_flag[i]) q.push_back(p[i] / p_ok);
    return q;
  };

  const std::vector<double> p_true = joint_probs(x_true);
  double p_ok_true = 1.0;
  if (!keep_all) {
    p_ok_true = 0.0;
    for (std::size_t i = 0; i < p_true.size(); ++i)
      if (favorable_flag[i]) p_ok_true += p_true[i];
  }
  if (p_ok_true <= kZeroProbability)
    fail(ErrorCode::VanishingSuccessProbability, "gamble_mse_experiment: p(ok|x_true) vanishes");

  // Conditioned classical information at x_true; in the keep-all case this is
  // exactly the two-stage POVM information used by the deterministic arm.
  double i_cond;
  if (keep_all) {
    i_cond = povm_classical_fisher(ps, combined_povm, x_true);
  } else {
    const ComplexMatrix rho = ps.evaluate(x_true).mat();
    const ComplexMatrix drho = ps.derivative(x_true);
    std::vector<double> p(combined_povm.size()), dp(combined_povm.size());
    for (std::size_t i = 0; i < combined_povm.size(); ++i) {
      p[i] = std::max(0.0, (rho * combined_povm.elements()[i]).trace().real());
      dp[i] = (drho * combined_povm.elements()[i]).trace().real();
    }
    double sp = 0.0, sdp = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      sp += p[i];
      sdp += dp[i];
    }
    double p_ok = 0.0, dp_ok = 0.0;
    std::vector<double> q, dq;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] /= sp;
      dp[i] -= sdp / static_cast<double>(p.size());
      if (favorable_flag[i]) {
        p_ok += p[i];
        dp_ok += dp[i];
      }
    }
    for (std::size_t i = 0; i < p.size(); ++i)
      if (favorable_flag[i]) {
        q.push_back(p[i] / p_ok);
        dq.push_back((dp[i] * p_ok - p[i] * dp_ok) / (p_ok * p_ok));
      }
    i_cond = classical_fisher(q, dq);
  }
  if (!(i_cond > 1e-12))
    fail(ErrorCode::Unidentifiable, "gamble_mse_experiment: survivors carry no information");

  MleSolver solver;
  solver.opts = options;
  solver.probs_at = conditioned_probs;
  solver.prepare();

  const std::vector<double> cdf = cumulative(p_true);
  const double edge_tol = edge_tolerance(options);
  const double midpoint = 0.5 * (options.x_min + options.x_max);

  std::vector<double> sq_err(repetitions, 0.0);
  std::vector<std::uint8_t> boundary(repetitions, 0);
  std::vector<std::uint8_t> empty_rep(repetitions, 0);
  std::vector<std::uint64_t> survivors(repetitions, 0);
  const Prng master(rng_seed);
  parallel_for(repetitions, [&](std::size_t rep) {
    Prng rng = master.substream(rep);
    const std::vector<std::uint64_t> counts = sample_counts(rng, n_trials, cdf);
    std::vector<std::uint64_t> kept;
    kept.reserve(counts.size());
    std::uint64_t n_ok = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (favorable_flag[i]) {
        kept.push_back(counts[i]);
        n_ok += counts[i];
      }
    survivors[rep] = n_ok;
    double xhat;
    if (n_ok == 0) {
      empty_rep[rep] = 1;
      xhat = midpoint;  // no survivors: fall back to the prior midpoint
    } else {
      xhat = solver.estimate(kept);
    }
    const double err = xhat - x_true;
    sq_err[rep] = err * err;
    boundary[rep] =
        (xhat - options.x_min < edge_tol || options.x_max - xhat < edge_tol) ? 1 : 0;
  });

  ExperimentReport& prob = paired.probabilistic;
  prob.x_true = x_true;
  prob.n_trials = n_trials;
  prob.repetitions = repetitions;
  prob.rng_seed = rng_seed;
  double sum_sq = 0.0, sum_surv = 0.0;
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    sum_sq += sq_err[rep];
    sum_surv += static_cast<double>(survivors[rep]);
    prob.boundary_hits += boundary[rep];
    prob.zero_survivor_reps += empty_rep[rep];
  }
  prob.mse = sum_sq / static_cast<double>(repetitions);
  prob.crb = 1.0 / (static_cast<double>(n_trials) * p_ok_true * i_cond);
  prob.ratio = prob.mse / prob.crb;
  prob.degenerate_boundary = prob.boundary_hits * 20 > repetitions;
  prob.mean_survivors = sum_surv / static_cast<double>(repetitions);
  return paired;
}

}  // namespace qmetro
