#include "qmetro/gamble.hpp"

#include <cmath>
#include <limits>

#include "qmetro/errors.hpp"
#include "qmetro/parallel.hpp"

namespace qmetro {

namespace {

void check_bound_args(double mu, double delta) {
  if (!(mu > 0.0)) fail(ErrorCode::OutOfRange, "chernoff bound: mu must be positive");
  if (!(delta >= 1.0)) fail(ErrorCode::DeltaBelowOne, "chernoff bound: requires delta >= 1");
}

}  // namespace

double chernoff_standard(double mu, double delta) {
  check_bound_args(mu, delta);
  const double d = delta - 1.0;
  return std::exp(-mu * d * d / (delta + 1.0));
}

double chernoff_tight(double mu, double delta) {
  check_bound_args(mu, delta);
  return std::exp(-mu * (1.0 - delta + delta * std::log(delta)));
}

double log_binomial_tail(std::uint64_t n, double p, std::uint64_t k0) {
  if (p < 0.0 || p > 1.0) fail(ErrorCode::OutOfRange, "binomial_tail: p outside [0,1]");
  if (k0 == 0) return 0.0;  // log 1
  if (k0 > n) return -std::numeric_limits<double>::infinity();
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return 0.0;

  const double nd = static_cast<double>(n);
  const double odds = p / (1.0 - p);

  auto log_pmf = [&](std::uint64_t k) {
    const double kd = static_cast<double>(k);
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
           kd * std::log(p) + (nd - kd) * std::log1p(-p);
  };

  // Anchor at the largest term in the tail (the mode, or k0 if the mode is
  // below it) and sum pmf ratios in linear space relative to the anchor.
  const std::uint64_t mode =
      static_cast<std::uint64_t>(std::min(nd, std::floor((nd + 1.0) * p)));
  const std::uint64_t anchor = std::max(k0, mode);
  const double log_anchor = log_pmf(anchor);

  double sum = 1.0;  // anchor term, scaled to 1
  double term = 1.0;
  for (std::uint64_t k = anchor; k < n; ++k) {  // upward from anchor
    term *= (nd - static_cast<double>(k)) / (static_cast<double>(k) + 1.0) * odds;
    sum += term;
    if (term < 1e-19 * sum) break;
  }
  term = 1.0;
  for (std::uint64_t k = anchor; k > k0; --k) {  // downward to k0
    term *= static_cast<double>(k) / ((nd - static_cast<double>(k) + 1.0) * odds);
    sum += term;
    if (term < 1e-19 * sum) break;
  }
  return log_anchor + std::log(sum);
}

double binomial_tail(std::uint64_t n, double p, std::uint64_t k0) {
  return std::exp(log_binomial_tail(n, p, k0));
}

std::uint64_t winning_threshold(const GambleSetup& setup) {
  if (!(setup.i_sigma > 0.0)) fail(ErrorCode::OutOfRange, "winning_threshold: i_sigma must be > 0");
  const double q = static_cast<double>(setup.n_trials) * (setup.i_rho / setup.i_sigma);
  const double rounded = std::round(q);
  if (std::abs(q - rounded) <= 1e-9 * std::max(1.0, std::abs(q)))
    return static_cast<std::uint64_t>(std::max(0.0, rounded));
  return static_cast<std::uint64_t>(std::max(0.0, std::ceil(q)));
}

ChernoffReport gamble_bounds(const GambleSetup& setup) {
  if (setup.n_trials == 0) fail(ErrorCode::OutOfRange, "gamble_bounds: need n_trials >= 1");
  if (!(setup.p_success > 0.0 && setup.p_success <= 1.0))
    fail(ErrorCode::OutOfRange, "gamble_bounds: p_success must be in (0, 1]");
  if (!(setup.i_rho > 0.0 && setup.i_sigma > 0.0))
    fail(ErrorCode::OutOfRange, "gamble_bounds: informations must be positive");

  ChernoffReport report;
  report.mu = static_cast<double>(setup.n_trials) * setup.p_success;
  report.delta = setup.i_rho / (setup.p_success * setup.i_sigma);
  report.threshold = winning_threshold(setup);
  report.exact_tail = binomial_tail(setup.n_trials, setup.p_success, report.threshold);
  if (report.delta < 1.0) {
    report.status = GambleStatus::NotABet;
    report.standard_bound = std::numeric_limits<double>::quiet_NaN();
    report.tight_bound = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.standard_bound = chernoff_standard(report.mu, report.delta);
  report.tight_bound = chernoff_tight(report.mu, report.delta);
  return report;
}

ChernoffReport simulate_gamble(const GambleSetup& setup, std::uint64_t reps,
                               std::uint64_t rng_seed) {
  ChernoffReport report = gamble_bounds(setup);
  report.samples = reps;
  if (reps == 0) return report;

  const std::uint64_t k0 = report.threshold;
  const std::size_t workers = worker_count();
  std::vector<std::uint64_t> hits(workers, 0);
  const Prng master(rng_seed);
  parallel_for(workers, [&](std::size_t w) {
    const std::uint64_t lo = w * reps / workers;
    const std::uint64_t hi = (w + 1) * reps / workers;
    std::uint64_t count = 0;
    for (std::uint64_t rep = lo; rep < hi; ++rep) {
      Prng rng = master.substream(rep);
      if (binomial_sample(rng, setup.n_trials, setup.p_success) >= k0) ++count;
    }
    hits[w] = count;
  });
  std::uint64_t total = 0;
  for (std::uint64_t h : hits) total += h;

  report.empirical = static_cast<double>(total) / static_cast<double>(reps);
  report.ci95_half_width = wilson_interval(total, reps).half_width;
  return report;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t samples, double z) {
  WilsonInterval out;
  if (samples == 0) return out;
  const double m = static_cast<double>(samples);
  const double f = static_cast<double>(successes) / m;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / m;
  out.center = (f + z2 / (2.0 * m)) / denom;
  out.half_width = z * std::sqrt(f * (1.0 - f) / m + z2 / (4.0 * m * m)) / denom;
  return out;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    fail(ErrorCode::DimensionMismatch, "fit_slope: need matching lists of length >= 2");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qmetro
