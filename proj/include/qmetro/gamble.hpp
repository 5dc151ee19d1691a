#pragma once

#include <cstdint>
#include <vector>

#include "qmetro/rng.hpp"

namespace qmetro {

/// A sequence of n_trials independent selection rounds with success
/// probability p_success; the "bet" is that the favorable count times the
/// conditioned information i_sigma reaches the deterministic budget
/// n_trials * i_rho.
struct GambleSetup {
  std::uint64_t n_trials = 0;
  double p_success = 0.0;  // p(ok), in (0, 1]
  double i_rho = 0.0;
  double i_sigma = 0.0;
};

enum class GambleStatus {
  Ok,
  /// delta = i_rho / (p_success * i_sigma) < 1: winning is not even
  /// disadvantageous in mean, so the tail bounds do not apply.
  NotABet,
};

struct ChernoffReport {
  GambleStatus status = GambleStatus::Ok;
  double mu = 0.0;     // n_trials * p_success
  double delta = 0.0;  // i_rho / (p_success * i_sigma)
  double standard_bound = 0.0;
  double tight_bound = 0.0;
  std::uint64_t threshold = 0;  // smallest winning favorable count
  double exact_tail = 0.0;
  double empirical = 0.0;
  double ci95_half_width = 0.0;
  std::uint64_t samples = 0;
};

/// exp(-mu (delta-1)^2 / (delta+1)), valid for delta >= 1.
double chernoff_standard(double mu, double delta);

/// exp(-mu (1 - delta + delta ln delta)) = e^{-mu} (e/delta)^{mu delta},
/// valid for delta >= 1 and never above the standard bound there.
double chernoff_tight(double mu, double delta);

/// Pr[X >= k0] for X ~ Binomial(n, p), by stable log-space summation.
double binomial_tail(std::uint64_t n, double p, std::uint64_t k0);
double log_binomial_tail(std::uint64_t n, double p, std::uint64_t k0);

/// Smallest integer count k with k * i_sigma >= n * i_rho.
std::uint64_t winning_threshold(const GambleSetup& setup);

/// Bounds (and the exact tail) only; empirical fields left at zero.
ChernoffReport gamble_bounds(const GambleSetup& setup);

/// Monte Carlo estimate of the winning probability with Wilson 95% interval.
/// Reps use per-rep counter substreams, so the result is bit-stable for a
/// given seed regardless of worker count.
ChernoffReport simulate_gamble(const GambleSetup& setup, std::uint64_t reps,
                               std::uint64_t rng_seed);

struct WilsonInterval {
  double center = 0.0;
  double half_width = 0.0;
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t samples,
                               double z = 1.959963984540054);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace qmetro
