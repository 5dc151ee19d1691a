#include <doctest.h>

#include <cmath>

#include "qmetro/errors.hpp"
#include "qmetro/gamble.hpp"

using namespace qmetro;

TEST_SUITE("gamble") {
  TEST_CASE("standard bound hand values") {
    CHECK(chernoff_standard(5.0, 1.0) == 1.0);
    CHECK(chernoff_standard(20.0, 2.0) ==
          doctest::Approx(std::exp(-20.0 / 3.0)).epsilon(1e-12));
    CHECK(chernoff_standard(20.0, 2.0) == doctest::Approx(1.2726e-3).epsilon(1e-4));
    CHECK(chernoff_standard(40.0, 2.0) < chernoff_standard(20.0, 2.0));
  }

  TEST_CASE("tight bound hand values and both algebraic forms") {
    CHECK(chernoff_tight(7.0, 1.0) == 1.0);
    CHECK(chernoff_tight(10.0, std::exp(1.0)) == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
    for (double mu : {0.5, 3.0, 17.0, 42.0}) {
      for (double delta = 1.0; delta <= 6.0; delta += 0.25) {
        const double form_a = chernoff_tight(mu, delta);
        const double form_b = std::exp(-mu) * std::pow(std::exp(1.0) / delta, mu * delta);
        CHECK(form_a == doctest::Approx(form_b).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("tight bound never exceeds the standard bound") {
    Prng rng(6);
    for (int i = 0; i < 500; ++i) {
      const double mu = 0.1 + 60.0 * rng.next_double();
      const double delta = 1.0 + 6.0 * rng.next_double();
      CHECK(chernoff_tight(mu, delta) <= chernoff_standard(mu, delta) + 1e-12);
    }
  }

  TEST_CASE("bounds reject delta below one and nonpositive mu") {
    CHECK_THROWS_AS(chernoff_standard(5.0, 0.9), Error);
    CHECK_THROWS_AS(chernoff_tight(5.0, 0.9), Error);
    CHECK_THROWS_AS(chernoff_standard(0.0, 2.0), Error);
  }

  TEST_CASE("exact binomial tails sit below the tight bound") {
    for (double p : {0.1, 0.3, 0.5, 0.8}) {
      for (std::uint64_t n : {10ull, 50ull, 200ull, 1000ull}) {
        const double mu = static_cast<double>(n) * p;
        for (double delta = 1.0; delta <= 4.0; delta += 0.5) {
          const std::uint64_t k0 = static_cast<std::uint64_t>(std::ceil(delta * mu - 1e-9));
          const double tail = binomial_tail(n, p, k0);
          const double tight = chernoff_tight(mu, delta);
          CHECK(tail <= tight + 1e-12);
          CHECK(tight <= chernoff_standard(mu, delta) + 1e-12);
        }
      }
    }
  }

  TEST_CASE("gamble bounds reduce to the hand example") {
    // p = 1/2, equal informations, N = 40: delta = 2, mu = 20.
    const ChernoffReport r = gamble_bounds({40, 0.5, 1.0, 1.0});
    CHECK(r.status == GambleStatus::Ok);
    CHECK(r.delta == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.mu == doctest::Approx(20.0).epsilon(1e-14));
    CHECK(r.standard_bound == doctest::Approx(std::exp(-20.0 / 3.0)).epsilon(1e-12));
    // The explicit exponent form e^{-N p} (e p I_s / I_r)^{N I_r / I_s}.
    const double explicit_tight =
        std::exp(-40.0 * 0.5) * std::pow(std::exp(1.0) * 0.5 * 1.0 / 1.0, 40.0 * 1.0 / 1.0);
    CHECK(r.tight_bound == doctest::Approx(explicit_tight).epsilon(1e-12));
  }

  TEST_CASE("winning is not a bet when the mean already favors it") {
    // delta = i_rho / (p i_sigma) = 0.5 < 1.
    const ChernoffReport r = gamble_bounds({50, 0.5, 1.0, 4.0});
    CHECK(r.status == GambleStatus::NotABet);
    CHECK(std::isnan(r.standard_bound));
    CHECK(std::isnan(r.tight_bound));
    CHECK(r.exact_tail > 0.0);  // the exact tail is still well defined
  }

  TEST_CASE("delta near one makes the bounds uninformative") {
    const ChernoffReport r = gamble_bounds({100, 0.5, 1.0, 2.0 - 1e-9});
    CHECK(r.status == GambleStatus::Ok);
    CHECK(r.delta == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.standard_bound == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("tight beats standard where the favorable outcomes are weak") {
    // i_rho / i_sigma large: the standard bound saturates, the tight one falls.
    const ChernoffReport r = gamble_bounds({5, 0.5, 20.0, 1.0});
    CHECK(r.tight_bound < 0.01 * r.standard_bound);
  }

  TEST_CASE("winning threshold rounds exactly on integer boundaries") {
    CHECK(winning_threshold({10, 0.5, 1.0, 1.0}) == 10);
    CHECK(winning_threshold({10, 0.5, 0.99, 1.0}) == 10);  // 9.9 -> 10
    CHECK(winning_threshold({10, 0.5, 1.0, 2.0}) == 5);
  }

  TEST_CASE("simulated gamble agrees with the exact binomial tail") {
    // N = 10, p = 1/2, equal informations: the winning event is all trials
    // favorable, probability 2^-10.
    const ChernoffReport r = simulate_gamble({10, 0.5, 1.0, 1.0}, 100000, 17);
    CHECK(r.threshold == 10);
    CHECK(r.exact_tail == doctest::Approx(std::pow(2.0, -10)).epsilon(1e-12));
    CHECK(std::abs(r.empirical - r.exact_tail) <= r.ci95_half_width + 1e-12);
  }

  TEST_CASE("certain success saturates the empirical rate") {
    const ChernoffReport r = simulate_gamble({25, 1.0, 1.0, 1.0}, 2000, 3);
    CHECK(r.empirical == 1.0);
  }

  TEST_CASE("simulation is reproducible for a fixed seed") {
    const ChernoffReport a = simulate_gamble({60, 0.4, 1.0, 1.2}, 50000, 11);
    const ChernoffReport b = simulate_gamble({60, 0.4, 1.0, 1.2}, 50000, 11);
    CHECK(a.empirical == b.empirical);
  }

  TEST_CASE("per-rep substreams make results independent of the worker count") {
    setenv("QFI_THREADS", "1", 1);
    const ChernoffReport serial = simulate_gamble({40, 0.3, 1.0, 1.1}, 20000, 99);
    setenv("QFI_THREADS", "4", 1);
    const ChernoffReport parallel = simulate_gamble({40, 0.3, 1.0, 1.1}, 20000, 99);
    unsetenv("QFI_THREADS");
    CHECK(serial.empirical == parallel.empirical);
  }

  TEST_CASE("log tail decays linearly in the trial count at the bound rate or faster") {
    // p = 1/2 and delta = 2 make the winning event all-favorable, with exact
    // tail 2^-N; the tight rate is ln 2 - 1/2.
    std::vector<double> ns, logs;
    for (std::uint64_t n = 20; n <= 400; n += 20) {
      ns.push_back(static_cast<double>(n));
      logs.push_back(log_binomial_tail(n, 0.5, n));
    }
    const double slope = fit_slope(ns, logs);
    CHECK(slope < 0.0);
    const double tight_rate = 0.5 * (1.0 - 2.0 + 2.0 * std::log(2.0));  // per trial
    CHECK(-slope >= 0.9 * tight_rate);
    CHECK(slope == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
  }
}
