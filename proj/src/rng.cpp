#include "qmetro/rng.hpp"

#include <cmath>

#include "qmetro/errors.hpp"

namespace qmetro {

double Prng::next_gaussian() {
  const double u1 = next_double_open();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

std::uint64_t binomial_sample(Prng& rng, std::uint64_t n, double p) {
  if (p < 0.0 || p > 1.0) fail(ErrorCode::OutOfRange, "binomial_sample: p outside [0,1]");
  if (n == 0 || p == 0.0) {
    (void)rng.next_double();
    return 0;
  }
  if (p == 1.0) {
    (void)rng.next_double();
    return n;
  }

  double u = rng.next_double();
  const double nd = static_cast<double>(n);
  const std::uint64_t mode = static_cast<std::uint64_t>(
      std::min(nd, std::floor((nd + 1.0) * p)));
  const double log_pmf_mode = std::lgamma(nd + 1.0) - std::lgamma(static_cast<double>(mode) + 1.0) -
                              std::lgamma(nd - static_cast<double>(mode) + 1.0) +
                              static_cast<double>(mode) * std::log(p) +
                              (nd - static_cast<double>(mode)) * std::log1p(-p);
  const double pmf_mode = std::exp(log_pmf_mode);

  // Enumerate k in the fixed order mode, mode+1, mode-1, mode+2, ... and
  // subtract pmf mass from u until it is exhausted; a fixed enumeration order
  // keeps the map from uniforms to counts deterministic.
  const double odds = p / (1.0 - p);
  double up_pmf = pmf_mode;     // pmf at current upper index
  double down_pmf = pmf_mode;   // pmf at current lower index
  std::uint64_t up = mode;
  std::uint64_t down = mode;
  bool up_alive = true;
  bool down_alive = mode > 0;

  u -= pmf_mode;
  if (u <= 0.0) return mode;

  while (up_alive || down_alive) {
    if (up_alive) {
      if (up < n) {
        const double ratio = (nd - static_cast<double>(up)) /
                             (static_cast<double>(up) + 1.0) * odds;
        up_pmf *= ratio;
        ++up;
        u -= up_pmf;
        if (u <= 0.0) return up;
        if (up_pmf < 1e-300) up_alive = false;
      } else {
        up_alive = false;
      }
    }
    if (down_alive) {
      const double ratio = static_cast<double>(down) /
                           (nd - static_cast<double>(down) + 1.0) / odds;
      down_pmf *= ratio;
      --down;
      u -= down_pmf;
      if (u <= 0.0) return down;
      if (down == 0 || down_pmf < 1e-300) down_alive = false;
    }
  }
  // u landed in the rounding residue: return the mode.
  return mode;
}

}  // namespace qmetro
