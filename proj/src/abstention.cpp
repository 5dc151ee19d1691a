#include "qmetro/abstention.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "qmetro/errors.hpp"
#include "qmetro/parallel.hpp"

namespace qmetro {

namespace {

double binomial_coeff(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

void check_model_args(int n_qubits, double purity) {
  if (n_qubits < 1 || n_qubits > kMaxAbstentionQubits)
    fail(ErrorCode::OutOfRange, "abstention: need 1 <= N <= 14 qubits");
  if (purity < 0.0 || purity > 1.0)
    fail(ErrorCode::OutOfRange, "abstention: purity must lie in [0, 1]");
}

/// Normalized sector weights w_m proportional to e^{2 eta m}, indexed by
/// i = j + m = 0 .. twice_j; purity 1 collapses to the top weight.
std::vector<double> sector_weights(int twice_j, double purity) {
  std::vector<double> w(twice_j + 1, 0.0);
  if (purity >= 1.0) {
    w.back() = 1.0;
    return w;
  }
  const double eta = std::atanh(purity);
  double total = 0.0;
  for (int i = 0; i <= twice_j; ++i) {
    // Shift by the top exponent so all factors stay in (0, 1].
    w[i] = std::exp(2.0 * eta * static_cast<double>(i - twice_j));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

double log_sum_exp(const std::vector<double>& xs) {
  double best = xs.front();
  for (double v : xs) best = std::max(best, v);
  double s = 0.0;
  for (double v : xs) s += std::exp(v - best);
  return best + std::log(s);
}

}  // namespace

std::uint64_t sector_multiplicity(int n_qubits, int twice_j) {
  if (twice_j < twice_j_min(n_qubits) || twice_j > n_qubits ||
      (twice_j - twice_j_min(n_qubits)) % 2 != 0)
    fail(ErrorCode::OutOfRange, "sector_multiplicity: invalid angular momentum");
  const int k = (n_qubits - twice_j) / 2;
  auto choose = [&](int kk) -> std::uint64_t {
    if (kk < 0) return 0;
    std::uint64_t c = 1;
    for (int i = 0; i < kk; ++i) c = c * static_cast<std::uint64_t>(n_qubits - i) / (i + 1);
    return c;
  };
  return choose(k) - choose(k - 1);
}

std::vector<SectorInfo> sector_table(int n_qubits, double purity) {
  check_model_args(n_qubits, purity);
  std::vector<SectorInfo> table;
  for (int tj = twice_j_min(n_qubits); tj <= n_qubits; tj += 2) {
    SectorInfo s;
    s.twice_j = tj;
    s.multiplicity = sector_multiplicity(n_qubits, tj);
    if (purity >= 1.0) {
      s.prob = (tj == n_qubits) ? 1.0 : 0.0;
    } else if (purity == 0.0) {
      s.prob = static_cast<double>(s.multiplicity) * static_cast<double>(tj + 1) /
               std::pow(2.0, n_qubits);
    } else {
      const double eta = std::atanh(purity);
      std::vector<double> exps(tj + 1);
      for (int i = 0; i <= tj; ++i) exps[i] = eta * static_cast<double>(2 * i - tj);
      const double log_z = n_qubits * (eta + std::log1p(std::exp(-2.0 * eta)));
      s.prob = std::exp(std::log(static_cast<double>(s.multiplicity)) + log_sum_exp(exps) - log_z);
    }
    table.push_back(s);
  }
  return table;
}

double sector_mean_fidelity(int twice_j, double purity, int quadrature_order) {
  if (twice_j < 0) fail(ErrorCode::OutOfRange, "sector_mean_fidelity: negative angular momentum");
  if (purity < 0.0 || purity > 1.0)
    fail(ErrorCode::OutOfRange, "sector_mean_fidelity: purity must lie in [0, 1]");
  if (quadrature_order < 8)
    fail(ErrorCode::QuadratureOrderTooLow, "sector_mean_fidelity: quadrature order below 8");
  if (twice_j == 0) return 0.5;  // isotropic sector, no directional information

  const std::vector<double> w = sector_weights(twice_j, purity);
  std::vector<double> nodes, weights;
  gauss_legendre(quadrature_order, nodes, weights);

  // Fbar_j = (2j+1)/2 Int du f(u), with u = cos(theta) and
  // f(u) = (1+u)/2 * sum_m w_m |<j,n(u)|j,m>|^2, the overlap being the
  // binomial profile C(2j, j+m) ((1+u)/2)^{j+m} ((1-u)/2)^{j-m}.
  double integral = 0.0;
  for (int q = 0; q < quadrature_order; ++q) {
    const double u = nodes[q];
    const double a = 0.5 * (1.0 + u);
    const double b = 0.5 * (1.0 - u);
    double profile = 0.0;
    for (int i = 0; i <= twice_j; ++i) {
      if (w[i] == 0.0) continue;
      profile += w[i] * binomial_coeff(twice_j, i) * std::pow(a, i) * std::pow(b, twice_j - i);
    }
    integral += weights[q] * 0.5 * (1.0 + u) * profile;
  }
  return 0.5 * static_cast<double>(twice_j + 1) * integral;
}

double fidelity(const std::array<double, 3>& n_est, const std::array<double, 3>& n_true) {
  auto norm = [](const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  };
  if (std::abs(norm(n_est) - 1.0) > 1e-9 || std::abs(norm(n_true) - 1.0) > 1e-9)
    fail(ErrorCode::NotUnit, "fidelity: directions must be unit vectors");
  const double dot = n_est[0] * n_true[0] + n_est[1] * n_true[1] + n_est[2] * n_true[2];
  return 0.5 * (1.0 + dot);
}

AbstentionModel abstention_model(int n_qubits, double purity, int twice_j_threshold,
                                 int quadrature_order) {
  AbstentionModel model;
  model.n_qubits = n_qubits;
  model.purity = purity;
  model.twice_j_threshold = twice_j_threshold;
  for (const SectorInfo& s : sector_table(n_qubits, purity)) {
    SectorRow row;
    row.twice_j = s.twice_j;
    row.multiplicity = s.multiplicity;
    row.prob = s.prob;
    row.mean_fidelity = sector_mean_fidelity(s.twice_j, purity, quadrature_order);
    model.sectors.push_back(row);
  }
  return model;
}

FidelityChain fidelity_chain(int n_qubits, double purity, int twice_j_threshold,
                             int quadrature_order) {
  if (twice_j_threshold >= twice_j_max(n_qubits))
    fail(ErrorCode::FavorableSetEmpty, "fidelity_chain: threshold leaves no favorable sector");
  const AbstentionModel model =
      abstention_model(n_qubits, purity, twice_j_threshold, quadrature_order);

  FidelityChain chain;
  double f_check_weighted = 0.0;
  double f_cross_weighted = 0.0;
  for (const SectorRow& row : model.sectors) {
    chain.f_bar += row.prob * row.mean_fidelity;
    if (row.twice_j > twice_j_threshold) {
      chain.p_check += row.prob;
      f_check_weighted += row.prob * row.mean_fidelity;
    } else {
      chain.p_cross += row.prob;
      f_cross_weighted += row.prob * row.mean_fidelity;
    }
  }
  chain.f_check = chain.p_check > 0.0 ? f_check_weighted / chain.p_check : 0.5;
  chain.f_cross = chain.p_cross > 0.0 ? f_cross_weighted / chain.p_cross : 0.5;
  chain.guess_term = 0.5 * chain.p_cross + chain.p_check * chain.f_check;
  chain.tail = chain.p_check * chain.f_check;
  return chain;
}

ChernoffReport repeated_protocol_gamble(int n_qubits, double purity, int twice_j_threshold,
                                        std::uint64_t m_rounds, std::uint64_t reps,
                                        std::uint64_t rng_seed, int quadrature_order) {
  if (m_rounds < 1) fail(ErrorCode::OutOfRange, "repeated_protocol_gamble: need M >= 1");
  const FidelityChain chain =
      fidelity_chain(n_qubits, purity, twice_j_threshold, quadrature_order);
  if (chain.p_check <= 0.0)
    fail(ErrorCode::VanishingSuccessProbability, "repeated_protocol_gamble: p(ok) vanishes");

  ChernoffReport report;
  report.mu = static_cast<double>(m_rounds) * chain.p_check;
  report.delta = chain.f_bar / (chain.p_check * chain.f_check);

  // The bet is strict: M_ok * f_check > M * f_bar.
  const double q = static_cast<double>(m_rounds) * (chain.f_bar / chain.f_check);
  const double rounded = std::round(q);
  std::uint64_t k0;
  if (std::abs(q - rounded) <= 1e-9 * std::max(1.0, std::abs(q)))
    k0 = static_cast<std::uint64_t>(std::max(0.0, rounded)) + 1;
  else
    k0 = static_cast<std::uint64_t>(std::max(0.0, std::ceil(q)));
  report.threshold = k0;
  report.exact_tail = binomial_tail(m_rounds, chain.p_check, k0);

  if (report.delta < 1.0) {
    report.status = GambleStatus::NotABet;
    report.standard_bound = std::numeric_limits<double>::quiet_NaN();
    report.tight_bound = std::numeric_limits<double>::quiet_NaN();
  } else {
    report.standard_bound = chernoff_standard(report.mu, report.delta);
    report.tight_bound = chernoff_tight(report.mu, report.delta);
  }

  report.samples = reps;
  if (reps == 0) return report;
  const std::size_t workers = worker_count();
  std::vector<std::uint64_t> hits(workers, 0);
  const Prng master(rng_seed);
  parallel_for(workers, [&](std::size_t w) {
    const std::uint64_t lo = w * reps / workers;
    const std::uint64_t hi = (w + 1) * reps / workers;
    std::uint64_t count = 0;
    for (std::uint64_t rep = lo; rep < hi; ++rep) {
      Prng rng = master.substream(rep);
      if (binomial_sample(rng, m_rounds, chain.p_check) >= k0) ++count;
    }
    hits[w] = count;
  });
  std::uint64_t total = 0;
  for (std::uint64_t h : hits) total += h;
  report.empirical = static_cast<double>(total) / static_cast<double>(reps);
  report.ci95_half_width = wilson_interval(total, reps).half_width;
  return report;
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) fail(ErrorCode::OutOfRange, "gauss_legendre: order must be >= 1");
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
}

}  // namespace qmetro
