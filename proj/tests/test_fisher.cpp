#include <doctest.h>

#include <cmath>

#include "qmetro/fisher.hpp"

using namespace qmetro;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ParametrizedState bloch_phase_family(double r) {
  return ParametrizedState::analytic_unitary(pauli_z() * cplx(0.5),
                                             DensityMatrix::qubit_bloch(r, 0.0, 0.0));
}

/// Random phase-like pure family: Haar-ish state with a random generator.
struct PureFamily {
  std::vector<cplx> psi;
  std::vector<cplx> dpsi;
  ParametrizedState family;
};

PureFamily random_pure_family(std::uint64_t seed) {
  Prng rng(seed);
  const std::size_t dim = 2 + rng.next_u64() % 3;
  std::vector<cplx> psi(dim);
  double norm2 = 0.0;
  for (auto& a : psi) {
    a = cplx(rng.next_gaussian(), rng.next_gaussian());
    norm2 += std::norm(a);
  }
  for (auto& a : psi) a /= std::sqrt(norm2);
  const ComplexMatrix g = random_hermitian(dim, rng.substream(1));
  // dpsi = -i G psi
  std::vector<cplx> dpsi(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) s += g(i, j) * psi[j];
    dpsi[i] = cplx(0.0, -1.0) * s;
  }
  return PureFamily{psi, dpsi,
                    ParametrizedState::analytic_unitary(g, DensityMatrix::pure(psi))};
}

}  // namespace

TEST_SUITE("fisher") {
  TEST_CASE("zero derivative gives zero sld and information") {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(3);
    const SldResult r = sld(rho, ComplexMatrix(3, 3));
    CHECK(r.qfi == 0.0);
    CHECK(r.sld.max_abs() < 1e-14);
    CHECK(r.support_rank == 3);
  }

  TEST_CASE("rotating qubit with bloch length 0.8 has information r^2") {
    const ParametrizedState ps = bloch_phase_family(0.8);
    for (double x : {0.0, 0.7, 2.1}) {
      CHECK(qfi(ps, x) == doctest::Approx(0.64).epsilon(1e-9));
    }
  }

  TEST_CASE("bloch length sweep reproduces r^2") {
    for (double r : {0.2, 0.5, 1.0}) {
      CHECK(qfi(bloch_phase_family(r), 0.3) == doctest::Approx(r * r).epsilon(1e-9));
    }
  }

  TEST_CASE("equatorial pure phase family has unit information") {
    // |psi(x)> = (|0> + e^{-ix} |1>)/sqrt(2), generator diag(0, 1)
    ComplexMatrix g(2, 2);
    g(1, 1) = 1.0;
    const ParametrizedState ps = ParametrizedState::analytic_unitary(
        g, DensityMatrix::pure({kInvSqrt2, kInvSqrt2}));
    CHECK(qfi(ps, 0.9) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("sld satisfies its defining equation on the support") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Prng rng(seed);
      const std::size_t dim = 2 + rng.next_u64() % 3;
      const ParametrizedState ps = ParametrizedState::analytic_unitary(
          random_hermitian(dim, rng.substream(1)),
          random_density(dim, 1 + rng.next_u64() % dim, rng.substream(2)));
      const double x = rng.next_double();
      const DensityMatrix rho = ps.evaluate(x);
      const ComplexMatrix drho = ps.derivative(x);
      const SldResult r = sld(rho, drho);

      const ComplexMatrix recon =
          (r.sld * rho.mat() + rho.mat() * r.sld) * cplx(0.5);
      // Project the residual onto the numerical support of rho.
      const HermitianEig eig = hermitian_eig(rho.mat());
      const double cut = r.support_tol * eig.eigenvalues.back();
      std::vector<cplx> keep(dim);
      for (std::size_t i = 0; i < dim; ++i)
        keep[i] = eig.eigenvalues[i] > cut ? 1.0 : 0.0;
      const ComplexMatrix proj = spectral_apply(eig, keep);
      const ComplexMatrix residual = proj * (recon - drho) * proj;
      CHECK(residual.max_abs() < 1e-8);
      CHECK(r.sld.hermiticity_defect() < 1e-10);
      // qfi equals Tr[rho L^2]
      const double tr_rl2 = (rho.mat() * r.sld * r.sld).trace().real();
      CHECK(r.qfi == doctest::Approx(tr_rl2).epsilon(1e-9));
    }
  }

  TEST_CASE("derivative leaving the support is flagged, not computed") {
    // rho = |0><0| with a derivative feeding the orthogonal state.
    const DensityMatrix rho = DensityMatrix::basis_state(2, 0);
    ComplexMatrix drho(2, 2);
    drho(0, 0) = -1.0;
    drho(1, 1) = 1.0;
    const SldResult r = sld(rho, drho);
    CHECK(r.outside_support);
    CHECK(std::isinf(r.qfi));
    CHECK(r.outside_norm > kOutsideSupportTol);
  }

  TEST_CASE("pure state oracle basics") {
    CHECK(pure_qfi({1.0, 0.0}, {0.0, 0.0}) == 0.0);
    // |+> with dpsi = -i (sigma_z/2) |+>: information 4 Var = 1.
    CHECK(pure_qfi({kInvSqrt2, kInvSqrt2}, {cplx(0.0, -0.5 * kInvSqrt2), cplx(0.0, 0.5 * kInvSqrt2)}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(pure_qfi({1.0, 1.0}, {0.0, 0.0}), Error);
  }

  TEST_CASE("sld route agrees with the pure-state oracle on 100 seeded families") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const PureFamily f = random_pure_family(seed);
      const double oracle = pure_qfi(f.psi, f.dpsi);
      const double via_sld = qfi(f.family, 0.0);
      CHECK(std::abs(via_sld - oracle) < 1e-8 * std::max(1.0, oracle));
    }
  }

  TEST_CASE("classical fisher hand values") {
    CHECK(classical_fisher({0.5, 0.5}, {1.0, -1.0}) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(classical_fisher({0.25, 0.25, 0.25, 0.25}, {0.0, 0.0, 0.0, 0.0}) == 0.0);
  }

  TEST_CASE("classical fisher flags divergence and rejects bad input") {
    CHECK(std::isinf(classical_fisher({1.0, 0.0}, {-0.5, 0.5})));
    CHECK_THROWS_AS(classical_fisher({0.7, 0.7}, {0.0, 0.0}), Error);
    CHECK_THROWS_AS(classical_fisher({0.5, 0.5}, {1.0, 1.0}), Error);
    CHECK_THROWS_AS(classical_fisher({1.3, -0.3}, {0.0, 0.0}), Error);
  }

  TEST_CASE("lumping outcomes never increases classical information") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Prng rng(seed);
      const std::size_t k = 3 + rng.next_u64() % 4;
      std::vector<double> p(k), dp(k);
      double sp = 0.0, sdp = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        p[i] = 0.05 + rng.next_double();
        dp[i] = rng.next_gaussian();
        sp += p[i];
      }
      for (std::size_t i = 0; i < k; ++i) {
        p[i] /= sp;
        sdp += dp[i];
      }
      for (std::size_t i = 0; i < k; ++i) dp[i] -= sdp / static_cast<double>(k);

      const double full = classical_fisher(p, dp);
      std::vector<double> pm(p.begin() + 1, p.end());
      std::vector<double> dpm(dp.begin() + 1, dp.end());
      pm[0] += p[0];
      dpm[0] += dp[0];
      const double merged = classical_fisher(pm, dpm);
      CHECK(merged <= full + 1e-12 * std::max(1.0, full));
    }
  }

  TEST_CASE("optimal readout of the pure phase family attains the quantum value") {
    const ParametrizedState ps = bloch_phase_family(1.0);
    const ComplexMatrix plus = outer({kInvSqrt2, kInvSqrt2}, {kInvSqrt2, kInvSqrt2});
    const POVM sx_basis({plus, ComplexMatrix::identity(2) - plus});
    CHECK(povm_classical_fisher(ps, sx_basis, M_PI / 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("trivial povm carries no information") {
    const ParametrizedState ps = bloch_phase_family(0.9);
    const POVM trivial({ComplexMatrix::identity(2)});
    CHECK(povm_classical_fisher(ps, trivial, 0.4) == 0.0);
  }

  TEST_CASE("classical information never exceeds the quantum value on 500 seeds") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      Prng rng(seed);
      const std::size_t dim = 2 + rng.next_u64() % 3;
      const ParametrizedState ps = ParametrizedState::analytic_unitary(
          random_hermitian(dim, rng.substream(1)),
          random_density(dim, 1 + rng.next_u64() % dim, rng.substream(2)));
      // POVM from a random selection measurement's outcome elements.
      const std::size_t outcomes = 2 + rng.next_u64() % 2;
      std::vector<std::size_t> kraus(outcomes, 1);
      const SelectionMeasurement sel =
          random_selection(dim, outcomes, kraus, rng.substream(3).next_u64());
      std::vector<ComplexMatrix> elements;
      for (std::size_t a = 0; a < outcomes; ++a) elements.push_back(sel.povm_element(a));
      const POVM povm(elements);
      const double x = -1.0 + 2.0 * rng.next_double();
      const double i_cl = povm_classical_fisher(ps, povm, x);
      const double i_q = qfi(ps, x);
      CHECK(i_cl <= i_q + 1e-8 * std::max(1.0, i_q));
    }
  }

  TEST_CASE("unitary conjugation leaves the information invariant") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Prng rng(seed);
      const std::size_t dim = 2 + rng.next_u64() % 3;
      const ComplexMatrix g = random_hermitian(dim, rng.substream(1));
      const DensityMatrix base = random_density(dim, 1 + rng.next_u64() % dim, rng.substream(2));
      const ParametrizedState ps = ParametrizedState::analytic_unitary(g, base);
      const ComplexMatrix v =
          unitary_from_hermitian_generator(random_hermitian(dim, rng.substream(3)), 1.0);
      // V rho(x) V^dagger is again an analytic family with conjugated data.
      const ParametrizedState rotated = ParametrizedState::analytic_unitary(
          (v * g * v.adjoint()).hermitized(),
          DensityMatrix::unchecked((v * base.mat() * v.adjoint()).hermitized()));
      const double x = rng.next_double();
      const double a = qfi(ps, x);
      const double b = qfi(rotated, x);
      CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, a));
    }
  }
}
