#include "qmetro/fisher.hpp"

#include <cmath>
#include <limits>

namespace qmetro {

SldResult sld(const DensityMatrix& rho, const ComplexMatrix& drho, double support_tol) {
  const std::size_t n = rho.dim();
  if (!drho.is_square() || drho.rows() != n)
    fail(ErrorCode::DimensionMismatch, "sld: derivative dimension mismatch");
  const double dscale = std::max(1.0, drho.max_abs());
  if (drho.hermiticity_defect() > 1e-8 * dscale)
    fail(ErrorCode::NotHermitian, "sld: derivative not Hermitian");
  if (std::abs(drho.trace()) > 1e-8 * dscale)
    fail(ErrorCode::NotHermitian, "sld: derivative not traceless");

  HermitianEig eig = hermitian_eig(rho.mat());
  const ComplexMatrix& v = eig.eigenvectors;
  const std::vector<double>& lam = eig.eigenvalues;
  const double lam_max = std::max(lam.back(), 0.0);
  const double cut = support_tol * std::max(lam_max, 1e-300);

  // Derivative in the eigenbasis of rho.
  ComplexMatrix b = v.adjoint() * drho * v;

  SldResult out;
  out.support_tol = support_tol;
  for (double l : lam)
    if (l > cut) ++out.support_rank;

  ComplexMatrix l_eig(n, n);
  double qfi_sum = 0.0;
  double outside = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double denom = lam[i] + lam[j];
      if (denom > cut) {
        l_eig(i, j) = 2.0 * b(i, j) / denom;
        qfi_sum += 2.0 * std::norm(b(i, j)) / denom;
      } else {
        outside = std::max(outside, std::abs(b(i, j)));
      }
    }
  out.outside_norm = outside;
  if (outside > kOutsideSupportTol) {
    out.outside_support = true;
    out.qfi = std::numeric_limits<double>::infinity();
  } else {
    out.qfi = qfi_sum;
  }
  out.sld = (v * l_eig * v.adjoint()).hermitized();
  return out;
}

SldResult sld_of(const ParametrizedState& ps, double x, double support_tol) {
  const DensityMatrix rho = ps.evaluate(x);
  const ComplexMatrix drho = ps.derivative(x);
  return sld(rho, drho, support_tol);
}

double qfi(const ParametrizedState& ps, double x, double support_tol) {
  return sld_of(ps, x, support_tol).qfi;
}

double pure_qfi(const std::vector<cplx>& psi, const std::vector<cplx>& dpsi) {
  if (psi.size() != dpsi.size())
    fail(ErrorCode::DimensionMismatch, "pure_qfi: vector length mismatch");
  double norm2 = 0.0;
  for (const auto& a : psi) norm2 += std::norm(a);
  if (std::abs(norm2 - 1.0) > 1e-10)
    fail(ErrorCode::NotNormalized, "pure_qfi: state vector not normalized");
  double dd = 0.0;
  cplx pd = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    dd += std::norm(dpsi[i]);
    pd += std::conj(psi[i]) * dpsi[i];
  }
  return 4.0 * (dd - std::norm(pd));
}

double classical_fisher(const std::vector<double>& probs, const std::vector<double>& dprobs,
                        double zero_tol) {
  if (probs.size() != dprobs.size())
    fail(ErrorCode::DimensionMismatch, "classical_fisher: length mismatch");
  double sum_p = 0.0;
  double sum_dp = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] < -1e-12)
      fail(ErrorCode::NotADistribution, "classical_fisher: negative probability");
    sum_p += probs[k];
    sum_dp += dprobs[k];
  }
  if (std::abs(sum_p - 1.0) > 1e-9)
    fail(ErrorCode::NotADistribution, "classical_fisher: probabilities do not sum to 1");
  if (std::abs(sum_dp) > 1e-8)
    fail(ErrorCode::NotADistribution, "classical_fisher: derivatives do not sum to 0");

  const double div_cut = std::sqrt(zero_tol);
  double info = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > zero_tol) {
      info += dprobs[k] * dprobs[k] / probs[k];
    } else if (std::abs(dprobs[k]) > div_cut) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return info;
}

double povm_classical_fisher(const ParametrizedState& ps, const POVM& povm, double x,
                             double zero_tol) {
  const ComplexMatrix rho = ps.evaluate(x).mat();
  const ComplexMatrix drho = ps.derivative(x);
  std::vector<double> p(povm.size());
  std::vector<double> dp(povm.size());
  for (std::size_t k = 0; k < povm.size(); ++k) {
    p[k] = std::max(0.0, (rho * povm.elements()[k]).trace().real());
    dp[k] = (drho * povm.elements()[k]).trace().real();
  }
  // Kill the round-off drift so the distribution preconditions hold exactly.
  double sp = 0.0, sdp = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    sp += p[k];
    sdp += dp[k];
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] /= sp;
    dp[k] -= sdp / static_cast<double>(p.size());
  }
  return classical_fisher(p, dp, zero_tol);
}

}  // namespace qmetro
