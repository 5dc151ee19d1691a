#pragma once

#include <vector>

#include "qmetro/states.hpp"

namespace qmetro {

inline constexpr double kDefaultSupportTol = 1e-10;
inline constexpr double kDefaultZeroTol = 1e-12;
inline constexpr double kOutsideSupportTol = 1e-6;

/// Symmetric logarithmic derivative L solving d rho = (L rho + rho L)/2 on
/// the support of rho, plus the Fisher information Tr[rho L^2].
///
/// When the derivative has weight in the kernel-kernel block of rho beyond
/// kOutsideSupportTol, the family leaves the support and the information is
/// formally infinite: outside_support is set and qfi is +infinity. Infinity
/// orders above every finite value, which is exactly how such cases must
/// propagate through the inequality chains.
struct SldResult {
  ComplexMatrix sld;
  double qfi = 0.0;
  std::size_t support_rank = 0;
  double support_tol = kDefaultSupportTol;
  bool outside_support = false;
  double outside_norm = 0.0;
};

SldResult sld(const DensityMatrix& rho, const ComplexMatrix& drho,
              double support_tol = kDefaultSupportTol);

SldResult sld_of(const ParametrizedState& ps, double x,
                 double support_tol = kDefaultSupportTol);

/// Quantum Fisher information of the family at x (possibly +infinity).
double qfi(const ParametrizedState& ps, double x, double support_tol = kDefaultSupportTol);

/// Rank-1 oracle: 4(<dpsi|dpsi> - |<psi|dpsi>|^2). Independent of the SLD
/// path; used to cross-check it on pure families.
double pure_qfi(const std::vector<cplx>& psi, const std::vector<cplx>& dpsi);

/// Classical Fisher information sum_k dp_k^2 / p_k over outcomes with
/// p_k > zero_tol. Returns +infinity if some p_k <= zero_tol carries
/// |dp_k| > sqrt(zero_tol) (divergent information at a vanishing outcome).
double classical_fisher(const std::vector<double>& probs, const std::vector<double>& dprobs,
                        double zero_tol = kDefaultZeroTol);

/// Classical Fisher information of the POVM outcome distribution
/// p(k|x) = Tr[rho(x) Y_k]; never exceeds qfi(ps, x).
double povm_classical_fisher(const ParametrizedState& ps, const POVM& povm, double x,
                             double zero_tol = kDefaultZeroTol);

}  // namespace qmetro
