#include "qmetro/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmetro {

namespace {

// One two-sided Jacobi rotation that annihilates a(p,q). The rotation matrix
// is u = [[c, s e^{i phi}], [-s e^{-i phi}, c]] with a(p,q) = |a(p,q)| e^{i phi},
// applied as a <- u^dagger a u, v <- v u.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const cplx apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const cplx eip = apq / mag;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double zeta = (aqq - app) / (2.0 * mag);
  const double t = (zeta >= 0.0) ? 1.0 / (zeta + std::sqrt(zeta * zeta + 1.0))
                                 : 1.0 / (zeta - std::sqrt(zeta * zeta + 1.0));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {  // column mix: a <- a u
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp - s * std::conj(eip) * akq;
    a(k, q) = s * eip * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {  // row mix: a <- u^dagger a
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - s * eip * aqk;
    a(q, k) = s * std::conj(eip) * apk + c * aqk;
  }
  a(p, p) = app - t * mag;
  a(q, q) = aqq + t * mag;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = c * vkp - s * std::conj(eip) * vkq;
    v(k, q) = s * eip * vkp + c * vkq;
  }
}

}  // namespace

HermitianEig hermitian_eig(const ComplexMatrix& a_in, double hermiticity_tol) {
  if (!a_in.is_square()) fail(ErrorCode::NotSquare, "hermitian_eig: matrix not square");
  if (!a_in.all_finite()) fail(ErrorCode::NonFinite, "hermitian_eig: non-finite entries");
  const double scale = std::max(1.0, a_in.max_abs());
  if (a_in.hermiticity_defect() > hermiticity_tol * scale)
    fail(ErrorCode::NotHermitian, "hermitian_eig: hermiticity tolerance exceeded");

  const std::size_t n = a_in.rows();
  ComplexMatrix a = a_in.hermitized();
  ComplexMatrix v = ComplexMatrix::identity(n);

  const int max_sweeps = 80;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= 1e-15 * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rotate(a, v, p, q);
      }
  }
  if (!converged) {
    // Final check: tiny residual off-diagonals are acceptable.
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off > 1e-12 * scale)
      fail(ErrorCode::ConvergenceFailure, "hermitian_eig: Jacobi sweeps did not converge");
  }

  std::vector<double> evals(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = a(i, i).real();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return evals[i] < evals[j]; });

  HermitianEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = evals[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  return out;
}

ComplexMatrix spectral_apply(const HermitianEig& eig, const std::vector<cplx>& f) {
  const std::size_t n = eig.eigenvalues.size();
  if (f.size() != n) fail(ErrorCode::DimensionMismatch, "spectral_apply: wrong number of values");
  const ComplexMatrix& v = eig.eigenvectors;
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += v(i, k) * f[k] * std::conj(v(j, k));
      out(i, j) = s;
    }
  return out;
}

ComplexMatrix unitary_from_hermitian_generator(const ComplexMatrix& g, double x,
                                               double hermiticity_tol) {
  HermitianEig eig = hermitian_eig(g, hermiticity_tol);
  std::vector<cplx> phases(eig.eigenvalues.size());
  for (std::size_t k = 0; k < phases.size(); ++k)
    phases[k] = std::exp(cplx(0.0, -x * eig.eigenvalues[k]));
  return spectral_apply(eig, phases);
}

}  // namespace qmetro
