#include "qmetro/states.hpp"

#include <algorithm>
#include <cmath>

namespace qmetro {

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const ComplexMatrix& mat, double tol) {
  if (!mat.is_square()) fail(ErrorCode::InvalidState, "density matrix must be square");
  if (!mat.all_finite()) fail(ErrorCode::NonFinite, "density matrix has non-finite entries");
  const double scale = std::max(1.0, mat.max_abs());
  if (mat.hermiticity_defect() > tol * scale)
    fail(ErrorCode::InvalidState, "density matrix not Hermitian within tolerance");
  ComplexMatrix h = mat.hermitized();
  if (std::abs(h.trace() - 1.0) > tol * scale)
    fail(ErrorCode::InvalidState, "density matrix trace differs from 1");

  HermitianEig eig = hermitian_eig(h, tol);
  const double min_eval = eig.eigenvalues.front();
  if (min_eval < -tol * scale)
    fail(ErrorCode::InvalidState, "density matrix has a negative eigenvalue beyond tolerance");
  if (min_eval < 0.0) {
    // Clip round-off negatives and renormalize.
    std::vector<cplx> clipped(eig.eigenvalues.size());
    double total = 0.0;
    for (std::size_t i = 0; i < clipped.size(); ++i) total += std::max(0.0, eig.eigenvalues[i]);
    for (std::size_t i = 0; i < clipped.size(); ++i)
      clipped[i] = std::max(0.0, eig.eigenvalues[i]) / total;
    mat_ = spectral_apply(eig, clipped).hermitized();
  } else {
    mat_ = std::move(h);
  }
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix mat) {
  DensityMatrix d;
  d.mat_ = std::move(mat);
  return d;
}

DensityMatrix DensityMatrix::pure(const std::vector<cplx>& psi) {
  double norm2 = 0.0;
  for (const auto& a : psi) norm2 += std::norm(a);
  if (std::abs(norm2 - 1.0) > 1e-10)
    fail(ErrorCode::NotNormalized, "pure state vector not normalized");
  return unchecked(outer(psi, psi));
}

DensityMatrix DensityMatrix::qubit_bloch(double bx, double by, double bz) {
  const double r = std::sqrt(bx * bx + by * by + bz * bz);
  if (r > 1.0 + 1e-12) fail(ErrorCode::InvalidState, "Bloch vector longer than 1");
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.5 * (1.0 + bz);
  m(1, 1) = 0.5 * (1.0 - bz);
  m(0, 1) = 0.5 * cplx(bx, -by);
  m(1, 0) = 0.5 * cplx(bx, by);
  return unchecked(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return unchecked(ComplexMatrix::identity(dim) * cplx(1.0 / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::basis_state(std::size_t dim, std::size_t index) {
  if (index >= dim) fail(ErrorCode::OutOfRange, "basis_state index out of range");
  ComplexMatrix m(dim, dim);
  m(index, index) = 1.0;
  return unchecked(std::move(m));
}

double DensityMatrix::purity() const { return (mat_ * mat_).trace().real(); }

// ---------------------------------------------------------------------------
// KrausChannel / POVM

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus_ops, double tol)
    : ops_(std::move(kraus_ops)) {
  if (ops_.empty()) fail(ErrorCode::InvalidState, "channel needs at least one Kraus operator");
  const std::size_t d = ops_.front().rows();
  ComplexMatrix sum(d, d);
  for (const auto& m : ops_) {
    if (m.rows() != d || m.cols() != d)
      fail(ErrorCode::DimensionMismatch, "Kraus operators must share dimensions");
    sum += m.adjoint() * m;
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(d)) > tol)
    fail(ErrorCode::InvalidState, "Kraus operators are not trace-preserving");
}

ComplexMatrix KrausChannel::apply(const ComplexMatrix& rho) const {
  ComplexMatrix out(rho.rows(), rho.cols());
  for (const auto& m : ops_) out += m * rho * m.adjoint();
  return out;
}

POVM::POVM(std::vector<ComplexMatrix> elements, double tol) : elements_(std::move(elements)) {
  if (elements_.empty()) fail(ErrorCode::InvalidState, "POVM needs at least one element");
  const std::size_t d = elements_.front().rows();
  ComplexMatrix sum(d, d);
  for (const auto& e : elements_) {
    if (!e.is_square() || e.rows() != d)
      fail(ErrorCode::DimensionMismatch, "POVM elements must share dimensions");
    const double scale = std::max(1.0, e.max_abs());
    if (e.hermiticity_defect() > tol * scale)
      fail(ErrorCode::InvalidState, "POVM element not Hermitian");
    HermitianEig eig = hermitian_eig(e, tol);
    if (eig.eigenvalues.front() < -tol * scale)
      fail(ErrorCode::InvalidState, "POVM element not positive semidefinite");
    sum += e;
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(d)) > tol)
    fail(ErrorCode::InvalidState, "POVM elements do not sum to identity");
}

std::vector<double> POVM::probabilities(const DensityMatrix& rho) const {
  return probabilities(rho.mat());
}

std::vector<double> POVM::probabilities(const ComplexMatrix& rho) const {
  std::vector<double> p(elements_.size());
  for (std::size_t k = 0; k < elements_.size(); ++k)
    p[k] = (rho * elements_[k]).trace().real();
  return p;
}

POVM POVM::computational_basis(std::size_t dim) {
  std::vector<ComplexMatrix> els;
  els.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    ComplexMatrix e(dim, dim);
    e(i, i) = 1.0;
    els.push_back(std::move(e));
  }
  return POVM(std::move(els));
}

// ---------------------------------------------------------------------------
// ParametrizedState

ParametrizedState ParametrizedState::analytic_unitary(const ComplexMatrix& generator,
                                                      DensityMatrix base, double fd_step) {
  ParametrizedState ps;
  ps.kind_ = Kind::AnalyticUnitary;
  ps.fd_step_ = fd_step;
  ps.generator_ = std::make_shared<const ComplexMatrix>(generator.hermitized());
  ps.generator_eig = std::make_shared<const HermitianEig>(hermitian_eig(generator));
  ps.base_ = std::make_shared<const DensityMatrix>(std::move(base));
  if (ps.base_->dim() != generator.rows())
    fail(ErrorCode::DimensionMismatch, "generator and base state dimensions differ");
  return ps;
}

ParametrizedState ParametrizedState::channel_family(std::function<KrausChannel(double)> channel_at,
                                                    DensityMatrix base, double fd_step) {
  ParametrizedState ps;
  ps.kind_ = Kind::ChannelFamily;
  ps.fd_step_ = fd_step;
  ps.channel_at_ = std::move(channel_at);
  ps.base_ = std::make_shared<const DensityMatrix>(std::move(base));
  return ps;
}

ParametrizedState ParametrizedState::custom(std::function<DensityMatrix(double)> state_at,
                                            double fd_step) {
  ParametrizedState ps;
  ps.kind_ = Kind::Custom;
  ps.fd_step_ = fd_step;
  ps.state_at_ = std::move(state_at);
  return ps;
}

DensityMatrix ParametrizedState::evaluate(double x) const {
  if (!std::isfinite(x)) fail(ErrorCode::OutOfRange, "evaluate: x must be finite");
  switch (kind_) {
    case Kind::AnalyticUnitary: {
      std::vector<cplx> phases(generator_eig->eigenvalues.size());
      for (std::size_t k = 0; k < phases.size(); ++k)
        phases[k] = std::exp(cplx(0.0, -x * generator_eig->eigenvalues[k]));
      ComplexMatrix u = spectral_apply(*generator_eig, phases);
      return DensityMatrix::unchecked(u * base_->mat() * u.adjoint());
    }
    case Kind::ChannelFamily:
      return DensityMatrix(channel_at_(x).apply(base_->mat()));
    case Kind::Custom:
      return state_at_(x);
  }
  fail(ErrorCode::InvalidState, "unreachable");
}

ComplexMatrix ParametrizedState::central_difference(double x, double h) const {
  const ComplexMatrix hi = evaluate(x + h).mat();
  const ComplexMatrix lo = evaluate(x - h).mat();
  return (hi - lo) * cplx(1.0 / (2.0 * h));
}

ComplexMatrix ParametrizedState::derivative(double x) const {
  if (!std::isfinite(x)) fail(ErrorCode::OutOfRange, "derivative: x must be finite");
  if (kind_ == Kind::AnalyticUnitary) {
    const ComplexMatrix rho = evaluate(x).mat();
    const ComplexMatrix& g = *generator_;
    ComplexMatrix comm = g * rho - rho * g;
    ComplexMatrix d = comm * cplx(0.0, -1.0);
    return d.hermitized();
  }
  const double h = fd_step_;
  if (h < 1e-9) fail(ErrorCode::StepTooSmall, "finite-difference step below 1e-9");
  ComplexMatrix d = central_difference(x, h);
  if (richardson_) {
    const ComplexMatrix fine = central_difference(x, 0.5 * h);
    d = (fine * cplx(4.0) - d) * cplx(1.0 / 3.0);
  }
  if (!d.all_finite()) fail(ErrorCode::NonFinite, "derivative has non-finite entries");
  return d.hermitized();
}

ParametrizedState ParametrizedState::with_richardson(bool enabled) const {
  ParametrizedState copy = *this;
  copy.richardson_ = enabled;
  return copy;
}

// ---------------------------------------------------------------------------
// SelectionMeasurement

SelectionMeasurement::SelectionMeasurement(std::vector<std::vector<ComplexMatrix>> outcomes,
                                           std::set<std::size_t> favorable, double tol)
    : outcomes_(std::move(outcomes)), favorable_(std::move(favorable)) {
  if (outcomes_.empty()) fail(ErrorCode::InvalidState, "selection needs at least one outcome");
  const std::size_t d = outcomes_.front().front().rows();
  ComplexMatrix sum(d, d);
  for (const auto& kraus_list : outcomes_) {
    if (kraus_list.empty())
      fail(ErrorCode::InvalidState, "every outcome needs at least one Kraus operator");
    for (const auto& m : kraus_list) {
      if (m.rows() != d || m.cols() != d)
        fail(ErrorCode::DimensionMismatch, "Kraus operators must share dimensions");
      sum += m.adjoint() * m;
    }
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(d)) > tol)
    fail(ErrorCode::InvalidState, "selection measurement violates completeness");
  if (favorable_.empty())
    fail(ErrorCode::FavorableSetEmpty, "favorable outcome set must be nonempty");
  for (std::size_t a : favorable_)
    if (a >= outcomes_.size())
      fail(ErrorCode::OutOfRange, "favorable outcome index out of range");
}

std::vector<std::size_t> SelectionMeasurement::unfavorable() const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < outcomes_.size(); ++a)
    if (!is_favorable(a)) out.push_back(a);
  return out;
}

ComplexMatrix SelectionMeasurement::povm_element(std::size_t a) const {
  const std::size_t d = dim();
  ComplexMatrix e(d, d);
  for (const auto& m : outcomes_[a]) e += m.adjoint() * m;
  return e;
}

ComplexMatrix SelectionMeasurement::apply_outcome(std::size_t a, const ComplexMatrix& rho) const {
  ComplexMatrix out(rho.rows(), rho.cols());
  for (const auto& m : outcomes_[a]) out += m * rho * m.adjoint();
  return out;
}

std::vector<double> SelectionMeasurement::outcome_probabilities(const ComplexMatrix& rho) const {
  std::vector<double> p(outcomes_.size());
  for (std::size_t a = 0; a < outcomes_.size(); ++a)
    p[a] = (rho * povm_element(a)).trace().real();
  return p;
}

SelectionMeasurement SelectionMeasurement::projective(const std::vector<ComplexMatrix>& projectors,
                                                      std::set<std::size_t> favorable) {
  std::vector<std::vector<ComplexMatrix>> outcomes;
  outcomes.reserve(projectors.size());
  for (const auto& p : projectors) outcomes.push_back({p});
  return SelectionMeasurement(std::move(outcomes), std::move(favorable));
}

SelectionMeasurement SelectionMeasurement::computational(std::size_t dim,
                                                         std::set<std::size_t> favorable) {
  std::vector<ComplexMatrix> projectors;
  projectors.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    ComplexMatrix p(dim, dim);
    p(i, i) = 1.0;
    projectors.push_back(std::move(p));
  }
  return projective(projectors, std::move(favorable));
}

// ---------------------------------------------------------------------------
// Random generators

namespace {

ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Prng& rng) {
  ComplexMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = cplx(rng.next_gaussian(), rng.next_gaussian());
  return g;
}

}  // namespace

DensityMatrix random_density(std::size_t dim, std::size_t rank, std::uint64_t rng_seed) {
  return random_density(dim, rank, Prng(rng_seed));
}

DensityMatrix random_density(std::size_t dim, std::size_t rank, Prng rng) {
  if (rank < 1 || rank > dim) fail(ErrorCode::BadRank, "random_density: need 1 <= rank <= dim");
  ComplexMatrix g = gaussian_matrix(dim, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  const double tr = rho.trace().real();
  rho = rho * cplx(1.0 / tr);
  return DensityMatrix::unchecked(rho.hermitized());
}

ComplexMatrix random_hermitian(std::size_t dim, Prng rng) {
  return gaussian_matrix(dim, dim, rng).hermitized();
}

SelectionMeasurement random_selection(std::size_t dim, std::size_t num_outcomes,
                                      const std::vector<std::size_t>& kraus_per_outcome,
                                      std::uint64_t rng_seed, std::set<std::size_t> favorable) {
  return random_selection(dim, num_outcomes, kraus_per_outcome, Prng(rng_seed),
                          std::move(favorable));
}

SelectionMeasurement random_selection(std::size_t dim, std::size_t num_outcomes,
                                      const std::vector<std::size_t>& kraus_per_outcome,
                                      Prng rng, std::set<std::size_t> favorable) {
  if (kraus_per_outcome.size() != num_outcomes)
    fail(ErrorCode::DimensionMismatch, "kraus_per_outcome length must equal num_outcomes");
  std::size_t total = 0;
  for (std::size_t j : kraus_per_outcome) {
    if (j == 0) fail(ErrorCode::InvalidState, "each outcome needs at least one Kraus operator");
    total += j;
  }
  const std::size_t big = dim * total;
  if (big > kDefaultMaxKronDim)
    fail(ErrorCode::DimensionOverflow, "random_selection: dilation dimension too large");

  // Haar isometry via modified Gram-Schmidt with positive diagonal R, which
  // fixes the phase freedom and keeps the distribution invariant.
  ComplexMatrix z = gaussian_matrix(big, dim, rng);
  ComplexMatrix q(big, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    std::vector<cplx> v(big);
    for (std::size_t i = 0; i < big; ++i) v[i] = z(i, c);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t pc = 0; pc < c; ++pc) {
        cplx overlap = 0.0;
        for (std::size_t i = 0; i < big; ++i) overlap += std::conj(q(i, pc)) * v[i];
        for (std::size_t i = 0; i < big; ++i) v[i] -= overlap * q(i, pc);
      }
    }
    double norm2 = 0.0;
    for (const auto& a : v) norm2 += std::norm(a);
    const double norm = std::sqrt(norm2);
    if (norm < 1e-12) fail(ErrorCode::ConvergenceFailure, "random_selection: degenerate Gaussian draw");
    for (std::size_t i = 0; i < big; ++i) q(i, c) = v[i] / norm;
  }

  // Slice the isometry into Kraus blocks: row block f of q is M_f.
  std::vector<std::vector<ComplexMatrix>> outcomes(num_outcomes);
  std::size_t f = 0;
  for (std::size_t a = 0; a < num_outcomes; ++a) {
    for (std::size_t j = 0; j < kraus_per_outcome[a]; ++j, ++f) {
      ComplexMatrix m(dim, dim);
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t cc = 0; cc < dim; ++cc) m(r, cc) = q(r * total + f, cc);
      outcomes[a].push_back(std::move(m));
    }
  }
  return SelectionMeasurement(std::move(outcomes), std::move(favorable));
}

}  // namespace qmetro
