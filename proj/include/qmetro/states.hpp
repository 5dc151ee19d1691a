#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <vector>

#include "qmetro/eig.hpp"
#include "qmetro/matrix.hpp"
#include "qmetro/rng.hpp"

namespace qmetro {

inline constexpr double kStateTol = 1e-10;
inline constexpr double kDefaultFdStep = 1e-5;

/// Unit-trace positive-semidefinite Hermitian matrix. Construction validates:
/// hermiticity and trace to 1e-10 (scaled), eigenvalues >= -1e-10 (scaled).
/// Negative eigenvalues inside the tolerance are clipped to zero and the
/// state renormalized; anything worse throws InvalidState.
class DensityMatrix {
 public:
  /// Empty placeholder (dim 0); useful only as an assignment target.
  DensityMatrix() = default;
  explicit DensityMatrix(const ComplexMatrix& mat, double tol = kStateTol);

  /// Skips validation; for internal constructions that are valid by algebra
  /// (e.g. U rho U^dagger of a validated rho).
  static DensityMatrix unchecked(ComplexMatrix mat);

  static DensityMatrix pure(const std::vector<cplx>& psi);
  static DensityMatrix qubit_bloch(double bx, double by, double bz);
  static DensityMatrix maximally_mixed(std::size_t dim);
  static DensityMatrix basis_state(std::size_t dim, std::size_t index);

  const ComplexMatrix& mat() const { return mat_; }
  std::size_t dim() const { return mat_.rows(); }
  double purity() const;

 private:
  ComplexMatrix mat_;
};

/// Trace-preserving completely positive map given by Kraus operators.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> kraus_ops, double tol = kStateTol);
  const std::vector<ComplexMatrix>& kraus_ops() const { return ops_; }
  std::size_t dim() const { return ops_.front().rows(); }
  ComplexMatrix apply(const ComplexMatrix& rho) const;

 private:
  std::vector<ComplexMatrix> ops_;
};

/// Positive-operator-valued measure: Hermitian PSD elements summing to I.
class POVM {
 public:
  explicit POVM(std::vector<ComplexMatrix> elements, double tol = kStateTol);
  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  std::size_t dim() const { return elements_.front().rows(); }
  std::vector<double> probabilities(const DensityMatrix& rho) const;
  std::vector<double> probabilities(const ComplexMatrix& rho) const;

  static POVM computational_basis(std::size_t dim);

 private:
  std::vector<ComplexMatrix> elements_;
};

/// A family x -> rho(x) with a derivative. Three flavors:
///  - analytic_unitary: rho(x) = e^{-ixG} base e^{ixG}, exact derivative -i[G, rho(x)]
///  - channel_family:   rho(x) = C_x(base), central-difference derivative
///  - custom:           rho(x) given directly, central-difference derivative
/// Derivatives are symmetrized to kill the hermiticity round-off.
class ParametrizedState {
 public:
  static ParametrizedState analytic_unitary(const ComplexMatrix& generator,
                                            DensityMatrix base,
                                            double fd_step = kDefaultFdStep);
  static ParametrizedState channel_family(std::function<KrausChannel(double)> channel_at,
                                          DensityMatrix base, double fd_step = kDefaultFdStep);
  static ParametrizedState custom(std::function<DensityMatrix(double)> state_at,
                                  double fd_step = kDefaultFdStep);

  DensityMatrix evaluate(double x) const;
  ComplexMatrix derivative(double x) const;
  double fd_step() const { return fd_step_; }
  bool is_analytic() const { return kind_ == Kind::AnalyticUnitary; }

  /// Copy with Richardson extrapolation toggled for the finite-difference
  /// kinds: (4 D_{h/2} - D_h) / 3, one order better at twice the cost.
  /// Off by default.
  ParametrizedState with_richardson(bool enabled) const;

 private:
  enum class Kind { AnalyticUnitary, ChannelFamily, Custom };
  ParametrizedState() = default;

  ComplexMatrix central_difference(double x, double h) const;

  Kind kind_ = Kind::Custom;
  double fd_step_ = kDefaultFdStep;
  bool richardson_ = false;
  std::shared_ptr<const HermitianEig> generator_eig;  // AnalyticUnitary
  std::shared_ptr<const ComplexMatrix> generator_;
  std::shared_ptr<const DensityMatrix> base_;
  std::function<KrausChannel(double)> channel_at_;
  std::function<DensityMatrix(double)> state_at_;
};

/// Selection measurement: outcome-indexed Kraus families {M_{a,j}} plus the
/// favorable outcome subset. Outcomes are 0-based here and in the scenario
/// files. Completeness sum_{a,j} M^dagger M = I is validated to 1e-10.
class SelectionMeasurement {
 public:
  SelectionMeasurement(std::vector<std::vector<ComplexMatrix>> outcomes,
                       std::set<std::size_t> favorable, double tol = kStateTol);

  std::size_t num_outcomes() const { return outcomes_.size(); }
  std::size_t dim() const { return outcomes_.front().front().rows(); }
  const std::vector<std::vector<ComplexMatrix>>& outcomes() const { return outcomes_; }
  const std::set<std::size_t>& favorable() const { return favorable_; }
  bool is_favorable(std::size_t a) const { return favorable_.count(a) != 0; }
  std::vector<std::size_t> unfavorable() const;

  /// POVM element E_a = sum_j M^dagger_{a,j} M_{a,j}.
  ComplexMatrix povm_element(std::size_t a) const;
  /// F_a[rho] = sum_j M_{a,j} rho M^dagger_{a,j}.
  ComplexMatrix apply_outcome(std::size_t a, const ComplexMatrix& rho) const;
  /// Outcome probabilities Tr[E_a rho].
  std::vector<double> outcome_probabilities(const ComplexMatrix& rho) const;

  /// One single-Kraus outcome per projector.
  static SelectionMeasurement projective(const std::vector<ComplexMatrix>& projectors,
                                         std::set<std::size_t> favorable);
  /// Projective measurement onto the computational basis.
  static SelectionMeasurement computational(std::size_t dim, std::set<std::size_t> favorable);

 private:
  std::vector<std::vector<ComplexMatrix>> outcomes_;
  std::set<std::size_t> favorable_;
};

/// Ginibre-induced random state: G complex Gaussian dim x rank,
/// rho = G G^dagger / Tr. rank controls the support.
DensityMatrix random_density(std::size_t dim, std::size_t rank, std::uint64_t rng_seed);
DensityMatrix random_density(std::size_t dim, std::size_t rank, Prng rng);

/// GUE-style random Hermitian matrix (used as a generator for analytic
/// unitary families).
ComplexMatrix random_hermitian(std::size_t dim, Prng rng);

/// Haar-random selection measurement: QR of a complex Gaussian
/// (dim * sum_a J_a) x dim block gives an isometry, sliced into Kraus blocks.
/// The favorable set is NOT drawn here; callers assign it.
SelectionMeasurement random_selection(std::size_t dim, std::size_t num_outcomes,
                                      const std::vector<std::size_t>& kraus_per_outcome,
                                      std::uint64_t rng_seed,
                                      std::set<std::size_t> favorable = {0});
SelectionMeasurement random_selection(std::size_t dim, std::size_t num_outcomes,
                                      const std::vector<std::size_t>& kraus_per_outcome,
                                      Prng rng, std::set<std::size_t> favorable = {0});

}  // namespace qmetro
