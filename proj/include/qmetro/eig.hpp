#pragma once

#include <vector>

#include "qmetro/matrix.hpp"

namespace qmetro {

/// Spectral decomposition A = V diag(eigenvalues) V^dagger with eigenvalues
/// ascending and the columns of V orthonormal.
struct HermitianEig {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;  // columns
};

inline constexpr double kDefaultHermiticityTol = 1e-10;

/// Cyclic complex Jacobi diagonalization. Dimensions in this library stay
/// small (<= ~256), where Jacobi's robustness and orthogonality guarantees
/// beat faster tridiagonalization schemes.
///
/// The hermiticity precondition is checked against
/// hermiticity_tol * max(1, max|A|); the symmetrized (A + A^dagger)/2 is what
/// gets diagonalized.
HermitianEig hermitian_eig(const ComplexMatrix& a,
                           double hermiticity_tol = kDefaultHermiticityTol);

/// Reconstruct V diag(f(lambda)) V^dagger from a decomposition.
ComplexMatrix spectral_apply(const HermitianEig& eig, const std::vector<cplx>& f_of_eigenvalues);

/// exp(-i x G) for Hermitian G, via the spectral decomposition.
ComplexMatrix unitary_from_hermitian_generator(const ComplexMatrix& g, double x,
                                               double hermiticity_tol = kDefaultHermiticityTol);

}  // namespace qmetro
