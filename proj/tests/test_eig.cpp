#include <doctest.h>

#include <cmath>

#include "qmetro/eig.hpp"
#include "qmetro/states.hpp"

using namespace qmetro;

namespace {

double reconstruction_error(const ComplexMatrix& a, const HermitianEig& eig) {
  std::vector<cplx> lam(eig.eigenvalues.begin(), eig.eigenvalues.end());
  return max_abs_diff(a.hermitized(), spectral_apply(eig, lam));
}

double unitarity_defect(const ComplexMatrix& v) {
  return max_abs_diff(v.adjoint() * v, ComplexMatrix::identity(v.rows()));
}

}  // namespace

TEST_SUITE("eig") {
  TEST_CASE("pauli z spectrum") {
    const HermitianEig eig = hermitian_eig(pauli_z());
    CHECK(eig.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(eig.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("identity spectrum and unitary eigenvectors") {
    const HermitianEig eig = hermitian_eig(ComplexMatrix::identity(3));
    for (double ev : eig.eigenvalues) CHECK(ev == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(unitarity_defect(eig.eigenvectors) < 1e-12);
  }

  TEST_CASE("random hermitian reconstruction") {
    const ComplexMatrix a = random_hermitian(8, Prng(42));
    const HermitianEig eig = hermitian_eig(a);
    const double scale = std::max(1.0, std::abs(eig.eigenvalues.back()));
    CHECK(reconstruction_error(a, eig) < 1e-12 * scale);
    CHECK(unitarity_defect(eig.eigenvectors) < 1e-12);
  }

  TEST_CASE("eigenvalues come out ascending, reconstruction holds across dims") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const std::size_t dim = 2 + seed % 15;
      const ComplexMatrix a = random_hermitian(dim, Prng(seed));
      const HermitianEig eig = hermitian_eig(a);
      for (std::size_t i = 1; i < eig.eigenvalues.size(); ++i)
        CHECK(eig.eigenvalues[i - 1] <= eig.eigenvalues[i]);
      const double scale = std::max({1.0, std::abs(eig.eigenvalues.back()),
                                     std::abs(eig.eigenvalues.front())});
      CHECK(reconstruction_error(a, eig) < 1e-12 * scale);
      CHECK(unitarity_defect(eig.eigenvectors) < 1e-12);
    }
  }

  TEST_CASE("degenerate spectra stay orthonormal") {
    // Two-fold degeneracy plus a separated level.
    ComplexMatrix a(3, 3);
    a(0, 0) = 2.0;
    a(1, 1) = 2.0;
    a(2, 2) = -1.0;
    a(0, 1) = cplx(0.0, 0.5);
    a(1, 0) = cplx(0.0, -0.5);
    const HermitianEig eig = hermitian_eig(a);
    CHECK(unitarity_defect(eig.eigenvectors) < 1e-12);
    CHECK(reconstruction_error(a, eig) < 1e-12 * 3.0);
  }

  TEST_CASE("rejects non-square and non-hermitian input") {
    CHECK_THROWS_AS(hermitian_eig(ComplexMatrix(2, 3)), Error);
    ComplexMatrix bad = pauli_x();
    bad(0, 1) = cplx(0.5, 0.5);
    CHECK_THROWS_AS(hermitian_eig(bad), Error);
    // A generous tolerance admits the same matrix.
    CHECK_NOTHROW(hermitian_eig(bad, 1.0));
  }

  TEST_CASE("generator exponential at x = 0 is the identity") {
    const ComplexMatrix u = unitary_from_hermitian_generator(random_hermitian(5, Prng(3)), 0.0);
    CHECK(max_abs_diff(u, ComplexMatrix::identity(5)) < 1e-13);
  }

  TEST_CASE("generator exponential of pauli z / 2 at pi") {
    const ComplexMatrix u = unitary_from_hermitian_generator(pauli_z() * cplx(0.5), M_PI);
    ComplexMatrix expected(2, 2);
    expected(0, 0) = cplx(0.0, -1.0);  // e^{-i pi/2}
    expected(1, 1) = cplx(0.0, 1.0);   // e^{+i pi/2}
    CHECK(max_abs_diff(u, expected) < 1e-14);
  }

  TEST_CASE("generator exponentials are unitary and invert") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Prng rng(seed);
      const std::size_t dim = 2 + rng.next_u64() % 7;
      const double x = -3.0 + 6.0 * rng.next_double();
      const ComplexMatrix g = random_hermitian(dim, rng.substream(1));
      const ComplexMatrix u = unitary_from_hermitian_generator(g, x);
      CHECK(max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(dim)) < 1e-12);
      const ComplexMatrix u_inv = unitary_from_hermitian_generator(g, -x);
      CHECK(max_abs_diff(u * u_inv, ComplexMatrix::identity(dim)) < 1e-12);
    }
  }
}
