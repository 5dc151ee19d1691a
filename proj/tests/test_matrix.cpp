#include <doctest.h>

#include "qmetro/matrix.hpp"
#include "qmetro/rng.hpp"

using namespace qmetro;

namespace {

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, Prng& rng) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = cplx(rng.next_gaussian(), rng.next_gaussian());
  return m;
}

}  // namespace

TEST_SUITE("matrix") {
  TEST_CASE("kron of identities") {
    const ComplexMatrix i4 = kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2));
    CHECK(max_abs_diff(i4, ComplexMatrix::identity(4)) == 0.0);
  }

  TEST_CASE("kron of pauli z with itself is the hand expansion") {
    const ComplexMatrix zz = kron(pauli_z(), pauli_z());
    ComplexMatrix expected(4, 4);
    expected(0, 0) = 1.0;
    expected(1, 1) = -1.0;
    expected(2, 2) = -1.0;
    expected(3, 3) = 1.0;
    CHECK(max_abs_diff(zz, expected) == 0.0);
  }

  TEST_CASE("kron shape law") {
    Prng rng(11);
    const ComplexMatrix a = random_matrix(2, 2, rng);
    const ComplexMatrix b = random_matrix(3, 3, rng);
    const ComplexMatrix ab = kron(a, b);
    CHECK(ab.rows() == 6);
    CHECK(ab.cols() == 6);
  }

  TEST_CASE("kron dimension overflow") {
    const ComplexMatrix big(70, 70);
    CHECK_THROWS_AS(kron(big, big), Error);
    CHECK(kron(big, big, 4900).rows() == 4900);
  }

  TEST_CASE("kron associativity on random triples") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Prng rng(seed);
      const ComplexMatrix a = random_matrix(2, 3, rng);
      const ComplexMatrix b = random_matrix(3, 2, rng);
      const ComplexMatrix c = random_matrix(2, 2, rng);
      CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) < 1e-12);
    }
  }

  TEST_CASE("kron mixes with matrix product") {
    Prng rng(5);
    const ComplexMatrix a = random_matrix(3, 3, rng);
    const ComplexMatrix b = random_matrix(2, 2, rng);
    const ComplexMatrix c = random_matrix(3, 3, rng);
    const ComplexMatrix d = random_matrix(2, 2, rng);
    CHECK(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)) < 1e-10);
  }

  TEST_CASE("partial trace of a product state returns the kept factor") {
    Prng rng(3);
    ComplexMatrix rho = random_matrix(3, 3, rng);
    rho = rho * rho.adjoint();
    rho = rho * cplx(1.0 / rho.trace().real());
    ComplexMatrix sigma = random_matrix(2, 2, rng);
    sigma = sigma * sigma.adjoint();
    sigma = sigma * cplx(1.0 / sigma.trace().real());

    CHECK(max_abs_diff(partial_trace(kron(rho, sigma), 3, 2, Keep::A), rho) < 1e-12);
    CHECK(max_abs_diff(partial_trace(kron(rho, sigma), 3, 2, Keep::B), sigma) < 1e-12);
  }

  TEST_CASE("partial trace scales by the trace of the dropped factor") {
    Prng rng(4);
    ComplexMatrix rho = random_matrix(2, 2, rng).hermitized();
    ComplexMatrix sigma = random_matrix(3, 3, rng).hermitized();
    const ComplexMatrix lhs = partial_trace(kron(rho, sigma), 2, 3, Keep::A);
    CHECK(max_abs_diff(lhs, rho * sigma.trace()) < 1e-12);
  }

  TEST_CASE("bell state marginal is maximally mixed") {
    const double s = 1.0 / std::sqrt(2.0);
    const ComplexMatrix bell = outer({s, 0.0, 0.0, s}, {s, 0.0, 0.0, s});
    const ComplexMatrix marg = partial_trace(bell, 2, 2, Keep::A);
    CHECK(max_abs_diff(marg, ComplexMatrix::identity(2) * cplx(0.5)) < 1e-15);
  }

  TEST_CASE("partial trace preserves the trace") {
    Prng rng(9);
    const ComplexMatrix ab = random_matrix(4, 4, rng);
    const cplx t = ab.trace();
    CHECK(std::abs(partial_trace(ab, 2, 2, Keep::A).trace() - t) < 1e-12);
    CHECK(std::abs(partial_trace(ab, 2, 2, Keep::B).trace() - t) < 1e-12);
  }

  TEST_CASE("partial trace rejects bad dimensions") {
    CHECK_THROWS_AS(partial_trace(ComplexMatrix::identity(5), 2, 2, Keep::A), Error);
  }

  TEST_CASE("hermiticity defect and hermitized") {
    Prng rng(1);
    const ComplexMatrix m = random_matrix(4, 4, rng);
    const ComplexMatrix h = m.hermitized();
    CHECK(h.hermiticity_defect() < 1e-15);
    CHECK(max_abs_diff(h, (m + m.adjoint()) * cplx(0.5)) < 1e-15);
  }
}
