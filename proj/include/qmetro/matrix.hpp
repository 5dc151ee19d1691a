#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qmetro/errors.hpp"

namespace qmetro {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major, explicit dimensions. All blocks in this
/// library are small (Hilbert dimensions up to a few hundred), so storage is
/// always dense and operations are plain loops.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {
    if (rows == 0 || cols == 0) fail(ErrorCode::DimensionMismatch, "matrix dimensions must be >= 1");
  }
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return ComplexMatrix(rows, cols); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_ && rows_ > 0; }

  cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const std::vector<cplx>& entries() const { return entries_; }
  std::vector<cplx>& entries() { return entries_; }

  ComplexMatrix operator+(const ComplexMatrix& other) const;
  ComplexMatrix operator-(const ComplexMatrix& other) const;
  ComplexMatrix operator*(const ComplexMatrix& other) const;
  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix operator*(cplx scalar) const;
  friend ComplexMatrix operator*(cplx scalar, const ComplexMatrix& m) { return m * scalar; }

  ComplexMatrix adjoint() const;

  cplx trace() const;
  /// Max-entry norm, the tolerance currency used throughout.
  double max_abs() const;
  double frobenius_norm() const;
  /// max |A - A^dagger| entrywise; 0 for exactly Hermitian input.
  double hermiticity_defect() const;
  bool all_finite() const;

  /// (A + A^dagger)/2.
  ComplexMatrix hermitized() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> entries_;
};

inline constexpr std::size_t kDefaultMaxKronDim = 4096;

/// Kronecker product; dims multiply. Throws DimensionOverflow past max_dim.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_dim = kDefaultMaxKronDim);

enum class Keep { A, B };

/// Partial trace of a (dim_a*dim_b)-dimensional square matrix over one factor.
ComplexMatrix partial_trace(const ComplexMatrix& ab, std::size_t dim_a, std::size_t dim_b,
                            Keep keep);

/// Column vector |psi><psi| as a matrix.
ComplexMatrix outer(const std::vector<cplx>& psi, const std::vector<cplx>& phi);

/// Pauli matrices and friends, used all over the tests and scenarios.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qmetro
