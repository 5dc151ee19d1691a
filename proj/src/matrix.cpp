#include "qmetro/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace qmetro {

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows.begin()->size();
  if (rows_ == 0 || cols_ == 0) fail(ErrorCode::DimensionMismatch, "matrix dimensions must be >= 1");
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) fail(ErrorCode::DimensionMismatch, "ragged initializer rows");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorCode::DimensionMismatch, "matrix addition shape mismatch");
  ComplexMatrix out = *this;
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += other.entries_[i];
  return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorCode::DimensionMismatch, "matrix subtraction shape mismatch");
  ComplexMatrix out = *this;
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] -= other.entries_[i];
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorCode::DimensionMismatch, "matrix addition shape mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorCode::DimensionMismatch, "matrix subtraction shape mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& other) const {
  if (cols_ != other.rows_) fail(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
  ComplexMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const cplx aik = (*this)(i, k);
      if (aik == cplx{}) continue;
      const cplx* brow = &other.entries_[k * other.cols_];
      cplx* orow = &out.entries_[i * other.cols_];
      for (std::size_t j = 0; j < other.cols_; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

ComplexMatrix ComplexMatrix::operator*(cplx scalar) const {
  ComplexMatrix out = *this;
  for (auto& e : out.entries_) e *= scalar;
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

cplx ComplexMatrix::trace() const {
  if (!is_square()) fail(ErrorCode::NotSquare, "trace of non-square matrix");
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e);
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
  if (!is_square()) fail(ErrorCode::NotSquare, "hermiticity defect of non-square matrix");
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return m;
}

bool ComplexMatrix::all_finite() const {
  for (const auto& e : entries_)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}

ComplexMatrix ComplexMatrix::hermitized() const {
  if (!is_square()) fail(ErrorCode::NotSquare, "hermitized() needs a square matrix");
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dim) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows > max_dim || cols > max_dim)
    fail(ErrorCode::DimensionOverflow, "kron result exceeds configured max dimension");
  ComplexMatrix out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& ab, std::size_t dim_a, std::size_t dim_b,
                            Keep keep) {
  if (!ab.is_square() || ab.rows() != dim_a * dim_b)
    fail(ErrorCode::DimensionMismatch, "partial_trace dimension mismatch");
  if (keep == Keep::A) {
    ComplexMatrix out(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t j = 0; j < dim_a; ++j) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < dim_b; ++k) s += ab(i * dim_b + k, j * dim_b + k);
        out(i, j) = s;
      }
    return out;
  }
  ComplexMatrix out(dim_b, dim_b);
  for (std::size_t i = 0; i < dim_b; ++i)
    for (std::size_t j = 0; j < dim_b; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < dim_a; ++k) s += ab(k * dim_b + i, k * dim_b + j);
      out(i, j) = s;
    }
  return out;
}

ComplexMatrix outer(const std::vector<cplx>& psi, const std::vector<cplx>& phi) {
  ComplexMatrix out(psi.size(), phi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < phi.size(); ++j) out(i, j) = psi[i] * std::conj(phi[j]);
  return out;
}

ComplexMatrix pauli_x() { return ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix pauli_y() { return ComplexMatrix{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}}; }
ComplexMatrix pauli_z() { return ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}; }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::DimensionMismatch, "max_abs_diff shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

}  // namespace qmetro
