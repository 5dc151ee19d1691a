#include "support/spin_oracles.hpp"

#include <cmath>

#include "qmetro/abstention.hpp"

namespace qmetro::oracles {

ComplexMatrix qubit_state(double r, double theta, double phi) {
  const double nx = std::sin(theta) * std::cos(phi);
  const double ny = std::sin(theta) * std::sin(phi);
  const double nz = std::cos(theta);
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.5 * (1.0 + r * nz);
  m(1, 1) = 0.5 * (1.0 - r * nz);
  m(0, 1) = 0.5 * r * cplx(nx, -ny);
  m(1, 0) = 0.5 * r * cplx(nx, ny);
  return m;
}

ComplexMatrix tensor_power(const ComplexMatrix& m, int n) {
  ComplexMatrix out = m;
  for (int i = 1; i < n; ++i) out = kron(out, m);
  return out;
}

TotalSpin total_spin_ops(int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  const ComplexMatrix sx = pauli_x() * cplx(0.5);
  const ComplexMatrix sy = pauli_y() * cplx(0.5);
  const ComplexMatrix sz = pauli_z() * cplx(0.5);

  auto embed = [&](const ComplexMatrix& s, int site) {
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (int i = 0; i < n_qubits; ++i)
      out = kron(out, i == site ? s : ComplexMatrix::identity(2));
    return out;
  };

  TotalSpin ops{ComplexMatrix(dim, dim), ComplexMatrix(dim, dim), ComplexMatrix(dim, dim),
                ComplexMatrix(dim, dim)};
  for (int site = 0; site < n_qubits; ++site) {
    ops.jx += embed(sx, site);
    ops.jy += embed(sy, site);
    ops.jz += embed(sz, site);
  }
  ops.jsq = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
  return ops;
}

ComplexMatrix sector_projector(int n_qubits, int twice_j) {
  const TotalSpin ops = total_spin_ops(n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  auto casimir = [](int tj) {
    const double j = 0.5 * static_cast<double>(tj);
    return j * (j + 1.0);
  };
  ComplexMatrix proj = ComplexMatrix::identity(dim);
  for (int tj = twice_j_min(n_qubits); tj <= n_qubits; tj += 2) {
    if (tj == twice_j) continue;
    const double num = casimir(tj);
    const double den = casimir(twice_j) - casimir(tj);
    proj = proj * ((ops.jsq - ComplexMatrix::identity(dim) * cplx(num)) * cplx(1.0 / den));
  }
  return proj;
}

ComplexMatrix top_weight_projector(int n_qubits, int twice_j) {
  ComplexMatrix proj = sector_projector(n_qubits, twice_j);
  const std::size_t dim = std::size_t{1} << n_qubits;
  // J_z is diagonal in the computational basis: twice the eigenvalue of a
  // basis state is N minus twice its population of down spins.
  const std::size_t want_ones = static_cast<std::size_t>((n_qubits - twice_j) / 2);
  for (std::size_t col = 0; col < dim; ++col) {
    if (static_cast<std::size_t>(__builtin_popcountll(col)) == want_ones) continue;
    for (std::size_t row = 0; row < dim; ++row) proj(row, col) = 0.0;
  }
  return proj;
}

double brute_sector_prob(int n_qubits, double r, int twice_j) {
  const ComplexMatrix rho = tensor_power(qubit_state(r, 0.0, 0.0), n_qubits);
  return (sector_projector(n_qubits, twice_j) * rho).trace().real();
}

double brute_sector_mean_fidelity(int n_qubits, double r, int twice_j, int theta_order,
                                  int phi_points) {
  const double p_j = brute_sector_prob(n_qubits, r, twice_j);
  const ComplexMatrix q_proj = top_weight_projector(n_qubits, twice_j);

  std::vector<double> nodes, weights;
  gauss_legendre(theta_order, nodes, weights);

  // Fbar_j = (2j+1) / (4 pi p_j) Int dn (1+cos th)/2 Tr[rho(n)^(x)N Q_j].
  double integral = 0.0;
  const double two_pi = 6.283185307179586476925287;
  for (int q = 0; q < theta_order; ++q) {
    const double u = nodes[q];
    const double theta = std::acos(u);
    double phi_avg = 0.0;
    for (int m = 0; m < phi_points; ++m) {
      const double phi = two_pi * static_cast<double>(m) / static_cast<double>(phi_points);
      const ComplexMatrix rho_n = tensor_power(qubit_state(r, theta, phi), n_qubits);
      phi_avg += (rho_n * q_proj).trace().real();
    }
    phi_avg /= static_cast<double>(phi_points);
    integral += weights[q] * 0.5 * (1.0 + u) * phi_avg * two_pi;
  }
  return static_cast<double>(twice_j + 1) / (4.0 * M_PI * p_j) * integral;
}

}  // namespace qmetro::oracles
