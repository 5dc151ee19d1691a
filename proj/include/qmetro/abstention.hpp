#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qmetro/gamble.hpp"

namespace qmetro {

/// Angular momenta are carried as twice their value (integers), so sector
/// keys are exact for even and odd qubit numbers alike.
inline int twice_j_min(int n_qubits) { return n_qubits % 2; }
inline int twice_j_max(int n_qubits) { return n_qubits; }

inline constexpr int kDefaultQuadratureOrder = 64;
inline constexpr int kMaxAbstentionQubits = 14;

struct SectorInfo {
  int twice_j = 0;
  std::uint64_t multiplicity = 0;  // number of spin-j copies in (C^2)^(x)N
  double prob = 0.0;               // p_j, independent of the true direction
};

/// Catalan-triangle multiplicity of the spin-j irrep in N qubits.
std::uint64_t sector_multiplicity(int n_qubits, int twice_j);

/// Sector probabilities for N copies of the qubit state with Bloch length r.
/// Writing the state as exp(2 eta Jz)/(2 cosh eta)^N with tanh(eta) = r makes
/// p_j = n_j * sum_{m=-j..j} e^{2 eta m} / (2 cosh eta)^N; r = 1 is the
/// eta -> infinity limit where only the top sector survives.
std::vector<SectorInfo> sector_table(int n_qubits, double purity);

/// Mean estimation fidelity of the spin-coherent-state measurement on the
/// spin-j conditional state (diagonal weights proportional to e^{2 eta m}).
/// Reduces to a 1-D Gauss-Legendre integral; exact for the polynomial
/// integrand once the order covers the degree.
double sector_mean_fidelity(int twice_j, double purity,
                            int quadrature_order = kDefaultQuadratureOrder);

/// 1/2 (1 + n_est . n_true) for unit vectors.
double fidelity(const std::array<double, 3>& n_est, const std::array<double, 3>& n_true);

struct SectorRow {
  int twice_j = 0;
  std::uint64_t multiplicity = 0;
  double prob = 0.0;
  double mean_fidelity = 0.0;
};

struct AbstentionModel {
  int n_qubits = 0;
  double purity = 0.0;
  int twice_j_threshold = 0;
  std::vector<SectorRow> sectors;
};

AbstentionModel abstention_model(int n_qubits, double purity, int twice_j_threshold,
                                 int quadrature_order = kDefaultQuadratureOrder);

/// Mean-fidelity split across the abstention threshold. Favorable sectors are
/// those with twice_j > twice_j_threshold; a threshold below twice_j_min
/// means "keep everything". Conditional fidelities of empty (or zero
/// probability) branches default to the random-guess value 1/2.
struct FidelityChain {
  double f_bar = 0.0;      // sum_j p_j Fbar_j
  double f_check = 0.0;    // favorable conditional mean fidelity
  double f_cross = 0.0;    // unfavorable conditional mean fidelity
  double p_check = 0.0;
  double p_cross = 0.0;
  double guess_term = 0.0;  // p_cross/2 + p_check * f_check
  double tail = 0.0;        // p_check * f_check
};

FidelityChain fidelity_chain(int n_qubits, double purity, int twice_j_threshold,
                             int quadrature_order = kDefaultQuadratureOrder);

/// Repeat the N-qubit protocol M times and bet that the favorable rounds
/// alone outscore the unconditional mean fidelity budget:
/// M_ok * f_check > M * f_bar (strictly).
ChernoffReport repeated_protocol_gamble(int n_qubits, double purity, int twice_j_threshold,
                                        std::uint64_t m_rounds, std::uint64_t reps,
                                        std::uint64_t rng_seed,
                                        int quadrature_order = kDefaultQuadratureOrder);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace qmetro
