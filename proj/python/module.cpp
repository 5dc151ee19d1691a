// Python bindings for the main operations: eigensolving, states, Fisher
// information, the post-selection chain, tail bounds, the abstention
// protocol, and estimator experiments. Matrices cross the boundary as
// complex128 numpy arrays.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmetro/abstention.hpp"
#include "qmetro/estimation.hpp"
#include "qmetro/fisher.hpp"
#include "qmetro/gamble.hpp"
#include "qmetro/postselect.hpp"
#include "qmetro/version.hpp"

namespace py = pybind11;
using namespace qmetro;

namespace {

ComplexMatrix to_matrix(const py::array_t<std::complex<double>>& a) {
  const auto buf = a.request();
  if (buf.ndim != 2) throw py::value_error("expected a 2-D complex array");
  ComplexMatrix m(buf.shape[0], buf.shape[1]);
  const auto view = a.unchecked<2>();
  for (py::ssize_t i = 0; i < buf.shape[0]; ++i)
    for (py::ssize_t j = 0; j < buf.shape[1]; ++j) m(i, j) = view(i, j);
  return m;
}

py::array_t<std::complex<double>> to_array(const ComplexMatrix& m) {
  py::array_t<std::complex<double>> a({m.rows(), m.cols()});
  auto view = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) view(i, j) = m(i, j);
  return a;
}

using PyMatrix = py::array_t<std::complex<double>>;

SelectionMeasurement selection_from(const std::vector<std::vector<PyMatrix>>& outcomes,
                                    const std::vector<std::size_t>& favorable) {
  std::vector<std::vector<ComplexMatrix>> kraus;
  for (const auto& outcome : outcomes) {
    std::vector<ComplexMatrix> list;
    for (const auto& m : outcome) list.push_back(to_matrix(m));
    kraus.push_back(std::move(list));
  }
  return SelectionMeasurement(std::move(kraus),
                              std::set<std::size_t>(favorable.begin(), favorable.end()));
}

POVM povm_from(const std::vector<PyMatrix>& elements) {
  std::vector<ComplexMatrix> els;
  for (const auto& m : elements) els.push_back(to_matrix(m));
  return POVM(std::move(els));
}

py::dict chain_to_dict(const FisherChain& c) {
  py::dict d;
  d["qfi_input"] = c.i_rho;
  d["qfi_joint"] = c.i_joint;
  d["qfi_lumped"] = c.i_lumped;
  d["qfi_conditioned"] = c.i_conditioned;
  d["success_prob"] = c.success_prob;
  d["weighted_conditioned"] = c.weighted_conditioned;
  d["margins"] = c.margins;
  d["ordered"] = c.ordered_ok;
  return d;
}

py::dict report_to_dict(const ChernoffReport& r) {
  py::dict d;
  d["status"] = r.status == GambleStatus::Ok ? "ok" : "not_a_bet";
  d["mu"] = r.mu;
  d["delta"] = r.delta;
  d["standard_bound"] = r.standard_bound;
  d["tight_bound"] = r.tight_bound;
  d["threshold"] = r.threshold;
  d["exact_tail"] = r.exact_tail;
  d["empirical"] = r.empirical;
  d["ci95_half_width"] = r.ci95_half_width;
  d["samples"] = r.samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(qmetro, m) {
  m.doc() = "Post-selected metrology bounds: Fisher information, tail bounds, abstention";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<Error>(m, "QmetroError");

  m.def(
      "hermitian_eig",
      [](const PyMatrix& a, double tol) {
        const HermitianEig eig = hermitian_eig(to_matrix(a), tol);
        return py::make_tuple(eig.eigenvalues, to_array(eig.eigenvectors));
      },
      py::arg("matrix"), py::arg("hermiticity_tol") = kDefaultHermiticityTol,
      "Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix");

  m.def(
      "kron", [](const PyMatrix& a, const PyMatrix& b) { return to_array(kron(to_matrix(a), to_matrix(b))); },
      py::arg("a"), py::arg("b"));

  m.def(
      "partial_trace",
      [](const PyMatrix& ab, std::size_t dim_a, std::size_t dim_b, const std::string& keep) {
        return to_array(partial_trace(to_matrix(ab), dim_a, dim_b,
                                      keep == "A" ? Keep::A : Keep::B));
      },
      py::arg("ab"), py::arg("dim_a"), py::arg("dim_b"), py::arg("keep") = "A");

  m.def(
      "unitary_from_generator",
      [](const PyMatrix& g, double x) { return to_array(unitary_from_hermitian_generator(to_matrix(g), x)); },
      py::arg("generator"), py::arg("x"));

  m.def(
      "random_density",
      [](std::size_t dim, std::size_t rank, std::uint64_t seed) {
        return to_array(random_density(dim, rank, seed).mat());
      },
      py::arg("dim"), py::arg("rank"), py::arg("seed"));

  m.def(
      "sld",
      [](const PyMatrix& rho, const PyMatrix& drho, double support_tol) {
        const SldResult r = sld(DensityMatrix(to_matrix(rho)), to_matrix(drho), support_tol);
        py::dict d;
        d["sld"] = to_array(r.sld);
        d["qfi"] = r.qfi;
        d["support_rank"] = r.support_rank;
        d["outside_support"] = r.outside_support;
        return d;
      },
      py::arg("rho"), py::arg("drho"), py::arg("support_tol") = kDefaultSupportTol,
      "Symmetric logarithmic derivative and Fisher information of (rho, drho)");

  m.def(
      "qfi_unitary",
      [](const PyMatrix& g, const PyMatrix& base, double x) {
        return qfi(ParametrizedState::analytic_unitary(to_matrix(g),
                                                       DensityMatrix(to_matrix(base))),
                   x);
      },
      py::arg("generator"), py::arg("base"), py::arg("x"),
      "Quantum Fisher information of exp(-ixG) base exp(ixG)");

  m.def("pure_qfi", &pure_qfi, py::arg("psi"), py::arg("dpsi"));

  m.def("classical_fisher", &classical_fisher, py::arg("probs"), py::arg("dprobs"),
        py::arg("zero_tol") = kDefaultZeroTol);

  m.def(
      "povm_classical_fisher",
      [](const PyMatrix& g, const PyMatrix& base, const std::vector<PyMatrix>& povm, double x) {
        return povm_classical_fisher(
            ParametrizedState::analytic_unitary(to_matrix(g), DensityMatrix(to_matrix(base))),
            povm_from(povm), x);
      },
      py::arg("generator"), py::arg("base"), py::arg("povm"), py::arg("x"));

  m.def(
      "fisher_chain",
      [](const PyMatrix& g, const PyMatrix& base,
         const std::vector<std::vector<PyMatrix>>& outcomes,
         const std::vector<std::size_t>& favorable, double x, double fd_step) {
        const ParametrizedState family = ParametrizedState::analytic_unitary(
            to_matrix(g), DensityMatrix(to_matrix(base)), fd_step);
        return chain_to_dict(fisher_chain(family, selection_from(outcomes, favorable), x));
      },
      py::arg("generator"), py::arg("base"), py::arg("outcomes"), py::arg("favorable"),
      py::arg("x"), py::arg("fd_step") = kDefaultFdStep,
      "Ordered chain of Fisher informations across the selection record");

  m.def("chernoff_standard", &chernoff_standard, py::arg("mu"), py::arg("delta"));
  m.def("chernoff_tight", &chernoff_tight, py::arg("mu"), py::arg("delta"));
  m.def("binomial_tail", &binomial_tail, py::arg("n"), py::arg("p"), py::arg("k0"));

  m.def(
      "simulate_gamble",
      [](std::uint64_t n, double p, double i_rho, double i_sigma, std::uint64_t reps,
         std::uint64_t seed) {
        return report_to_dict(simulate_gamble({n, p, i_rho, i_sigma}, reps, seed));
      },
      py::arg("n_trials"), py::arg("p_success"), py::arg("i_rho"), py::arg("i_sigma"),
      py::arg("reps"), py::arg("seed"));

  m.def(
      "sector_table",
      [](int n_qubits, double purity) {
        py::list rows;
        for (const SectorInfo& s : sector_table(n_qubits, purity)) {
          py::dict d;
          d["twice_j"] = s.twice_j;
          d["multiplicity"] = s.multiplicity;
          d["prob"] = s.prob;
          rows.append(d);
        }
        return rows;
      },
      py::arg("n_qubits"), py::arg("purity"));

  m.def(
      "sector_mean_fidelity",
      [](double j, double purity, int order) {
        return sector_mean_fidelity(static_cast<int>(std::lround(2.0 * j)), purity, order);
      },
      py::arg("j"), py::arg("purity"), py::arg("quadrature_order") = kDefaultQuadratureOrder);

  m.def(
      "fidelity_chain",
      [](int n_qubits, double purity, double j_threshold) {
        const FidelityChain c = fidelity_chain(
            n_qubits, purity, static_cast<int>(std::lround(2.0 * j_threshold)));
        py::dict d;
        d["f_bar"] = c.f_bar;
        d["f_check"] = c.f_check;
        d["f_cross"] = c.f_cross;
        d["p_check"] = c.p_check;
        d["p_cross"] = c.p_cross;
        d["guess_term"] = c.guess_term;
        d["tail"] = c.tail;
        return d;
      },
      py::arg("n_qubits"), py::arg("purity"), py::arg("j_threshold"));

  m.def(
      "repeated_protocol_gamble",
      [](int n_qubits, double purity, double j_threshold, std::uint64_t m_rounds,
         std::uint64_t reps, std::uint64_t seed) {
        return report_to_dict(repeated_protocol_gamble(
            n_qubits, purity, static_cast<int>(std::lround(2.0 * j_threshold)), m_rounds, reps,
            seed));
      },
      py::arg("n_qubits"), py::arg("purity"), py::arg("j_threshold"), py::arg("m_rounds"),
      py::arg("reps"), py::arg("seed"));

  m.def(
      "normal_rule",
      [](double p, std::uint64_t n) {
        const NormalRule r = normal_rule(p, n);
        return py::make_tuple(r.statistic, r.ok);
      },
      py::arg("p"), py::arg("n_trials"));

  m.def("root_prob_snr", &root_prob_snr, py::arg("snr"), py::arg("p_success"));

  m.def(
      "simulate_mle",
      [](const PyMatrix& g, const PyMatrix& base, const std::vector<PyMatrix>& povm,
         double x_true, std::uint64_t n_trials, std::uint64_t reps, std::uint64_t seed,
         double x_min, double x_max) {
        MleOptions opts;
        opts.x_min = x_min;
        opts.x_max = x_max;
        const ExperimentReport r = simulate_mle(
            ParametrizedState::analytic_unitary(to_matrix(g), DensityMatrix(to_matrix(base))),
            povm_from(povm), x_true, n_trials, reps, seed, opts);
        py::dict d;
        d["mse"] = r.mse;
        d["crb"] = r.crb;
        d["ratio"] = r.ratio;
        d["boundary_hits"] = r.boundary_hits;
        d["degenerate_boundary"] = r.degenerate_boundary;
        return d;
      },
      py::arg("generator"), py::arg("base"), py::arg("povm"), py::arg("x_true"),
      py::arg("n_trials"), py::arg("reps"), py::arg("seed"), py::arg("x_min"),
      py::arg("x_max"));
}
