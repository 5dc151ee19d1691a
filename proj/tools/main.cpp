// qmetro: post-selection Fisher-information checks, tail-bound gambles,
// abstention fidelity tables, and estimator experiments, as reproducible
// CSV/JSON reports.
//
// Exit codes: 0 success, 1 input error, 2 inequality violation,
// 3 numerical-convergence failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmetro/abstention.hpp"
#include "qmetro/estimation.hpp"
#include "qmetro/gamble.hpp"
#include "qmetro/parallel.hpp"
#include "qmetro/postselect.hpp"
#include "qmetro/report.hpp"
#include "qmetro/scenario.hpp"
#include "qmetro/version.hpp"

namespace {

using namespace qmetro;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitViolation = 2;
constexpr int kExitNumerics = 3;

double g_fd_step_override = 0.0;  // 0 keeps each scenario's own step

Scenario load_scenario_cli(const std::string& name, std::uint64_t seed) {
  Scenario s = load_scenario(name, seed);
  if (g_fd_step_override > 0.0) s.fd_step = g_fd_step_override;
  return s;
}

std::vector<std::uint64_t> parse_range(const std::string& spec) {
  // "50", "10..200", or "10..200..5"
  std::vector<std::uint64_t> out;
  const auto first_dots = spec.find("..");
  if (first_dots == std::string::npos) {
    out.push_back(std::stoull(spec));
    return out;
  }
  const std::uint64_t lo = std::stoull(spec.substr(0, first_dots));
  std::string rest = spec.substr(first_dots + 2);
  std::uint64_t step = 1;
  const auto second_dots = rest.find("..");
  if (second_dots != std::string::npos) {
    step = std::stoull(rest.substr(second_dots + 2));
    rest = rest.substr(0, second_dots);
  }
  const std::uint64_t hi = std::stoull(rest);
  if (step == 0 || hi < lo) throw CLI::ValidationError("range", "bad range spec: " + spec);
  for (std::uint64_t v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

void emit(const Report& report, const std::string& format, const std::string& output_path) {
  const std::string text = format == "json" ? to_json(report) : to_csv(report);
  if (output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::OutOfRange, "cannot open output file: " + output_path);
    out << text;
  }
}

std::string status_name(GambleStatus s) {
  return s == GambleStatus::NotABet ? "not_a_bet" : "ok";
}

void chain_row(Report& report, std::uint64_t instance, std::uint64_t inst_seed, std::size_t dim,
               std::size_t outcomes, double x, const ChainWitness& w) {
  const FisherChain& c = w.chain;
  report.rows.push_back({
      std::to_string(instance),
      std::to_string(inst_seed),
      std::to_string(dim),
      std::to_string(outcomes),
      format_g17(x),
      format_g17(c.i_rho),
      format_g17(c.i_joint),
      format_g17(c.i_lumped),
      format_g17(c.i_conditioned),
      format_g17(c.success_prob),
      format_g17(c.weighted_conditioned),
      format_g17(c.margins[0]),
      format_g17(c.margins[1]),
      format_g17(c.margins[2]),
      c.ordered_ok ? "1" : "0",
      format_g17(w.lumped.i_cl_outcomes),
      format_g17(w.lumped.avg_conditional_qfi),
      format_g17(w.lumped.binary_i_cl),
  });
}

int run_verify(const std::string& scenario_name, bool random_mode, std::uint64_t instances,
               std::size_t max_dim, std::size_t max_outcomes, std::size_t max_kraus,
               std::uint64_t seed, const std::string& format, const std::string& output) {
  Report report;
  report.command = "verify";
  report.seed = seed;
  report.columns = {"instance",      "inst_seed",   "dim",
                    "outcomes",      "x",           "qfi_input",
                    "qfi_joint",     "qfi_lumped",  "qfi_conditioned",
                    "p_success",     "weighted_conditioned",
                    "margin_input_joint", "margin_joint_lumped", "margin_lumped_weighted",
                    "ordered",       "icl_outcomes", "avg_conditional_qfi",
                    "binary_icl"};

  std::uint64_t violations = 0;
  std::vector<double> worst(3, std::numeric_limits<double>::infinity());

  if (random_mode) {
    RandomInstanceSpec spec;
    spec.max_dim = max_dim;
    spec.max_outcomes = max_outcomes;
    spec.max_kraus = max_kraus;
    std::vector<ChainWitness> results(instances);
    std::vector<std::uint64_t> inst_seeds(instances);
    std::vector<VerifyInstance> insts;
    insts.reserve(instances);
    for (std::uint64_t i = 0; i < instances; ++i) {
      inst_seeds[i] = Prng(seed).substream(i).next_u64();
      insts.push_back(random_instance(spec, inst_seeds[i]));
    }
    parallel_for(instances, [&](std::size_t i) {
      results[i] = fisher_chain_detailed(insts[i].family, insts[i].selection, insts[i].x);
    });
    for (std::uint64_t i = 0; i < instances; ++i) {
      chain_row(report, i, inst_seeds[i], insts[i].dim, insts[i].num_outcomes, insts[i].x,
                results[i]);
      if (!results[i].chain.ordered_ok) ++violations;
      for (int m = 0; m < 3; ++m)
        worst[m] = std::min(worst[m], results[i].chain.margins[m]);
    }
  } else {
    Scenario s = load_scenario_cli(scenario_name, seed);
    if (!s.selection)
      throw Error(ErrorCode::InvalidScenario, "verify needs a scenario with a selection");
    report.scenario_hash = s.hash;
    ParametrizedState family = s.family();
    ChainWitness w = fisher_chain_detailed(family, *s.selection, s.x);
    chain_row(report, 0, seed, s.selection->dim(), s.selection->num_outcomes(), s.x, w);
    if (!w.chain.ordered_ok) ++violations;
    for (int m = 0; m < 3; ++m) worst[m] = w.chain.margins[m];
  }

  report.summary.emplace_back("instances", std::to_string(report.rows.size()));
  report.summary.emplace_back("violations", std::to_string(violations));
  report.summary.emplace_back("worst_margin_input_joint", format_g17(worst[0]));
  report.summary.emplace_back("worst_margin_joint_lumped", format_g17(worst[1]));
  report.summary.emplace_back("worst_margin_lumped_weighted", format_g17(worst[2]));
  emit(report, format, output);
  return violations == 0 ? kExitOk : kExitViolation;
}

int run_gamble(double p, double i_rho, double i_sigma, const std::string& n_range,
               std::uint64_t reps, std::uint64_t seed, const std::string& format,
               const std::string& output) {
  Report report;
  report.command = "gamble";
  report.seed = seed;
  report.columns = {"n",        "p_success", "i_rho",    "i_sigma",  "mu",
                    "delta",    "status",    "standard", "tight",    "threshold",
                    "exact",    "empirical", "wilson_hw", "samples"};
  const std::vector<std::uint64_t> ns = parse_range(n_range);
  std::vector<ChernoffReport> results(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    GambleSetup setup{ns[i], p, i_rho, i_sigma};
    results[i] = simulate_gamble(setup, reps, Prng(seed).substream(i).next_u64());
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const ChernoffReport& r = results[i];
    report.rows.push_back({std::to_string(ns[i]), format_g17(p), format_g17(i_rho),
                           format_g17(i_sigma), format_g17(r.mu), format_g17(r.delta),
                           status_name(r.status), format_g17(r.standard_bound),
                           format_g17(r.tight_bound), std::to_string(r.threshold),
                           format_g17(r.exact_tail), format_g17(r.empirical),
                           format_g17(r.ci95_half_width), std::to_string(r.samples)});
  }
  emit(report, format, output);
  return kExitOk;
}

int run_abstain(int n_qubits, double purity, double threshold_j, std::uint64_t m_reps,
                std::uint64_t reps, std::uint64_t seed, const std::string& format,
                const std::string& output) {
  const int twice_jstar = static_cast<int>(std::lround(2.0 * threshold_j));
  Report report;
  report.command = "abstain";
  report.seed = seed;
  report.columns = {"twice_j", "j", "multiplicity", "prob", "mean_fidelity", "favorable"};
  const AbstentionModel model = abstention_model(n_qubits, purity, twice_jstar);
  for (const SectorRow& row : model.sectors) {
    report.rows.push_back({std::to_string(row.twice_j),
                           format_g17(0.5 * static_cast<double>(row.twice_j)),
                           std::to_string(row.multiplicity), format_g17(row.prob),
                           format_g17(row.mean_fidelity),
                           row.twice_j > twice_jstar ? "1" : "0"});
  }
  const FidelityChain chain = fidelity_chain(n_qubits, purity, twice_jstar);
  report.summary.emplace_back("f_bar", format_g17(chain.f_bar));
  report.summary.emplace_back("f_check", format_g17(chain.f_check));
  report.summary.emplace_back("f_cross", format_g17(chain.f_cross));
  report.summary.emplace_back("p_check", format_g17(chain.p_check));
  report.summary.emplace_back("p_cross", format_g17(chain.p_cross));
  report.summary.emplace_back("guess_term", format_g17(chain.guess_term));
  report.summary.emplace_back("tail", format_g17(chain.tail));
  if (m_reps > 0) {
    const ChernoffReport g =
        repeated_protocol_gamble(n_qubits, purity, twice_jstar, m_reps, reps, seed);
    report.summary.emplace_back("gamble_m", std::to_string(m_reps));
    report.summary.emplace_back("gamble_status", status_name(g.status));
    report.summary.emplace_back("gamble_delta", format_g17(g.delta));
    report.summary.emplace_back("gamble_standard", format_g17(g.standard_bound));
    report.summary.emplace_back("gamble_tight", format_g17(g.tight_bound));
    report.summary.emplace_back("gamble_exact", format_g17(g.exact_tail));
    report.summary.emplace_back("gamble_empirical", format_g17(g.empirical));
  }
  emit(report, format, output);
  return kExitOk;
}

void mle_row(Report& report, const std::string& arm, const ExperimentReport& r) {
  report.rows.push_back({arm, format_g17(r.x_true), std::to_string(r.n_trials),
                         std::to_string(r.repetitions), format_g17(r.mse), format_g17(r.crb),
                         format_g17(r.ratio), std::to_string(r.boundary_hits),
                         r.degenerate_boundary ? "degenerate_boundary" : "-",
                         std::to_string(r.zero_survivor_reps), format_g17(r.mean_survivors)});
}

MleOptions options_from_scenario(const Scenario& s) {
  if (!s.interval)
    throw Error(ErrorCode::InvalidScenario, "scenario does not declare an identifiable interval");
  MleOptions opts;
  opts.x_min = (*s.interval)[0];
  opts.x_max = (*s.interval)[1];
  return opts;
}

int run_mle(const std::string& scenario_name, std::uint64_t n_trials, std::uint64_t reps,
            double x_true, bool x_given, std::uint64_t seed, const std::string& format,
            const std::string& output) {
  Scenario s = load_scenario_cli(scenario_name, seed);
  if (!s.povm) throw Error(ErrorCode::InvalidScenario, "mle needs a scenario with a povm");
  const MleOptions opts = options_from_scenario(s);
  const double x0 = x_given ? x_true : s.x;
  ParametrizedState family = s.family();
  const ExperimentReport r = simulate_mle(family, *s.povm, x0, n_trials, reps, seed, opts);
  Report report;
  report.command = "mle";
  report.seed = seed;
  report.scenario_hash = s.hash;
  report.columns = {"arm",  "x_true", "n",     "reps",          "mse",
                    "crb",  "ratio",  "boundary_hits", "flags", "zero_survivor_reps",
                    "mean_survivors"};
  mle_row(report, "single", r);
  emit(report, format, output);
  return kExitOk;
}

int run_compare(const std::string& scenario_name, std::uint64_t n_trials, std::uint64_t reps,
                double x_true, bool x_given, std::uint64_t seed, const std::string& format,
                const std::string& output) {
  Scenario s = load_scenario_cli(scenario_name, seed);
  if (!s.povm || !s.selection)
    throw Error(ErrorCode::InvalidScenario, "compare needs a scenario with selection and povm");
  const MleOptions opts = options_from_scenario(s);
  const double x0 = x_given ? x_true : s.x;
  ParametrizedState family = s.family();
  const PairedExperiment pe =
      gamble_mse_experiment(family, *s.selection, *s.povm, x0, n_trials, reps, seed, opts);
  Report report;
  report.command = "compare";
  report.seed = seed;
  report.scenario_hash = s.hash;
  report.columns = {"arm",  "x_true", "n",     "reps",          "mse",
                    "crb",  "ratio",  "boundary_hits", "flags", "zero_survivor_reps",
                    "mean_survivors"};
  mle_row(report, "deterministic", pe.deterministic);
  mle_row(report, "probabilistic", pe.probabilistic);
  report.summary.emplace_back("mse_ratio_prob_over_det",
                              format_g17(pe.probabilistic.mse / pe.deterministic.mse));
  emit(report, format, output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmetro: post-selected metrology bounds and experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::uint64_t seed = kDefaultSeed;
  std::string format = "csv";
  std::string output;
  app.add_option("--seed", seed, "RNG seed (default fixed for reproducibility)");
  app.add_option("--format", format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", output, "Write the report to a file instead of stdout");
  double fd_step_override = 0.0;
  app.add_option("--fd-step", fd_step_override,
                 "Override the scenario's finite-difference step (tolerance knob)");

  auto* verify = app.add_subcommand("verify", "Fisher-information chain checks");
  verify->fallthrough();
  std::string verify_scenario;
  bool verify_random = false;
  std::uint64_t instances = 100;
  std::size_t max_dim = 4, max_outcomes = 3, max_kraus = 2;
  verify->add_option("--scenario", verify_scenario, "Scenario name or path");
  verify->add_flag("--random", verify_random, "Sweep random instances instead of a scenario");
  verify->add_option("--instances", instances, "Number of random instances");
  verify->add_option("--dim", max_dim, "Max Hilbert dimension of random instances");
  verify->add_option("--outcomes", max_outcomes, "Max selection outcomes");
  verify->add_option("--max-kraus", max_kraus, "Max Kraus operators per outcome");

  auto* gamble = app.add_subcommand("gamble", "Chernoff bounds vs exact and simulated tails");
  gamble->fallthrough();
  double gp = 0.5, girho = 1.0, gisigma = 1.0;
  std::string grange = "10..200..10";
  std::uint64_t greps = 100000;
  gamble->add_option("--p", gp, "Success probability p(ok)")->required();
  gamble->add_option("--irho", girho, "Input-state information")->required();
  gamble->add_option("--isigma", gisigma, "Conditioned-state information")->required();
  gamble->add_option("--n", grange, "Trial counts, e.g. 10..200 or 10..200..5");
  gamble->add_option("--reps", greps, "Monte Carlo repetitions per grid point");

  auto* abstain = app.add_subcommand("abstain", "Sector table and fidelity chain");
  abstain->fallthrough();
  int n_qubits = 4;
  double purity = 0.5, threshold = 0.0;
  std::uint64_t m_reps = 0, abstain_reps = 100000;
  abstain->add_option("--n-qubits", n_qubits, "Number of qubits")->required();
  abstain->add_option("--purity", purity, "Bloch length r in [0, 1]")->required();
  abstain->add_option("--threshold", threshold, "Abstention threshold j* (half-integers allowed)")
      ->required();
  abstain->add_option("--m-reps", m_reps, "Also gamble on M protocol repetitions");
  abstain->add_option("--reps", abstain_reps, "Monte Carlo repetitions for the gamble");

  auto* mle = app.add_subcommand("mle", "Maximum-likelihood MSE against the Cramer-Rao bound");
  mle->fallthrough();
  std::string mle_scenario = "binomial_phase";
  std::uint64_t mle_n = 100, mle_reps = 2000;
  double mle_x = 0.0;
  mle->add_option("--scenario", mle_scenario, "Scenario with povm and interval");
  mle->add_option("--n", mle_n, "Trials per repetition");
  mle->add_option("--reps", mle_reps, "Repetitions");
  auto* mle_x_opt = mle->add_option("--x-true", mle_x, "True parameter (default: scenario x)");

  auto* compare = app.add_subcommand("compare", "Probabilistic vs deterministic MSE");
  compare->fallthrough();
  std::string cmp_scenario = "qubit_phase_wasteful";
  std::uint64_t cmp_n = 100, cmp_reps = 500;
  double cmp_x = 0.0;
  compare->add_option("--scenario", cmp_scenario, "Scenario with selection and povm");
  compare->add_option("--n", cmp_n, "Trials per repetition");
  compare->add_option("--reps", cmp_reps, "Repetitions");
  auto* cmp_x_opt = compare->add_option("--x-true", cmp_x, "True parameter (default: scenario x)");

  auto* list = app.add_subcommand("scenario-list", "List shipped scenarios");
  list->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }
  g_fd_step_override = fd_step_override;

  try {
    if (verify->parsed()) {
      if (verify_random == !verify_scenario.empty())
        throw Error(ErrorCode::InvalidScenario, "verify needs exactly one of --scenario, --random");
      return run_verify(verify_scenario, verify_random, instances, max_dim, max_outcomes,
                        max_kraus, seed, format, output);
    }
    if (gamble->parsed())
      return run_gamble(gp, girho, gisigma, grange, greps, seed, format, output);
    if (abstain->parsed())
      return run_abstain(n_qubits, purity, threshold, m_reps, abstain_reps, seed, format, output);
    if (mle->parsed())
      return run_mle(mle_scenario, mle_n, mle_reps, mle_x, !mle_x_opt->empty(), seed, format,
                     output);
    if (compare->parsed())
      return run_compare(cmp_scenario, cmp_n, cmp_reps, cmp_x, !cmp_x_opt->empty(), seed, format,
                         output);
    if (list->parsed()) {
      for (const std::string& name : list_scenarios()) std::cout << name << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConvergenceFailure ? kExitNumerics : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
