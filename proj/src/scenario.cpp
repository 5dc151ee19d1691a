#include "qmetro/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef QMETRO_SCENARIO_DIR
#define QMETRO_SCENARIO_DIR "scenarios"
#endif

namespace qmetro {

namespace {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    fail(ErrorCode::InvalidScenario, where + ": expected a nested array matrix");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || row.size() != cols)
      fail(ErrorCode::InvalidScenario, where + ": ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      const json& entry = row.at(c);
      if (!entry.is_array() || entry.size() != 2)
        fail(ErrorCode::InvalidScenario, where + ": entries must be [re, im] pairs");
      m(i, c) = cplx(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return m;
}

std::set<std::size_t> favorable_from_json(const json& j, std::size_t num_outcomes,
                                          const std::string& where) {
  std::set<std::size_t> favorable;
  for (const auto& idx : j) {
    const auto v = idx.get<long long>();
    if (v < 0 || static_cast<std::size_t>(v) >= num_outcomes)
      fail(ErrorCode::InvalidScenario, where + ": favorable index out of range");
    favorable.insert(static_cast<std::size_t>(v));
  }
  return favorable;
}

std::set<std::size_t> random_favorable(std::size_t num_outcomes, Prng& rng) {
  std::set<std::size_t> favorable;
  while (favorable.empty())
    for (std::size_t a = 0; a < num_outcomes; ++a)
      if (rng.next_u64() & 1u) favorable.insert(a);
  return favorable;
}

}  // namespace

ParametrizedState Scenario::family() const {
  if (!generator || !base) fail(ErrorCode::InvalidScenario, "scenario has no state family");
  return ParametrizedState::analytic_unitary(*generator, *base, fd_step);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::string scenario_dir() {
  if (const char* env = std::getenv("QMETRO_SCENARIO_DIR")) return env;
  return QMETRO_SCENARIO_DIR;
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(scenario_dir(), ec)) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

Scenario load_scenario(const std::string& name_or_path, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::path path = name_or_path;
  if (!fs::exists(path)) {
    fs::path in_dir = fs::path(scenario_dir()) / name_or_path;
    if (fs::exists(in_dir)) {
      path = in_dir;
    } else {
      in_dir += ".json";
      if (!fs::exists(in_dir))
        fail(ErrorCode::InvalidScenario, "scenario not found: " + name_or_path);
      path = in_dir;
    }
  }

  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidScenario, "cannot open scenario file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidScenario, "scenario parse error in " + path.string() + ": " + e.what());
  }

  Scenario s;
  try {
    if (doc.value("schema", 0) != 1)
      fail(ErrorCode::InvalidScenario, path.string() + ": unsupported schema version");
    s.name = doc.value("name", path.stem().string());
    s.x = doc.value("x", 0.5);
    s.fd_step = doc.value("fd_step", kDefaultFdStep);
    s.hash = fnv1a_hex(doc.dump());

    Prng rng(seed);
    const json& family = doc.at("family");
    const std::string kind = family.at("kind").get<std::string>();
    if (kind == "analytic_unitary") {
      s.generator = matrix_from_json(family.at("generator"), "family.generator").hermitized();
      s.base = DensityMatrix(matrix_from_json(family.at("base"), "family.base"));
    } else if (kind == "random_unitary") {
      const auto dim = family.at("dim").get<std::size_t>();
      const auto rank = family.value("rank", dim);
      s.generator = random_hermitian(dim, rng.substream(1));
      s.base = random_density(dim, rank, rng.substream(2));
    } else {
      fail(ErrorCode::InvalidScenario, path.string() + ": unknown family kind " + kind);
    }

    if (doc.contains("selection")) {
      const json& selj = doc.at("selection");
      if (selj.value("kind", std::string("explicit")) == "random") {
        const auto outcomes = selj.at("outcomes").get<std::size_t>();
        std::vector<std::size_t> kraus =
            selj.at("kraus_per_outcome").get<std::vector<std::size_t>>();
        Prng fav_rng = rng.substream(4);
        s.selection = random_selection(s.generator->rows(), outcomes, kraus, rng.substream(3),
                                       random_favorable(outcomes, fav_rng));
      } else {
        std::vector<std::vector<ComplexMatrix>> outcomes;
        for (const auto& outcome : selj.at("outcomes")) {
          std::vector<ComplexMatrix> kraus_list;
          for (const auto& m : outcome)
            kraus_list.push_back(matrix_from_json(m, "selection.outcomes"));
          outcomes.push_back(std::move(kraus_list));
        }
        s.selection = SelectionMeasurement(
            std::move(outcomes),
            favorable_from_json(selj.at("favorable"), selj.at("outcomes").size(),
                                "selection.favorable"));
      }
    }

    if (doc.contains("povm")) {
      std::vector<ComplexMatrix> elements;
      for (const auto& m : doc.at("povm")) elements.push_back(matrix_from_json(m, "povm"));
      s.povm = POVM(std::move(elements));
    }

    if (doc.contains("interval")) {
      const json& iv = doc.at("interval");
      if (!iv.is_array() || iv.size() != 2)
        fail(ErrorCode::InvalidScenario, path.string() + ": interval must be [lo, hi]");
      s.interval = {{iv.at(0).get<double>(), iv.at(1).get<double>()}};
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidScenario, "scenario field error in " + path.string() + ": " + e.what());
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  doc["schema"] = 1;
  doc["name"] = s.name;
  doc["x"] = s.x;
  doc["fd_step"] = s.fd_step;
  if (s.generator && s.base) {
    doc["family"] = {{"kind", "analytic_unitary"},
                     {"generator", matrix_to_json(*s.generator)},
                     {"base", matrix_to_json(s.base->mat())}};
  }
  if (s.selection) {
    json outcomes = json::array();
    for (const auto& kraus_list : s.selection->outcomes()) {
      json one = json::array();
      for (const auto& m : kraus_list) one.push_back(matrix_to_json(m));
      outcomes.push_back(std::move(one));
    }
    json favorable = json::array();
    for (std::size_t a : s.selection->favorable()) favorable.push_back(a);
    doc["selection"] = {{"outcomes", std::move(outcomes)}, {"favorable", std::move(favorable)}};
  }
  if (s.povm) {
    json elements = json::array();
    for (const auto& m : s.povm->elements()) elements.push_back(matrix_to_json(m));
    doc["povm"] = std::move(elements);
  }
  if (s.interval) doc["interval"] = json::array({(*s.interval)[0], (*s.interval)[1]});
  return doc.dump(2);
}

VerifyInstance random_instance(const RandomInstanceSpec& spec, std::uint64_t seed) {
  Prng rng(seed);
  const std::size_t dim =
      spec.max_dim <= 2 ? 2 : 2 + rng.next_u64() % (spec.max_dim - 1);
  const std::size_t rank = 1 + rng.next_u64() % dim;
  const std::size_t num_outcomes =
      spec.max_outcomes <= 2 ? 2 : 2 + rng.next_u64() % (spec.max_outcomes - 1);
  std::vector<std::size_t> kraus(num_outcomes);
  for (auto& k : kraus) k = 1 + rng.next_u64() % spec.max_kraus;
  const double x = -1.0 + 2.0 * rng.next_double();

  ComplexMatrix g = random_hermitian(dim, rng.substream(1));
  DensityMatrix base = random_density(dim, rank, rng.substream(2));
  Prng fav_rng = rng.substream(4);
  SelectionMeasurement sel = random_selection(dim, num_outcomes, kraus, rng.substream(3),
                                              random_favorable(num_outcomes, fav_rng));
  return VerifyInstance{dim,
                        rank,
                        num_outcomes,
                        std::move(kraus),
                        x,
                        ParametrizedState::analytic_unitary(g, std::move(base)),
                        std::move(sel)};
}

}  // namespace qmetro
