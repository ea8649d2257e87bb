#include <fstream>
#include <set>

#include "klm/errors.hpp"
#include "klm/experiments.hpp"

namespace klm {
namespace {

[[noreturn]] void bad(const std::string& msg) { throw ConfigError("config: " + msg); }

const json& member(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

double num(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number()) bad(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

int integer(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

int integer_or(const json& j, const char* key, int dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  return it->get<int>();
}

std::string text(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_string()) bad(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::string text_or(const json& j, const char* key, const std::string& dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_string()) bad(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

bool flag_or(const json& j, const char* key, bool dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_boolean()) bad(std::string("'") + key + "' must be a boolean");
  return it->get<bool>();
}

std::vector<double> num_list(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_array() || v.empty()) bad(std::string("'") + key + "' must be a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) bad(std::string("'") + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void parse_lattice(const json& j, RunConfig& c) {
  const json& l = member(j, "lattice");
  c.lattice_kind = text(l, "kind");
  c.t = num_or(l, "t", 1.0);
  if (c.lattice_kind == "chain" || c.lattice_kind == "cycle" || c.lattice_kind == "complete") {
    c.n = integer(l, "n");
  } else if (c.lattice_kind == "grid") {
    c.nx = integer(l, "nx");
    c.ny = integer(l, "ny");
    c.n = c.nx * c.ny;
  } else if (c.lattice_kind == "edges") {
    c.n = integer(l, "n");
    const json& es = member(l, "edges");
    if (!es.is_array()) bad("'edges' must be an array of [x, y, t] triples");
    for (const auto& e : es) {
      if (!e.is_array() || e.size() != 3) bad("'edges' must be an array of [x, y, t] triples");
      c.edge_list.emplace_back(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    }
  } else {
    bad("unknown lattice kind '" + c.lattice_kind + "'");
  }
}

void parse_params(const json& j, RunConfig& c) {
  const json& p = member(j, "params");
  c.J = num_or(p, "J", 0.0);
  c.h = num_or(p, "h", 0.0);
  c.omega = num_or(p, "omega", 1.0);
  auto it = p.find("g");
  if (it == p.end()) return;
  const json& g = *it;
  c.g_kind = text(g, "kind");
  if (c.g_kind == "zero") {
  } else if (c.g_kind == "uniform-onsite") {
    c.g0 = num(g, "g0");
  } else if (c.g_kind == "matrix") {
    const json& rows = member(g, "values");
    if (!rows.is_array() || rows.empty()) bad("'g.values' must be a nonempty matrix");
    int n = int(rows.size());
    c.g_matrix = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      const json& row = rows[r];
      if (!row.is_array() || int(row.size()) != n) bad("'g.values' must be square");
      for (int cc = 0; cc < n; ++cc) {
        if (!row[cc].is_number()) bad("'g.values' must contain only numbers");
        c.g_matrix(r, cc) = row[cc].get<double>();
      }
    }
  } else {
    bad("unknown coupling kind '" + c.g_kind + "'");
  }
}

void parse_phonons(const json& j, RunConfig& c) {
  auto it = j.find("phonons");
  if (it == j.end()) return;
  const json& p = *it;
  std::string policy = text_or(p, "policy", "total");
  if (policy == "total")
    c.policy = PhononBasis::Policy::total;
  else if (policy == "per_mode")
    c.policy = PhononBasis::Policy::per_mode;
  else
    bad("phonon policy must be 'total' or 'per_mode'");
  auto cs = p.find("cutoffs");
  if (cs != p.end()) {
    if (!cs->is_array() || cs->empty()) bad("'cutoffs' must be a nonempty integer array");
    c.cutoffs.clear();
    for (const auto& e : *cs) {
      if (!e.is_number_integer()) bad("'cutoffs' must contain only integers");
      c.cutoffs.push_back(e.get<int>());
    }
    for (size_t i = 0; i + 1 < c.cutoffs.size(); ++i)
      if (c.cutoffs[i] >= c.cutoffs[i + 1]) bad("'cutoffs' must be strictly increasing");
    if (c.cutoffs.front() < 0) bad("'cutoffs' must be nonnegative");
  }
}

void parse_options(const json& j, RunConfig& c) {
  auto it = j.find("options");
  const json empty = json::object();
  const json& o = (it == j.end()) ? empty : *it;
  if (!o.is_object()) bad("'options' must be an object");

  c.gap_tol = num_or(o, "gap_tol", c.gap_tol);
  c.convergence_tol = num_or(o, "convergence_tol", c.convergence_tol);
  c.expected_degeneracy = integer_or(o, "expected_degeneracy", c.expected_degeneracy);
  c.expected_spin = num_or(o, "expected_spin", c.expected_spin);
  if (o.contains("J_ladder")) c.J_ladder = num_list(o, "J_ladder");
  if (o.contains("betas")) c.betas = num_list(o, "betas");
  if (o.contains("hs")) c.hs = num_list(o, "hs");
  c.kappa = num_or(o, "kappa", c.kappa);
  c.z_floor = num_or(o, "z_floor", c.z_floor);
  c.shrink_factor = num_or(o, "shrink_factor", c.shrink_factor);
  c.decay_lo = num_or(o, "decay_lo", c.decay_lo);
  c.decay_hi = num_or(o, "decay_hi", c.decay_hi);
  c.fit_residual_tol = num_or(o, "fit_residual_tol", c.fit_residual_tol);
  c.b_scale = num_or(o, "b_scale", c.b_scale);
  c.nt_expect = text_or(o, "expect", c.nt_expect);
  c.coupling = text_or(o, "coupling", c.coupling);
  c.cone = text_or(o, "cone", c.cone);
  c.sabotage_hop = flag_or(o, "sabotage_hop", c.sabotage_hop);
  c.trials = integer_or(o, "trials", c.trials);
  c.min_magnitude = num_or(o, "min_magnitude", c.min_magnitude);
  c.bound_slack = num_or(o, "bound_slack", c.bound_slack);
  c.saturation_check = flag_or(o, "saturation_check", c.saturation_check);
  c.saturation_beta = num_or(o, "saturation_beta", c.saturation_beta);
  c.saturation_h = num_or(o, "saturation_h", c.saturation_h);
  c.saturation_tol = num_or(o, "saturation_tol", c.saturation_tol);

  if (c.gap_tol <= 0 || c.convergence_tol <= 0) bad("tolerances must be positive");
  if (c.kappa <= 0) bad("'kappa' must be positive");
  if (c.z_floor <= 0) bad("'z_floor' must be positive");
  if (c.trials < 1) bad("'trials' must be at least 1");
  if (c.nt_expect != "match" && c.nt_expect != "mismatch") bad("'expect' must be 'match' or 'mismatch'");
  if (c.coupling != "hole" && c.coupling != "electron") bad("'coupling' must be 'hole' or 'electron'");
  if (c.cone != "fock-g0" && c.cone != "position-grid") bad("'cone' must be 'fock-g0' or 'position-grid'");
}

}  // namespace

RunConfig parse_config_json(const json& j) {
  if (!j.is_object()) bad("top level must be an object");
  RunConfig c;
  c.raw = j;
  c.experiment = text(j, "experiment");
  static const std::set<std::string> known = {
      "ground-state", "correlations", "j-sweep",   "nt-check",
      "magnetization", "positivity",  "ergodicity"};
  if (!known.count(c.experiment)) bad("unknown experiment '" + c.experiment + "'");
  c.model = text_or(j, "model", "klm");
  if (c.model != "klm" && c.model != "nt") bad("'model' must be 'klm' or 'nt'");
  parse_lattice(j, c);
  parse_params(j, c);
  parse_phonons(j, c);
  if (j.contains("seed")) c.seed = unsigned(integer(j, "seed"));
  parse_options(j, c);

  if (c.experiment == "j-sweep" && c.J_ladder.empty()) bad("'j-sweep' needs options.J_ladder");
  if (c.experiment == "magnetization") {
    if (c.betas.empty()) bad("'magnetization' needs options.betas");
    if (c.hs.empty()) bad("'magnetization' needs options.hs");
    for (double b : c.betas)
      if (b <= 0) bad("'betas' must be positive");
  }
  if (c.experiment == "positivity" && c.betas.empty()) bad("'positivity' needs options.betas");
  for (double b : c.betas)
    if (b < 0) bad("'betas' must be nonnegative");
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

Lattice make_lattice(const RunConfig& c) {
  if (c.lattice_kind == "chain") return Lattice::chain(c.n, c.t);
  if (c.lattice_kind == "cycle") return Lattice::cycle(c.n, c.t);
  if (c.lattice_kind == "complete") return Lattice::complete(c.n, c.t);
  if (c.lattice_kind == "grid") return Lattice::grid(c.nx, c.ny, c.t);
  if (c.lattice_kind == "edges") return Lattice::from_edges(c.n, c.edge_list);
  throw ConfigError("config: unknown lattice kind '" + c.lattice_kind + "'");
}

ModelParams make_params(const RunConfig& c, int sites) {
  ModelParams p;
  p.J = c.J;
  p.h = c.h;
  p.omega = c.omega;
  if (c.g_kind == "zero") {
    p.g = Eigen::MatrixXd::Zero(sites, sites);
  } else if (c.g_kind == "uniform-onsite") {
    p.g = ModelParams::onsite_coupling(sites, c.g0);
  } else {
    if (c.g_matrix.rows() != sites)
      throw ConfigError("config: g matrix is " + std::to_string(c.g_matrix.rows()) + "x" +
                        std::to_string(c.g_matrix.cols()) + " but the lattice has " +
                        std::to_string(sites) + " sites");
    p.g = c.g_matrix;
  }
  p.validate(sites);
  return p;
}

}  // namespace klm
