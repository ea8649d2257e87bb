#pragma once
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "klm/diagnostics.hpp"
#include "klm/strong_coupling.hpp"

namespace klm {

using json = nlohmann::json;

inline constexpr const char* version_string = "1.0.0";

struct RunConfig {
  std::string experiment;
  std::string model = "klm";  // klm | nt

  std::string lattice_kind;  // chain | cycle | complete | grid | edges
  int n = 0, nx = 0, ny = 0;
  double t = 1.0;
  std::vector<std::tuple<int, int, double>> edge_list;

  double J = 0.0, h = 0.0, omega = 1.0;
  std::string g_kind = "zero";  // zero | uniform-onsite | matrix
  double g0 = 0.0;
  Eigen::MatrixXd g_matrix;

  PhononBasis::Policy policy = PhononBasis::Policy::total;
  std::vector<int> cutoffs = {0};
  unsigned seed = 1;

  // experiment options (defaults are the documented ones)
  double gap_tol = 1e-6;
  double convergence_tol = 1e-4;
  int expected_degeneracy = -1;   // <0: not asserted
  double expected_spin = -1.0;    // <0: not asserted
  std::vector<double> J_ladder;
  std::vector<double> betas, hs;
  double kappa = 10.0, z_floor = 1.0;
  double shrink_factor = 50.0;
  double decay_lo = 0.4, decay_hi = 0.6;
  double fit_residual_tol = 1e-8;
  double b_scale = 0.5;                 // hole hopping = b_scale * t
  std::string nt_expect = "match";      // match | mismatch
  std::string coupling = "hole";        // hole | electron
  std::string cone = "fock-g0";         // fock-g0 | position-grid
  bool sabotage_hop = false;
  int trials = 100;
  double min_magnitude = 1e-10;
  double bound_slack = 1e-8;
  bool saturation_check = false;
  double saturation_beta = 50.0, saturation_h = 1.0, saturation_tol = 1e-3;

  json raw;  // verbatim config echo for the manifest
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_json(const json& j);

Lattice make_lattice(const RunConfig& c);
ModelParams make_params(const RunConfig& c, int sites);

struct RunContext {
  std::string out_dir = ".";
  int threads = 1;
  bool check_only = false;
};

// executes the configured experiment, writes CSV + manifest into out_dir,
// returns 0 when every enabled assertion passed and 1 otherwise; config,
// assumption and convergence problems surface as the exceptions from
// errors.hpp and are mapped to exit codes by the caller
int run_experiment(const RunConfig& cfg, const RunContext& ctx);

}  // namespace klm
