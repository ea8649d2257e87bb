#pragma once
#include <Eigen/Dense>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace klm {

// Finite graph with symmetric nonnegative hopping amplitudes t_{x,y}.
// Sites are 0..n-1 in a fixed order; that order is also the fermionic mode
// order used everywhere downstream.
class Lattice {
 public:
  explicit Lattice(Eigen::MatrixXd hopping);

  static Lattice chain(int n, double t = 1.0);
  static Lattice cycle(int n, double t = 1.0);
  static Lattice complete(int n, double t = 1.0);
  static Lattice grid(int nx, int ny, double t = 1.0);  // open boundaries
  static Lattice from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges);

  int sites() const { return n_; }
  double t(int x, int y) const { return hop_(x, y); }
  const Eigen::MatrixXd& hopping() const { return hop_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int x) const { return nbrs_[x]; }

  bool connected() const;
  // no single-site removal disconnects the graph, and the graph is not a
  // simple loop on more than four sites
  bool biconnected_not_long_loop() const;

  // BFS shortest path, endpoints included; empty if unreachable
  std::vector<int> shortest_path(int from, int to) const;

 private:
  int n_;
  Eigen::MatrixXd hop_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> nbrs_;
};

struct ModelParams {
  double J = 0.0;
  double h = 0.0;
  double omega = 1.0;
  Eigen::MatrixXd g;  // coupling g_{x,y}: conduction density at x to mode y

  void validate(int sites) const;  // throws AssumptionError
  static Eigen::MatrixXd onsite_coupling(int sites, double g0);
};

}  // namespace klm
