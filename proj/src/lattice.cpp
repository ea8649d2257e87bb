#include "klm/lattice.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "klm/errors.hpp"

namespace klm {

Lattice::Lattice(Eigen::MatrixXd hopping) : hop_(std::move(hopping)) {
  if (hop_.rows() != hop_.cols() || hop_.rows() < 1)
    throw std::invalid_argument("hopping matrix must be square and nonempty");
  n_ = int(hop_.rows());
  for (int x = 0; x < n_; ++x) {
    if (hop_(x, x) != 0.0)
      throw std::invalid_argument("hopping matrix must have zero diagonal");
    for (int y = 0; y < n_; ++y) {
      double v = hop_(x, y);
      if (!std::isfinite(v)) throw std::invalid_argument("hopping entries must be finite");
      if (v < 0.0)
        throw AssumptionError("hopping amplitude t[" + std::to_string(x) + "][" +
                              std::to_string(y) + "] is negative; t >= 0 is required");
      if (v != hop_(y, x)) throw std::invalid_argument("hopping matrix must be symmetric");
    }
  }
  nbrs_.resize(n_);
  for (int x = 0; x < n_; ++x)
    for (int y = x + 1; y < n_; ++y)
      if (hop_(x, y) != 0.0) {
        edges_.emplace_back(x, y);
        nbrs_[x].push_back(y);
        nbrs_[y].push_back(x);
      }
}

Lattice Lattice::chain(int n, double t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x + 1 < n; ++x) m(x, x + 1) = m(x + 1, x) = t;
  return Lattice(m);
}

Lattice Lattice::cycle(int n, double t) {
  if (n < 3) throw std::invalid_argument("cycle needs at least 3 sites");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    int y = (x + 1) % n;
    m(x, y) = m(y, x) = t;
  }
  return Lattice(m);
}

Lattice Lattice::complete(int n, double t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, t);
  m.diagonal().setZero();
  return Lattice(m);
}

Lattice Lattice::grid(int nx, int ny, double t) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid dimensions must be positive");
  int n = nx * ny;
  auto id = [nx](int i, int j) { return j * nx + i; };
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx) m(id(i, j), id(i + 1, j)) = m(id(i + 1, j), id(i, j)) = t;
      if (j + 1 < ny) m(id(i, j), id(i, j + 1)) = m(id(i, j + 1), id(i, j)) = t;
    }
  return Lattice(m);
}

Lattice Lattice::from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (auto [x, y, w] : edges) {
    if (x < 0 || x >= n || y < 0 || y >= n)
      throw std::invalid_argument("edge references a site outside 0.." + std::to_string(n - 1));
    if (x == y) throw std::invalid_argument("self-loop edges are not allowed");
    if (m(x, y) != 0.0) throw std::invalid_argument("duplicate edge in edge list");
    if (w == 0.0) throw std::invalid_argument("edge with zero weight; omit it instead");
    m(x, y) = m(y, x) = w;  // negative weights rejected by the constructor
  }
  return Lattice(m);
}

bool Lattice::connected() const {
  std::vector<char> seen(n_, 0);
  std::deque<int> q{0};
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (int y : nbrs_[x])
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        q.push_back(y);
      }
  }
  return count == n_;
}

namespace {
// Tarjan articulation-point search
struct Articulation {
  const std::vector<std::vector<int>>& nb;
  std::vector<int> disc, low;
  int timer = 0;
  bool found = false;
  explicit Articulation(const std::vector<std::vector<int>>& nb_)
      : nb(nb_), disc(nb_.size(), -1), low(nb_.size(), 0) {}
  void dfs(int u, int parent) {
    disc[u] = low[u] = timer++;
    int children = 0;
    for (int v : nb[u]) {
      if (v == parent) continue;
      if (disc[v] == -1) {
        ++children;
        dfs(v, u);
        low[u] = std::min(low[u], low[v]);
        if (parent != -1 && low[v] >= disc[u]) found = true;
      } else {
        low[u] = std::min(low[u], disc[v]);
      }
    }
    if (parent == -1 && children > 1) found = true;
  }
};
}  // namespace

bool Lattice::biconnected_not_long_loop() const {
  if (n_ == 1) return true;
  if (!connected()) return false;
  Articulation art(nbrs_);
  art.dfs(0, -1);
  if (art.found) return false;
  bool is_cycle = true;
  for (int x = 0; x < n_; ++x)
    if (int(nbrs_[x].size()) != 2) is_cycle = false;
  return !(is_cycle && n_ > 4);
}

std::vector<int> Lattice::shortest_path(int from, int to) const {
  if (from < 0 || from >= n_ || to < 0 || to >= n_)
    throw std::invalid_argument("shortest_path endpoint out of range");
  std::vector<int> prev(n_, -1);
  std::vector<char> seen(n_, 0);
  std::deque<int> q{from};
  seen[from] = 1;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    if (x == to) break;
    for (int y : nbrs_[x])
      if (!seen[y]) {
        seen[y] = 1;
        prev[y] = x;
        q.push_back(y);
      }
  }
  if (!seen[to]) return {};
  std::vector<int> path{to};
  while (path.back() != from) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

void ModelParams::validate(int sites) const {
  if (!(omega > 0.0)) throw AssumptionError("phonon energy omega must be strictly positive");
  if (!std::isfinite(J) || !std::isfinite(h) || !std::isfinite(omega))
    throw std::invalid_argument("model parameters must be finite");
  if (g.rows() != sites || g.cols() != sites)
    throw std::invalid_argument("coupling matrix g must be |sites| x |sites|");
  for (int x = 0; x < sites; ++x)
    for (int y = 0; y < sites; ++y)
      if (!std::isfinite(g(x, y))) throw std::invalid_argument("coupling entries must be finite");
}

Eigen::MatrixXd ModelParams::onsite_coupling(int sites, double g0) {
  return g0 * Eigen::MatrixXd::Identity(sites, sites);
}

}  // namespace klm
