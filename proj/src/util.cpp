#include "klm/util.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace klm {

std::string fmt17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double logsumexp(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("logsumexp of empty list");
  double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

LinearFit fit_line(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("fit_line needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(pts.size());
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  for (auto [x, y] : pts)
    f.max_residual = std::max(f.max_residual, std::abs(y - (f.slope * x + f.intercept)));
  return f;
}

Eigen::MatrixXcd exp_hermitian(const Eigen::MatrixXcd& H, cplx scale) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Eigen::VectorXcd ph(H.rows());
  for (int i = 0; i < H.rows(); ++i) ph(i) = std::exp(scale * es.eigenvalues()(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd exp_antihermitian(const Eigen::MatrixXcd& A) {
  // A = i*H with H Hermitian, so exp(A) = exp(i*H)
  Eigen::MatrixXcd H = cplx(0, -1) * A;
  return exp_hermitian(H, cplx(0, 1));
}

double operator_norm(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

}  // namespace klm
