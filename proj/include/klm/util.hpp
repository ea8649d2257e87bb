#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace klm {

using cplx = std::complex<double>;

// locale-independent formatting with 17 significant digits (round-trip exact)
std::string fmt17(double v);

double logsumexp(const std::vector<double>& xs);

// runs fn(0..n-1); results must be deposited by index so the order of
// completion never matters
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};
LinearFit fit_line(const std::vector<std::pair<double, double>>& pts);

// V e^{scale*lambda} V* for Hermitian H = V diag(lambda) V*
Eigen::MatrixXcd exp_hermitian(const Eigen::MatrixXcd& H, cplx scale);
// matrix exponential of an anti-Hermitian generator (exactly unitary result)
Eigen::MatrixXcd exp_antihermitian(const Eigen::MatrixXcd& A);

double operator_norm(const Eigen::MatrixXcd& A);  // largest singular value

}  // namespace klm
