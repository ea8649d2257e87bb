#include "klm/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "klm/errors.hpp"

namespace klm {
namespace {

void require_solvable(const OperatorMatrix& H) {
  if (H.mat.rows() != H.mat.cols()) throw std::invalid_argument("eigensolver needs a square matrix");
  if (!H.hermitian) throw std::invalid_argument("eigensolver needs a Hermitian operator");
  double scale = std::max(1.0, H.max_abs());
  double defect = H.hermiticity_defect();
  if (defect > 1e-10 * scale)
    throw std::invalid_argument("operator tagged Hermitian has hermiticity defect " +
                                std::to_string(defect));
}

// Lanczos with full reorthogonalization; random-direction restarts on
// breakdown so invariant subspaces (and degenerate copies) keep emerging.
// Budget is the full dimension, at which point the Krylov basis is complete.
void lanczos_lowest(const SpMat& A, int k, std::vector<double>& values,
                    Eigen::MatrixXcd& vectors) {
  const int n = int(A.rows());
  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd V(n, n);
  auto random_unit = [&] {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
    return Eigen::VectorXcd(v.normalized());
  };
  auto orthogonalize = [&](Eigen::VectorXcd& w, int cols) {
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(cols) * (V.leftCols(cols).adjoint() * w);
  };

  V.col(0) = random_unit();
  std::vector<double> alpha, beta;
  int m = 0;
  auto ritz = [&](Eigen::VectorXd& theta, Eigen::MatrixXd& Y) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    theta = es.eigenvalues();
    Y = es.eigenvectors();
  };

  double last_beta = 0.0;
  bool done = false;
  for (int j = 0; j < n && !done; ++j) {
    Eigen::VectorXcd w = A * V.col(j);
    double a = std::real(V.col(j).dot(w));
    w -= a * V.col(j);
    if (j > 0) w -= cplx(beta[j - 1]) * V.col(j - 1);
    orthogonalize(w, j + 1);
    alpha.push_back(a);
    m = j + 1;
    double b = w.norm();
    last_beta = b;

    bool at_end = (m == n);
    if (!at_end && m >= std::max(2 * k, 20) && m % 5 == 0) {
      Eigen::VectorXd theta;
      Eigen::MatrixXd Y;
      ritz(theta, Y);
      bool conv = true;
      for (int i = 0; i < k && conv; ++i)
        conv = b * std::abs(Y(m - 1, i)) <= 1e-10 * std::max(1.0, std::abs(theta(i)));
      if (conv) done = true;
    }
    if (done || at_end) break;

    if (b < 1e-12) {
      // invariant subspace closed; inject a fresh orthogonal direction
      Eigen::VectorXcd f;
      double nb = 0.0;
      for (int tries = 0; tries < 5 && nb < 1e-8; ++tries) {
        f = random_unit();
        orthogonalize(f, m);
        nb = f.norm();
      }
      if (nb < 1e-8) break;  // space numerically exhausted
      V.col(m) = f / nb;
      beta.push_back(0.0);
    } else {
      V.col(m) = w / b;
      beta.push_back(b);
    }
  }

  Eigen::VectorXd theta;
  Eigen::MatrixXd Y;
  ritz(theta, Y);
  if (m < k) throw ConvergenceError("Krylov space closed before producing enough eigenpairs");
  for (int i = 0; i < k; ++i) {
    double bound = (m < n) ? last_beta * std::abs(Y(m - 1, i)) : 0.0;
    if (bound > 1e-9 * std::max(1.0, std::abs(theta(i))))
      throw ConvergenceError("Lanczos did not converge: residual bound " + std::to_string(bound));
  }
  values.assign(theta.data(), theta.data() + k);
  vectors = V.leftCols(m) * Y.leftCols(k).cast<cplx>();
  for (int i = 0; i < k; ++i) vectors.col(i).normalize();
}

std::vector<std::pair<int, int>> group_runs(const std::vector<double>& vals, double gap_tol) {
  double scale = 1.0;
  for (double v : vals) scale = std::max(scale, std::abs(v));
  std::vector<std::pair<int, int>> groups;
  int begin = 0;
  for (int i = 1; i <= int(vals.size()); ++i) {
    if (i == int(vals.size()) || vals[i] - vals[i - 1] > gap_tol * scale) {
      groups.emplace_back(begin, i);
      begin = i;
    }
  }
  return groups;
}

std::string sector_label(const OperatorMatrix& H) {
  if (!H.rows) return "";
  if (H.rows->twoM == SectorBasis::all_sectors) return "all";
  return "2M=" + std::to_string(H.rows->twoM);
}

}  // namespace

SpectralResult ground_states(const OperatorMatrix& H, int k, double gap_tol,
                             int dense_threshold) {
  require_solvable(H);
  const int dim = int(H.mat.rows());
  if (k < 1) throw std::invalid_argument("need at least one eigenpair");
  if (k > dim)
    throw std::invalid_argument("requested " + std::to_string(k) + " eigenpairs of a " +
                                std::to_string(dim) + "-dimensional operator");
  SpectralResult out;
  if (dim <= dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.dense());
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    out.eigenvectors = es.eigenvectors().leftCols(k);
  } else {
    lanczos_lowest(H.mat, k, out.eigenvalues, out.eigenvectors);
  }
  for (int i = 0; i < k; ++i) {
    double resid =
        (H.mat * out.eigenvectors.col(i) - out.eigenvalues[i] * out.eigenvectors.col(i)).norm();
    if (resid > 1e-9 * std::max(1.0, std::abs(out.eigenvalues[i])))
      throw ConvergenceError("eigenpair " + std::to_string(i) + " residual " +
                             std::to_string(resid) + " exceeds tolerance");
  }
  out.degeneracy_groups = group_runs(out.eigenvalues, gap_tol);
  out.sector = sector_label(H);
  if (H.rows) out.cutoff = H.rows->phonons.tag();
  return out;
}

std::vector<double> dense_spectrum(const OperatorMatrix& H) {
  require_solvable(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.dense(), Eigen::EigenvaluesOnly);
  return std::vector<double>(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());
}

TraceResult boltzmann_trace(const std::vector<std::vector<double>>& spectra, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("trace needs beta > 0");
  std::vector<double> a;
  for (const auto& s : spectra)
    for (double v : s) a.push_back(-beta * v);
  if (a.empty()) throw std::invalid_argument("trace over an empty spectrum");
  TraceResult out;
  out.logZ = logsumexp(a);
  out.Z = std::exp(out.logZ);
  return out;
}

TraceResult full_spectrum_trace(const OperatorMatrix& H, double beta) {
  return boltzmann_trace({dense_spectrum(H)}, beta);
}

ThermalResult thermal_magnetization(const std::vector<int>& twoMs,
                                    const std::vector<std::vector<double>>& spectra_h0,
                                    double beta, double h) {
  if (beta <= 0.0) throw std::invalid_argument("thermal expectation needs beta > 0");
  if (twoMs.size() != spectra_h0.size())
    throw std::invalid_argument("sector labels and spectra differ in count");
  std::vector<double> a;
  std::vector<int> m;
  for (std::size_t s = 0; s < twoMs.size(); ++s)
    for (double v : spectra_h0[s]) {
      a.push_back(-beta * (v - h * twoMs[s]));
      m.push_back(twoMs[s]);
    }
  if (a.empty()) throw std::invalid_argument("thermal expectation over an empty spectrum");

  ThermalResult out;
  out.beta = beta;
  out.h = h;
  out.logZ = logsumexp(a);
  out.Z = std::exp(out.logZ);
  double mag = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mag += m[i] * std::exp(a[i] - out.logZ);
  out.magnetization = mag;

  const double du = 1e-4;  // step in u = beta*h
  auto logZ_at = [&](double u) {
    std::vector<double> aa(a.size());
    for (std::size_t i = 0; i < aa.size(); ++i) aa[i] = a[i] + (u - beta * h) * m[i];
    return logsumexp(aa);
  };
  out.derivative_check = (logZ_at(beta * h + du) - logZ_at(beta * h - du)) / (2.0 * du);
  return out;
}

}  // namespace klm
