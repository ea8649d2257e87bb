#pragma once
#include "klm/operators.hpp"

namespace klm {

struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXcd eigenvectors;    // matching columns, orthonormal
  // maximal runs [begin,end) of eigenvalues whose consecutive gaps stay below
  // gap_tol * max(1, largest reported |eigenvalue|)
  std::vector<std::pair<int, int>> degeneracy_groups;
  std::string sector;
  std::string cutoff;
};

// lowest k eigenpairs; dense below dense_threshold, Lanczos with full
// reorthogonalization above it; every reported pair is residual-checked to
// 1e-9 * max(1, |lambda|)
SpectralResult ground_states(const OperatorMatrix& H, int k, double gap_tol = 1e-6,
                             int dense_threshold = 1200);

// all eigenvalues of one Hermitian block, ascending
std::vector<double> dense_spectrum(const OperatorMatrix& H);

struct TraceResult {
  double Z;     // exp(logZ); may overflow to inf for very large beta*|E|
  double logZ;  // always finite, computed in log space
};

// Z = sum_i exp(-beta lambda_i) over the concatenated spectra
TraceResult boltzmann_trace(const std::vector<std::vector<double>>& spectra, double beta);
TraceResult full_spectrum_trace(const OperatorMatrix& H, double beta);

struct ThermalResult {
  double beta = 0.0, h = 0.0;
  double Z = 0.0, logZ = 0.0;
  double magnetization = 0.0;      // d logZ / d(beta h) = <2 S3_tot>
  double derivative_check = 0.0;   // central difference of logZ in beta*h
};

// The Zeeman term is -h * twoM * identity on each sector block, so spectra
// diagonalized once at h = 0 serve every (beta, h) pair: sector eigenvalues
// shift by -h * twoM.
ThermalResult thermal_magnetization(const std::vector<int>& twoMs,
                                    const std::vector<std::vector<double>>& spectra_h0,
                                    double beta, double h);

}  // namespace klm
