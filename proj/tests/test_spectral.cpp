#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "klm/spectral.hpp"

using namespace klm;

namespace {

OperatorMatrix wrap(const Eigen::MatrixXcd& A, bool hermitian = true) {
  OperatorMatrix om;
  om.mat = A.sparseView();
  om.hermitian = hermitian;
  om.tag = "test";
  return om;
}

OperatorMatrix diag3() {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
  A(2, 2) = 1.0;
  return wrap(A);
}

}  // namespace

TEST_CASE("eigenpair grouping on a hand-built spectrum") {
  auto r = ground_states(diag3(), 3);
  REQUIRE(r.eigenvalues.size() == 3);
  CHECK(r.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.eigenvalues[2] == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.degeneracy_groups.size() == 2);
  CHECK(r.degeneracy_groups[0] == std::pair<int, int>{0, 2});
  CHECK(r.degeneracy_groups[1] == std::pair<int, int>{2, 3});

  // orthonormal eigenvectors with small residuals
  Eigen::MatrixXcd V = r.eigenvectors;
  CHECK((V.adjoint() * V - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("iterative and dense paths agree on a random Hermitian matrix") {
  std::mt19937 rng(42);
  std::normal_distribution<double> dist(0.0, 1.0);
  int n = 200;
  Eigen::MatrixXcd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = cplx(dist(rng), dist(rng));
  Eigen::MatrixXcd A = R + R.adjoint();

  OperatorMatrix om = wrap(A);
  auto dense = ground_states(om, 5, 1e-6, 1200);  // below threshold: direct solve
  auto lanczos = ground_states(om, 5, 1e-6, 50);  // above threshold: iterative
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs(dense.eigenvalues[i] - lanczos.eigenvalues[i]) <= 1e-9);
}

TEST_CASE("eigensolver input validation") {
  CHECK_THROWS_AS(ground_states(diag3(), 4), std::invalid_argument);
  CHECK_THROWS_AS(ground_states(diag3(), 0), std::invalid_argument);

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2);
  A(0, 1) = 1.0;  // not Hermitian
  CHECK_THROWS_AS(ground_states(wrap(A), 1), std::invalid_argument);
  CHECK_THROWS_AS(ground_states(wrap(A, false), 1), std::invalid_argument);
}

TEST_CASE("partition function basics") {
  CHECK(boltzmann_trace({{0.0, 0.0, 0.0}}, 2.0).Z == doctest::Approx(3.0).epsilon(1e-14));
  double z1 = boltzmann_trace({{1.0, 2.0}}, 1.0).Z;
  double z2 = boltzmann_trace({{1.0, 2.0}}, 2.0).Z;
  CHECK(z2 < z1);
  CHECK_THROWS_AS(boltzmann_trace({{1.0}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(boltzmann_trace({}, 1.0), std::invalid_argument);

  // log-space evaluation survives exponents that overflow Z itself
  auto t = boltzmann_trace({{-3.0, 5.0}}, 800.0);
  CHECK(std::isinf(t.Z));
  CHECK(std::abs(t.logZ - 2400.0) <= 1e-9);
}

TEST_CASE("free phonons factor out of the partition function") {
  Lattice g = Lattice::chain(2);
  ModelParams p;
  p.J = 1.3;
  p.h = 0.2;
  p.omega = 0.9;
  p.g = Eigen::MatrixXd::Zero(2, 2);
  double beta = 0.7;

  PhononBasis ph0(2, PhononBasis::Policy::total, 0);
  PhononBasis ph(2, PhononBasis::Policy::total, 2);
  double logZ_el = full_spectrum_trace(build_H(enumerate_full(g, ph0), g, p), beta).logZ;
  double log_sum_ph = 0.0;
  {
    std::vector<double> energies;
    for (int i = 0; i < ph.dim(); ++i) energies.push_back(-beta * p.omega * ph.total_quanta(i));
    log_sum_ph = logsumexp(energies);
  }
  double logZ_full = full_spectrum_trace(build_H(enumerate_full(g, ph), g, p), beta).logZ;
  CHECK(std::abs(logZ_full - (logZ_el + log_sum_ph)) <= 1e-10);
}

TEST_CASE("sector spectra concatenate to the full spectrum") {
  SUBCASE("three-site chain, shallow phonons") {
    Lattice g = Lattice::chain(3);
    ModelParams p;
    p.J = 0.7;
    p.h = 0.13;
    p.omega = 1.1;
    p.g = ModelParams::onsite_coupling(3, 0.3);
    PhononBasis ph(3, PhononBasis::Policy::total, 1);

    std::vector<double> concat;
    for (int twoM : klm_sector_twoMs(3)) {
      SectorBasis b = enumerate_sector(g, twoM, ph);
      auto ev = dense_spectrum(build_H(b, g, p));
      concat.insert(concat.end(), ev.begin(), ev.end());
    }
    std::sort(concat.begin(), concat.end());
    auto full = dense_spectrum(build_H(enumerate_full(g, ph), g, p));
    REQUIRE(full.size() == concat.size());
    for (size_t i = 0; i < full.size(); ++i) CHECK(std::abs(full[i] - concat[i]) <= 1e-10);
  }

  SUBCASE("two-site chain, deeper phonons, off-site coupling") {
    Lattice g = Lattice::chain(2);
    ModelParams p;
    p.J = 1.7;
    p.h = 0.23;
    p.omega = 1.1;
    p.g.resize(2, 2);
    p.g << 0.31, -0.11, 0.07, 0.19;
    PhononBasis ph(2, PhononBasis::Policy::total, 2);

    std::vector<double> concat;
    for (int twoM : klm_sector_twoMs(2)) {
      auto ev = dense_spectrum(build_H(enumerate_sector(g, twoM, ph), g, p));
      concat.insert(concat.end(), ev.begin(), ev.end());
    }
    std::sort(concat.begin(), concat.end());
    auto full = dense_spectrum(build_H(enumerate_full(g, ph), g, p));
    REQUIRE(full.size() == concat.size());
    for (size_t i = 0; i < full.size(); ++i) CHECK(std::abs(full[i] - concat[i]) <= 1e-10);
  }
}

TEST_CASE("field dependence is a rigid sector shift") {
  Lattice g = Lattice::chain(2);
  ModelParams p0;
  p0.J = 1.1;
  p0.omega = 1.0;
  p0.g = ModelParams::onsite_coupling(2, 0.2);
  ModelParams ph_ = p0;
  ph_.h = 0.3;
  PhononBasis ph(2, PhononBasis::Policy::total, 1);

  for (int twoM : klm_sector_twoMs(2)) {
    SectorBasis b = enumerate_sector(g, twoM, ph);
    auto at0 = dense_spectrum(build_H(b, g, p0));
    auto ath = dense_spectrum(build_H(b, g, ph_));
    REQUIRE(at0.size() == ath.size());
    for (size_t i = 0; i < at0.size(); ++i)
      CHECK(std::abs(ath[i] - (at0[i] - 0.3 * twoM)) <= 1e-12);
  }
}

TEST_CASE("thermal magnetization from once-diagonalized sectors") {
  Lattice g = Lattice::grid(2, 2);
  ModelParams p;
  p.omega = 1.0;
  p.g = Eigen::MatrixXd::Zero(4, 4);
  PhononBasis ph(4, PhononBasis::Policy::total, 0);

  std::vector<int> twoMs = nt_sector_twoMs(4);
  std::vector<std::vector<double>> spectra;
  for (int twoM : twoMs) {
    SectorBasis b = enumerate_nt_sector(g, twoM, ph);
    spectra.push_back(dense_spectrum(build_nt_hamiltonian(b, g, p, 0.5 * g.hopping())));
  }

  auto zero = thermal_magnetization(twoMs, spectra, 1.0, 0.0);
  CHECK(std::abs(zero.magnetization) <= 1e-12);

  auto up = thermal_magnetization(twoMs, spectra, 1.3, 0.4);
  auto dn = thermal_magnetization(twoMs, spectra, 1.3, -0.4);
  CHECK(std::abs(up.magnetization + dn.magnetization) <= 1e-12);
  CHECK(std::abs(up.magnetization - up.derivative_check) <=
        1e-6 * std::max(1.0, std::abs(up.magnetization)));

  // strong field, cold: fully polarized hole background
  auto sat = thermal_magnetization(twoMs, spectra, 60.0, 1.0);
  CHECK(std::abs(sat.magnetization - 3.0) <= 1e-3);

  CHECK_THROWS_AS(thermal_magnetization(twoMs, spectra, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(thermal_magnetization({1, -1}, spectra, 1.0, 0.1), std::invalid_argument);
}
