#include <vector>

#include "doctest.h"
#include "klm/operators.hpp"
#include "klm/spectral.hpp"
#include "klm/strong_coupling.hpp"
#include "oracle.hpp"

using namespace klm;
using oracle::Mat;
using oracle::max_diff;

namespace {

constexpr double kOracleTol = 1e-13;

ModelParams generic2() {
  ModelParams p;
  p.J = 1.7;
  p.h = 0.23;
  p.omega = 1.1;
  p.g.resize(2, 2);
  p.g << 0.31, -0.11, 0.07, 0.19;
  return p;
}

Mat ph_coupling(const oracle::Klm& k, const SectorBasis& b, const ModelParams& p) {
  int phd = b.phonons.dim();
  Mat out = Mat::Zero(b.dim(), b.dim());
  for (int x = 0; x < b.n; ++x)
    for (int y = 0; y < b.phonons.modes(); ++y) {
      if (p.g(x, y) == 0.0) continue;
      Mat q = oracle::ph_b(b.phonons, y);
      out += p.g(x, y) * oracle::kron(k.restrict(k.nc(x), b), Mat(q + q.adjoint()));
    }
  (void)phd;
  return out;
}

Mat with_ph(const Mat& elec, int phd) {
  return oracle::kron(elec, Mat::Identity(phd, phd));
}

}  // namespace

TEST_CASE("Hamiltonian pieces match the dense reference on two sites") {
  Lattice g = Lattice::chain(2);
  ModelParams p = generic2();
  PhononBasis ph(2, PhononBasis::Policy::total, 2);
  oracle::Klm k(2);

  for (bool full : {true, false}) {
    SectorBasis b = full ? enumerate_full(g, ph) : enumerate_sector(g, 1, ph);
    CAPTURE(full);
    int phd = b.phonons.dim();

    OperatorMatrix hop = build_hopping(b, g);
    CHECK(max_diff(hop.dense(), with_ph(k.restrict(k.hop(g), b), phd)) <= kOracleTol);
    CHECK(hop.hermiticity_defect() <= 1e-15);

    OperatorMatrix ex = build_exchange(b, p.J);
    CHECK(max_diff(ex.dense(), with_ph(k.restrict(k.exchange(p.J), b), phd)) <= kOracleTol);

    OperatorMatrix ze = build_zeeman(b, p.h);
    CHECK(max_diff(ze.dense(), with_ph(k.restrict(k.zeeman(p.h), b), phd)) <= kOracleTol);

    PhononTerms terms = build_phonon_terms(b, p);
    CHECK(max_diff(terms.coupling.dense(), ph_coupling(k, b, p)) <= kOracleTol);
    Mat energy = p.omega * oracle::kron(Mat::Identity(b.electron_dim(), b.electron_dim()),
                                        oracle::ph_n(b.phonons));
    CHECK(max_diff(terms.energy.dense(), energy) <= kOracleTol);

    OperatorMatrix H = build_H(b, g, p);
    Mat expect = with_ph(k.restrict(k.hop(g) + k.exchange(p.J) + k.zeeman(p.h), b), phd) +
                 ph_coupling(k, b, p) + energy;
    CHECK(max_diff(H.dense(), expect) <= kOracleTol);
    CHECK(H.hermiticity_defect() <= 1e-15);
  }
}

TEST_CASE("Hamiltonian pieces match the dense reference on one site") {
  Lattice g = Lattice::chain(1);
  ModelParams p;
  p.J = 2.3;
  p.h = 0.4;
  p.omega = 0.9;
  p.g = Eigen::MatrixXd::Constant(1, 1, 0.35);
  PhononBasis ph(1, PhononBasis::Policy::total, 3);
  oracle::Klm k(1);
  SectorBasis b = enumerate_full(g, ph);

  OperatorMatrix H = build_H(b, g, p);
  Mat energy =
      p.omega * oracle::kron(Mat::Identity(b.electron_dim(), b.electron_dim()), oracle::ph_n(ph));
  Mat expect = with_ph(k.restrict(k.exchange(p.J) + k.zeeman(p.h), b), ph.dim()) +
               ph_coupling(k, b, p) + energy;
  CHECK(max_diff(H.dense(), expect) <= kOracleTol);
  CHECK(build_hopping(b, g).max_abs() == 0.0);
}

TEST_CASE("spin operators match the dense reference") {
  Lattice g = Lattice::chain(2);
  PhononBasis ph(2, PhononBasis::Policy::total, 1);
  oracle::Klm k(2);

  for (bool full : {true, false}) {
    SectorBasis b = full ? enumerate_full(g, ph) : enumerate_sector(g, -1, ph);
    CAPTURE(full);
    int phd = b.phonons.dim();

    for (int x = 0; x < 2; ++x) {
      CHECK(max_diff(build_s3_site(b, x).dense(), with_ph(k.restrict(k.s3(x), b), phd)) <=
            kOracleTol);
      CHECK(max_diff(build_S3_site(b, x).dense(), with_ph(k.restrict(k.S3(x), b), phd)) <=
            kOracleTol);
    }
    CHECK(max_diff(build_S3_tot(b).dense(), with_ph(k.restrict(k.S3_tot(), b), phd)) <=
          kOracleTol);
    CHECK(max_diff(build_S2_tot(b).dense(), with_ph(k.restrict(k.S2_tot(), b), phd)) <=
          kOracleTol);

    SpinOps ops = build_spin_ops(b);
    CHECK(max_diff(ops.S2_tot.dense(), build_S2_tot(b).dense()) == 0.0);
    CHECK(max_diff(ops.s3[1].dense(), build_s3_site(b, 1).dense()) == 0.0);

    if (!full) {
      // a sector basis diagonalizes S3_tot with eigenvalue twoM/2
      Mat expect = 0.5 * b.twoM * Mat::Identity(b.dim(), b.dim());
      CHECK(max_diff(build_S3_tot(b).dense(), expect) <= kOracleTol);
    }
  }
}

TEST_CASE("two-point ladder products match the dense reference") {
  Lattice g = Lattice::chain(2);
  PhononBasis ph(2, PhononBasis::Policy::total, 1);
  SectorBasis b = enumerate_sector(g, 1, ph);
  oracle::Klm k(2);
  int phd = ph.dim();

  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      CAPTURE(x);
      CAPTURE(y);
      auto probe = [&](Ladder a, Ladder bop, const Mat& want) {
        OperatorMatrix got = build_ladder_product(b, a, x, bop, y);
        CHECK(max_diff(got.dense(), with_ph(k.restrict(want, b), phd)) <= kOracleTol);
      };
      probe(Ladder::splus, Ladder::sminus, k.splus(x) * k.splus(y).adjoint());
      probe(Ladder::sminus, Ladder::splus, k.splus(x).adjoint() * k.splus(y));
      probe(Ladder::splus, Ladder::Sminus, k.splus(x) * k.Splus(y).adjoint());
      probe(Ladder::sminus, Ladder::Splus, k.splus(x).adjoint() * k.Splus(y));
      probe(Ladder::Splus, Ladder::Sminus, k.Splus(x) * k.Splus(y).adjoint());
      probe(Ladder::Sminus, Ladder::Splus, k.Splus(x).adjoint() * k.Splus(y));
    }
}

TEST_CASE("site ladders between sectors match the dense reference") {
  Lattice g = Lattice::chain(2);
  PhononBasis ph(2, PhononBasis::Policy::total, 1);
  SectorBasis lo = enumerate_sector(g, -1, ph);
  SectorBasis hi = enumerate_sector(g, 1, ph);
  oracle::Klm k(2);
  int phd = ph.dim();
  Mat pi_lo = k.embed(lo), pi_hi = k.embed(hi);

  for (int x = 0; x < 2; ++x) {
    CAPTURE(x);
    Mat up_c = pi_hi.adjoint() * k.splus(x) * pi_lo;
    Mat up_f = pi_hi.adjoint() * k.Splus(x) * pi_lo;
    CHECK(max_diff(build_site_ladder(hi, lo, Ladder::splus, x).dense(), with_ph(up_c, phd)) <=
          kOracleTol);
    CHECK(max_diff(build_site_ladder(hi, lo, Ladder::Splus, x).dense(), with_ph(up_f, phd)) <=
          kOracleTol);
    CHECK(max_diff(build_site_ladder(lo, hi, Ladder::sminus, x).dense(),
                   with_ph(Mat(up_c.adjoint()), phd)) <= kOracleTol);
    CHECK(max_diff(build_site_ladder(lo, hi, Ladder::Sminus, x).dense(),
                   with_ph(Mat(up_f.adjoint()), phd)) <= kOracleTol);

    // adjoint pairing at the matrix level
    Mat a = build_site_ladder(hi, lo, Ladder::splus, x).dense();
    Mat d = build_site_ladder(lo, hi, Ladder::sminus, x).dense();
    CHECK(max_diff(Mat(a.adjoint()), d) <= 1e-15);
  }

  Mat tot = Mat::Zero(1 << 8, 1 << 8);
  for (int x = 0; x < 2; ++x) tot += k.splus(x) + k.Splus(x);
  CHECK(max_diff(build_Splus_tot(hi, lo).dense(),
                 with_ph(Mat(pi_hi.adjoint() * tot * pi_lo), phd)) <= kOracleTol);
}

TEST_CASE("directed hop and on-site exchange flip match the dense reference") {
  Lattice g = Lattice::chain(2);
  PhononBasis ph(2, PhononBasis::Policy::total, 0);
  SectorBasis b = enumerate_sector(g, 1, ph);
  oracle::Klm k(2);

  Mat hop01 = Mat::Zero(1 << 8, 1 << 8);
  for (int s : {+1, -1}) hop01 += 0.7 * k.c(1, s).adjoint() * k.c(0, s);
  CHECK(max_diff(build_directed_hop(b, 1, 0, 0.7).dense(), k.restrict(hop01, b)) <= kOracleTol);

  Mat flip = 1.7 * (k.splus(0) * k.Splus(0).adjoint() + k.splus(0).adjoint() * k.Splus(0));
  CHECK(max_diff(build_exchange_flip(b, 0, 1.7).dense(), k.restrict(flip, b)) <= kOracleTol);
}

TEST_CASE("conduction spin-flip unitary") {
  Lattice g = Lattice::chain(2);
  PhononBasis ph(2, PhononBasis::Policy::total, 1);
  oracle::Klm k(2);

  for (bool full : {true, false}) {
    SectorBasis b = full ? enumerate_full(g, ph) : enumerate_sector(g, -1, ph);
    OperatorMatrix U = build_spin_flip_unitary(b);
    CHECK(max_diff(U.dense(), with_ph(k.restrict(k.spin_flip(), b), ph.dim())) <= kOracleTol);
    Mat D = U.dense();
    CHECK(max_diff(D * D.adjoint(), Mat::Identity(b.dim(), b.dim())) <= 1e-14);
    for (int i = 0; i < b.dim(); ++i) CHECK(std::abs(std::abs(D(i, i)) - 1.0) <= 1e-15);
  }
}

TEST_CASE("hole-hopping Hamiltonian matches the dense reference") {
  SUBCASE("two sites, generic couplings") {
    Lattice g = Lattice::chain(2);
    ModelParams p = generic2();
    Eigen::MatrixXd bmat(2, 2);
    bmat << 0.0, 0.42, 0.42, 0.0;
    PhononBasis ph(2, PhononBasis::Policy::total, 1);
    SectorBasis b = enumerate_nt_full(g, ph);
    oracle::Nt nt(2);
    int phd = ph.dim();

    Mat base = nt.hop(bmat) - 2.0 * p.h * nt.S3_tot();
    for (NTCoupling cpl : {NTCoupling::hole, NTCoupling::electron}) {
      Mat expect = with_ph(nt.restrict(base, b), phd);
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          if (p.g(x, y) == 0.0) continue;
          Mat q = oracle::ph_b(ph, y);
          Mat dens = cpl == NTCoupling::hole ? Mat(nt.fock.id() - nt.nd(x)) : nt.nd(x);
          expect += p.g(x, y) * oracle::kron(nt.restrict(dens, b), Mat(q + q.adjoint()));
        }
      expect += p.omega * oracle::kron(Mat::Identity(b.electron_dim(), b.electron_dim()),
                                       oracle::ph_n(ph));
      OperatorMatrix H = build_nt_hamiltonian(b, g, p, bmat, cpl);
      CHECK(max_diff(H.dense(), expect) <= kOracleTol);
      CHECK(H.hermiticity_defect() <= 1e-15);
    }
  }

  SUBCASE("three sites, one sector") {
    Lattice g = Lattice::chain(3);
    ModelParams p;
    p.h = 0.37;
    p.omega = 0.8;
    p.g = ModelParams::onsite_coupling(3, 0.25);
    Eigen::MatrixXd bmat = 0.37 * g.hopping();
    PhononBasis ph(3, PhononBasis::Policy::total, 1);
    SectorBasis b = enumerate_nt_sector(g, 0, ph);
    oracle::Nt nt(3);
    int phd = ph.dim();

    Mat expect = with_ph(nt.restrict(nt.hop(bmat) - 2.0 * p.h * nt.S3_tot(), b), phd);
    for (int x = 0; x < 3; ++x) {
      Mat q = oracle::ph_b(ph, x);
      expect += 0.25 * oracle::kron(nt.restrict(Mat(nt.fock.id() - nt.nd(x)), b),
                                    Mat(q + q.adjoint()));
    }
    expect += p.omega *
              oracle::kron(Mat::Identity(b.electron_dim(), b.electron_dim()), oracle::ph_n(ph));
    CHECK(max_diff(build_nt_hamiltonian(b, g, p, bmat).dense(), expect) <= kOracleTol);

    CHECK_THROWS_AS(build_nt_hamiltonian(b, g, p, Eigen::MatrixXd::Zero(2, 2)),
                    std::invalid_argument);
    Eigen::MatrixXd asym = bmat;
    asym(0, 1) += 0.1;
    CHECK_THROWS_AS(build_nt_hamiltonian(b, g, p, asym), std::invalid_argument);
  }
}

TEST_CASE("truncated phonon ladders and their commutator") {
  for (auto policy : {PhononBasis::Policy::total, PhononBasis::Policy::per_mode}) {
    PhononBasis ph(2, policy, 3);
    CAPTURE(ph.tag());
    for (int m = 0; m < 2; ++m) {
      Mat B = Mat(SpMat(phonon_b(ph, m)));
      CHECK(max_diff(B, oracle::ph_b(ph, m)) <= 1e-14);
      CHECK(max_diff(Mat(SpMat(phonon_bdag(ph, m))), Mat(oracle::ph_b(ph, m).adjoint())) <=
            1e-14);

      // [b, b*] = 1 away from the cutoff; at the cutoff the commutator
      // diagonal drops to -occupation
      Mat C = B * B.adjoint() - B.adjoint() * B;
      for (int i = 0; i < ph.dim(); ++i) {
        std::vector<int> occ = ph.state(i);
        occ[m] += 1;
        double want = ph.index_of(occ) >= 0 ? 1.0 : -double(ph.state(i)[m]);
        CHECK(std::abs(C(i, i) - want) <= 1e-13);
        for (int j = 0; j < ph.dim(); ++j)
          if (j != i) CHECK(std::abs(C(i, j)) <= 1e-14);
      }
    }
    CHECK(max_diff(Mat(SpMat(phonon_nph(ph))), oracle::ph_n(ph)) <= 1e-14);
  }
}

TEST_CASE("displacement unitary: coherent-state column and block structure") {
  Lattice g = Lattice::chain(1);
  ModelParams p;
  p.omega = 1.0;
  p.g = Eigen::MatrixXd::Constant(1, 1, 0.4);
  PhononBasis ph(1, PhononBasis::Policy::total, 12);
  SectorBasis b = enumerate_full(g, ph);

  auto lf = build_lang_firsov(b, p);
  CHECK(lf.unitarity_defect <= 1e-12);
  Mat F = lf.F.dense();

  // exp(alpha(b* - b)) |0> has amplitudes e^{-a^2/2} a^k / sqrt(k!)
  double alpha = 0.4;
  for (int k = 0; k <= 12; ++k) {
    double want = std::exp(-alpha * alpha / 2) * std::pow(alpha, k) /
                  std::sqrt(std::tgamma(double(k + 1)));
    CHECK(std::abs(F(b.index(0, k), b.index(0, 0)) - cplx(want)) <= 1e-9);
  }

  // no mixing between electron configurations
  double off = 0.0;
  for (int i = 0; i < b.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j)
      if (b.e_of(i) != b.e_of(j)) off = std::max(off, std::abs(F(i, j)));
  CHECK(off == 0.0);

  // two modes with an off-site coupling matrix stay exactly unitary too
  ModelParams p2 = generic2();
  PhononBasis ph2(2, PhononBasis::Policy::total, 3);
  SectorBasis b2 = enumerate_full(Lattice::chain(2), ph2);
  CHECK(build_lang_firsov(b2, p2).unitarity_defect <= 1e-10);
}

TEST_CASE("transformed Hamiltonian: assembled form against conjugation") {
  SUBCASE("no coupling: the two constructions coincide") {
    Lattice g = Lattice::chain(2);
    ModelParams p;
    p.J = 1.7;
    p.h = 0.23;
    p.omega = 1.0;
    p.g = Eigen::MatrixXd::Zero(2, 2);
    PhononBasis ph(2, PhononBasis::Policy::total, 2);
    SectorBasis b = enumerate_full(g, ph);
    auto a = build_H_tilde(b, g, p, HTildeMode::conjugation);
    auto c = build_H_tilde(b, g, p, HTildeMode::closed_form);
    CHECK(max_diff(a.dense(), c.dense()) <= 1e-12);
    CHECK(a.hermiticity_defect() <= 1e-12);
    CHECK(c.hermiticity_defect() <= 1e-12);
  }

  SUBCASE("single site: exact polaron shift, conjugation converges to it") {
    Lattice g = Lattice::chain(1);
    ModelParams p;
    p.J = 1.7;
    p.omega = 1.0;
    p.g = Eigen::MatrixXd::Constant(1, 1, 0.4);
    double shift = -0.4 * 0.4 / p.omega;
    double expect = p.J * onsite_exchange_eigenvalues().singlet + shift;

    double prev = -1.0;
    for (int cutoff : {4, 6, 8}) {
      PhononBasis ph(1, PhononBasis::Policy::total, cutoff);
      SectorBasis b = enumerate_full(g, ph);
      auto conj = build_H_tilde(b, g, p, HTildeMode::conjugation);
      auto closed = build_H_tilde(b, g, p, HTildeMode::closed_form);

      CHECK(std::abs(dense_spectrum(closed).front() - expect) <= 1e-12);

      // entries between low-lying phonon states converge as the working
      // cutoff grows; the discrepancy lives at the top rung
      Mat A = conj.dense(), C = closed.dense();
      double block = 0.0;
      for (int i = 0; i < b.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) {
          if (b.phonons.total_quanta(b.p_of(i)) > 2) continue;
          if (b.phonons.total_quanta(b.p_of(j)) > 2) continue;
          block = std::max(block, std::abs(A(i, j) - C(i, j)));
        }
      if (prev >= 0.0) CHECK(block < prev);
      prev = block;
      if (cutoff == 8) {
        CHECK(block <= 1e-6);
        CHECK(std::abs(dense_spectrum(conj).front() - expect) <= 1e-10);
      }
    }
  }

  SUBCASE("untransformed single-site model reaches the same polaron energy") {
    Lattice g = Lattice::chain(1);
    ModelParams p;
    p.J = 1.7;
    p.omega = 1.0;
    p.g = Eigen::MatrixXd::Constant(1, 1, 0.4);
    PhononBasis ph(1, PhononBasis::Policy::total, 30);
    SectorBasis b = enumerate_full(g, ph);
    double expect = p.J * onsite_exchange_eigenvalues().singlet - 0.16;
    CHECK(std::abs(dense_spectrum(build_H(b, g, p)).front() - expect) <= 1e-8);
  }

  SUBCASE("magnetization is conserved by the transformed operator") {
    Lattice g = Lattice::chain(2);
    ModelParams p = generic2();
    PhononBasis ph(2, PhononBasis::Policy::total, 2);
    SectorBasis b = enumerate_full(g, ph);
    Mat S3 = build_S3_tot(b).dense();
    for (auto mode : {HTildeMode::conjugation, HTildeMode::closed_form}) {
      Mat Ht = build_H_tilde(b, g, p, mode).dense();
      CHECK((Ht * S3 - S3 * Ht).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}
