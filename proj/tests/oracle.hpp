#pragma once
#include <Eigen/Dense>

#include "klm/basis.hpp"

// Brute-force dense reference implementations on the full fermionic Fock
// space.  Everything here is built from explicit creation matrices and dense
// products, never through the library's expression machinery, so agreement
// with the sparse builders is a genuine cross-check.
namespace oracle {

using klm::cplx;
using Mat = Eigen::MatrixXcd;

// ladder matrices over `modes` fermionic modes, dimension 2^modes; basis
// vector w is the occupation word, a*_m |w> = (-1)^{popcount of w below m}
// |w + m> when mode m is empty
struct Fock {
  int modes, dim;
  explicit Fock(int m);
  Mat create(int mode) const;
  Mat annihilate(int mode) const;
  Mat number(int mode) const;
  Mat id() const;
};

// electron-side operators of the one-conduction-electron model on sites
// 0..n-1, using the library's global mode numbering (that numbering is part
// of the contract under test)
struct Klm {
  int n;
  Fock fock;
  explicit Klm(int sites) : n(sites), fock(4 * sites) {}

  Mat c(int x, int spin) const { return fock.annihilate(klm::c_mode(n, x, spin)); }
  Mat f(int x, int spin) const { return fock.annihilate(klm::f_mode(n, x, spin)); }
  Mat nc(int x) const;
  Mat s3(int x) const;
  Mat S3(int x) const;
  Mat splus(int x) const;
  Mat Splus(int x) const;
  Mat S3_tot() const;
  Mat S2_tot() const;  // from total ladder matrices, not the library identity
  Mat hop(const klm::Lattice& g) const;
  Mat exchange(double J) const;
  Mat zeeman(double h) const;
  Mat spin_flip() const;  // prod_x (1 - 2 n^c_{x,down})

  // isometry from an enumerated electron-side basis into the Fock space
  Mat embed(const klm::SectorBasis& b) const;
  // operator restricted to the span of the enumerated basis
  Mat restrict(const Mat& op, const klm::SectorBasis& b) const;
};

// hole-hopping model operators on 2n modes (d-up by site, d-down by site)
struct Nt {
  int n;
  Fock fock;
  explicit Nt(int sites) : n(sites), fock(2 * sites) {}

  Mat d(int x, int spin) const { return fock.annihilate(klm::d_mode(n, x, spin)); }
  Mat nd(int x) const;
  Mat S3_tot() const;
  Mat hop(const Eigen::MatrixXd& b) const;

  Mat embed(const klm::SectorBasis& b) const;
  Mat restrict(const Mat& op, const klm::SectorBasis& b) const;
};

// phonon ladder matrix on an enumerated truncated basis; matrix elements from
// sqrt(occupation) arithmetic with a linear search for the target state
Mat ph_b(const klm::PhononBasis& ph, int mode);
Mat ph_n(const klm::PhononBasis& ph);

Mat kron(const Mat& a, const Mat& b);

double max_diff(const Mat& a, const Mat& b);

}  // namespace oracle
