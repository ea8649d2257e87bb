#include "oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

namespace oracle {

Fock::Fock(int m) : modes(m), dim(1 << m) {
  if (m < 1 || m > 16) throw std::invalid_argument("oracle Fock space wants 1..16 modes");
}

Mat Fock::create(int mode) const {
  Mat out = Mat::Zero(dim, dim);
  for (int w = 0; w < dim; ++w) {
    if (w >> mode & 1) continue;
    int below = std::popcount(unsigned(w) & ((1u << mode) - 1));
    out(w | (1 << mode), w) = below % 2 ? -1.0 : 1.0;
  }
  return out;
}

Mat Fock::annihilate(int mode) const { return create(mode).adjoint(); }

Mat Fock::number(int mode) const {
  Mat out = Mat::Zero(dim, dim);
  for (int w = 0; w < dim; ++w)
    if (w >> mode & 1) out(w, w) = 1.0;
  return out;
}

Mat Fock::id() const { return Mat::Identity(dim, dim); }

Mat Klm::nc(int x) const {
  return fock.number(klm::c_mode(n, x, +1)) + fock.number(klm::c_mode(n, x, -1));
}

Mat Klm::s3(int x) const {
  return 0.5 * (fock.number(klm::c_mode(n, x, +1)) - fock.number(klm::c_mode(n, x, -1)));
}

Mat Klm::S3(int x) const {
  return 0.5 * (fock.number(klm::f_mode(n, x, +1)) - fock.number(klm::f_mode(n, x, -1)));
}

Mat Klm::splus(int x) const { return c(x, +1).adjoint() * c(x, -1); }
Mat Klm::Splus(int x) const { return f(x, +1).adjoint() * f(x, -1); }

Mat Klm::S3_tot() const {
  Mat out = Mat::Zero(fock.dim, fock.dim);
  for (int x = 0; x < n; ++x) out += s3(x) + S3(x);
  return out;
}

Mat Klm::S2_tot() const {
  Mat sp = Mat::Zero(fock.dim, fock.dim);
  for (int x = 0; x < n; ++x) sp += splus(x) + Splus(x);
  Mat sz = S3_tot();
  Mat sm = sp.adjoint();
  return sz * sz + 0.5 * (sp * sm + sm * sp);
}

Mat Klm::hop(const klm::Lattice& g) const {
  Mat out = Mat::Zero(fock.dim, fock.dim);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (g.t(x, y) == 0.0) continue;
      for (int spin : {+1, -1})
        out += -g.t(x, y) * c(x, spin).adjoint() * c(y, spin);
    }
  return out;
}

Mat Klm::exchange(double J) const {
  Mat out = Mat::Zero(fock.dim, fock.dim);
  for (int x = 0; x < n; ++x) {
    out += s3(x) * S3(x);
    out += 0.5 * (splus(x) * Splus(x).adjoint() + splus(x).adjoint() * Splus(x));
  }
  return J * out;
}

Mat Klm::zeeman(double h) const { return -2.0 * h * S3_tot(); }

Mat Klm::spin_flip() const {
  Mat out = fock.id();
  for (int x = 0; x < n; ++x)
    out = out * (fock.id() - 2.0 * fock.number(klm::c_mode(n, x, -1)));
  return out;
}

Mat Klm::embed(const klm::SectorBasis& b) const {
  if (b.kind != klm::SectorBasis::Kind::klm) throw std::invalid_argument("electron basis expected");
  Mat out = Mat::Zero(fock.dim, b.electron_dim());
  for (int i = 0; i < b.electron_dim(); ++i)
    out(int(b.words[i].word), i) = double(b.words[i].sign);
  return out;
}

Mat Klm::restrict(const Mat& op, const klm::SectorBasis& b) const {
  Mat pi = embed(b);
  return pi.adjoint() * op * pi;
}

Mat Nt::nd(int x) const {
  return fock.number(klm::d_mode(n, x, +1)) + fock.number(klm::d_mode(n, x, -1));
}

Mat Nt::S3_tot() const {
  Mat out = Mat::Zero(fock.dim, fock.dim);
  for (int x = 0; x < n; ++x)
    out += 0.5 * (fock.number(klm::d_mode(n, x, +1)) - fock.number(klm::d_mode(n, x, -1)));
  return out;
}

Mat Nt::hop(const Eigen::MatrixXd& b) const {
  Mat out = Mat::Zero(fock.dim, fock.dim);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (b(x, y) == 0.0) continue;
      for (int spin : {+1, -1})
        out += b(x, y) * d(x, spin).adjoint() * d(y, spin);
    }
  return out;
}

Mat Nt::embed(const klm::SectorBasis& b) const {
  if (b.kind != klm::SectorBasis::Kind::nt) throw std::invalid_argument("hole basis expected");
  Mat out = Mat::Zero(fock.dim, b.electron_dim());
  for (int i = 0; i < b.electron_dim(); ++i)
    out(int(b.words[i].word), i) = double(b.words[i].sign);
  return out;
}

Mat Nt::restrict(const Mat& op, const klm::SectorBasis& b) const {
  Mat pi = embed(b);
  return pi.adjoint() * op * pi;
}

Mat ph_b(const klm::PhononBasis& ph, int mode) {
  Mat out = Mat::Zero(ph.dim(), ph.dim());
  for (int i = 0; i < ph.dim(); ++i) {
    std::vector<int> occ = ph.state(i);
    if (occ[mode] == 0) continue;
    int from = occ[mode];
    occ[mode] -= 1;
    for (int j = 0; j < ph.dim(); ++j)
      if (ph.state(j) == occ) out(j, i) = std::sqrt(double(from));
  }
  return out;
}

Mat ph_n(const klm::PhononBasis& ph) {
  Mat out = Mat::Zero(ph.dim(), ph.dim());
  for (int i = 0; i < ph.dim(); ++i) out(i, i) = double(ph.total_quanta(i));
  return out;
}

Mat kron(const Mat& a, const Mat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

double max_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("oracle comparison shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace oracle
