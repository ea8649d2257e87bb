#include "klm/strong_coupling.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "klm/errors.hpp"

namespace klm {
namespace {

using Trip = Eigen::Triplet<cplx>;

struct PairComponent {
  int cspin, fspin;
  double coeff;
};

const std::vector<PairComponent>& pair_components(int m2_or_singlet) {
  // key: 1 = singlet, else the triplet m2
  static const std::vector<PairComponent> singlet = {{+1, -1, 1.0 / std::sqrt(2.0)},
                                                     {-1, +1, -1.0 / std::sqrt(2.0)}};
  static const std::vector<PairComponent> trip_up = {{+1, +1, 1.0}};
  static const std::vector<PairComponent> trip_mid = {{+1, -1, 1.0 / std::sqrt(2.0)},
                                                      {-1, +1, 1.0 / std::sqrt(2.0)}};
  static const std::vector<PairComponent> trip_dn = {{-1, -1, 1.0}};
  switch (m2_or_singlet) {
    case 1: return singlet;
    case +2: return trip_up;
    case 0: return trip_mid;
    case -2: return trip_dn;
  }
  throw std::logic_error("bad pair key");
}

// column of the isometry for one label: apply the creation product
// c*_{x,cspin} f*_{x,fspin} f_{x,s} prod_{all y} f*_{y,sigma_y} through the
// sign rule.  The background spins are created at every site and the one at x
// is then annihilated, which is the same hole-style convention the hole-model
// basis uses; relative to creating only the y != x spins this costs (-1)^x,
// and keeping it makes the label bijection between the two models sign-free.
void add_pair_vector(const SectorBasis& b, const HoleLabel& lab,
                     const std::vector<PairComponent>& comps, int col_base,
                     std::vector<Trip>& trips) {
  const int phd = b.phonons.dim();
  double hole_sign = lab.x % 2 == 0 ? 1.0 : -1.0;
  for (const auto& c : comps) {
    std::vector<int> modes;
    modes.push_back(c_mode(b.n, lab.x, c.cspin));
    modes.push_back(f_mode(b.n, lab.x, c.fspin));
    for (int y = 0; y < b.n; ++y) {
      if (y == lab.x) continue;
      modes.push_back(f_mode(b.n, y, (lab.word >> y) & 1u ? +1 : -1));
    }
    SignedWord w = create_string(modes);
    int e = b.find_word(w.word);
    if (e < 0) throw std::logic_error("on-site pair vector missing from sector basis");
    double amp = hole_sign * c.coeff * double(w.sign * b.words[e].sign);
    for (int p = 0; p < phd; ++p) trips.emplace_back(b.index(e, p), col_base + p, cplx(amp));
  }
}

double ident_defect(const SpMat& m) {
  double out = 0.0;
  SpMat d = m - SpMat(sparse_identity(int(m.rows())));
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

double max_abs_sp(const SpMat& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

Eigen::MatrixXcd inverse_checked(const Eigen::MatrixXcd& A, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::MatrixXcd inv = lu.inverse();
  double resid =
      (A * inv - Eigen::MatrixXcd::Identity(A.rows(), A.cols())).cwiseAbs().maxCoeff();
  if (!(resid < 1e-8))
    throw ConvergenceError(std::string(what) + ": solve residual " + std::to_string(resid) +
                           " (probe point too close to the spectrum?)");
  return inv;
}

}  // namespace

OnsiteExchange onsite_exchange_eigenvalues() {
  static const OnsiteExchange v = [] {
    SectorBasis b = enumerate_full(Lattice::chain(1), PhononBasis(1, PhononBasis::Policy::total, 0));
    auto ex = build_exchange(b, 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ex.dense());
    return OnsiteExchange{es.eigenvalues()(0), es.eigenvalues()(es.eigenvalues().size() - 1)};
  }();
  return v;
}

SingletSpace build_singlet_space(const SectorBasis& b) {
  if (b.kind != SectorBasis::Kind::klm)
    throw std::logic_error("singlet split needs an electron-model basis");
  SingletSpace out;
  out.basis = &b;
  out.labels = enumerate_hole_labels(b.n, b.twoM);
  for (int m2 : {+2, 0, -2}) {
    int want = b.twoM == SectorBasis::all_sectors ? b.twoM : b.twoM - m2;
    for (const auto& lab : enumerate_hole_labels(b.n, want))
      out.triplet_labels.push_back({m2, lab});
  }
  const int phd = b.phonons.dim();
  if (int(out.labels.size() + out.triplet_labels.size()) * phd != b.dim())
    throw std::logic_error("singlet/triplet label count does not cover the sector");

  std::vector<Trip> ts, tt;
  for (int i = 0; i < int(out.labels.size()); ++i)
    add_pair_vector(b, out.labels[i], pair_components(1), i * phd, ts);
  for (int j = 0; j < int(out.triplet_labels.size()); ++j)
    add_pair_vector(b, out.triplet_labels[j].label, pair_components(out.triplet_labels[j].m2),
                    j * phd, tt);
  out.S = SpMat(b.dim(), int(out.labels.size()) * phd);
  out.S.setFromTriplets(ts.begin(), ts.end());
  out.T = SpMat(b.dim(), int(out.triplet_labels.size()) * phd);
  out.T.setFromTriplets(tt.begin(), tt.end());

  SpMat Sa = SpMat(out.S.adjoint()), Ta = SpMat(out.T.adjoint());
  double defect = ident_defect(SpMat(Sa * out.S));
  defect = std::max(defect, ident_defect(SpMat(Ta * out.T)));
  defect = std::max(defect, max_abs_sp(SpMat(Sa * out.T)));
  out.P = SpMat(out.S * Sa);
  SpMat completeness = out.P + SpMat(out.T * Ta);
  defect = std::max(defect, ident_defect(completeness));
  if (defect > 1e-12)
    throw std::logic_error("singlet/triplet frame failed its orthonormality check");
  out.P_perp = SpMat(sparse_identity(b.dim())) - out.P;
  return out;
}

Decomposition build_decomposition(const SectorBasis& b, const Lattice& g, const ModelParams& p) {
  Decomposition d;
  d.basis = &b;
  d.sing = build_singlet_space(b);
  d.J = p.J;
  d.h = p.h;
  d.shift = renorm_constant(p.J);
  auto hop = build_hopping(b, g);
  auto ze = build_zeeman(b, p.h);
  auto ph = build_phonon_terms(b, p);
  d.R = hop.mat + ze.mat + ph.coupling.mat + ph.energy.mat;
  SpMat H = d.R + build_exchange(b, p.J).mat;
  d.H_ren = H + SpMat(d.shift * sparse_identity(b.dim()));
  const SpMat &P = d.sing.P, &Q = d.sing.P_perp;
  SpMat HP = SpMat(d.H_ren * P), HQ = SpMat(d.H_ren * Q);
  d.H_inf = SpMat(P * HP);
  d.H_1 = SpMat(Q * HQ);
  // every other term maps the singlet span into itself, so the cross blocks
  // are assembled from the hopping alone; that keeps them bit-for-bit
  // identical across J instead of J-independent only up to projector rounding
  SpMat hP = SpMat(hop.mat * P), hQ = SpMat(hop.mat * Q);
  d.H_01 = SpMat(P * hQ) + SpMat(Q * hP);
  return d;
}

OperatorMatrix effective_hamiltonian(const Decomposition& d, const SectorBasis& nt_basis) {
  const SectorBasis& b = *d.basis;
  if (nt_basis.kind != SectorBasis::Kind::nt)
    throw std::invalid_argument("effective Hamiltonian must be expressed in a hole-model basis");
  if (nt_basis.n != b.n || nt_basis.twoM != b.twoM)
    throw std::invalid_argument("hole-model basis sector does not match the decomposition");
  if (nt_basis.phonons.dim() != b.phonons.dim() || nt_basis.phonons.tag() != b.phonons.tag())
    throw std::invalid_argument("phonon truncation mismatch between the two sides");
  if (int(d.sing.labels.size()) != nt_basis.electron_dim())
    throw std::invalid_argument("hole-model basis size mismatch");
  for (std::size_t i = 0; i < d.sing.labels.size(); ++i)
    if (d.sing.labels[i].x != nt_basis.holes[i].x ||
        d.sing.labels[i].word != nt_basis.holes[i].word)
      throw std::logic_error("label enumeration order mismatch");
  SpMat Sa = SpMat(d.sing.S.adjoint());
  OperatorMatrix op;
  op.rows = &nt_basis;
  op.cols = &nt_basis;
  op.mat = SpMat(SpMat(Sa * d.R) * d.sing.S);
  op.hermitian = true;
  op.tag = "H-effective";
  return op;
}

double max_entry_diff(const SpMat& a, const SpMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("entrywise comparison of mismatched shapes");
  return max_abs_sp(SpMat(a - b));
}

double offdiagonal_norm(const Decomposition& d) {
  return operator_norm(Eigen::MatrixXcd(d.H_01));
}

double resolvent_gap(const Decomposition& d, cplx z) {
  if (z.imag() == 0.0)
    throw std::invalid_argument("resolvent probe point must be off the real axis");
  const int dim = d.basis->dim();
  Eigen::MatrixXcd A = Eigen::MatrixXcd(d.H_ren);
  A.diagonal().array() -= z;
  Eigen::MatrixXcd R_full = inverse_checked(A, "full resolvent");

  Eigen::MatrixXcd R_eff = Eigen::MatrixXcd::Zero(dim, dim);
  if (d.sing.S.cols() > 0) {
    Eigen::MatrixXcd S = Eigen::MatrixXcd(d.sing.S);
    Eigen::MatrixXcd B = S.adjoint() * Eigen::MatrixXcd(d.R) * S;
    B.diagonal().array() -= z;
    R_eff = S * inverse_checked(B, "effective resolvent") * S.adjoint();
  }
  return operator_norm(R_full - R_eff);
}

SeparationResult separation_energy(const SectorBasis& b, const Lattice& g,
                                   const ModelParams& base, const std::vector<double>& J_list) {
  if (J_list.empty()) throw std::invalid_argument("J list must be nonempty");
  SeparationResult out;
  auto onsite = onsite_exchange_eigenvalues();
  out.predicted_slope = onsite.triplet - onsite.singlet;

  ModelParams p0 = base;
  p0.J = J_list.front();
  Decomposition d0 = build_decomposition(b, g, p0);
  if (d0.sing.T.cols() == 0)
    throw std::invalid_argument("sector has an empty triplet complement");
  Eigen::MatrixXcd Td = Eigen::MatrixXcd(d0.sing.T);
  Eigen::MatrixXcd Rc = Td.adjoint() * Eigen::MatrixXcd(d0.R) * Td;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es0(Rc);
  out.predicted_intercept = es0.eigenvalues()(0);

  for (double J : J_list) {
    ModelParams pj = base;
    pj.J = J;
    Decomposition dj = build_decomposition(b, g, pj);
    Eigen::MatrixXcd Hc = Td.adjoint() * Eigen::MatrixXcd(dj.H_ren) * Td;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hc);
    out.points.emplace_back(J, es.eigenvalues()(0));
  }
  out.fit = fit_line(out.points);
  return out;
}

}  // namespace klm
