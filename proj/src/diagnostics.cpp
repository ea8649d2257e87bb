#include "klm/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "klm/errors.hpp"

namespace klm {
namespace {

Eigen::MatrixXcd kron_dense(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) =
        A(i, j) * B;
  return K;
}

double spin_from_s2(double s2) { return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * s2)); }

}  // namespace

SpinReport ground_multiplet_spin(const std::vector<OperatorMatrix>& sector_hams, double gap_tol) {
  if (sector_hams.empty()) throw std::invalid_argument("no sector blocks given");
  for (const auto& H : sector_hams)
    if (!H.rows) throw std::invalid_argument("sector block lacks its basis reference");

  std::vector<std::vector<double>> spectra;
  spectra.reserve(sector_hams.size());
  double e0 = std::numeric_limits<double>::infinity();
  for (const auto& H : sector_hams) {
    spectra.push_back(dense_spectrum(H));
    e0 = std::min(e0, spectra.back().front());
  }
  const double tol = gap_tol * std::max(1.0, std::abs(e0));

  SpinReport out;
  out.ground_energy = e0;
  double gap = std::numeric_limits<double>::infinity();
  std::vector<int> mult(sector_hams.size(), 0);
  for (std::size_t s = 0; s < spectra.size(); ++s) {
    for (double v : spectra[s]) {
      if (v <= e0 + tol)
        ++mult[s];
      else {
        gap = std::min(gap, v - e0);
        break;
      }
    }
    if (mult[s] > 0) {
      out.ground_sectors.push_back(sector_hams[s].rows->twoM);
      out.sector_multiplicity.push_back(mult[s]);
      out.degeneracy += mult[s];
    }
  }
  out.gap = gap;
  if (gap < 10.0 * tol)
    throw ConvergenceError(
        "ambiguous ground multiplet: gap " + std::to_string(gap) + " is within 10x of the "
        "grouping tolerance " + std::to_string(tol) + "; tighten gap_tol or raise the cutoff");

  bool have_S = false;
  for (std::size_t s = 0; s < spectra.size(); ++s) {
    if (mult[s] == 0) continue;
    auto gs = ground_states(sector_hams[s], mult[s], gap_tol);
    auto S2 = build_S2_tot(*sector_hams[s].rows);
    for (int i = 0; i < mult[s]; ++i) {
      const auto v = gs.eigenvectors.col(i);
      double s2 = std::real(v.dot(S2.mat * v));
      double Sv = spin_from_s2(s2);
      if (!have_S) {
        out.S = std::round(2.0 * Sv) / 2.0;
        have_S = true;
      }
      out.S_deviation = std::max(out.S_deviation, std::abs(Sv - out.S));
    }
  }
  return out;
}

std::vector<CorrelationEntry> correlation_signs(const SectorBasis& b,
                                                const Eigen::VectorXcd& psi, int x, int y) {
  if (psi.size() != b.dim())
    throw std::invalid_argument("state vector does not match the sector basis");
  struct Spec {
    Ladder a, bop;
    const char* name;
  };
  const Spec table[] = {
      {Ladder::splus, Ladder::sminus, "s+s-"}, {Ladder::sminus, Ladder::splus, "s-s+"},
      {Ladder::splus, Ladder::Sminus, "s+S-"}, {Ladder::sminus, Ladder::Splus, "s-S+"},
      {Ladder::Splus, Ladder::Sminus, "S+S-"}, {Ladder::Sminus, Ladder::Splus, "S-S+"},
  };
  std::vector<CorrelationEntry> out;
  for (const auto& spec : table) {
    auto op = build_ladder_product(b, spec.a, x, spec.bop, y);
    CorrelationEntry e;
    e.x = x;
    e.y = y;
    e.pair = spec.name;
    e.value = psi.dot(op.mat * psi);
    if (std::abs(e.value) <= 1e-12)
      e.sign = SignClass::indeterminate;
    else
      e.sign = e.value.real() > 0 ? SignClass::positive : SignClass::negative;
    out.push_back(std::move(e));
  }
  return out;
}

ConeBasis cone_fock_g0(const SectorBasis& b, const ModelParams& p) {
  if (b.kind != SectorBasis::Kind::klm)
    throw std::invalid_argument("the product cone is defined on the electron model");
  if (p.g.size() > 0 && p.g.cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument(
        "the Fock-basis cone requires zero electron-phonon coupling; use the position grid");
  if (b.phonons.dim() != 1)
    throw std::invalid_argument("the Fock-basis cone needs the phonon-free truncation (cutoff 0)");
  ConeBasis out;
  out.rep = ConeBasis::Representation::fock_g0;
  out.phonon_transform = Eigen::MatrixXcd::Identity(1, 1);
  out.tol = 1e-12;
  return out;
}

ConeBasis cone_position_grid(const SectorBasis& b) {
  if (b.phonons.policy() != PhononBasis::Policy::per_mode)
    throw std::invalid_argument("the position grid needs a per-mode truncation");
  const int md = b.phonons.cutoff() + 1;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(md, md);
  for (int n = 0; n + 1 < md; ++n) q(n, n + 1) = q(n + 1, n) = std::sqrt((n + 1) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  Eigen::MatrixXd U = es.eigenvectors();
  for (int j = 0; j < md; ++j)
    if (U(0, j) < 0) U.col(j) *= -1.0;  // lowest mode is positive at every node

  ConeBasis out;
  out.rep = ConeBasis::Representation::position_grid;
  out.nodes.assign(es.eigenvalues().data(), es.eigenvalues().data() + md);
  Eigen::MatrixXcd Uc = U.cast<cplx>();
  out.orthonormality_defect =
      (Uc.adjoint() * Uc - Eigen::MatrixXcd::Identity(md, md)).cwiseAbs().maxCoeff();
  if (out.orthonormality_defect > 1e-10)
    throw std::logic_error("grid transform failed its orthonormality check");
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Ones(1, 1);
  for (int m = 0; m < b.phonons.modes(); ++m) full = kron_dense(full, Uc);
  if (full.rows() != b.phonons.dim())
    throw std::logic_error("grid transform does not match the phonon basis dimension");
  out.phonon_transform = std::move(full);
  out.tol = 1e-6;
  return out;
}

PositivityReport positivity_audit(const OperatorMatrix& H_tilde,
                                  const OperatorMatrix& phonon_energy, const ConeBasis& cone,
                                  const std::vector<double>& betas) {
  if (!H_tilde.rows) throw std::invalid_argument("operator lacks its basis reference");
  const SectorBasis& b = *H_tilde.rows;
  if (phonon_energy.mat.rows() != H_tilde.mat.rows() ||
      phonon_energy.mat.cols() != H_tilde.mat.cols())
    throw std::invalid_argument("phonon-energy block does not match the operator");
  if (cone.phonon_transform.rows() != b.phonons.dim())
    throw std::invalid_argument("cone was built for a different phonon truncation");

  PositivityReport out;
  out.representation =
      cone.rep == ConeBasis::Representation::fock_g0 ? "fock-g0" : "position-grid";
  const bool strict_applies = cone.rep == ConeBasis::Representation::fock_g0;

  Eigen::MatrixXcd C =
      kron_dense(Eigen::MatrixXcd::Identity(b.electron_dim(), b.electron_dim()),
                 cone.phonon_transform);
  Eigen::MatrixXcd H_rep = C.adjoint() * H_tilde.dense() * C;
  Eigen::MatrixXcd A = C.adjoint() * (H_tilde.dense() - phonon_energy.dense()) * C;

  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      if (i == j) continue;
      out.offdiag_max = std::max(out.offdiag_max, A(i, j).real());
      out.offdiag_imag = std::max(out.offdiag_imag, std::abs(A(i, j).imag()));
    }
  out.check_a = out.offdiag_max <= cone.tol && out.offdiag_imag <= cone.tol;

  out.check_b = out.check_c = true;
  for (double beta : betas) {
    if (beta < 0.0) throw std::invalid_argument("heat kernel needs beta >= 0");
    Eigen::MatrixXcd E = exp_hermitian(H_rep, cplx(-beta, 0.0));
    PositivityReport::BetaCheck c;
    c.beta = beta;
    c.min_entry = E.real().minCoeff();
    c.max_entry = E.real().maxCoeff();
    double imag_max = E.imag().cwiseAbs().maxCoeff();
    double scale = std::max(std::abs(c.max_entry), 1e-300);
    c.nonnegative = c.min_entry >= -cone.tol * scale && imag_max <= cone.tol * scale;
    c.strictly_positive = c.nonnegative && c.min_entry > 1e-12 * scale;
    out.check_b = out.check_b && c.nonnegative;
    out.check_c = out.check_c && c.strictly_positive;
    out.heat.push_back(c);
  }

  OperatorMatrix rep_op;
  rep_op.mat = H_rep.sparseView();
  rep_op.hermitian = true;
  rep_op.tag = "cone-representation";
  auto gs = ground_states(rep_op, 1);
  Eigen::VectorXcd v = phase_fixed(gs.eigenvectors.col(0));
  double vmax = v.real().maxCoeff();
  double vmin = v.real().minCoeff();
  double vimag = v.imag().cwiseAbs().maxCoeff();
  out.ground_min_ratio = vmax > 0 ? vmin / vmax : 0.0;
  out.check_d = vmax > 0 && out.ground_min_ratio > 1e-12 && vimag <= cone.tol;
  bool unique = gs.degeneracy_groups.empty() ? false
                                             : gs.degeneracy_groups.front().second == 1;
  if (!unique && rep_op.mat.rows() > 1) out.check_d = false;

  // (a) and (c) are exact statements only in the fock representation; on the
  // quadrature grid the translated-oscillator kernels oscillate in sign at any
  // finite node count, so there the audit stands on the heat kernel and the
  // ground vector alone
  out.passed = out.check_b && out.check_d &&
               ((out.check_a && out.check_c) || !strict_applies);
  return out;
}

Eigen::VectorXcd phase_fixed(const Eigen::VectorXcd& v) {
  if (v.size() == 0) return v;
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  cplx z = v(imax);
  if (std::abs(z) == 0.0) return v;
  return v * (std::conj(z) / std::abs(z));
}

double positive_overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("overlap of mismatched vectors");
  Eigen::VectorXcd fa = phase_fixed(a), fb = phase_fixed(b);
  for (const auto* v : {&fa, &fb})
    if (v->imag().norm() > 1e-8 * std::max(1e-300, v->norm()))
      throw std::invalid_argument(
          "vector has no dominant real representative after phase fixing (cone mismatch)");
  return std::real(fa.dot(fb));
}

Certificate ergodicity_certificate(const SectorBasis& b, const Lattice& g, double J,
                                   const ElectronState& source, const ElectronState& target) {
  if (b.kind != SectorBasis::Kind::klm)
    throw std::invalid_argument("certificates are defined on the electron model");
  if (b.n != g.sites()) throw std::invalid_argument("lattice does not match the basis");
  if (b.phonons.dim() != 1)
    throw std::invalid_argument("certificates need the phonon-free truncation (cutoff 0)");
  if (!g.connected())
    throw AssumptionError("lattice connectivity assumption violated: the graph is disconnected");
  if (source.twoM(b.n) != target.twoM(b.n))
    throw std::invalid_argument("source and target lie in different magnetization sectors");
  auto find_state = [&](const ElectronState& s, const char* what) {
    int e = b.find_word(electron_word(b.n, s).word);
    if (e < 0)
      throw std::invalid_argument(std::string(what) + " state is not in this sector basis");
    return e;
  };
  const int src = find_state(source, "source");
  const int tgt = find_state(target, "target");

  Certificate out;
  SpMat chain = sparse_identity(b.dim());
  double expected = 1.0;
  ElectronState cur = source;

  auto hop_to = [&](int dest) {
    auto path = g.shortest_path(cur.x, dest);
    if (path.empty()) throw std::logic_error("no path on a connected graph");
    for (std::size_t i = 1; i < path.size(); ++i) {
      int a = path[i - 1], c = path[i];
      auto D = build_directed_hop(b, c, a, g.t(a, c));
      chain = SpMat(D.mat * chain);
      expected *= g.t(a, c);
      CertificateStep st;
      st.kind = CertificateStep::Kind::hop;
      st.from = a;
      st.to = c;
      out.steps.push_back(st);
      ++out.hops;
    }
    cur.x = dest;
  };

  while (true) {
    std::uint32_t mm = cur.fword ^ target.fword;
    if (!mm) break;
    // flippable mismatch sites: the localized spin there must oppose the
    // conduction spin; sector conservation guarantees one exists
    int best = -1;
    std::size_t best_len = 0;
    for (int z = 0; z < b.n; ++z) {
      if (!((mm >> z) & 1u)) continue;
      int fspin = (cur.fword >> z) & 1u ? +1 : -1;
      if (fspin == cur.spin) continue;
      auto path = g.shortest_path(cur.x, z);
      if (best < 0 || path.size() < best_len) {
        best = z;
        best_len = path.size();
      }
    }
    if (best < 0) throw std::logic_error("flip scheduling stuck; sector bookkeeping is broken");
    hop_to(best);
    auto D1 = build_exchange_flip(b, best, J);
    chain = SpMat(D1.mat * chain);
    expected *= J;
    CertificateStep st;
    st.kind = CertificateStep::Kind::flip;
    st.site = best;
    out.steps.push_back(st);
    ++out.flips;
    int old_spin = cur.spin;
    cur.spin = (cur.fword >> best) & 1u ? +1 : -1;
    cur.fword = old_spin > 0 ? (cur.fword | (1u << best)) : (cur.fword & ~(1u << best));
  }
  hop_to(target.x);
  if (cur.spin != target.spin || cur.fword != target.fword)
    throw std::logic_error("certificate routing failed to reach the target");

  out.element = chain.coeff(tgt, src);
  out.expected_scalar = expected;
  OperatorMatrix op;
  op.rows = &b;
  op.cols = &b;
  op.mat = std::move(chain);
  op.tag = "ergodicity-chain";
  out.chain = std::move(op);
  return out;
}

}  // namespace klm
