#include "klm/operators.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "klm/errors.hpp"

namespace klm {
namespace {

using Trip = Eigen::Triplet<cplx>;

OpTerm term(cplx c, std::initializer_list<ModeOp> ops) {
  OpTerm t;
  t.coeff = c;
  t.ops.assign(ops);
  return t;
}

void append(OpSum& into, const OpSum& more, cplx scale = 1.0) {
  for (const auto& t : more) {
    into.push_back(t);
    into.back().coeff *= scale;
  }
}

// operator product a*b; b acts first, so its ops go to the right
OpSum product(const OpSum& a, const OpSum& b) {
  OpSum out;
  out.reserve(a.size() * b.size());
  for (const auto& ta : a)
    for (const auto& tb : b) {
      OpTerm t{ta.coeff * tb.coeff, ta.ops};
      t.ops.insert(t.ops.end(), tb.ops.begin(), tb.ops.end());
      out.push_back(std::move(t));
    }
  return out;
}

OpSum number_op(int mode) { return {term(1.0, {{true, mode}, {false, mode}})}; }

// kind-aware mode lookup: conduction spins exist only in the electron model;
// localized spins live on f modes there and on d modes in the hole model
struct Modes {
  int n;
  SectorBasis::Kind kind;
  bool conduction() const { return kind == SectorBasis::Kind::klm; }
  int loc(int x, int spin) const {
    return conduction() ? f_mode(n, x, spin) : d_mode(n, x, spin);
  }
};

Modes modes_of(const SectorBasis& b) { return Modes{b.n, b.kind}; }

void require_klm(const SectorBasis& b, const char* what) {
  if (b.kind != SectorBasis::Kind::klm)
    throw std::logic_error(std::string(what) + " needs an electron-model basis");
}

void require_nt(const SectorBasis& b, const char* what) {
  if (b.kind != SectorBasis::Kind::nt)
    throw std::logic_error(std::string(what) + " needs a hole-model basis");
}

void require_sites(const SectorBasis& b, int n, const char* what) {
  if (b.n != n)
    throw std::invalid_argument(std::string(what) + ": lattice size " + std::to_string(n) +
                                " does not match basis on " + std::to_string(b.n) + " sites");
}

OpSum s3_site_expr(const Modes& m, int x) {
  if (!m.conduction())
    throw std::logic_error("conduction spin operator requested in a hole-model basis");
  OpSum e;
  append(e, number_op(c_mode(m.n, x, +1)), 0.5);
  append(e, number_op(c_mode(m.n, x, -1)), -0.5);
  return e;
}

OpSum S3_site_expr(const Modes& m, int x) {
  OpSum e;
  append(e, number_op(m.loc(x, +1)), 0.5);
  append(e, number_op(m.loc(x, -1)), -0.5);
  return e;
}

OpSum S3_tot_expr(const Modes& m) {
  OpSum e;
  for (int x = 0; x < m.n; ++x) {
    if (m.conduction()) append(e, s3_site_expr(m, x));
    append(e, S3_site_expr(m, x));
  }
  return e;
}

OpSum ladder_site_expr(const Modes& m, Ladder op, int x) {
  switch (op) {
    case Ladder::splus:
      if (!m.conduction())
        throw std::logic_error("conduction ladder operator requested in a hole-model basis");
      return {term(1.0, {{true, c_mode(m.n, x, +1)}, {false, c_mode(m.n, x, -1)}})};
    case Ladder::sminus:
      if (!m.conduction())
        throw std::logic_error("conduction ladder operator requested in a hole-model basis");
      return {term(1.0, {{true, c_mode(m.n, x, -1)}, {false, c_mode(m.n, x, +1)}})};
    case Ladder::Splus:
      return {term(1.0, {{true, m.loc(x, +1)}, {false, m.loc(x, -1)}})};
    case Ladder::Sminus:
      return {term(1.0, {{true, m.loc(x, -1)}, {false, m.loc(x, +1)}})};
  }
  throw std::logic_error("unreachable ladder kind");
}

// s_x . S_x = s3 S3 + (1/2)(s+ S- + s- S+)
OpSum exchange_site_expr(const Modes& m, int x) {
  OpSum e = product(s3_site_expr(m, x), S3_site_expr(m, x));
  append(e, product(ladder_site_expr(m, Ladder::splus, x), ladder_site_expr(m, Ladder::Sminus, x)),
         0.5);
  append(e, product(ladder_site_expr(m, Ladder::sminus, x), ladder_site_expr(m, Ladder::Splus, x)),
         0.5);
  return e;
}

OpSum total_ladder_expr(const Modes& m, bool plus) {
  OpSum e;
  for (int x = 0; x < m.n; ++x) {
    if (m.conduction()) append(e, ladder_site_expr(m, plus ? Ladder::splus : Ladder::sminus, x));
    append(e, ladder_site_expr(m, plus ? Ladder::Splus : Ladder::Sminus, x));
  }
  return e;
}

SpMat from_triplets(int rows, int cols, std::vector<Trip>& trips) {
  SpMat m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SpMat drop_below(const SpMat& m, double tol) {
  std::vector<Trip> trips;
  trips.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (std::abs(it.value()) > tol) trips.emplace_back(it.row(), it.col(), it.value());
  return from_triplets(int(m.rows()), int(m.cols()), trips);
}

OperatorMatrix make_op(const SectorBasis& rows, const SectorBasis& cols, SpMat m, bool herm,
                       std::string tag) {
  OperatorMatrix op;
  op.rows = &rows;
  op.cols = &cols;
  op.mat = std::move(m);
  op.hermitian = herm;
  op.tag = std::move(tag);
  return op;
}

// per-site phonon displacement generator (1/omega) sum_z g_{x,z} (b*_z - b_z)
Eigen::MatrixXcd displacement_generator(const PhononBasis& ph, const ModelParams& p, int x) {
  const int d = ph.dim();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d, d);
  for (int z = 0; z < ph.modes(); ++z) {
    if (p.g(x, z) == 0.0) continue;
    A += (p.g(x, z) / p.omega) *
         Eigen::MatrixXcd(SpMat(phonon_bdag(ph, z) - phonon_b(ph, z)));
  }
  return A;
}

}  // namespace

double OperatorMatrix::hermiticity_defect() const {
  SpMat d = SpMat(mat.adjoint()) - mat;
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double OperatorMatrix::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < mat.outerSize(); ++k)
    for (SpMat::InnerIterator it(mat, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

void OperatorMatrix::export_triplets(std::ostream& os) const {
  os << "# rows " << mat.rows() << " cols " << mat.cols() << " nnz " << mat.nonZeros() << " tag "
     << tag << "\n";
  for (int k = 0; k < mat.outerSize(); ++k)
    for (SpMat::InnerIterator it(mat, k); it; ++it)
      os << it.row() << " " << it.col() << " " << fmt17(it.value().real()) << " "
         << fmt17(it.value().imag()) << "\n";
}

SpMat assemble_electron(const SectorBasis& rows, const SectorBasis& cols, const OpSum& expr) {
  std::vector<Trip> trips;
  for (int j = 0; j < cols.electron_dim(); ++j) {
    const SignedWord& in = cols.words[j];
    for (const auto& t : expr) {
      auto r = apply_term(t, in.word);
      if (!r) continue;
      int i = rows.find_word(r->word);
      if (i < 0) continue;  // lands outside the declared row space: projected out
      cplx amp = r->amp * double(in.sign * rows.words[i].sign);
      if (amp != cplx(0.0)) trips.emplace_back(i, j, amp);
    }
  }
  return from_triplets(rows.electron_dim(), cols.electron_dim(), trips);
}

SpMat kron_ph(const SpMat& elec, int ph_dim) {
  std::vector<Trip> trips;
  trips.reserve(std::size_t(elec.nonZeros()) * ph_dim);
  for (int k = 0; k < elec.outerSize(); ++k)
    for (SpMat::InnerIterator it(elec, k); it; ++it)
      for (int p = 0; p < ph_dim; ++p)
        trips.emplace_back(int(it.row()) * ph_dim + p, int(it.col()) * ph_dim + p, it.value());
  SpMat m(elec.rows() * ph_dim, elec.cols() * ph_dim);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SpMat kron_elec_ph(const SpMat& elec, const SpMat& ph) {
  std::vector<Trip> trips;
  trips.reserve(std::size_t(elec.nonZeros()) * std::size_t(ph.nonZeros()));
  for (int ke = 0; ke < elec.outerSize(); ++ke)
    for (SpMat::InnerIterator ite(elec, ke); ite; ++ite)
      for (int kp = 0; kp < ph.outerSize(); ++kp)
        for (SpMat::InnerIterator itp(ph, kp); itp; ++itp)
          trips.emplace_back(int(ite.row()) * int(ph.rows()) + int(itp.row()),
                             int(ite.col()) * int(ph.cols()) + int(itp.col()),
                             ite.value() * itp.value());
  SpMat m(elec.rows() * ph.rows(), elec.cols() * ph.cols());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SpMat sparse_identity(int d) {
  SpMat m(d, d);
  m.setIdentity();
  return m;
}

SpMat phonon_b(const PhononBasis& ph, int mode) {
  if (mode < 0 || mode >= ph.modes()) throw std::invalid_argument("phonon mode out of range");
  std::vector<Trip> trips;
  for (int i = 0; i < ph.dim(); ++i) {
    std::vector<int> occ = ph.state(i);
    if (occ[mode] == 0) continue;
    double amp = std::sqrt(double(occ[mode]));
    occ[mode] -= 1;
    int j = ph.index_of(occ);  // always present: the basis is downward closed
    trips.emplace_back(j, i, cplx(amp));
  }
  return from_triplets(ph.dim(), ph.dim(), trips);
}

SpMat phonon_bdag(const PhononBasis& ph, int mode) {
  if (mode < 0 || mode >= ph.modes()) throw std::invalid_argument("phonon mode out of range");
  std::vector<Trip> trips;
  for (int i = 0; i < ph.dim(); ++i) {
    std::vector<int> occ = ph.state(i);
    occ[mode] += 1;
    int j = ph.index_of(occ);
    if (j < 0) continue;  // top rung annihilated by the truncation
    trips.emplace_back(j, i, cplx(std::sqrt(double(occ[mode]))));
  }
  return from_triplets(ph.dim(), ph.dim(), trips);
}

SpMat phonon_nph(const PhononBasis& ph) {
  std::vector<Trip> trips;
  for (int i = 0; i < ph.dim(); ++i) {
    int q = ph.total_quanta(i);
    if (q) trips.emplace_back(i, i, cplx(double(q)));
  }
  return from_triplets(ph.dim(), ph.dim(), trips);
}

OperatorMatrix build_hopping(const SectorBasis& b, const Lattice& g) {
  require_klm(b, "build_hopping");
  require_sites(b, g.sites(), "build_hopping");
  OpSum e;
  for (auto [x, y] : g.edges())
    for (int s : {+1, -1}) {
      e.push_back(term(-g.t(x, y), {{true, c_mode(b.n, x, s)}, {false, c_mode(b.n, y, s)}}));
      e.push_back(term(-g.t(x, y), {{true, c_mode(b.n, y, s)}, {false, c_mode(b.n, x, s)}}));
    }
  return make_op(b, b, kron_ph(assemble_electron(b, b, e), b.phonons.dim()), true, "hopping");
}

OperatorMatrix build_exchange(const SectorBasis& b, double J) {
  require_klm(b, "build_exchange");
  const Modes m = modes_of(b);
  OpSum e;
  for (int x = 0; x < b.n; ++x) append(e, exchange_site_expr(m, x), J);
  return make_op(b, b, kron_ph(assemble_electron(b, b, e), b.phonons.dim()), true, "exchange");
}

OperatorMatrix build_zeeman(const SectorBasis& b, double h) {
  OpSum e;
  append(e, S3_tot_expr(modes_of(b)), -2.0 * h);
  return make_op(b, b, kron_ph(assemble_electron(b, b, e), b.phonons.dim()), true, "zeeman");
}

PhononTerms build_phonon_terms(const SectorBasis& b, const ModelParams& p) {
  require_klm(b, "build_phonon_terms");
  p.validate(b.n);
  const int phd = b.phonons.dim();
  SpMat coupling(b.dim(), b.dim());
  for (int x = 0; x < b.n; ++x) {
    SpMat q(phd, phd);
    bool any = false;
    for (int y = 0; y < b.phonons.modes(); ++y) {
      if (p.g(x, y) == 0.0) continue;
      q += p.g(x, y) * SpMat(phonon_b(b.phonons, y) + phonon_bdag(b.phonons, y));
      any = true;
    }
    if (!any) continue;
    OpSum nc;
    append(nc, number_op(c_mode(b.n, x, +1)));
    append(nc, number_op(c_mode(b.n, x, -1)));
    coupling += kron_elec_ph(assemble_electron(b, b, nc), q);
  }
  SpMat energy =
      kron_elec_ph(sparse_identity(b.electron_dim()), SpMat(p.omega * phonon_nph(b.phonons)));
  PhononTerms out;
  out.coupling = make_op(b, b, std::move(coupling), true, "phonon-coupling");
  out.energy = make_op(b, b, std::move(energy), true, "phonon-energy");
  return out;
}

OperatorMatrix build_H(const SectorBasis& b, const Lattice& g, const ModelParams& p) {
  auto hop = build_hopping(b, g);
  auto ex = build_exchange(b, p.J);
  auto ze = build_zeeman(b, p.h);
  auto ph = build_phonon_terms(b, p);
  SpMat m = hop.mat + ex.mat + ze.mat + ph.coupling.mat + ph.energy.mat;
  return make_op(b, b, std::move(m), true, "H");
}

OperatorMatrix build_spin_flip_unitary(const SectorBasis& b) {
  require_klm(b, "build_spin_flip_unitary");
  const Word down_mask = ((Word(1) << b.n) - 1) << b.n;  // conduction-down modes
  std::vector<Trip> trips;
  for (int e = 0; e < b.electron_dim(); ++e) {
    double s = (std::popcount(b.words[e].word & down_mask) & 1) ? -1.0 : 1.0;
    trips.emplace_back(e, e, cplx(s));
  }
  SpMat m = kron_ph(from_triplets(b.electron_dim(), b.electron_dim(), trips), b.phonons.dim());
  return make_op(b, b, std::move(m), true, "spin-flip-unitary");
}

LangFirsovResult build_lang_firsov(const SectorBasis& b, const ModelParams& p) {
  require_klm(b, "build_lang_firsov");
  p.validate(b.n);
  const int phd = b.phonons.dim();
  std::vector<Eigen::MatrixXcd> U(b.n);
  std::vector<char> have(b.n, 0);
  double defect = 0.0;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(phd, phd);
  for (const auto& s : b.els) {
    if (have[s.x]) continue;
    have[s.x] = 1;
    U[s.x] = exp_antihermitian(displacement_generator(b.phonons, p, s.x));
    defect = std::max(defect, operator_norm(U[s.x].adjoint() * U[s.x] - id));
  }
  std::vector<Trip> trips;
  for (int e = 0; e < b.electron_dim(); ++e) {
    const Eigen::MatrixXcd& Ux = U[b.els[e].x];
    for (int i = 0; i < phd; ++i)
      for (int j = 0; j < phd; ++j)
        if (std::abs(Ux(i, j)) > 1e-15) trips.emplace_back(e * phd + i, e * phd + j, Ux(i, j));
  }
  LangFirsovResult out;
  out.F = make_op(b, b, from_triplets(b.dim(), b.dim(), trips), false, "lang-firsov");
  out.unitarity_defect = defect;
  return out;
}

OperatorMatrix build_H_tilde(const SectorBasis& b, const Lattice& g, const ModelParams& p,
                             HTildeMode mode) {
  require_klm(b, "build_H_tilde");
  require_sites(b, g.sites(), "build_H_tilde");
  p.validate(b.n);
  if (mode == HTildeMode::conjugation) {
    auto H = build_H(b, g, p);
    auto lf = build_lang_firsov(b, p);
    auto sf = build_spin_flip_unitary(b);
    SpMat F = lf.F.mat * sf.mat;
    SpMat m = SpMat(F * H.mat) * SpMat(F.adjoint());
    double scale = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    return make_op(b, b, drop_below(m, 1e-15 * scale), true, "H-tilde-conjugation");
  }

  // direct assembly: phase-dressed hopping, ladder terms with flipped sign,
  // static polaron shift, free phonons
  const Modes md = modes_of(b);
  const int phd = b.phonons.dim();
  std::vector<Eigen::MatrixXcd> A(b.n);
  for (int x = 0; x < b.n; ++x) A[x] = displacement_generator(b.phonons, p, x);

  SpMat m(b.dim(), b.dim());
  for (auto [x, y] : g.edges()) {
    if (g.t(x, y) == 0.0) continue;
    OpSum exy;
    for (int s : {+1, -1})
      exy.push_back(term(-g.t(x, y), {{true, c_mode(b.n, x, s)}, {false, c_mode(b.n, y, s)}}));
    SpMat Exy = assemble_electron(b, b, exy);
    SpMat U = exp_antihermitian(A[x] - A[y]).sparseView();
    SpMat half = kron_elec_ph(Exy, U);
    m += half;
    m += SpMat(half.adjoint());
  }

  OpSum e;
  for (int x = 0; x < b.n; ++x) {
    append(e, product(s3_site_expr(md, x), S3_site_expr(md, x)), p.J);
    append(e,
           product(ladder_site_expr(md, Ladder::splus, x), ladder_site_expr(md, Ladder::Sminus, x)),
           -0.5 * p.J);
    append(e,
           product(ladder_site_expr(md, Ladder::sminus, x), ladder_site_expr(md, Ladder::Splus, x)),
           -0.5 * p.J);
  }
  append(e, S3_tot_expr(md), -2.0 * p.h);
  // -sum_{x,y} G_{x,y} n^c_x n^c_y with G = g g^T / omega; only x=y survives
  // in the one-electron space but the generic expression costs nothing
  Eigen::MatrixXd G = p.g * p.g.transpose() / p.omega;
  for (int x = 0; x < b.n; ++x)
    for (int y = 0; y < b.n; ++y) {
      if (G(x, y) == 0.0) continue;
      OpSum nx, ny;
      append(nx, number_op(c_mode(b.n, x, +1)));
      append(nx, number_op(c_mode(b.n, x, -1)));
      append(ny, number_op(c_mode(b.n, y, +1)));
      append(ny, number_op(c_mode(b.n, y, -1)));
      append(e, product(nx, ny), -G(x, y));
    }
  m += kron_ph(assemble_electron(b, b, e), phd);
  m += kron_elec_ph(sparse_identity(b.electron_dim()), SpMat(p.omega * phonon_nph(b.phonons)));
  return make_op(b, b, std::move(m), true, "H-tilde-closed-form");
}

OperatorMatrix build_nt_hamiltonian(const SectorBasis& b, const Lattice& g, const ModelParams& p,
                                    const Eigen::MatrixXd& b_matrix, NTCoupling coupling) {
  require_nt(b, "build_nt_hamiltonian");
  require_sites(b, g.sites(), "build_nt_hamiltonian");
  p.validate(b.n);
  if (b_matrix.rows() != b.n || b_matrix.cols() != b.n)
    throw std::invalid_argument("hole-hopping matrix has wrong shape");
  if (!b_matrix.isApprox(b_matrix.transpose(), 0.0))
    throw std::invalid_argument("hole-hopping matrix must be symmetric");

  const int phd = b.phonons.dim();
  OpSum hop;
  for (int x = 0; x < b.n; ++x)
    for (int y = 0; y < b.n; ++y) {
      if (x == y || b_matrix(x, y) == 0.0) continue;
      for (int s : {+1, -1})
        hop.push_back(
            term(b_matrix(x, y), {{true, d_mode(b.n, x, s)}, {false, d_mode(b.n, y, s)}}));
    }
  append(hop, S3_tot_expr(modes_of(b)), -2.0 * p.h);
  SpMat m = kron_ph(assemble_electron(b, b, hop), phd);

  for (int x = 0; x < b.n; ++x) {
    SpMat q(phd, phd);
    bool any = false;
    for (int y = 0; y < b.phonons.modes(); ++y) {
      if (p.g(x, y) == 0.0) continue;
      q += p.g(x, y) * SpMat(phonon_b(b.phonons, y) + phonon_bdag(b.phonons, y));
      any = true;
    }
    if (!any) continue;
    OpSum dens;
    if (coupling == NTCoupling::hole) dens.push_back(term(1.0, {}));
    const double sgn = (coupling == NTCoupling::hole) ? -1.0 : 1.0;
    append(dens, number_op(d_mode(b.n, x, +1)), sgn);
    append(dens, number_op(d_mode(b.n, x, -1)), sgn);
    m += kron_elec_ph(assemble_electron(b, b, dens), q);
  }
  m += kron_elec_ph(sparse_identity(b.electron_dim()), SpMat(p.omega * phonon_nph(b.phonons)));
  return make_op(b, b, std::move(m), true,
                 coupling == NTCoupling::hole ? "H-nt-hole-coupling" : "H-nt-electron-coupling");
}

OperatorMatrix build_s3_site(const SectorBasis& b, int x) {
  return make_op(b, b, kron_ph(assemble_electron(b, b, s3_site_expr(modes_of(b), x)),
                               b.phonons.dim()),
                 true, "s3[" + std::to_string(x) + "]");
}

OperatorMatrix build_S3_site(const SectorBasis& b, int x) {
  return make_op(b, b, kron_ph(assemble_electron(b, b, S3_site_expr(modes_of(b), x)),
                               b.phonons.dim()),
                 true, "S3[" + std::to_string(x) + "]");
}

OperatorMatrix build_S3_tot(const SectorBasis& b) {
  return make_op(b, b, kron_ph(assemble_electron(b, b, S3_tot_expr(modes_of(b))), b.phonons.dim()),
                 true, "S3-tot");
}

OperatorMatrix build_S2_tot(const SectorBasis& b) {
  const Modes m = modes_of(b);
  // S^2 = S3^2 + S3 + S- S+ : every factor preserves the sector
  OpSum s3 = S3_tot_expr(m);
  OpSum e = product(s3, s3);
  append(e, s3);
  append(e, product(total_ladder_expr(m, false), total_ladder_expr(m, true)));
  return make_op(b, b, kron_ph(assemble_electron(b, b, e), b.phonons.dim()), true, "S2-tot");
}

OperatorMatrix build_site_ladder(const SectorBasis& to, const SectorBasis& from, Ladder op,
                                 int x) {
  if (to.kind != from.kind || to.n != from.n)
    throw std::invalid_argument("ladder operator between incompatible bases");
  SpMat m = kron_ph(assemble_electron(to, from, ladder_site_expr(modes_of(from), op, x)),
                    from.phonons.dim());
  const char* names[] = {"s+", "s-", "S+", "S-"};
  return make_op(to, from, std::move(m), false,
                 std::string(names[int(op)]) + "[" + std::to_string(x) + "]");
}

OperatorMatrix build_Splus_tot(const SectorBasis& to, const SectorBasis& from) {
  if (to.kind != from.kind || to.n != from.n)
    throw std::invalid_argument("ladder operator between incompatible bases");
  SpMat m = kron_ph(assemble_electron(to, from, total_ladder_expr(modes_of(from), true)),
                    from.phonons.dim());
  return make_op(to, from, std::move(m), false, "S+-tot");
}

OperatorMatrix build_ladder_product(const SectorBasis& b, Ladder a, int x, Ladder bop, int y) {
  const Modes m = modes_of(b);
  OpSum e = product(ladder_site_expr(m, a, x), ladder_site_expr(m, bop, y));
  const char* names[] = {"s+", "s-", "S+", "S-"};
  return make_op(b, b, kron_ph(assemble_electron(b, b, e), b.phonons.dim()), false,
                 std::string(names[int(a)]) + "[" + std::to_string(x) + "]" + names[int(bop)] +
                     "[" + std::to_string(y) + "]");
}

OperatorMatrix build_directed_hop(const SectorBasis& b, int to, int from, double amp) {
  require_klm(b, "build_directed_hop");
  if (to < 0 || to >= b.n || from < 0 || from >= b.n || to == from)
    throw std::invalid_argument("directed hop needs two distinct sites on the lattice");
  OpSum e;
  for (int s : {+1, -1})
    e.push_back(term(amp, {{true, c_mode(b.n, to, s)}, {false, c_mode(b.n, from, s)}}));
  return make_op(b, b, kron_ph(assemble_electron(b, b, e), b.phonons.dim()), false,
                 "hop[" + std::to_string(from) + "->" + std::to_string(to) + "]");
}

OperatorMatrix build_exchange_flip(const SectorBasis& b, int x, double J) {
  require_klm(b, "build_exchange_flip");
  const Modes m = modes_of(b);
  OpSum e;
  append(e, product(ladder_site_expr(m, Ladder::splus, x), ladder_site_expr(m, Ladder::Sminus, x)),
         J);
  append(e, product(ladder_site_expr(m, Ladder::sminus, x), ladder_site_expr(m, Ladder::Splus, x)),
         J);
  return make_op(b, b, kron_ph(assemble_electron(b, b, e), b.phonons.dim()), true,
                 "flip[" + std::to_string(x) + "]");
}

SpinOps build_spin_ops(const SectorBasis& b) {
  SpinOps out;
  for (int x = 0; x < b.n; ++x) {
    if (b.kind == SectorBasis::Kind::klm) out.s3.push_back(build_s3_site(b, x));
    out.S3.push_back(build_S3_site(b, x));
  }
  out.S3_tot = build_S3_tot(b);
  out.S2_tot = build_S2_tot(b);
  return out;
}

}  // namespace klm
