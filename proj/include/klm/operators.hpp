#pragma once
#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

#include "klm/basis.hpp"

namespace klm {

using SpMat = Eigen::SparseMatrix<cplx>;

// Sparse matrix in a declared basis (or basis pair for sector-shifting maps).
// Basis pointers are non-owning: the bases must outlive the operator.
struct OperatorMatrix {
  const SectorBasis* rows = nullptr;
  const SectorBasis* cols = nullptr;
  SpMat mat;
  bool hermitian = false;
  std::string tag;

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(mat); }
  double hermiticity_defect() const;  // max entry of |A - A*|
  double max_abs() const;
  // header line with dimensions and tag, then "row col re im" per entry
  void export_triplets(std::ostream& os) const;
};

// fermionic expression evaluated between two declared bases (electron factor
// only); matrix elements come from the generic occupation-sign rule
SpMat assemble_electron(const SectorBasis& rows, const SectorBasis& cols, const OpSum& expr);

// tensor helpers for the electron x phonon index (i = e * ph_dim + p)
SpMat kron_ph(const SpMat& elec, int ph_dim);
SpMat kron_elec_ph(const SpMat& elec, const SpMat& ph);
SpMat sparse_identity(int d);

// truncated harmonic ladder matrices; b* annihilates the top rung
SpMat phonon_b(const PhononBasis& ph, int mode);
SpMat phonon_bdag(const PhononBasis& ph, int mode);
SpMat phonon_nph(const PhononBasis& ph);

OperatorMatrix build_hopping(const SectorBasis& b, const Lattice& g);
OperatorMatrix build_exchange(const SectorBasis& b, double J);
OperatorMatrix build_zeeman(const SectorBasis& b, double h);

struct PhononTerms {
  OperatorMatrix coupling;  // sum g_{x,y} n^c_x (b_y + b*_y)
  OperatorMatrix energy;    // omega N_ph
};
PhononTerms build_phonon_terms(const SectorBasis& b, const ModelParams& p);

OperatorMatrix build_H(const SectorBasis& b, const Lattice& g, const ModelParams& p);

// diagonal unitary exp(i pi N_down^c): -1 on conduction-spin-down states
OperatorMatrix build_spin_flip_unitary(const SectorBasis& b);

struct LangFirsovResult {
  OperatorMatrix F;          // exp(L_c), block diagonal over electron states
  double unitarity_defect;   // operator norm of F*F - 1
};
LangFirsovResult build_lang_firsov(const SectorBasis& b, const ModelParams& p);

enum class HTildeMode { conjugation, closed_form };
// conjugation: F H F* with F = exp(L_c) exp(i pi N_down^c);
// closed_form: phase-dressed hopping, sign-flipped exchange ladder, polaron
// shift, assembled directly with exponentiated phase operators
OperatorMatrix build_H_tilde(const SectorBasis& b, const Lattice& g, const ModelParams& p,
                             HTildeMode mode);

// hole-hopping model with Gutzwiller constraint (implicit in the basis).
// Phonons couple to the hole density by default, which makes the model the
// exact unitary image of the strong-coupling effective Hamiltonian; the
// electron-density variant is kept for comparison.
enum class NTCoupling { hole, electron };
OperatorMatrix build_nt_hamiltonian(const SectorBasis& b, const Lattice& g,
                                    const ModelParams& p, const Eigen::MatrixXd& b_matrix,
                                    NTCoupling coupling = NTCoupling::hole);

// spin operators; lowercase s = conduction, uppercase S = localized spin
enum class Ladder { splus, sminus, Splus, Sminus };
OperatorMatrix build_s3_site(const SectorBasis& b, int x);
OperatorMatrix build_S3_site(const SectorBasis& b, int x);
OperatorMatrix build_S3_tot(const SectorBasis& b);
OperatorMatrix build_S2_tot(const SectorBasis& b);  // M-preserving assembly
OperatorMatrix build_site_ladder(const SectorBasis& to, const SectorBasis& from, Ladder op,
                                 int x);
OperatorMatrix build_Splus_tot(const SectorBasis& to, const SectorBasis& from);
// two-point product a_x b_y (M-preserving combinations only)
OperatorMatrix build_ladder_product(const SectorBasis& b, Ladder a, int x, Ladder bop, int y);

struct SpinOps {
  std::vector<OperatorMatrix> s3, S3;
  OperatorMatrix S3_tot, S2_tot;
};
SpinOps build_spin_ops(const SectorBasis& b);

// single directed conduction hop: amp * sum_sigma c*_{to,sigma} c_{from,sigma}
OperatorMatrix build_directed_hop(const SectorBasis& b, int to, int from, double amp);
// on-site exchange flip J (s+ S- + s- S+)_x
OperatorMatrix build_exchange_flip(const SectorBasis& b, int x, double J);

}  // namespace klm
