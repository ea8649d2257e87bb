#pragma once
#include "klm/operators.hpp"

namespace klm {

struct OnsiteExchange {
  double singlet;  // lowest eigenvalue of s.S on one site (nondegenerate)
  double triplet;  // highest (threefold)
};
// computed from the one-site model, never hard-coded
OnsiteExchange onsite_exchange_eigenvalues();

// energy shift added to H so the singlet block becomes J-independent
inline double renorm_constant(double J) { return -onsite_exchange_eigenvalues().singlet * J; }

// On-site singlet/triplet split of an electron-model sector.  Each hole label
// (x, spin word on the other sites) indexes one singlet vector
//   (1/sqrt2)(c*_{x,up} f*_{x,dn} - c*_{x,dn} f*_{x,up}) prod_{y!=x} f*_{y,sigma_y} |0>
// and the three triplet partners span the orthogonal complement.  Label order
// equals enumerate_hole_labels so the hole model shares it verbatim.
struct SingletSpace {
  struct TripletLabel {
    int m2;  // twice the on-site pair magnetization: +2, 0, -2
    HoleLabel label;
  };

  const SectorBasis* basis = nullptr;
  std::vector<HoleLabel> labels;
  std::vector<TripletLabel> triplet_labels;
  SpMat S;       // isometry, full space <- singlet labels x phonons
  SpMat T;       // isometry, full space <- triplet labels x phonons
  SpMat P;       // S S*
  SpMat P_perp;  // 1 - P  (= T T*)
  int rank() const { return int(labels.size()) * basis->phonons.dim(); }
};
// verifies S*S = 1, T*T = 1, S*T = 0 and S S* + T T* = 1 during construction
SingletSpace build_singlet_space(const SectorBasis& b);

// shifted Hamiltonian split by the singlet projection; the off-diagonal part
// carries only the hopping term and is therefore J-independent
struct Decomposition {
  const SectorBasis* basis = nullptr;
  SingletSpace sing;
  double J = 0.0, h = 0.0;
  double shift = 0.0;  // renorm_constant(J)
  SpMat R;             // hopping + zeeman + phonon terms (everything but exchange)
  SpMat H_ren;         // H + shift
  SpMat H_inf;         // P H_ren P
  SpMat H_1;           // P_perp H_ren P_perp
  SpMat H_01;          // cross terms
};
Decomposition build_decomposition(const SectorBasis& b, const Lattice& g, const ModelParams& p);

// S* R S written in the hole-model basis (same label enumeration, so the
// intertwining unitary is the identity permutation); bit-for-bit independent
// of J by construction
OperatorMatrix effective_hamiltonian(const Decomposition& d, const SectorBasis& nt_basis);

double max_entry_diff(const SpMat& a, const SpMat& b);

// operator norm of (H_ren - z)^{-1} - S (H_eff - z)^{-1} S*, dense solves
double resolvent_gap(const Decomposition& d, cplx z);

// operator norm of the block-off-diagonal part (used to place z)
double offdiagonal_norm(const Decomposition& d);

// ground energy of H_1 restricted to the triplet complement, per J, with a
// linear fit against the computed slope 1/4 - E_singlet and the directly
// diagonalized intercept
struct SeparationResult {
  std::vector<std::pair<double, double>> points;  // (J, energy)
  LinearFit fit;
  double predicted_slope = 0.0;
  double predicted_intercept = 0.0;
};
SeparationResult separation_energy(const SectorBasis& b, const Lattice& g, const ModelParams& base,
                                   const std::vector<double>& J_list);

}  // namespace klm
