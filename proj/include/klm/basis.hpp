#pragma once
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "klm/fermion.hpp"
#include "klm/lattice.hpp"

namespace klm {

// global fermionic mode order: conduction-up by site, conduction-down by site,
// f-up by site, f-down by site; spin is +1 (up) or -1 (down)
inline int c_mode(int n, int x, int spin) { return spin > 0 ? x : n + x; }
inline int f_mode(int n, int x, int spin) { return spin > 0 ? 2 * n + x : 3 * n + x; }
// hole-hopping (d-electron) models use: d-up by site, d-down by site
inline int d_mode(int n, int x, int spin) { return spin > 0 ? x : n + x; }

// one conduction electron at site x with spin sigma, plus one localized
// f-electron per site; bit y of fword set = f-spin up at y
struct ElectronState {
  int x;
  int spin;
  std::uint32_t fword;
  int twoM(int n) const { return spin + 2 * std::popcount(fword) - n; }
};

// hole at site x, spins on the remaining sites (bit x always clear); doubles
// as the on-site-singlet label of the strong-coupling subspace
struct HoleLabel {
  int x;
  std::uint32_t word;
  int twoM(int n) const { return 2 * std::popcount(word) - (n - 1); }
};

// occupation word and overall sign of c*_{x,sigma} (prod_y f*_{y,sigma_y}) |0>
SignedWord electron_word(int n, const ElectronState& s);
// occupation word and sign of d_{x,s} (prod_y d*_{y,sigma_y}) |0>
// (independent of the spin s removed at x)
SignedWord nt_word(int n, const HoleLabel& s);

class PhononBasis {
 public:
  enum class Policy { total, per_mode };
  PhononBasis(int modes, Policy policy, int cutoff);

  int modes() const { return modes_; }
  int dim() const { return int(states_.size()); }
  Policy policy() const { return policy_; }
  int cutoff() const { return cutoff_; }
  const std::vector<std::vector<int>>& states() const { return states_; }
  const std::vector<int>& state(int i) const { return states_[i]; }
  int index_of(const std::vector<int>& occ) const;  // -1 if not in the basis
  int total_quanta(int i) const;
  std::string tag() const;  // e.g. "total:3"

 private:
  int modes_, cutoff_;
  Policy policy_;
  std::vector<std::vector<int>> states_;  // lexicographic
  std::unordered_map<std::uint64_t, int> index_;
};

// strictly increasing cutoffs, each basis embedding in the next
std::vector<PhononBasis> phonon_truncation_series(int modes, PhononBasis::Policy policy,
                                                  const std::vector<int>& cutoffs);

// electron-side states of one S3_tot sector (or of the whole space) tensored
// with a truncated phonon basis; index = electron_index * phonon_dim + phonon_index
class SectorBasis {
 public:
  enum class Kind { klm, nt };
  static constexpr int all_sectors = std::numeric_limits<int>::min();

  Kind kind;
  int twoM;  // all_sectors for a full-space basis
  int n;     // lattice sites
  PhononBasis phonons;
  std::vector<ElectronState> els;   // klm kind
  std::vector<HoleLabel> holes;     // nt kind
  std::vector<SignedWord> words;    // per electron-side state: occupation + sign

  int electron_dim() const { return int(words.size()); }
  int dim() const { return electron_dim() * phonons.dim(); }
  int index(int e, int p) const { return e * phonons.dim() + p; }
  int e_of(int i) const { return i / phonons.dim(); }
  int p_of(int i) const { return i % phonons.dim(); }
  int find_word(Word w) const;  // -1 if absent
  std::string describe(int i) const;

  SectorBasis(Kind k, int twoM_, int n_, PhononBasis ph);
  void finalize();  // builds the word index after states are filled

 private:
  std::unordered_map<Word, int> windex_;
};

std::vector<int> klm_sector_twoMs(int n);  // -(n+1) .. n+1 in steps of 2
std::vector<int> nt_sector_twoMs(int n);   // -(n-1) .. n-1 in steps of 2

SectorBasis enumerate_sector(const Lattice& g, int twoM, const PhononBasis& ph);
SectorBasis enumerate_full(const Lattice& g, const PhononBasis& ph);
SectorBasis enumerate_nt_sector(const Lattice& g, int twoM, const PhononBasis& ph);
SectorBasis enumerate_nt_full(const Lattice& g, const PhononBasis& ph);

// shared by enumerate_nt_* and the singlet-subspace construction so the two
// sides of the hole-model equivalence use the same label order
std::vector<HoleLabel> enumerate_hole_labels(int n, int twoM /* or all_sectors */);

}  // namespace klm
