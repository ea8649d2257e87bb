#include "klm/basis.hpp"

#include <stdexcept>

namespace klm {

SignedWord electron_word(int n, const ElectronState& s) {
  std::vector<int> modes;
  modes.reserve(n + 1);
  modes.push_back(c_mode(n, s.x, s.spin));
  for (int y = 0; y < n; ++y)
    modes.push_back(f_mode(n, y, (s.fword >> y) & 1u ? +1 : -1));
  return create_string(modes);
}

SignedWord nt_word(int n, const HoleLabel& s) {
  std::vector<int> modes;
  modes.reserve(n);
  for (int y = 0; y < n; ++y) {
    int spin = y == s.x ? +1 : ((s.word >> y) & 1u ? +1 : -1);
    modes.push_back(d_mode(n, y, spin));
  }
  SignedWord w = create_string(modes);
  auto r = fermi_annihilate(w.word, d_mode(n, s.x, +1));
  return SignedWord{w.sign * r->sign, r->word};
}

namespace {

std::uint64_t pack_occ(const std::vector<int>& occ) {
  std::uint64_t k = 0;
  for (std::size_t m = 0; m < occ.size(); ++m) k |= std::uint64_t(occ[m] & 0xff) << (8 * m);
  return k;
}

void enumerate_occ(int mode, int modes, int cutoff, PhononBasis::Policy pol, int used,
                   std::vector<int>& occ, std::vector<std::vector<int>>& out) {
  if (mode == modes) {
    out.push_back(occ);
    return;
  }
  int top = pol == PhononBasis::Policy::total ? cutoff - used : cutoff;
  for (int q = 0; q <= top; ++q) {
    occ[mode] = q;
    enumerate_occ(mode + 1, modes, cutoff, pol, used + q, occ, out);
  }
  occ[mode] = 0;
}

}  // namespace

PhononBasis::PhononBasis(int modes, Policy policy, int cutoff)
    : modes_(modes), cutoff_(cutoff), policy_(policy) {
  if (modes < 1 || modes > 8)
    throw std::invalid_argument("phonon modes must be 1..8 (desk scale)");
  if (cutoff < 0 || cutoff > 200) throw std::invalid_argument("phonon cutoff must be 0..200");
  std::vector<int> occ(modes, 0);
  enumerate_occ(0, modes, cutoff, policy, 0, occ, states_);
  if (states_.size() > 2'000'000u) throw std::invalid_argument("phonon basis too large");
  for (int i = 0; i < int(states_.size()); ++i) index_[pack_occ(states_[i])] = i;
}

int PhononBasis::index_of(const std::vector<int>& occ) const {
  if (int(occ.size()) != modes_) return -1;
  for (int q : occ)
    if (q < 0 || q > 255) return -1;
  auto it = index_.find(pack_occ(occ));
  return it == index_.end() ? -1 : it->second;
}

int PhononBasis::total_quanta(int i) const {
  int s = 0;
  for (int q : states_[i]) s += q;
  return s;
}

std::string PhononBasis::tag() const {
  return (policy_ == Policy::total ? "total:" : "per-mode:") + std::to_string(cutoff_);
}

std::vector<PhononBasis> phonon_truncation_series(int modes, PhononBasis::Policy policy,
                                                  const std::vector<int>& cutoffs) {
  if (cutoffs.empty()) throw std::invalid_argument("cutoff ladder must be nonempty");
  for (std::size_t i = 1; i < cutoffs.size(); ++i)
    if (cutoffs[i] <= cutoffs[i - 1])
      throw std::invalid_argument("cutoff ladder must be strictly increasing");
  std::vector<PhononBasis> out;
  out.reserve(cutoffs.size());
  for (int c : cutoffs) out.emplace_back(modes, policy, c);
  return out;
}

SectorBasis::SectorBasis(Kind k, int twoM_, int n_, PhononBasis ph)
    : kind(k), twoM(twoM_), n(n_), phonons(std::move(ph)) {}

void SectorBasis::finalize() {
  windex_.clear();
  for (int i = 0; i < int(words.size()); ++i) {
    auto [it, fresh] = windex_.emplace(words[i].word, i);
    if (!fresh) throw std::logic_error("duplicate occupation word in basis");
  }
}

int SectorBasis::find_word(Word w) const {
  auto it = windex_.find(w);
  return it == windex_.end() ? -1 : it->second;
}

std::string SectorBasis::describe(int i) const {
  int e = e_of(i), p = p_of(i);
  std::string s;
  if (kind == Kind::klm) {
    const auto& st = els[e];
    s = "x=" + std::to_string(st.x) + (st.spin > 0 ? " up" : " dn") + " f=";
    for (int y = 0; y < n; ++y) s += (st.fword >> y) & 1u ? 'U' : 'D';
  } else {
    const auto& st = holes[e];
    s = "hole=" + std::to_string(st.x) + " d=";
    for (int y = 0; y < n; ++y) s += y == st.x ? '_' : ((st.word >> y) & 1u ? 'U' : 'D');
  }
  s += " ph=(";
  const auto& occ = phonons.state(p);
  for (std::size_t m = 0; m < occ.size(); ++m)
    s += (m ? "," : "") + std::to_string(occ[m]);
  return s + ")";
}

std::vector<int> klm_sector_twoMs(int n) {
  std::vector<int> out;
  for (int m = -(n + 1); m <= n + 1; m += 2) out.push_back(m);
  return out;
}

std::vector<int> nt_sector_twoMs(int n) {
  std::vector<int> out;
  for (int m = -(n - 1); m <= n - 1; m += 2) out.push_back(m);
  return out;
}

namespace {

void check_sites(int n) {
  if (n > 16) throw std::invalid_argument("at most 16 sites supported (64 fermionic modes)");
}

void check_twoM(int twoM, int lo, int hi, const char* what) {
  if (twoM == SectorBasis::all_sectors) return;
  if (twoM < lo || twoM > hi || ((twoM - lo) % 2) != 0)
    throw std::invalid_argument(std::string("2M=") + std::to_string(twoM) +
                                " is not in the " + what + " sector range [" +
                                std::to_string(lo) + "," + std::to_string(hi) + "] step 2");
}

SectorBasis enumerate_klm(const Lattice& g, int twoM, const PhononBasis& ph) {
  int n = g.sites();
  check_sites(n);
  check_twoM(twoM, -(n + 1), n + 1, "electron");
  SectorBasis b(SectorBasis::Kind::klm, twoM, n, ph);
  for (int x = 0; x < n; ++x)
    for (int spin : {+1, -1})
      for (std::uint32_t w = 0; w < (1u << n); ++w) {
        ElectronState st{x, spin, w};
        if (twoM != SectorBasis::all_sectors && st.twoM(n) != twoM) continue;
        b.els.push_back(st);
        b.words.push_back(electron_word(n, st));
      }
  b.finalize();
  return b;
}

SectorBasis enumerate_nt(const Lattice& g, int twoM, const PhononBasis& ph) {
  int n = g.sites();
  check_sites(n);
  if (n < 2) throw std::invalid_argument("hole-hopping basis needs at least 2 sites");
  check_twoM(twoM, -(n - 1), n - 1, "hole-model");
  SectorBasis b(SectorBasis::Kind::nt, twoM, n, ph);
  for (const auto& lab : enumerate_hole_labels(n, twoM)) {
    b.holes.push_back(lab);
    b.words.push_back(nt_word(n, lab));
  }
  b.finalize();
  return b;
}

}  // namespace

std::vector<HoleLabel> enumerate_hole_labels(int n, int twoM) {
  std::vector<HoleLabel> out;
  for (int x = 0; x < n; ++x)
    for (std::uint32_t w = 0; w < (1u << n); ++w) {
      if ((w >> x) & 1u) continue;
      HoleLabel lab{x, w};
      if (twoM != SectorBasis::all_sectors && lab.twoM(n) != twoM) continue;
      out.push_back(lab);
    }
  return out;
}

SectorBasis enumerate_sector(const Lattice& g, int twoM, const PhononBasis& ph) {
  if (twoM == SectorBasis::all_sectors)
    throw std::invalid_argument("use enumerate_full for the whole space");
  return enumerate_klm(g, twoM, ph);
}

SectorBasis enumerate_full(const Lattice& g, const PhononBasis& ph) {
  return enumerate_klm(g, SectorBasis::all_sectors, ph);
}

SectorBasis enumerate_nt_sector(const Lattice& g, int twoM, const PhononBasis& ph) {
  if (twoM == SectorBasis::all_sectors)
    throw std::invalid_argument("use enumerate_nt_full for the whole space");
  return enumerate_nt(g, twoM, ph);
}

SectorBasis enumerate_nt_full(const Lattice& g, const PhononBasis& ph) {
  return enumerate_nt(g, SectorBasis::all_sectors, ph);
}

}  // namespace klm
