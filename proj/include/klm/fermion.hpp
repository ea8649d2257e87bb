#pragma once
#include <bit>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "klm/util.hpp"

namespace klm {

// Occupation word over a fixed global mode order; bit m set = mode m occupied.
// All fermionic matrix elements are produced by the generic sign rule below,
// never by case analysis.
using Word = std::uint64_t;

struct SignedWord {
  int sign = 1;
  Word word = 0;
};

inline bool occupied(Word w, int mode) { return (w >> mode) & 1u; }

// (-1)^(number of occupied modes strictly below `mode`)
inline int parity_below(Word w, int mode) {
  Word mask = (Word(1) << mode) - 1;
  return (std::popcount(w & mask) & 1) ? -1 : 1;
}

inline std::optional<SignedWord> fermi_create(Word w, int mode) {
  if (occupied(w, mode)) return std::nullopt;
  return SignedWord{parity_below(w, mode), w | (Word(1) << mode)};
}

inline std::optional<SignedWord> fermi_annihilate(Word w, int mode) {
  if (!occupied(w, mode)) return std::nullopt;
  return SignedWord{parity_below(w, mode), w & ~(Word(1) << mode)};
}

struct ModeOp {
  bool dagger;
  int mode;
};

// coeff * ops[0] ops[1] ... ops[k-1]  (operator product; ops[k-1] acts first)
struct OpTerm {
  cplx coeff;
  std::vector<ModeOp> ops;
};
using OpSum = std::vector<OpTerm>;

struct Applied {
  cplx amp;
  Word word;
};

inline std::optional<Applied> apply_term(const OpTerm& t, Word w) {
  int sign = 1;
  for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it) {
    auto r = it->dagger ? fermi_create(w, it->mode) : fermi_annihilate(w, it->mode);
    if (!r) return std::nullopt;
    sign *= r->sign;
    w = r->word;
  }
  return Applied{t.coeff * double(sign), w};
}

// a*_{m0} a*_{m1} ... a*_{mk} |vacuum>, rightmost first; modes must be distinct
inline SignedWord create_string(const std::vector<int>& modes) {
  SignedWord s;
  for (auto it = modes.rbegin(); it != modes.rend(); ++it) {
    auto r = fermi_create(s.word, *it);
    s.sign *= r->sign;
    s.word = r->word;
  }
  return s;
}

}  // namespace klm
