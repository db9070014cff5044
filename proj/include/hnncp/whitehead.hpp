#pragma once

#include <cstdint>

#include "hnncp/substitution.hpp"
#include "hnncp/word.hpp"

namespace hnncp {

namespace detail {

// Type II Whitehead automorphism (A, a): for every generator x other than
// a^{+-1}, x -> a^-1 x if x^-1 in A only, x a if x in A only, a^-1 x a if both.
// `mask` holds two bits per other generator: bit 0 = x in A, bit 1 = x^-1 in A.
inline Substitution whitehead_automorphism(int rank, Letter a, std::uint64_t mask) {
  Substitution img = identity_substitution(rank);
  int ga = a < 0 ? -a : a;
  int slot = 0;
  for (int x = 1; x <= rank; ++x) {
    if (x == ga) continue;
    bool in = (mask >> (2 * slot)) & 1u;
    bool inv_in = (mask >> (2 * slot + 1)) & 1u;
    ++slot;
    Word w = Word::letter(x);
    if (inv_in) w = Word::letter(-a) * w;
    if (in) w = w * Word::letter(a);
    img[x - 1] = w;
  }
  return img;
}

}  // namespace detail

/// Cyclic length minimisation by type II Whitehead automorphisms. Returns the
/// cyclically reduced core of a Whitehead-minimal image of w.
inline Word whitehead_minimize(const Word& w, int rank) {
  Word current = cyclic_reduce(w).core;
  const std::uint64_t subsets = std::uint64_t{1} << (2 * (rank - 1));
  bool improved = true;
  while (improved && current.size() > 1) {
    improved = false;
    for (Letter a = -rank; a <= rank && !improved; ++a) {
      if (a == 0) continue;
      for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        Word image = cyclic_reduce(substitute(detail::whitehead_automorphism(rank, a, mask), current)).core;
        if (image.size() < current.size()) {
          current = std::move(image);
          improved = true;
          break;
        }
      }
    }
  }
  return current;
}

/// True iff w belongs to some free basis of the free group of the given rank.
inline bool is_primitive(const Word& w, int rank) {
  if (w.empty()) return false;
  if (rank < 1 || w.max_generator() > rank) throw WordError("word outside the alphabet");
  return whitehead_minimize(w, rank).size() == 1;
}

}  // namespace hnncp
