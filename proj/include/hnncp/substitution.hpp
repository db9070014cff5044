#pragma once

#include <vector>

#include "hnncp/word.hpp"

namespace hnncp {

/// Images of generators 1..n; letter g maps to images[g-1], -g to its inverse.
using Substitution = std::vector<Word>;

inline Word substitute(const Substitution& images, const Word& w) {
  Word out;
  for (Letter x : w) {
    std::size_t g = static_cast<std::size_t>(x < 0 ? -x : x);
    if (g > images.size()) throw WordError("substitution has no image for generator " + std::to_string(g));
    const Word& img = images[g - 1];
    if (x > 0) {
      for (Letter y : img) out.push(y);
    } else {
      for (auto it = img.end(); it != img.begin();) out.push(-*--it);
    }
  }
  return out;
}

/// (f after g): generator i maps to f(g(i)).
inline Substitution compose(const Substitution& f, const Substitution& g) {
  Substitution out;
  out.reserve(g.size());
  for (const auto& w : g) out.push_back(substitute(f, w));
  return out;
}

inline Substitution identity_substitution(int rank) {
  Substitution s;
  for (int i = 1; i <= rank; ++i) s.push_back(Word::letter(i));
  return s;
}

}  // namespace hnncp
