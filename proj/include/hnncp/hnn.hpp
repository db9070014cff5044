#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hnncp/brinkmann.hpp"

namespace hnncp {

/// <F, t | t^-1 x t = phi(x)> for injective phi.
class HnnPresentation {
 public:
  explicit HnnPresentation(Endomorphism phi) : phi_(std::move(phi)) {
    if (!phi_.is_injective()) throw std::invalid_argument("ascending HNN extension needs an injective endomorphism");
  }
  const Endomorphism& phi() const noexcept { return phi_; }
  int rank() const noexcept { return phi_.rank(); }

 private:
  Endomorphism phi_;
};

/// Stable letter in an HNN word; -kStableLetter is its inverse.
inline constexpr Letter kStableLetter = 1 << 20;

using HnnWord = std::vector<Letter>;

/// Base letters as for parse_word, plus t / T for the stable letter.
/// Whitespace is ignored.
inline HnnWord parse_hnn_word(std::string_view text, int rank) {
  HnnWord out;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if (c == 't') out.push_back(kStableLetter);
    else if (c == 'T') out.push_back(-kStableLetter);
    else {
      Word x = parse_word(std::string_view(&c, 1), rank);
      out.insert(out.end(), x.begin(), x.end());
    }
  }
  return out;
}

inline std::string to_string(const HnnWord& w) {
  std::string s;
  for (Letter x : w) s += x == kStableLetter ? 't' : x == -kStableLetter ? 'T' : letter_name(x);
  return s;
}

/// t^i x t^-j. Not unique: (i, x, j) and (i+1, phi(x), j+1) are equal.
struct HnnElement {
  int i = 0;
  Word x;
  int j = 0;
  friend bool operator==(const HnnElement& a, const HnnElement& b) { return a.i == b.i && a.j == b.j && a.x == b.x; }
};

inline std::string to_string(const HnnElement& e) {
  std::string s;
  for (int k = 0; k < e.i; ++k) s += 't';
  if (!e.x.empty() || (e.i == 0 && e.j == 0)) s += to_string(e.x);
  for (int k = 0; k < e.j; ++k) s += 'T';
  return s;
}

/// i - j: image under the retraction onto <t>.
inline int retraction_exponent(const HnnElement& e) { return e.i - e.j; }

/// x t = t phi(x), t^-1 y = phi(y) t^-1.
inline HnnElement rewrite(const HnnWord& w, const HnnPresentation& P) {
  const auto& phi = P.phi();
  HnnElement e;
  for (Letter y : w) {
    if (y == kStableLetter) {
      if (e.j > 0) --e.j;
      else {
        ++e.i;
        e.x = phi.apply(e.x);
      }
    } else if (y == -kStableLetter) {
      ++e.j;
    } else {
      if (y == 0 || std::abs(y) > P.rank()) throw WordError("malformed token in HNN word");
      e.x *= phi.iterate(Word::letter(y), e.j);
    }
  }
  return e;
}

inline HnnElement rewrite(std::string_view text, const HnnPresentation& P) { return rewrite(parse_hnn_word(text, P.rank()), P); }

inline HnnElement multiply(const HnnElement& a, const HnnElement& b, const HnnPresentation& P) {
  const auto& phi = P.phi();
  if (a.j >= b.i) return {a.i, a.x * phi.iterate(b.x, a.j - b.i), b.j + a.j - b.i};
  return {a.i + b.i - a.j, phi.iterate(a.x, b.i - a.j) * b.x, b.j};
}

inline HnnElement inverse(const HnnElement& e) { return {e.j, e.x.inverse(), e.i}; }

inline HnnElement stable_power(int n) { return n >= 0 ? HnnElement{n, Word{}, 0} : HnnElement{0, Word{}, -n}; }

inline HnnElement base_element(const Word& x) { return {0, x, 0}; }

/// Equality after lifting both to a common (i, j) frame.
inline bool equal(const HnnElement& a, const HnnElement& b, const HnnPresentation& P) {
  if (retraction_exponent(a) != retraction_exponent(b)) return false;
  const int top = std::max(a.i, b.i);
  return P.phi().iterate(a.x, top - a.i) == P.phi().iterate(b.x, top - b.i);
}

/// g = C^-1 h C, with C assembled from the exponent pair (p, q) and the
/// twisted conjugator x as t^q x t^-p on the shifted forms.
struct ConjugacyWitness {
  int p = 0, q = 0;
  Word x;
  HnnElement assembled;   // t^q x t^-p
  HnnElement conjugator;  // full conjugator for the raw inputs
};

inline bool verify_witness(const HnnElement& g, const HnnElement& h, const ConjugacyWitness& w, const HnnPresentation& P) {
  const HnnElement& c = w.conjugator;
  return equal(g, multiply(multiply(inverse(c), h, P), c, P), P);
}

inline bool verify_witness(const HnnWord& g, const HnnWord& h, const ConjugacyWitness& w, const HnnPresentation& P) {
  return verify_witness(rewrite(g, P), rewrite(h, P), w, P);
}

/// Conjugacy in the ascending HNN extension.
inline Decision<ConjugacyWitness> conj(const HnnElement& g, const HnnElement& h, const HnnPresentation& P,
                                       const Oracles& oracles = {}, const Bounds& b = {}) {
  const auto& phi = P.phi();
  // Shift: t^-i g t^i = u t^-n.
  const int ng = g.j - g.i, nh = h.j - h.i;
  if (ng != nh) return Decision<ConjugacyWitness>::no(NoReason::RetractionExponent, "retraction");
  int n = ng;
  Word u = g.x, v = h.x;
  const bool inverted = n < 0;
  if (inverted) {
    // u^-1 (u t^|n|)^-1 u = u^-1 t^-|n|
    u = u.inverse();
    v = v.inverse();
    n = -n;
  }
  auto d = twisted_pair_general(phi, n, u, v, oracles, b);
  if (!d.is_yes()) {
    Decision<ConjugacyWitness> out = d.map([](const TwistedPair&) { return ConjugacyWitness{}; });
    return out.step("conjugacy");
  }
  const auto& tp = *d.witness;
  ConjugacyWitness w;
  w.p = tp.p;
  w.q = tp.q;
  w.x = tp.x;
  w.assembled = multiply(multiply(stable_power(tp.q), base_element(tp.x), P), stable_power(-tp.p), P);
  // Shifted forms g1 = W^-1 h1 W. Undo the inverse trick, then the shift.
  HnnElement c = w.assembled;
  if (inverted) {
    // g' = (v W u^-1)^-1 h' (v W u^-1) where u, v are the original bases
    c = multiply(multiply(base_element(h.x), c, P), base_element(g.x.inverse()), P);
  }
  w.conjugator = multiply(multiply(stable_power(h.i), c, P), stable_power(-g.i), P);
  if (!verify_witness(g, h, w, P)) throw std::logic_error("assembled HNN conjugator failed verification");
  auto out = Decision<ConjugacyWitness>::yes(w, "conjugacy");
  out.trace.insert(out.trace.end(), d.trace.begin(), d.trace.end());
  return out;
}

inline Decision<ConjugacyWitness> conj(const HnnWord& g, const HnnWord& h, const HnnPresentation& P,
                                       const Oracles& oracles = {}, const Bounds& b = {}) {
  return conj(rewrite(g, P), rewrite(h, P), P, oracles, b);
}

}  // namespace hnncp
