#pragma once

#include <stdexcept>
#include <tuple>
#include <vector>

#include "hnncp/endomorphism.hpp"

namespace hnncp {

/// Retraction of F onto a free factor F' on which phi restricts (after
/// projecting) to an injective map.
///   pi = iota . coords,  pi . pi = pi,  iota . phibar^n . coords = pi . phi^n.
struct Retraction {
  std::vector<Word> factor_basis;  // iota: letter i of F' -> factor_basis[i-1] in F
  Substitution coords;             // F -> F' (one F'-word per generator of F)
  Endomorphism pi;                 // projection, as an endomorphism of F
  Endomorphism phibar;             // injective endomorphism of F'
  Endomorphism alpha;              // Nielsen automorphism of F
  Endomorphism alpha_inverse;
  int levels = 0;                  // recursion depth; ker pi lies in ker phi^levels

  int factor_rank() const { return static_cast<int>(factor_basis.size()); }
  Word embed(const Word& w) const { return substitute(factor_basis, w); }
  Word project(const Word& w) const { return substitute(coords, w); }
};

namespace detail {

// Order used to drive Nielsen reduction: length first, then the two half
// words so that cancellation patterns strictly improve.
inline auto nielsen_key(const Word& w) {
  std::size_t half = (w.size() + 1) / 2;
  Word l = w.subword(0, half);
  Word r = w.inverse().subword(0, half);
  if (r < l) std::swap(l, r);
  return std::make_tuple(w.size(), l, r);
}

struct NielsenResult {
  std::vector<Word> tuple;  // reduced images phi(beta_i)
  Substitution beta;        // beta_i = alpha(x_i)
  Substitution beta_inv;    // alpha^-1 on generators
};

// Nielsen reduction of the image tuple; moves act on the source basis too.
inline NielsenResult nielsen_reduce(std::vector<Word> tuple, int rank) {
  NielsenResult r;
  r.beta = identity_substitution(rank);
  r.beta_inv = identity_substitution(rank);
  bool moved = true;
  while (moved) {
    moved = false;
    for (int i = 0; i < rank && !moved; ++i) {
      if (tuple[i].empty()) continue;
      auto key_i = nielsen_key(tuple[i]);
      for (int j = 0; j < rank && !moved; ++j) {
        if (j == i || tuple[j].empty()) continue;
        for (int eps : {1, -1}) {
          Word wj = eps > 0 ? tuple[j] : tuple[j].inverse();
          for (bool right : {true, false}) {
            Word cand = right ? tuple[i] * wj : wj * tuple[i];
            if (!(cand.empty() || nielsen_key(cand) < key_i)) continue;
            tuple[i] = cand;
            Word bj = eps > 0 ? r.beta[j] : r.beta[j].inverse();
            r.beta[i] = right ? r.beta[i] * bj : bj * r.beta[i];
            // inverse move on letters: x_i -> x_i x_j^-eps (or x_j^-eps x_i)
            Substitution mu_inv = identity_substitution(rank);
            Word xj = Word::letter(eps > 0 ? -(j + 1) : (j + 1));
            mu_inv[i] = right ? Word::letter(i + 1) * xj : xj * Word::letter(i + 1);
            for (auto& w : r.beta_inv) w = substitute(mu_inv, w);
            moved = true;
            break;
          }
          if (moved) break;
        }
      }
    }
  }
  r.tuple = std::move(tuple);
  return r;
}

inline Retraction identity_retraction(const Endomorphism& phi) {
  Retraction r;
  r.factor_basis = identity_substitution(phi.rank());
  r.coords = identity_substitution(phi.rank());
  r.pi = Endomorphism::identity(phi.rank());
  r.phibar = phi;
  r.alpha = Endomorphism::identity(phi.rank());
  r.alpha_inverse = Endomorphism::identity(phi.rank());
  return r;
}

}  // namespace detail

/// Projects away the part of F that phi eventually kills, recursing until
/// the restricted map is injective. Injective phi returns the identity
/// retraction.
inline Retraction nielsen_retract(const Endomorphism& phi) {
  const int rank = phi.rank();
  if (phi.is_injective()) return detail::identity_retraction(phi);

  auto nr = detail::nielsen_reduce(phi.images(), rank);
  std::vector<int> kept;
  std::vector<Word> live;
  for (int i = 0; i < rank; ++i)
    if (!nr.tuple[i].empty()) {
      kept.push_back(i);
      live.push_back(nr.tuple[i]);
    }
  const int k = static_cast<int>(kept.size());
  if (k >= rank) throw std::logic_error("non-injective map with no trivialised generator");
  if (k > 0 && CoreGraph::fold(live, rank).rank() != k)
    throw std::logic_error("Nielsen reduction did not reach a free basis of the image");

  // F1 = <beta_kept>; in F1's own letters, kept[m] is letter m+1.
  Substitution to_f1(rank, Word{});
  for (int m = 0; m < k; ++m) to_f1[kept[m]] = Word::letter(m + 1);
  Substitution coords1;  // F -> F1
  for (const auto& w : nr.beta_inv) coords1.push_back(substitute(to_f1, w));
  std::vector<Word> iota1;
  for (int m = 0; m < k; ++m) iota1.push_back(nr.beta[kept[m]]);

  Substitution psi_images;
  for (int m = 0; m < k; ++m) psi_images.push_back(substitute(to_f1, substitute(nr.beta_inv, nr.tuple[kept[m]])));
  Endomorphism psi(k, psi_images);

  Retraction inner = nielsen_retract(psi);

  Retraction r;
  for (const auto& w : inner.factor_basis) r.factor_basis.push_back(substitute(iota1, w));
  for (const auto& w : coords1) r.coords.push_back(substitute(inner.coords, w));
  Substitution pi_img;
  for (const auto& w : r.coords) pi_img.push_back(substitute(r.factor_basis, w));
  r.pi = Endomorphism(rank, pi_img);
  r.phibar = inner.phibar;
  r.levels = inner.levels + 1;

  // alpha = alpha1 . (alpha2 on the kept letters, identity elsewhere)
  Substitution lift_letters(k);
  for (int m = 0; m < k; ++m) lift_letters[m] = Word::letter(kept[m] + 1);
  Substitution a2 = identity_substitution(rank), a2inv = identity_substitution(rank);
  for (int m = 0; m < k; ++m) {
    a2[kept[m]] = substitute(lift_letters, inner.alpha.image(m + 1));
    a2inv[kept[m]] = substitute(lift_letters, inner.alpha_inverse.image(m + 1));
  }
  r.alpha = Endomorphism(rank, compose(nr.beta, a2));
  r.alpha_inverse = Endomorphism(rank, compose(a2inv, nr.beta_inv));
  return r;
}

}  // namespace hnncp
