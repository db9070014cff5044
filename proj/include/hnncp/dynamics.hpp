#pragma once

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hnncp/config.hpp"
#include "hnncp/decision.hpp"
#include "hnncp/endomorphism.hpp"
#include "hnncp/whitehead.hpp"

namespace hnncp {

/// Generator of a cyclic subgroup up to conjugacy and inversion: of the
/// canonical cyclic words of c and c^-1, the one that is smaller when a
/// letter sorts just before its inverse (so "aa" beats "AA").
inline Word cyclic_subgroup_rep(const Word& c) {
  Word a = cyclic_word(c).word(), b = cyclic_word(c.inverse()).word();
  auto key = [](const Word& w) {
    std::vector<int> k;
    for (Letter x : w) k.push_back(2 * std::abs(x) + (x < 0));
    return k;
  };
  return key(a) <= key(b) ? a : b;
}

struct PullbackStage {
  int index = 0;
  SubgroupSystem lambda;
  SubgroupSystem hat_lambda;
  std::vector<std::optional<Word>> representatives;  // per hat component; set when cyclic
};

struct CertifiedComponent {
  Word c;       // cyclically reduced generator
  int t = 1;
  long long d = 2;  // phi^t(c) ~ c^d
  Word root;    // c = root^ell
  long long ell = 1;
};

struct StableIterate {
  int k = 0;
  std::vector<CertifiedComponent> components;  // empty: the stable system is empty
  bool empty() const { return components.empty(); }
};

/// Longest admissible t for the cyclic certificate.
inline int max_period(int rank) { return std::max(1, 6 * rank - 6); }

/// Incrementally computed pullback stages of an injective, non-surjective map.
class Dynamics {
 public:
  Dynamics(Endomorphism phi, Bounds bounds = {}) : phi_(std::move(phi)), bounds_(bounds) {
    if (!phi_.is_injective()) throw std::invalid_argument("dynamics needs an injective endomorphism");
    if (phi_.is_surjective()) throw std::invalid_argument("dynamics needs a non-surjective endomorphism");
    powers_.push_back(identity_substitution(phi_.rank()));
    PullbackStage zero;
    zero.lambda.push_back(CoreGraph::rose(phi_.rank()).unbased());
    stages_.push_back(std::move(zero));
  }

  const Endomorphism& phi() const { return phi_; }

  /// Stage i >= 1. Throws LengthBoundExceeded if phi^i images get too long.
  const PullbackStage& stage(int i) {
    if (i < 1) throw std::invalid_argument("pullback stages start at 1");
    while (static_cast<int>(stages_.size()) <= i) extend();
    return stages_[i];
  }

  const Substitution& power_images(int i) {
    while (static_cast<int>(powers_.size()) <= i) {
      auto next = compose(phi_.images(), powers_.back());
      for (const auto& w : next)
        if (w.size() > static_cast<std::size_t>(bounds_.max_word_length))
          throw LengthBoundExceeded("image of a power exceeds the word-length bound");
      powers_.push_back(std::move(next));
    }
    return powers_[i];
  }

  /// Tries (t, d) for one cyclic class.
  std::optional<CertifiedComponent> certify(const Word& c) const {
    const int r = phi_.rank();
    const std::size_t len = cyclic_length(c);
    Word cur = c;
    long long norm_pow = 1;
    for (int t = 1; t <= max_period(r); ++t) {
      cur = phi_.apply(cur);
      norm_pow = std::min<long long>(norm_pow * static_cast<long long>(phi_.norm()), 1LL << 40);
      if (cur.size() > static_cast<std::size_t>(bounds_.max_word_length)) return std::nullopt;
      std::size_t l = cyclic_length(cur);
      if (l % len) continue;
      long long d = static_cast<long long>(l / len);
      if (d < 2 || d > norm_pow) continue;
      if (!is_conjugate(cur, power(c, d))) continue;
      CertifiedComponent out;
      out.c = c;
      out.t = t;
      out.d = d;
      auto rt = root(c);
      out.root = cyclic_reduce(rt.root).core;
      out.ell = rt.exponent;
      return out;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::vector<int>> keys(const SubgroupSystem& s) const {
    std::vector<std::vector<int>> out;
    for (const auto& g : s) out.push_back(g.canonical_key());
    return out;
  }

  void extend() {
    const int i = static_cast<int>(stages_.size());
    const int r = phi_.rank();
    CoreGraph gamma = CoreGraph::fold(power_images(i), r, true);
    PullbackStage st;
    st.index = i;
    st.lambda = pullback(gamma, gamma);
    // pushforward of the previous stage, matched with multiplicity
    std::multiset<std::vector<int>> pushed;
    for (const auto& comp : stages_[i - 1].lambda) {
      std::vector<Word> gens;
      for (const auto& b : comp.schreier_basis()) gens.push_back(phi_.apply(b));
      pushed.insert(CoreGraph::fold(gens, r, false).canonical_key());
    }
    // what is left are the classes with conjugator outside im(phi); keep one
    // copy of each
    std::set<std::vector<int>> kept;
    for (const auto& comp : st.lambda) {
      auto key = comp.canonical_key();
      auto it = pushed.find(key);
      if (it != pushed.end()) {
        pushed.erase(it);
        continue;
      }
      if (!kept.insert(key).second) continue;
      st.hat_lambda.push_back(comp);
      if (comp.rank() == 1) st.representatives.push_back(cyclic_subgroup_rep(comp.schreier_basis().front()));
      else st.representatives.push_back(std::nullopt);
    }
    // deterministic order: least canonical form first
    std::vector<std::size_t> order(st.hat_lambda.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    auto ks = keys(st.hat_lambda);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ks[a] < ks[b]; });
    PullbackStage sorted;
    sorted.index = i;
    sorted.lambda = std::move(st.lambda);
    for (auto j : order) {
      sorted.hat_lambda.push_back(st.hat_lambda[j]);
      sorted.representatives.push_back(st.representatives[j]);
    }
    stages_.push_back(std::move(sorted));
  }

  Endomorphism phi_;
  Bounds bounds_;
  std::vector<Substitution> powers_;
  std::deque<PullbackStage> stages_;  // deque: stage() references stay valid
};

inline PullbackStage pullback_stage(const Endomorphism& phi, int i, Bounds bounds = {}) {
  Dynamics dyn(phi, bounds);
  return dyn.stage(i);
}

/// Searches k in [max(k0,1), max_k] for a stage whose hat system is empty or
/// made of certified cyclic components.
inline Decision<StableIterate> stable_iterate_search(Dynamics& dyn, int max_k) {
  const int r = dyn.phi().rank();
  const int start = std::max(k0(r), 1);
  for (int k = start; k <= max_k; ++k) {
    const PullbackStage* st = nullptr;
    try {
      st = &dyn.stage(k);
    } catch (const LengthBoundExceeded&) {
      return Decision<StableIterate>::inconclusive(k, "image of phi^k exceeds the word-length bound", "stable-iterate");
    }
    StableIterate s;
    s.k = k;
    bool ok = true;
    for (const auto& rep : st->representatives) {
      if (!rep) {
        ok = false;
        break;
      }
      auto cert = dyn.certify(*rep);
      if (!cert) {
        ok = false;
        break;
      }
      s.components.push_back(*cert);
    }
    if (ok) {
      auto d = Decision<StableIterate>::yes(std::move(s), "stable-iterate");
      d.bound = k;
      return d;
    }
  }
  return Decision<StableIterate>::inconclusive(max_k, "no certified stable iterate up to max_k", "stable-iterate");
}

inline Decision<StableIterate> stable_iterate_search(const Endomorphism& phi, int max_k, Bounds bounds = {}) {
  Dynamics dyn(phi, bounds);
  return stable_iterate_search(dyn, max_k);
}

/// For i < j: does the hat system of stage i carry that of stage j?
inline bool monotone_carrying(Dynamics& dyn, int up_to) {
  for (int i = 1; i <= up_to; ++i)
    for (int j = i + 1; j <= up_to; ++j)
      if (!carries(dyn.stage(i).hat_lambda, dyn.stage(j).hat_lambda).carries) return false;
  return true;
}

struct CarriedWitness {
  int i = 0;              // phi^i(w) is carried
  int component = 0;      // index into StableIterate::components
  Word conjugator;        // x phi^i(w) x^-1 lies in <root of the component>
};

inline bool verify_carried(const Endomorphism& phi, const Word& w, const StableIterate& s, const CarriedWitness& c) {
  if (c.component < 0 || c.component >= static_cast<int>(s.components.size())) return false;
  Word img = phi.iterate(w, c.i);
  Word conj = c.conjugator * img * c.conjugator.inverse();
  return contains(CoreGraph::fold({s.components[c.component].root}, phi.rank()), conj);
}

namespace detail {

// Classes of roots z with phi(z) conjugate into <y> for some y in `classes`.
inline std::set<Word> preimage_classes(const Endomorphism& phi, const std::set<Word>& classes) {
  std::set<Word> out;
  const auto& gamma = phi.image_graph();
  for (const auto& y : classes) {
    auto cyc = CoreGraph::fold({y}, phi.rank(), false);
    for (const auto& comp : pullback_components(gamma, cyc)) {
      Word g = comp.graph.schreier_basis().front();
      int p = comp.pairs[0].first;
      Word path = gamma.tree_path(p);
      auto z = phi.pullback_element(path * g * path.inverse());
      if (!z) throw std::logic_error("pullback loop outside the image");
      out.insert(cyclic_subgroup_rep(*z));
    }
  }
  return out;
}

inline std::optional<Word> conjugate_into_cyclic(const Word& w, const Word& z, int rank) {
  return conjugate_into(w, CoreGraph::fold({z}, rank, true));
}

}  // namespace detail

/// Is some phi^i(w) conjugate into the root subgroup of a stable component?
inline Decision<CarriedWitness> carried_by_stable(const Endomorphism& phi, const Word& w, const StableIterate& s,
                                                  int bound, Bounds bounds = {}) {
  if (s.empty()) return Decision<CarriedWitness>::no(NoReason::EmptyStableIterate, "carried-by-stable");
  const int r = phi.rank();
  bool fallback = false;
  for (std::size_t ci = 0; ci < s.components.size(); ++ci) {
    const auto& comp = s.components[ci];
    if (!is_primitive(comp.root, r)) {
      fallback = true;
      continue;
    }
    // Q_n: classes z with phi^n(z) conjugate into <root>; periodic once
    // Q_{n+t} = Q_n.
    std::vector<std::set<Word>> q{{cyclic_subgroup_rep(comp.root)}};
    const int limit = std::max(bounds.max_k_for(r), bound) + comp.t;
    for (int n = 0;; ++n) {
      for (const auto& z : q[n]) {
        if (w.empty() || detail::conjugate_into_cyclic(w, z, r)) {
          CarriedWitness cw{n, static_cast<int>(ci), Word{}};
          Word img = phi.iterate(w, n);
          auto x = conjugate_into(img, CoreGraph::fold({comp.root}, r, true));
          if (!x) throw std::logic_error("carried class failed verification");
          cw.conjugator = *x;
          auto d = Decision<CarriedWitness>::yes(cw, "carried-by-stable");
          d.trace.push_back("preimage-chain");
          return d;
        }
      }
      if (n >= comp.t && q[n] == q[n - comp.t]) break;
      if (n >= limit) {
        fallback = true;
        break;
      }
      q.push_back(detail::preimage_classes(phi, q[n]));
    }
  }
  if (!fallback) return Decision<CarriedWitness>::no(NoReason::NotCarried, "carried-by-stable");
  // bounded fallback
  Word cur = w;
  for (int i = 0; i <= bound; ++i) {
    for (std::size_t ci = 0; ci < s.components.size(); ++ci) {
      auto x = conjugate_into(cur, CoreGraph::fold({s.components[ci].root}, r, true));
      if (x) return Decision<CarriedWitness>::yes({i, static_cast<int>(ci), *x}, "carried-by-stable").step("bounded-fallback");
    }
    cur = phi.apply(cur);
    if (cur.size() > static_cast<std::size_t>(bounds.max_word_length)) break;
  }
  return Decision<CarriedWitness>::inconclusive(bound, "bounded carrying search exhausted", "carried-by-stable");
}

}  // namespace hnncp
