#pragma once

#include <cstdlib>
#include <memory>
#include <optional>
#include <vector>

#include "hnncp/config.hpp"
#include "hnncp/decision.hpp"
#include "hnncp/endomorphism.hpp"

namespace hnncp {

/// Is there x with u = x^-1 v phi(x)?
struct TwistedInstance {
  Endomorphism phi;
  Word u, v;
};

inline bool verify_twisted(const Endomorphism& phi, const Word& u, const Word& v, const Word& x) {
  return u == x.inverse() * v * phi.apply(x);
}

/// Extension by two fresh letters B = r+1, E = r+2 with B -> Bv, E -> u^-1 E.
/// x solves the twisted equation iff BxE is fixed.
inline Endomorphism encode_fixed(const TwistedInstance& inst) {
  const int r = inst.phi.rank();
  Word b = Word::letter(r + 1), e = Word::letter(r + 2);
  return inst.phi.extend({b * inst.v, inst.u.inverse() * e});
}

/// z when y = B z E with z in the base group.
inline std::optional<Word> decode_fixed(const Word& y, int rank) {
  if (y.size() < 2 || y.front() != rank + 1 || y.back() != rank + 2) return std::nullopt;
  Word z = y.subword(1, y.size() - 2);
  if (z.max_generator() > rank) return std::nullopt;
  return z;
}

/// Source of (a subgroup of) the fixed subgroup of an endomorphism.
/// Implementations must be safe for concurrent calls.
class FixedSubgroupOracle {
 public:
  virtual ~FixedSubgroupOracle() = default;
  /// True when fixed_subgroup returns all of fix(phi), not just part of it.
  virtual bool exact() const = 0;
  virtual CoreGraph fixed_subgroup(const Endomorphism& phi) const = 0;
};

/// Folds every fixed word up to a length bound. Partial: never exact.
class BoundedFixedOracle final : public FixedSubgroupOracle {
 public:
  explicit BoundedFixedOracle(int bound) : bound_(bound) {}
  bool exact() const override { return false; }
  CoreGraph fixed_subgroup(const Endomorphism& phi) const override {
    std::vector<Word> fixed;
    enumerate(phi, Word{}, fixed);
    return CoreGraph::fold(fixed, std::max(phi.rank(), 1), true);
  }

 private:
  void enumerate(const Endomorphism& phi, const Word& w, std::vector<Word>& out) const {
    if (!w.empty() && phi.apply(w) == w) out.push_back(w);
    if (static_cast<int>(w.size()) >= bound_) return;
    for (Letter x = -phi.rank(); x <= phi.rank(); ++x) {
      if (x == 0 || (!w.empty() && w.back() == -x)) continue;
      enumerate(phi, w * Word::letter(x), out);
    }
  }
  int bound_;
};

/// x with phi^i(u) = x^-1 phi^j(u) phi(x), built from the one-step identity
/// phi(w) = w^-1 w phi(w).
inline Word twisted_iterate_witness(const Endomorphism& phi, const Word& u, int i, int j) {
  if (i < 0 || j < 0) throw std::invalid_argument("negative iterate index");
  if (i == j) return Word{};
  if (i < j) return twisted_iterate_witness(phi, u, j, i).inverse();
  Word cur = phi.iterate(u, j);
  Word x;
  for (int k = j; k < i; ++k) {
    x *= cur;
    cur = phi.apply(cur);
  }
  return x;
}

namespace detail {

// Base-letter path from B's endpoint to a vertex with an E-edge home.
inline std::optional<Word> search_fixed_graph(const CoreGraph& g, int rank) {
  if (g.empty() || g.alphabet_rank() < rank + 2) return std::nullopt;
  const int base = g.basepoint();
  int start = g.next(base, rank + 1);
  if (start < 0) return std::nullopt;
  std::vector<int> parent(g.vertex_count(), -2);
  std::vector<Letter> via(g.vertex_count(), 0);
  std::vector<int> queue{start};
  parent[start] = -1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    if (g.next(v, rank + 2) == base) {
      std::vector<Letter> path;
      for (int w = v; parent[w] >= 0; w = parent[w]) path.push_back(via[w]);
      return Word(std::vector<Letter>(path.rbegin(), path.rend()));
    }
    for (Letter x = 1; x <= rank; ++x)
      for (Letter s : {x, -x}) {
        int w = g.next(v, s);
        if (w < 0 || parent[w] != -2) continue;
        parent[w] = v;
        via[w] = s;
        queue.push_back(w);
      }
  }
  return std::nullopt;
}

// Depth-first search over reduced x with |x| <= bound, updating
// x^-1 v phi(x) one letter at a time.
inline std::optional<Word> search_conjugators(const Endomorphism& phi, const Word& u, const Word& v, int bound) {
  const int r = phi.rank();
  std::vector<Letter> x;
  std::optional<Word> found;
  auto rec = [&](auto&& self, const Word& cur) -> bool {
    if (cur == u) {
      found = Word(x);
      return true;
    }
    if (static_cast<int>(x.size()) >= bound) return false;
    for (Letter l = -r; l <= r; ++l) {
      if (l == 0 || (!x.empty() && x.back() == -l)) continue;
      x.push_back(l);
      Word next = Word::letter(-l) * cur * (l > 0 ? phi.image(l) : phi.image(-l).inverse());
      if (self(self, next)) return true;
      x.pop_back();
    }
    return false;
  };
  rec(rec, v);
  return found;
}

}  // namespace detail

/// Decides u = x^-1 v phi(x). An exact oracle gives Yes/No; otherwise a
/// bounded search may find x, and the answer is never No unless a
/// closed-form case applies.
inline Decision<Word> twisted_conjugate(const TwistedInstance& inst, const FixedSubgroupOracle* oracle, int bound) {
  const auto& phi = inst.phi;
  const int r = phi.rank();
  if (inst.u == inst.v) return Decision<Word>::yes(Word{}, "equal");
  // Orbit shortcut: u and v on one phi-orbit are twisted conjugate.
  Word pu = inst.u, pv = inst.v;
  for (int k = 1; k <= 4; ++k) {
    pu = phi.apply(pu);
    pv = phi.apply(pv);
    if (pu == inst.v) return Decision<Word>::yes(twisted_iterate_witness(phi, inst.u, 0, k), "iterate-witness");
    if (pv == inst.u) return Decision<Word>::yes(twisted_iterate_witness(phi, inst.v, k, 0), "iterate-witness");
    if (pu.size() > 256 && pv.size() > 256) break;
  }
  if (oracle && oracle->exact()) {
    auto ext = encode_fixed(inst);
    auto z = detail::search_fixed_graph(oracle->fixed_subgroup(ext), r);
    if (z) {
      if (!verify_twisted(phi, inst.u, inst.v, *z)) throw std::logic_error("fixed-subgroup oracle returned a bad element");
      return Decision<Word>::yes(*z, "fixed-subgroup");
    }
    return Decision<Word>::no(NoReason::ExactOracle, "fixed-subgroup");
  }
  if (r == 1) {
    // phi(a) = a^N; x = a^k sends v = a^n to a^(n + (N-1)k).
    auto exp = [](const Word& w) { return static_cast<long long>(w.size()) * (w.empty() || w[0] > 0 ? 1 : -1); };
    long long n_img = exp(phi.image(1)), m = exp(inst.u), n = exp(inst.v);
    long long step = n_img - 1, diff = m - n;
    if (step == 0) return Decision<Word>::no(NoReason::RankOne, "rank-one");
    if (diff % step != 0) return Decision<Word>::no(NoReason::RankOne, "rank-one");
    Word x = power(Word::letter(1), diff / step);
    return Decision<Word>::yes(x, "rank-one");
  }
  if (oracle) {
    auto g = oracle->fixed_subgroup(encode_fixed(inst));
    if (auto z = detail::search_fixed_graph(g, r); z && verify_twisted(phi, inst.u, inst.v, *z))
      return Decision<Word>::yes(*z, "fixed-subgroup");
  }
  if (auto x = detail::search_conjugators(phi, inst.u, inst.v, bound)) return Decision<Word>::yes(*x, "twisted-search");
  return Decision<Word>::inconclusive(bound, "no twisted conjugator up to the bound", "twisted-search");
}

/// Solution of phi^p(u) ~_{phi^n} phi^q(v): phi^p(u) = x^-1 phi^q(v) phi^n(x).
struct TwistedPair {
  int p = 0, q = 0;
  Word x;
};

inline bool verify_twisted_pair(const Endomorphism& phi, int n, const Word& u, const Word& v, const TwistedPair& w) {
  return verify_twisted(phi.power(n), phi.iterate(u, w.p), phi.iterate(v, w.q), w.x);
}

/// Searches the n x n grid of iterates under phi^n; any larger exponents
/// collapse onto it.
inline Decision<TwistedPair> phi_n_twisted_pairs(const Endomorphism& phi, int n, const Word& u, const Word& v,
                                                  const FixedSubgroupOracle* oracle, int bound) {
  if (n < 1) throw std::invalid_argument("phi_n_twisted_pairs needs n >= 1");
  Endomorphism pn = phi.power(n);
  bool all_no = true;
  long long worst = 0;
  std::vector<Word> us{u}, vs{v};
  for (int i = 1; i < n; ++i) {
    us.push_back(phi.apply(us.back()));
    vs.push_back(phi.apply(vs.back()));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto d = twisted_conjugate({pn, us[i], vs[j]}, oracle, bound);
      if (d.is_yes()) {
        auto out = Decision<TwistedPair>::yes({i, j, *d.witness}, "twisted-grid");
        out.trace.insert(out.trace.end(), d.trace.begin(), d.trace.end());
        return out;
      }
      if (!d.is_no()) {
        all_no = false;
        worst = std::max(worst, d.bound);
      }
    }
  if (all_no) return Decision<TwistedPair>::no(NoReason::AllSubcallsNo, "twisted-grid");
  return Decision<TwistedPair>::inconclusive(worst, "some grid entry was inconclusive", "twisted-grid");
}

}  // namespace hnncp
