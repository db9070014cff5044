#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hnncp/config.hpp"
#include "hnncp/decision.hpp"
#include "hnncp/dynamics.hpp"
#include "hnncp/endomorphism.hpp"
#include "hnncp/integer_exp.hpp"
#include "hnncp/nielsen.hpp"
#include "hnncp/twisted.hpp"

namespace hnncp {

/// phi^p(u) = x^-1 phi^q(v) x.
struct ExponentPair {
  int p = 0, q = 0;
  Word x;
  bool swapped = false;  // produced by the (v, u) half of a symmetric search
};

inline bool verify_exponent_pair(const Endomorphism& phi, const Word& u, const Word& v, const ExponentPair& w) {
  if (w.p < 0 || w.q < 0) return false;
  return phi.iterate(u, w.p) == w.x.inverse() * phi.iterate(v, w.q) * w.x;
}

/// phi^p(u) = x^-1 v k x with phi(k) = 1.
struct LiftWitness {
  int p = 0;
  Word k;
  Word x;
};

inline bool verify_lift(const Endomorphism& phi, const Word& u, const Word& v, const LiftWitness& w) {
  if (w.p < 0 || !phi.apply(w.k).empty()) return false;
  return phi.iterate(u, w.p) == w.x.inverse() * v * w.k * w.x;
}

/// Slot for an exact single-exponent procedure (find p with phi^p(u) ~ v).
/// Returning Inconclusive is always allowed. Yes answers are re-verified.
class BrinkmannOracle {
 public:
  virtual ~BrinkmannOracle() = default;
  virtual Decision<ExponentPair> single(const Endomorphism& phi, const Word& u, const Word& v) const = 0;
};

struct Oracles {
  const BrinkmannOracle* brinkmann = nullptr;
  const FixedSubgroupOracle* fixed = nullptr;
};

namespace detail {

// Orbit of a conjugacy class, stopped at a repeat, the bound, or the length cap.
struct ClassOrbit {
  std::vector<Word> classes;  // canonical cyclic words of phi^p(u)
  std::optional<int> enter;   // classes[enter] == classes.back() repeat point
  int period = 0;
};

inline ClassOrbit class_orbit(const Endomorphism& phi, const Word& u, int bound, int max_len) {
  ClassOrbit o;
  std::map<Word, int> seen;
  Word cur = u;
  for (int p = 0; p <= bound; ++p) {
    Word c = cyclic_word(cur).word();
    if (auto it = seen.find(c); it != seen.end()) {
      o.enter = it->second;
      o.period = p - it->second;
      return o;
    }
    seen.emplace(c, p);
    o.classes.push_back(std::move(c));
    if (p == bound) break;
    cur = phi.apply(cur);
    if (cur.size() > static_cast<std::size_t>(max_len)) break;
  }
  return o;
}

inline std::optional<ExponentPair> pair_witness(const Endomorphism& phi, const Word& u, const Word& v, int p, int q,
                                                int max_len) {
  Word a, b;
  try {
    a = phi.iterate(u, p, static_cast<std::size_t>(max_len));
    b = phi.iterate(v, q, static_cast<std::size_t>(max_len));
  } catch (const LengthBoundExceeded&) {
    return std::nullopt;
  }
  auto x = free_conjugacy(a, b);
  if (!x) return std::nullopt;
  return ExponentPair{p, q, *x, false};
}

inline NoReason merge_reasons(const std::vector<NoReason>& rs) {
  if (rs.empty()) return NoReason::AllSubcallsNo;
  for (auto r : rs)
    if (r != rs.front()) return NoReason::AllSubcallsNo;
  return rs.front();
}

template <class W>
void append_trace(Decision<W>& out, const std::vector<std::string>& t) {
  out.trace.insert(out.trace.end(), t.begin(), t.end());
}

// Exhaustive over the orbit prefixes; decides outright when both class
// orbits close up.
inline Decision<ExponentPair> orbit_grid(const Endomorphism& phi, const Word& u, const Word& v, const Bounds& b) {
  auto ou = class_orbit(phi, u, b.orbit, b.max_word_length);
  auto ov = class_orbit(phi, v, b.orbit, b.max_word_length);
  std::map<Word, int> first_v;
  for (int q = 0; q < static_cast<int>(ov.classes.size()); ++q) first_v.emplace(ov.classes[q], q);
  std::optional<std::pair<int, int>> best;
  for (int p = 0; p < static_cast<int>(ou.classes.size()); ++p)
    if (auto it = first_v.find(ou.classes[p]); it != first_v.end())
      if (!best || p + it->second < best->first + best->second) best = {p, it->second};
  if (best) {
    if (auto w = pair_witness(phi, u, v, best->first, best->second, b.max_word_length))
      return Decision<ExponentPair>::yes(*w, "orbit-grid");
  }
  if (ou.enter && ov.enter && !best) return Decision<ExponentPair>::no(NoReason::OrbitPeriodic, "orbit-grid");
  return Decision<ExponentPair>::inconclusive(b.orbit, "orbit grid exhausted", "orbit-grid");
}

// phi(a) = a^N on the rank-one group: N^p m = N^q n.
inline Decision<ExponentPair> rank_one_pairs(const Endomorphism& phi, const Word& u, const Word& v) {
  auto exp = [](const Word& w) {
    long long s = 0;
    for (Letter x : w) s += x > 0 ? 1 : -1;
    return s;
  };
  long long n_img = exp(phi.image(1)), m = exp(u), n = exp(v);
  if (m == 0 || n == 0) {
    if (m == n) return Decision<ExponentPair>::yes({0, 0, Word{}, false}, "rank-one");
    return Decision<ExponentPair>::no(NoReason::Trivial, "rank-one");
  }
  auto d = integer_exp_solve({m, n_img, n, n_img, 0, 0, 0, 0});
  auto out = d.is_yes() ? Decision<ExponentPair>::yes(
                              {static_cast<int>(d.witness->a), static_cast<int>(d.witness->b), Word{}, false}, "rank-one")
                        : Decision<ExponentPair>::no(d.reason, "rank-one");
  out.trace.push_back("integer-exponent");
  return out;
}

// w lies in the stable image when its pullback chain revisits a word.
inline bool certified_stable_member(const Endomorphism& phi, const Word& w, int bound) {
  std::set<Word> seen{w};
  Word cur = w;
  for (int i = 0; i < bound; ++i) {
    auto pre = phi.pullback_element(cur);
    if (!pre) return false;
    cur = *pre;
    if (!seen.insert(cur).second) return true;
  }
  return false;
}

// Stable iterate computed once per top-level call.
class StableCache {
 public:
  StableCache(const Endomorphism& phi, const Bounds& b) : phi_(phi), bounds_(b) {}
  const Decision<StableIterate>& get() {
    if (!result_) {
      try {
        result_ = stable_iterate_search(phi_, bounds_.max_k_for(phi_.rank()), bounds_);
      } catch (const LengthBoundExceeded&) {
        result_ = Decision<StableIterate>::inconclusive(0, "word-length bound hit while building stages", "stable-iterate");
      }
    }
    return *result_;
  }
  const Bounds& bounds() const { return bounds_; }

 private:
  const Endomorphism& phi_;
  Bounds bounds_;
  std::optional<Decision<StableIterate>> result_;
};

struct CarriedData {
  int i = 0;
  const CertifiedComponent* comp = nullptr;
  long long g = 0;  // phi^i(w) ~ root^g
};

inline CarriedData carried_data(const StableIterate& s, const CarriedWitness& w, const Endomorphism& phi, const Word& u) {
  CarriedData c;
  c.i = w.i;
  c.comp = &s.components[w.component];
  Word y = w.conjugator * phi.iterate(u, w.i) * w.conjugator.inverse();
  const Word& rho = c.comp->root;
  long long g = static_cast<long long>(y.size() / rho.size());
  c.g = power(rho, g) == y ? g : -g;
  if (power(rho, c.g) != y) throw std::logic_error("carried element is not a power of the root");
  return c;
}

// Roots of phi^r(rho) for r < t, as (cyclically reduced root, exponent).
inline std::vector<std::pair<Word, long long>> shifted_roots(const Endomorphism& phi, const Word& rho, int t, int max_len) {
  std::vector<std::pair<Word, long long>> out;
  Word cur = rho;
  for (int r = 0; r < t; ++r) {
    if (r > 0) {
      cur = phi.apply(cur);
      if (cur.size() > static_cast<std::size_t>(max_len)) throw LengthBoundExceeded("root iterate too long");
    }
    auto rt = root(cyclic_reduce(cur).core);
    out.emplace_back(cyclic_reduce(rt.root).core, rt.exponent);
  }
  return out;
}

}  // namespace detail

/// Finds p with phi^p(u) ~ v: orbit search, then an orbit-periodicity
/// certificate for No, then the oracle slot.
inline Decision<ExponentPair> single_exponent_conj(const Endomorphism& phi, const Word& u, const Word& v,
                                                   const Oracles& oracles = {}, const Bounds& b = {}) {
  if (u == v) return Decision<ExponentPair>::yes({0, 0, Word{}, false}, "equal");
  if (phi.is_injective() && u.empty() != v.empty()) return Decision<ExponentPair>::no(NoReason::Trivial, "trivial");
  auto o = detail::class_orbit(phi, u, b.orbit, b.max_word_length);
  const Word target = cyclic_word(v).word();
  for (int p = 0; p < static_cast<int>(o.classes.size()); ++p)
    if (o.classes[p] == target) {
      if (auto w = detail::pair_witness(phi, u, v, p, 0, b.max_word_length))
        return Decision<ExponentPair>::yes(*w, "orbit-search");
      throw std::logic_error("orbit class matched but no conjugator found");
    }
  if (o.enter) {
    auto d = Decision<ExponentPair>::no(NoReason::OrbitPeriodic, "orbit-periodic");
    d.bound = static_cast<long long>(o.classes.size());
    return d;
  }
  if (oracles.brinkmann) {
    auto d = oracles.brinkmann->single(phi, u, v);
    if (d.is_yes() && (!d.witness || d.witness->q != 0 || !verify_exponent_pair(phi, u, v, *d.witness)))
      throw std::logic_error("Brinkmann oracle returned an invalid witness");
    if (!d.is_inconclusive()) return d.step("brinkmann-oracle");
  }
  return Decision<ExponentPair>::inconclusive(b.orbit, "orbit neither reached v nor closed up", "orbit-search");
}

/// Result of the large-exponent analysis: the decision covers p >= q >= d.
struct OutsideImageResult {
  int d = 0;
  Decision<ExponentPair> decision;
};

namespace detail {

inline OutsideImageResult outside_image(const Endomorphism& phi, const Word& u, const Word& v, StableCache& cache) {
  const Bounds& b = cache.bounds();
  OutsideImageResult res;
  const auto& st = cache.get();
  if (!st.is_yes()) {
    res.decision = Decision<ExponentPair>::inconclusive(st.bound, st.detail, "outside-image");
    append_trace(res.decision, st.trace);
    return res;
  }
  const StableIterate& s = *st.witness;
  auto cu = carried_by_stable(phi, u, s, b.orbit, b);
  auto cv = carried_by_stable(phi, v, s, b.orbit, b);
  if (cu.is_no() || cv.is_no()) {
    res.d = s.k;
    res.decision = Decision<ExponentPair>::no((cu.is_no() ? cu : cv).reason, "outside-image");
    append_trace(res.decision, (cu.is_no() ? cu : cv).trace);
    return res;
  }
  if (!cu.is_yes() || !cv.is_yes()) {
    res.decision = Decision<ExponentPair>::inconclusive(b.orbit, "carrying could not be decided", "outside-image");
    return res;
  }
  auto du = carried_data(s, *cu.witness, phi, u);
  auto dv = carried_data(s, *cv.witness, phi, v);
  res.d = std::max(du.i, dv.i);
  std::vector<std::pair<Word, long long>> ru, rv;
  try {
    ru = shifted_roots(phi, du.comp->root, du.comp->t, b.max_word_length);
    rv = shifted_roots(phi, dv.comp->root, dv.comp->t, b.max_word_length);
  } catch (const LengthBoundExceeded&) {
    res.decision = Decision<ExponentPair>::inconclusive(b.max_word_length, "root iterates too long", "outside-image");
    return res;
  }
  std::optional<std::pair<int, int>> best;
  std::vector<NoReason> reasons;
  for (int r = 0; r < du.comp->t; ++r)
    for (int sh = 0; sh < dv.comp->t; ++sh) {
      long long sign = 0;
      if (is_conjugate(ru[r].first, rv[sh].first)) sign = 1;
      else if (is_conjugate(ru[r].first, rv[sh].first.inverse())) sign = -1;
      if (sign == 0) {
        reasons.push_back(NoReason::PrimeSupport);  // distinct roots: no power coincidence at all
        continue;
      }
      IntegerExpInstance inst{du.g * ru[r].second, du.comp->d, sign * dv.g * rv[sh].second, dv.comp->d,
                              du.comp->t, du.i + r, dv.comp->t, dv.i + sh};
      auto sol = integer_exp_solve(inst);
      if (!sol.is_yes()) {
        reasons.push_back(sol.reason);
        continue;
      }
      int p = static_cast<int>(du.i + r + sol.witness->a * du.comp->t);
      int q = static_cast<int>(dv.i + sh + sol.witness->b * dv.comp->t);
      if (!best || p + q < best->first + best->second) best = {p, q};
    }
  if (best) {
    auto w = pair_witness(phi, u, v, best->first, best->second, b.max_word_length);
    if (!w) {
      res.decision = Decision<ExponentPair>::inconclusive(b.max_word_length, "solution exists but its witness exceeds the word-length bound", "outside-image");
      return res;
    }
    res.decision = Decision<ExponentPair>::yes(*w, "outside-image");
    res.decision.trace.push_back("integer-exponent");
    return res;
  }
  res.decision = Decision<ExponentPair>::no(merge_reasons(reasons), "outside-image");
  res.decision.trace.push_back("integer-exponent");
  return res;
}

inline Decision<ExponentPair> technical(const Endomorphism& phi, const Word& u, const Word& v, const Oracles& oracles,
                                        StableCache& cache) {
  const Bounds& b = cache.bounds();
  auto res = outside_image(phi, u, v, cache);
  if (!res.decision.is_no()) return res.decision.step("two-exponent-technical");
  std::vector<NoReason> reasons{res.decision.reason};
  bool inconclusive = false;
  Word ui = u, vi = v;
  for (int i = 0; i < res.d; ++i) {
    if (i > 0) {
      ui = phi.apply(ui);
      vi = phi.apply(vi);
      if (ui.size() > static_cast<std::size_t>(b.max_word_length) || vi.size() > static_cast<std::size_t>(b.max_word_length)) {
        inconclusive = true;
        break;
      }
    }
    auto s = single_exponent_conj(phi, ui, vi, oracles, b);
    if (s.is_yes()) {
      ExponentPair w{s.witness->p + i, i, s.witness->x, false};
      auto out = Decision<ExponentPair>::yes(w, "two-exponent-technical");
      append_trace(out, s.trace);
      return out;
    }
    if (s.is_no()) reasons.push_back(s.reason);
    else inconclusive = true;
  }
  if (inconclusive)
    return Decision<ExponentPair>::inconclusive(b.orbit, "a small-exponent subcall was inconclusive", "two-exponent-technical");
  auto out = Decision<ExponentPair>::no(merge_reasons(reasons), "two-exponent-technical");
  append_trace(out, res.decision.trace);
  return out;
}

}  // namespace detail

/// Large exponents p >= q >= d for an injective, non-surjective map.
inline OutsideImageResult two_exp_outside_image(const Endomorphism& phi, const Word& u, const Word& v, const Bounds& b = {}) {
  if (!phi.is_injective() || phi.is_surjective())
    throw std::invalid_argument("two_exp_outside_image needs an injective, non-surjective endomorphism");
  detail::StableCache cache(phi, b);
  try {
    return detail::outside_image(phi, u, v, cache);
  } catch (const LengthBoundExceeded& e) {
    return {0, Decision<ExponentPair>::inconclusive(b.max_word_length, e.what(), "outside-image")};
  }
}

/// Pairs p >= q. Yes is always a genuine pair; No excludes pairs whose
/// conjugator lies outside the image.
inline Decision<ExponentPair> two_exp_technical(const Endomorphism& phi, const Word& u, const Word& v,
                                                const Oracles& oracles = {}, const Bounds& b = {}) {
  if (!phi.is_injective() || phi.is_surjective())
    throw std::invalid_argument("two_exp_technical needs an injective, non-surjective endomorphism");
  detail::StableCache cache(phi, b);
  try {
    return detail::technical(phi, u, v, oracles, cache);
  } catch (const LengthBoundExceeded& e) {
    return Decision<ExponentPair>::inconclusive(b.max_word_length, e.what(), "two-exponent-technical");
  }
}

namespace detail {

inline Decision<ExponentPair> both_singles(const Endomorphism& phi, const Word& u, const Word& v, const Oracles& oracles,
                                           const Bounds& b, bool certify_no, const std::string& step) {
  auto s1 = single_exponent_conj(phi, u, v, oracles, b);
  if (s1.is_yes()) {
    auto out = Decision<ExponentPair>::yes(*s1.witness, step);
    append_trace(out, s1.trace);
    return out;
  }
  auto s2 = single_exponent_conj(phi, v, u, oracles, b);
  if (s2.is_yes()) {
    // phi^q(v) = y^-1 u y, so u = y phi^q(v) y^-1.
    ExponentPair w{0, s2.witness->p, s2.witness->x.inverse(), true};
    auto out = Decision<ExponentPair>::yes(w, step);
    append_trace(out, s2.trace);
    return out;
  }
  if (certify_no && s1.is_no() && s2.is_no()) {
    auto out = Decision<ExponentPair>::no(merge_reasons({s1.reason, s2.reason}), step);
    append_trace(out, s1.trace);
    return out;
  }
  return Decision<ExponentPair>::inconclusive(b.orbit, "single-exponent searches did not settle", step);
}

inline Decision<ExponentPair> injective_pairs(const Endomorphism& phi, const Word& u, const Word& v, const Oracles& oracles,
                                              const Bounds& b) {
  if (u == v) return Decision<ExponentPair>::yes({0, 0, Word{}, false}, "equal");
  if (u.empty() || v.empty()) return Decision<ExponentPair>::no(NoReason::Trivial, "trivial");
  auto grid = orbit_grid(phi, u, v, b);
  if (!grid.is_inconclusive()) return grid;
  if (phi.rank() == 1) return rank_one_pairs(phi, u, v);
  if (phi.is_surjective()) return both_singles(phi, u, v, oracles, b, true, "automorphism");

  auto pu = stable_image_probe(phi, u, b.image);
  auto pv = stable_image_probe(phi, v, b.image);
  if (!pu.left || !pv.left) {
    bool in_stable = (!pu.left && certified_stable_member(phi, u, b.image)) ||
                     (!pv.left && certified_stable_member(phi, v, b.image));
    return both_singles(phi, u, v, oracles, b, in_stable, "stable-image");
  }
  const int m = pu.m, n = pv.m, top = std::max(m, n);
  const Word& u1 = pu.last_preimage;
  const Word& v1 = pv.last_preimage;
  auto finish = [&](int p, int q, const std::vector<std::string>& trace) {
    auto w = pair_witness(phi, u, v, p, q, b.max_word_length);
    if (!w) return Decision<ExponentPair>::inconclusive(b.max_word_length, "witness exceeds the word-length bound", "stable-image");
    auto out = Decision<ExponentPair>::yes(*w, "stable-image");
    append_trace(out, trace);
    return out;
  };
  if (is_conjugate(u1, v1)) return finish(top - m, top - n, {"preimage-conjugate"});
  StableCache cache(phi, b);
  auto t1 = technical(phi, u1, v1, oracles, cache);
  if (t1.is_yes()) return finish(t1.witness->p + top - m, t1.witness->q + top - n, t1.trace);
  auto t2 = technical(phi, v1, u1, oracles, cache);
  if (t2.is_yes()) {
    auto out = finish(t2.witness->q + top - m, t2.witness->p + top - n, t2.trace);
    if (out.witness) out.witness->swapped = true;
    return out;
  }
  if (t1.is_no() && t2.is_no()) {
    auto out = Decision<ExponentPair>::no(merge_reasons({t1.reason, t2.reason}), "stable-image");
    append_trace(out, t1.trace);
    return out;
  }
  auto out = Decision<ExponentPair>::inconclusive(std::max(t1.bound, t2.bound), "large-exponent analysis did not settle", "stable-image");
  append_trace(out, t1.is_inconclusive() ? t1.trace : t2.trace);
  return out;
}

}  // namespace detail

/// Finds (p, q) with phi^p(u) ~ phi^q(v) for injective phi.
inline Decision<ExponentPair> two_exp_injective(const Endomorphism& phi, const Word& u, const Word& v,
                                                const Oracles& oracles = {}, const Bounds& b = {}) {
  if (!phi.is_injective()) throw std::invalid_argument("two_exp_injective needs an injective endomorphism");
  try {
    return detail::injective_pairs(phi, u, v, oracles, b).step("two-exponent");
  } catch (const LengthBoundExceeded& e) {
    return Decision<ExponentPair>::inconclusive(b.max_word_length, e.what(), "two-exponent");
  }
}

/// Finds (p, k), phi(k) = 1, with phi^p(u) ~ v k. Works through the Nielsen
/// retraction; a lifted kernel element that phi does not kill gives
/// Inconclusive ("kernel-defect").
inline Decision<LiftWitness> retract_lift_conj(const Endomorphism& phi, const Word& u, const Word& v,
                                               const Oracles& oracles = {}, const Bounds& b = {}) {
  if (phi.is_injective()) {
    auto d = single_exponent_conj(phi, u, v, oracles, b);
    return d.map([](const ExponentPair& w) { return LiftWitness{w.p, Word{}, w.x}; }).step("retract-lift");
  }
  Retraction r = nielsen_retract(phi);
  Word cu = r.project(u), cv = r.project(v);
  auto d = single_exponent_conj(r.phibar, cu, cv, oracles, b);
  if (!d.is_yes()) return d.map([](const ExponentPair&) { return LiftWitness{}; }).step("retract-lift");
  // pi(phi^p(u)) = pi(w^-1 v w), w = iota(y); k' := (w^-1 v w)^-1 phi^p(u) lies in ker pi.
  const int p = d.witness->p;
  Word w = r.embed(d.witness->x);
  Word target;
  try {
    target = phi.iterate(u, p, static_cast<std::size_t>(b.max_word_length));
  } catch (const LengthBoundExceeded& e) {
    return Decision<LiftWitness>::inconclusive(b.max_word_length, e.what(), "retract-lift");
  }
  Word kp = (w.inverse() * v * w).inverse() * target;
  Word k = w * kp * w.inverse();
  LiftWitness lw{p, k, w};
  if (!phi.apply(k).empty()) {
    auto out = Decision<LiftWitness>::inconclusive(r.levels, "kernel-defect", "retract-lift");
    detail::append_trace(out, d.trace);
    return out;
  }
  if (!verify_lift(phi, u, v, lw)) throw std::logic_error("lifted witness failed verification");
  auto out = Decision<LiftWitness>::yes(lw, "retract-lift");
  detail::append_trace(out, d.trace);
  return out;
}

/// Finds (p, q) with phi^p(u) ~ phi^q(v) for any endomorphism.
inline Decision<ExponentPair> two_exp_general(const Endomorphism& phi, const Word& u, const Word& v,
                                              const Oracles& oracles = {}, const Bounds& b = {}) {
  if (phi.is_injective()) return two_exp_injective(phi, u, v, oracles, b).step("two-exponent-general");
  try {
    if (u == v) return Decision<ExponentPair>::yes({0, 0, Word{}, false}, "two-exponent-general").step("equal");
    // cheap direct hits before retracting
    auto grid = detail::orbit_grid(phi, u, v, b);
    if (grid.is_yes()) return grid.step("two-exponent-general");
    Retraction r = nielsen_retract(phi);
    auto inner = two_exp_injective(r.phibar, r.project(u), r.project(v), oracles, b);
    if (!inner.is_yes()) return inner.step("retract").step("two-exponent-general");
    // Applying phi^L with L <= levels kills the kernel defect.
    for (int L = 0; L <= r.levels; ++L) {
      auto w = detail::pair_witness(phi, u, v, inner.witness->p + L, inner.witness->q + L, b.max_word_length);
      if (w) {
        w->swapped = inner.witness->swapped;
        auto out = Decision<ExponentPair>::yes(*w, "two-exponent-general");
        out.trace.push_back("retract");
        detail::append_trace(out, inner.trace);
        return out;
      }
    }
    return Decision<ExponentPair>::inconclusive(r.levels, "kernel-defect", "two-exponent-general");
  } catch (const LengthBoundExceeded& e) {
    return Decision<ExponentPair>::inconclusive(b.max_word_length, e.what(), "two-exponent-general");
  }
}

/// phi^p(u) twisted conjugate to phi^q(v) under phi^n.
inline Decision<TwistedPair> twisted_pair_general(const Endomorphism& phi, int n, const Word& u, const Word& v,
                                                  const Oracles& oracles = {}, const Bounds& b = {}) {
  if (n < 0) throw std::invalid_argument("twisted_pair_general needs n >= 0");
  if (n == 0)
    return two_exp_general(phi, u, v, oracles, b)
        .map([](const ExponentPair& w) { return TwistedPair{w.p, w.q, w.x}; })
        .step("twisted-pair");
  try {
    return phi_n_twisted_pairs(phi, n, u, v, oracles.fixed, b.conjugator).step("twisted-pair");
  } catch (const LengthBoundExceeded& e) {
    return Decision<TwistedPair>::inconclusive(b.max_word_length, e.what(), "twisted-pair");
  }
}

namespace detail {

inline Endomorphism with_fixed_letter(const Endomorphism& phi) {
  return phi.extend({Word::letter(phi.rank() + 1)});
}

}  // namespace detail

/// Finds (p, q) with phi^p(u) = phi^q(v): conjugacy of u s and v s after
/// adding a letter s fixed by phi.
inline Decision<ExponentPair> equality_search(const Endomorphism& phi, const Word& u, const Word& v,
                                              const Oracles& oracles = {}, const Bounds& b = {}) {
  if (u == v) return Decision<ExponentPair>::yes({0, 0, Word{}, false}, "equality").step("equal");
  Endomorphism ext = detail::with_fixed_letter(phi);
  Word s = Word::letter(phi.rank() + 1);
  auto d = two_exp_general(ext, u * s, v * s, oracles, b);
  if (!d.is_yes()) return d.step("equality");
  ExponentPair w{d.witness->p, d.witness->q, Word{}, d.witness->swapped};
  if (phi.iterate(u, w.p) != phi.iterate(v, w.q))
    return Decision<ExponentPair>::inconclusive(0, "conjugacy pair failed the equality check", "equality");
  auto out = Decision<ExponentPair>::yes(w, "equality");
  detail::append_trace(out, d.trace);
  return out;
}

/// Finds (p, k), phi(k) = 1, with phi^p(u) = v k.
inline Decision<LiftWitness> equality_search_lift(const Endomorphism& phi, const Word& u, const Word& v,
                                                  const Oracles& oracles = {}, const Bounds& b = {}) {
  if (u == v) return Decision<LiftWitness>::yes({0, Word{}, Word{}}, "equality-lift").step("equal");
  // direct hits: v^-1 phi^p(u) in ker phi
  try {
    Word cur = u, fv = phi.apply(v);
    for (int p = 0; p <= b.orbit; ++p) {
      if (p > 0) cur = phi.apply(cur);
      if (cur.size() > static_cast<std::size_t>(b.max_word_length)) break;
      if (phi.apply(cur) == fv) return Decision<LiftWitness>::yes({p, v.inverse() * cur, Word{}}, "equality-lift");
    }
    Endomorphism ext = detail::with_fixed_letter(phi);
    Word s = Word::letter(phi.rank() + 1);
    auto d = retract_lift_conj(ext, u * s, v * s, oracles, b);
    if (!d.is_yes()) return d.step("equality-lift");
    const int p = d.witness->p;
    Word k = v.inverse() * phi.iterate(u, p, static_cast<std::size_t>(b.max_word_length));
    if (!phi.apply(k).empty())
      return Decision<LiftWitness>::inconclusive(p, "lifted exponent failed the equality check", "equality-lift");
    auto out = Decision<LiftWitness>::yes({p, k, Word{}}, "equality-lift");
    detail::append_trace(out, d.trace);
    return out;
  } catch (const LengthBoundExceeded& e) {
    return Decision<LiftWitness>::inconclusive(b.max_word_length, e.what(), "equality-lift");
  }
}

}  // namespace hnncp
