// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "hnncp/brinkmann.hpp"
#include "hnncp/dynamics.hpp"
#include "hnncp/hnn.hpp"
#include "hnncp/integer_exp.hpp"
#include "hnncp/nielsen.hpp"
#include "hnncp/twisted.hpp"
#include "hnncp/whitehead.hpp"
#include "oracles.hpp"

using namespace hnncp;
using boost::multiprecision::cpp_int;

namespace {

// Collects failures; keeps the first few messages.
struct Check {
  int failures = 0;
  std::vector<std::string> notes;
  std::string info;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures <= 3) notes.push_back(what);
  }
};

Endomorphism ds_map() { return {2, {parse_word("b"), parse_word("aa")}}; }

// 1. Membership: exact on Yes (witness evaluates to w); No is compared with
// a capped enumeration of the subgroup. Intersection is the conjunction.
void membership_criterion(Check& c) {
  std::mt19937 rng(101);
  int words = 0;
  for (int i = 0; i < 50; ++i) {
    const int rank = i < 25 ? 2 : 3;
    const int len = rank == 2 ? 8 : 6, cap = rank == 2 ? 11 : 8;
    std::vector<Word> gens;
    const int ng = 1 + rng() % 3;
    for (int k = 0; k < ng; ++k) gens.push_back(oracle::random_word(rng, rank, 1 + rng() % 3));
    auto g = CoreGraph::fold(gens, rank);
    auto ball = oracle::subgroup_ball(gens, len, cap);
    for (const auto& w : oracle::all_words(rank, len)) {
      ++words;
      auto m = membership(w, g);
      if (m) c.expect(evaluate(*m, g.generators()) == w, "bad membership witness for " + to_string(w));
      else c.expect(!ball.count(w), "missed member " + to_string(w));
    }
  }
  for (int i = 0; i < 20; ++i) {
    std::vector<Word> a{oracle::random_word(rng, 2, 2), oracle::random_word(rng, 2, 3)};
    std::vector<Word> b{oracle::random_word(rng, 2, 2), oracle::random_word(rng, 2, 3)};
    auto ga = CoreGraph::fold(a, 2), gb = CoreGraph::fold(b, 2);
    auto p = intersect(ga, gb);
    for (const auto& w : oracle::all_words(2, 8)) {
      auto m = membership(w, p);
      c.expect(m.has_value() == (contains(ga, w) && contains(gb, w)), "intersection disagrees on " + to_string(w));
      if (m) c.expect(evaluate(*m, p.generators()) == w, "bad intersection witness");
    }
  }
  c.info = std::to_string(words) + " membership queries";
}

// 2. Injectivity: known non-injective maps, Nielsen automorphisms, and random
// maps compared with a kernel search.
void injectivity_criterion(Check& c) {
  std::mt19937 rng(102);
  for (int i = 0; i < 40; ++i) {
    auto phi = oracle::random_noninjective(rng, 2 + i % 2);
    c.expect(!phi.is_injective(), "non-injective accepted: " + to_string(phi));
  }
  for (int i = 0; i < 20; ++i) {
    Substitution s = identity_substitution(3);
    for (int k = 0; k < 4; ++k) {
      int a = 1 + rng() % 3, b = 1 + (a + rng() % 2) % 3;
      Substitution m = identity_substitution(3);
      m[a - 1] = Word{a, (rng() % 2) ? b : -b};
      s = compose(s, m);
    }
    Endomorphism phi(3, s);
    c.expect(phi.is_injective(), "automorphism rejected: " + to_string(phi));
  }
  for (int i = 0; i < 40; ++i) {
    auto phi = oracle::random_endo(rng, 2, 3, true);
    auto k = oracle::kernel_element(phi, 6);
    if (k) c.expect(!phi.is_injective(), "kernel element " + to_string(*k) + " missed");
  }
}

// 3. Nielsen retraction contract for n <= 5.
void nielsen_criterion(Check& c) {
  std::mt19937 rng(103);
  for (int t = 0; t < 50; ++t) {
    auto phi = t % 2 ? oracle::random_noninjective(rng, 2 + t % 3 / 2) : oracle::random_endo(rng, 2 + t % 2, 3, true);
    auto r = nielsen_retract(phi);
    const int rank = phi.rank();
    const std::string tag = to_string(phi);
    c.expect(r.phibar.is_injective(), "phibar not injective: " + tag);
    Endomorphism pn = Endomorphism::identity(rank), bn = Endomorphism::identity(r.factor_rank());
    for (int i = 1; i <= rank; ++i) {
      Word x = Word::letter(i);
      c.expect(r.pi.apply(r.pi.apply(x)) == r.pi.apply(x), "pi not idempotent: " + tag);
      c.expect(r.alpha.apply(r.alpha_inverse.apply(x)) == x, "alpha inverse: " + tag);
      Word k = x * r.pi.apply(x).inverse();
      c.expect(r.levels == 0 ? k.empty() : phi.iterate(k, r.levels).empty(), "ker pi not killed: " + tag);
    }
    for (int n = 0; n <= 5; ++n) {
      for (int i = 1; i <= rank; ++i) {
        Word x = Word::letter(i);
        c.expect(r.embed(bn.apply(r.project(x))) == r.pi.apply(pn.apply(x)), "square fails at n=" + std::to_string(n) + ": " + tag);
      }
      pn = phi.compose(pn);
      bn = r.phibar.compose(bn);
    }
    // ker phi lies in ker pi
    if (auto k = oracle::kernel_element(phi, 4)) c.expect(r.pi.apply(*k).empty(), "kernel escapes pi: " + tag);
  }
}

Word bze(int rank, const Word& z) { return Word::letter(rank + 1) * z * Word::letter(rank + 2); }

// 4. Fixed-subgroup encoding of twisted conjugacy, both directions.
void encoding_criterion(Check& c) {
  std::mt19937 rng(104);
  for (int i = 0; i < 100; ++i) {
    auto phi = oracle::random_endo(rng, 2, 3, true);
    Word v = oracle::random_word(rng, 2, rng() % 5);
    Word x = oracle::random_word(rng, 2, rng() % 6);
    Word u = x.inverse() * v * phi.apply(x);
    auto ext = encode_fixed({phi, u, v});
    c.expect(ext.apply(bze(2, x)) == bze(2, x), "witness not fixed");
    c.expect(decode_fixed(bze(2, x), 2) == x, "decode failed");
    if (i < 20)
      for (const auto& z : oracle::all_words(2, 5))
        if (ext.apply(bze(2, z)) == bze(2, z)) c.expect(verify_twisted(phi, u, v, z), "fixed word is no witness");
  }
}

// 5. Closed-form witness between iterates.
void iterate_criterion(Check& c) {
  std::mt19937 rng(105);
  for (int i = 0; i < 100; ++i) {
    auto phi = oracle::random_endo(rng, 2 + i % 2, 3, true);
    Word u = oracle::random_word(rng, phi.rank(), rng() % 6);
    int a = rng() % 4, b = rng() % 4;
    Word x = twisted_iterate_witness(phi, u, a, b);
    c.expect(verify_twisted(phi, phi.iterate(u, a), phi.iterate(u, b), x), "iterate witness fails");
  }
}

// 6. Dynamics of a -> b, b -> a^2.
void dynamics_criterion(Check& c) {
  Dynamics dyn(ds_map());
  auto d = stable_iterate_search(dyn, 10);
  c.expect(d.is_yes(), "no stable iterate");
  if (!d.is_yes()) return;
  const auto& s = *d.witness;
  c.expect(s.k == 2, "k = " + std::to_string(s.k));
  c.expect(s.components.size() == 1, "component count");
  if (s.components.size() == 1) {
    const auto& comp = s.components[0];
    c.expect(comp.c == parse_word("aa"), "c = " + to_string(comp.c));
    c.expect(comp.t == 2 && comp.d == 2, "t, d = " + std::to_string(comp.t) + ", " + std::to_string(comp.d));
    c.expect(oracle::brute_conjugate(ds_map().iterate(comp.c, comp.t), power(comp.c, comp.d)), "phi^t(c) !~ c^d");
  }
  c.expect(monotone_carrying(dyn, 6), "carrying not monotone");
}

bool holds(const IntegerExpInstance& in, long long a, long long b) {
  auto pw = [](long long base, long long e) {
    cpp_int r = 1;
    for (long long i = 0; i < e; ++i) r *= base;
    return r;
  };
  return cpp_int(in.gamma) * pw(in.alpha, a) == cpp_int(in.delta) * pw(in.beta, b) && a * in.ca + in.l >= b * in.cb + in.m;
}

// 7. Integer exponent equations against a box search.
void integer_criterion(Check& c) {
  std::mt19937 rng(107);
  auto pick = [&](std::initializer_list<long long> xs) { return *(xs.begin() + rng() % xs.size()); };
  int yes = 0;
  for (int i = 0; i < 500; ++i) {
    IntegerExpInstance in;
    in.gamma = pick({1, -1, 2, 3, 4, 6, 8, -2, 9, 12, 16});
    in.delta = pick({1, -1, 2, 3, 4, 6, 8, -4, 9, 18, 32});
    in.alpha = pick({1, -1, 2, -2, 3, 4, 6, 8, 9});
    in.beta = pick({1, -1, 2, -2, 3, 4, 6, 8, 9});
    in.ca = rng() % 4;
    in.cb = rng() % 4;
    in.l = static_cast<long long>(rng() % 7) - 3;
    in.m = static_cast<long long>(rng() % 7) - 3;
    auto d = integer_exp_solve(in);
    std::optional<std::pair<long long, long long>> brute;
    for (long long a = 0; a <= 12 && !brute; ++a)
      for (long long b = 0; b <= 12 && !brute; ++b)
        if (holds(in, a, b)) brute = std::make_pair(a, b);
    c.expect(!d.is_inconclusive(), "inconclusive");
    if (d.is_yes()) {
      ++yes;
      c.expect(holds(in, d.witness->a, d.witness->b), "bad solution");
      if (brute) c.expect(brute->first == d.witness->a && brute->second == d.witness->b, "not lex-least");
    } else if (d.is_no()) {
      c.expect(!brute, "missed solution");
    }
  }
  c.info = std::to_string(yes) + "/500 solvable";
}

HnnWord random_hnn_word(std::mt19937& rng, int rank, int len) {
  HnnWord w;
  while (static_cast<int>(w.size()) < len) {
    int k = static_cast<int>(rng() % (2 * rank + 2));
    Letter x = k < 2 * rank ? (k % 2 ? -(k / 2 + 1) : k / 2 + 1) : (k % 2 ? -kStableLetter : kStableLetter);
    if (!w.empty() && w.back() == -x) continue;
    w.push_back(x);
  }
  return w;
}

HnnWord conjugated(const HnnWord& g, const HnnWord& c) {
  HnnWord h;
  for (auto it = c.rbegin(); it != c.rend(); ++it) h.push_back(-*it);
  h.insert(h.end(), g.begin(), g.end());
  h.insert(h.end(), c.begin(), c.end());
  return h;
}

// 8. Fixtures in BS(1,2) and the a -> b, b -> a^2 extension; random conjugates.
void hnn_criterion(Check& c) {
  HnnPresentation bs(Endomorphism(1, {parse_word("aa")}));
  auto y = conj(parse_hnn_word("a", 1), parse_hnn_word("aa", 1), bs);
  c.expect(y.is_yes() && y.witness->p == 1 && y.witness->q == 0, "BS a ~ aa");
  auto n = conj(parse_hnn_word("a", 1), parse_hnn_word("aaa", 1), bs);
  c.expect(n.is_no() && n.reason == NoReason::PrimeSupport, "BS a !~ aaa");
  auto r = conj(parse_hnn_word("a", 1), parse_hnn_word("t", 1), bs);
  c.expect(r.is_no() && r.reason == NoReason::RetractionExponent, "BS a !~ t");
  HnnPresentation P(ds_map());
  auto ab = conj(parse_hnn_word("a", 2), parse_hnn_word("b", 2), P);
  c.expect(ab.is_yes() && verify_witness(parse_hnn_word("a", 2), parse_hnn_word("b", 2), *ab.witness, P), "a ~ b");
  c.expect(conj(parse_hnn_word("a", 2), parse_hnn_word("aaa", 2), P).is_no(), "a !~ aaa");

  std::mt19937 rng(108);
  const std::vector<std::string> gs{"a", "b", "ab", "aB", "aT", "tb", "abT", "Ta"};
  int found = 0;
  for (int i = 0; i < 100; ++i) {
    auto g = parse_hnn_word(gs[i % gs.size()], 2);
    auto h = conjugated(g, random_hnn_word(rng, 2, 1 + rng() % 4));
    auto d = conj(g, h, P);
    if (d.is_yes() && verify_witness(g, h, *d.witness, P)) ++found;
    c.expect(!d.is_no(), "conjugate rejected: " + to_string(g) + " vs " + to_string(h));
  }
  c.expect(found == 100, "found " + std::to_string(found) + "/100");
  c.info = std::to_string(found) + "/100 random conjugates";
}

std::vector<HnnWord> short_hnn_words(int rank, int len) {
  std::vector<HnnWord> out{{}};
  std::vector<Letter> alphabet{kStableLetter, -kStableLetter};
  for (int x = 1; x <= rank; ++x) alphabet.insert(alphabet.end(), {x, -x});
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (static_cast<int>(out[k].size()) == len) continue;
    for (Letter x : alphabet) {
      if (!out[k].empty() && out[k].back() == -x) continue;
      auto w = out[k];
      w.push_back(x);
      out.push_back(w);
    }
  }
  return out;
}

// 9. Fuzz: random injective maps of F2, half the pairs built conjugate.
// Every No on the other half is checked against all conjugators of length <= 3.
void fuzz_criterion(Check& c) {
  std::mt19937 rng(109);
  const auto conjugators = short_hnn_words(2, 3);
  Bounds b;
  b.orbit = 16;
  b.conjugator = 4;
  b.image = 8;
  b.max_k = 6;
  b.max_word_length = 256;
  int yes = 0, no = 0, inc = 0;
  for (int i = 0; i < 1000; ++i) {
    HnnPresentation P(oracle::random_injective(rng, 2, 3));
    auto g = random_hnn_word(rng, 2, 1 + rng() % 4);
    const bool built = i % 2 == 0;
    auto h = built ? conjugated(g, random_hnn_word(rng, 2, 1 + rng() % 3)) : random_hnn_word(rng, 2, 1 + rng() % 4);
    const std::string tag = to_string(P.phi()) + " : " + to_string(g) + " vs " + to_string(h);
    try {
      auto d = conj(g, h, P, {}, b);
      if (d.is_yes()) {
        ++yes;
        c.expect(verify_witness(g, h, *d.witness, P), "unverified yes: " + tag);
      } else if (d.is_no()) {
        ++no;
        c.expect(d.reason != NoReason::None, "untagged no: " + tag);
        c.expect(!built, "built conjugates rejected: " + tag);
        const auto rg = rewrite(g, P);
        for (const auto& x : conjugators)
          c.expect(!equal(rg, rewrite(conjugated(h, x), P), P), "short conjugator " + to_string(x) + " refutes no: " + tag);
      } else {
        ++inc;
      }
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception ") + e.what() + ": " + tag);
    }
  }
  std::ostringstream s;
  s << yes << " yes, " << no << " no, " << inc << " inconclusive (" << inc / 10.0 << "%)";
  c.info = s.str();
}

// 10. Primitivity against every basis of F2 reachable by Nielsen moves
// within total length 10.
void whitehead_criterion(Check& c) {
  c.expect(is_primitive(parse_word("a"), 2) && is_primitive(parse_word("ab"), 2), "a, ab primitive");
  c.expect(!is_primitive(parse_word("aa"), 2) && !is_primitive(parse_word("abAB"), 2), "aa, abAB not primitive");
  const std::size_t cap = 10;
  std::set<std::pair<Word, Word>> seen;
  std::vector<std::pair<Word, Word>> todo{{parse_word("a"), parse_word("b")}};
  seen.insert(todo.front());
  std::set<Word> basis_elements;
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    basis_elements.insert(x);
    basis_elements.insert(y);
    std::vector<std::pair<Word, Word>> moves{{y, x}, {x.inverse(), y}, {x, y.inverse()}, {x * y, y}, {x * y.inverse(), y},
                                             {y * x, y}, {y.inverse() * x, y}, {x, y * x}, {x, y * x.inverse()},
                                             {x, x * y}, {x, x.inverse() * y}};
    for (auto& m : moves)
      if (m.first.size() + m.second.size() <= cap && seen.insert(m).second) todo.push_back(m);
  }
  int checked = 0;
  for (const auto& w : oracle::all_words(2, 4)) {
    if (w.empty()) continue;
    ++checked;
    c.expect(is_primitive(w, 2) == (basis_elements.count(w) > 0), "disagree on " + to_string(w));
  }
  c.info = std::to_string(checked) + " words, " + std::to_string(seen.size()) + " bases";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"C1 membership and pullback", membership_criterion},
      {"C2 injectivity", injectivity_criterion},
      {"C3 nielsen retraction", nielsen_criterion},
      {"C4 fixed-subgroup encoding", encoding_criterion},
      {"C5 iterate witness", iterate_criterion},
      {"C6 stable iterate of a->b, b->aa", dynamics_criterion},
      {"C7 integer exponent solver", integer_criterion},
      {"C8 HNN fixtures and random conjugates", hnn_criterion},
      {"C9 fuzz sweep", fuzz_criterion},
      {"C10 whitehead primitivity", whitehead_criterion},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.2fs)%s%s\n", c.failures ? "FAIL" : "PASS", name.c_str(), secs, c.info.empty() ? "" : ": ",
                c.info.c_str());
    for (const auto& note : c.notes) std::printf("    %s\n", note.c_str());
    if (c.failures) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
