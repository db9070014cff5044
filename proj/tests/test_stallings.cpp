#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hnncp/stallings.hpp"
#include "oracles.hpp"

using namespace hnncp;

namespace {
std::vector<Word> words(std::initializer_list<const char*> ws) {
  std::vector<Word> out;
  for (auto w : ws) out.push_back(parse_word(w));
  return out;
}
}  // namespace

TEST(Stallings, FoldFixtures) {
  auto g = CoreGraph::fold(words({"aa", "ab"}), 2);
  EXPECT_EQ(g.vertex_count(), 2);
  EXPECT_EQ(g.rank(), 2);
  auto h = CoreGraph::fold(words({"a"}), 2);
  EXPECT_EQ(h.vertex_count(), 1);
  EXPECT_EQ(h.edge_count(), 1);
  Word w = parse_word("abbA");
  EXPECT_EQ(CoreGraph::fold({w, w.inverse()}, 2), CoreGraph::fold({w}, 2));
  EXPECT_EQ(CoreGraph::fold(words({"a", "b"}), 2).rank(), 2);
  EXPECT_EQ(CoreGraph::fold({}, 2).rank(), 0);
  EXPECT_TRUE(CoreGraph::fold({}, 2, false).empty());
}

TEST(Stallings, MembershipFixtures) {
  auto g = CoreGraph::fold(words({"aa", "ab"}), 2);
  auto m = membership(parse_word("aa"), g);
  ASSERT_TRUE(m);
  EXPECT_EQ(evaluate(*m, g.generators()), parse_word("aa"));
  EXPECT_FALSE(membership(parse_word("a"), g));
  auto e = membership(Word{}, g);
  ASSERT_TRUE(e);
  EXPECT_TRUE(e->empty());
}

TEST(Stallings, FoldIsConfluent) {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    std::vector<Word> gens;
    for (int k = 0; k < 3; ++k) gens.push_back(oracle::random_word(rng, 2, 1 + rng() % 5));
    auto key = CoreGraph::fold(gens, 2).canonical_key();
    auto free_key = CoreGraph::fold(gens, 2, false).canonical_key();
    for (int p = 0; p < 4; ++p) {
      std::shuffle(gens.begin(), gens.end(), rng);
      EXPECT_EQ(CoreGraph::fold(gens, 2).canonical_key(), key);
      // conjugating every generator changes the based graph only by basepoint
      Word c = oracle::random_word(rng, 2, 2);
      std::vector<Word> conj;
      for (auto& g : gens) conj.push_back(conjugate(g, c));
      EXPECT_EQ(CoreGraph::fold(conj, 2, false).canonical_key(), free_key);
    }
  }
}

TEST(Stallings, MembershipAgreesWithBruteForce) {
  std::mt19937 rng(12);
  for (int i = 0; i < 20; ++i) {
    int rank = 2 + i % 2;
    std::vector<Word> gens;
    for (int k = 0; k < 2; ++k) gens.push_back(oracle::random_word(rng, rank, 1 + rng() % 3));
    auto g = CoreGraph::fold(gens, rank);
    auto ball = oracle::subgroup_ball(gens, 6, 10);
    for (const auto& w : oracle::all_words(rank, rank == 2 ? 6 : 4)) {
      auto m = membership(w, g);
      EXPECT_EQ(m.has_value(), ball.count(w) > 0) << to_string(w);
      if (m) EXPECT_EQ(evaluate(*m, g.generators()), w);
    }
  }
}

TEST(Stallings, IntersectionIsConjunction) {
  std::mt19937 rng(13);
  for (int i = 0; i < 20; ++i) {
    std::vector<Word> a{oracle::random_word(rng, 2, 2), oracle::random_word(rng, 2, 3)};
    std::vector<Word> b{oracle::random_word(rng, 2, 2), oracle::random_word(rng, 2, 3)};
    auto ga = CoreGraph::fold(a, 2), gb = CoreGraph::fold(b, 2);
    auto p = intersect(ga, gb);
    for (const auto& w : oracle::all_words(2, 6)) {
      bool both = contains(ga, w) && contains(gb, w);
      auto m = membership(w, p);
      EXPECT_EQ(m.has_value(), both);
      if (m) EXPECT_EQ(evaluate(*m, p.generators()), w);
    }
  }
}

TEST(Stallings, PullbackFixtures) {
  EXPECT_TRUE(pullback(CoreGraph::fold(words({"a"}), 2, false), CoreGraph::fold(words({"b"}), 2, false)).empty());
  auto conj_by_a = [](std::vector<Word> gens) {
    for (auto& g : gens) g = conjugate(g, parse_word("a"));
    return CoreGraph::fold(gens, 2);
  };
  // <a^2, b> is not normal (aba^-1 is missing), so it meets its a-conjugate in <a^2>.
  auto h = CoreGraph::fold(words({"aa", "b"}), 2);
  EXPECT_EQ(intersect(h, conj_by_a(words({"aa", "b"}))).rank(), 1);
  // The index-2 normal subgroup has rank 3 and equals its conjugate.
  auto n = CoreGraph::fold(words({"aa", "b", "abA"}), 2);
  auto nn = intersect(n, conj_by_a(words({"aa", "b", "abA"})));
  EXPECT_EQ(nn.rank(), 3);
  EXPECT_EQ(nn, n);
  auto g = CoreGraph::fold(words({"aab", "ba"}), 2, false);
  auto comps = pullback(g, g);
  auto carried = carries(comps, {g});
  EXPECT_TRUE(carried.carries);
}

TEST(Stallings, ConjugateInto) {
  auto g = CoreGraph::fold(words({"aa"}), 2, false);
  auto x = conjugate_into(parse_word("BaaB"), g);
  // BaaB is not a conjugate of a power of a (it is b^-1 a^2 b^-1); use b^-1 a^2 b
  EXPECT_FALSE(x);
  Word w = parse_word("Baab");
  auto y = conjugate_into(w, g);
  ASSERT_TRUE(y);
  EXPECT_EQ(*y * w * y->inverse(), parse_word("aa"));
  EXPECT_FALSE(conjugate_into(parse_word("ab"), g));
  auto based = CoreGraph::fold(words({"aa", "ab"}), 2);
  auto z = conjugate_into(parse_word("ab"), based);
  ASSERT_TRUE(z);
  EXPECT_TRUE(z->empty());
}

TEST(Stallings, Carries) {
  auto a = CoreGraph::fold(words({"a"}), 2, false);
  auto a2 = CoreGraph::fold(words({"aa"}), 2, false);
  auto b = CoreGraph::fold(words({"b"}), 2, false);
  EXPECT_TRUE(carries({a}, {a}).carries);
  EXPECT_TRUE(carries({a}, {a2}).carries);
  EXPECT_FALSE(carries({a}, {b}).carries);
  EXPECT_FALSE(carries({a2}, {a}).carries);
}

TEST(Stallings, Dot) {
  auto dot = to_dot(CoreGraph::fold(words({"ab"}), 2));
  EXPECT_NE(dot.find("doublecircle"), std::string::npos);
  EXPECT_NE(dot.find("label=\"a\""), std::string::npos);
}
