#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gaudit/embedding/weat.hpp"

using namespace gaudit;
using namespace gaudit::embedding;

namespace {

EmbeddingTable random_table(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  EmbeddingTable t(dim);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = g(rng);
    t.add("w" + std::to_string(i), std::span<const double>(v));
  }
  return t;
}

WordSet words(const std::string& name, std::initializer_list<int> ids) {
  std::vector<std::string> w;
  for (int i : ids) w.push_back("w" + std::to_string(i));
  return WordSet(name, w);
}

// Plain re-derivation of s(w, A, B) from cosines.
double oracle_s(const EmbeddingTable& t, const std::string& w, const WordSet& a, const WordSet& b) {
  double sa = 0, sb = 0;
  for (const auto& x : a.words()) sa += cosine(t.vector(w), t.vector(x));
  for (const auto& x : b.words()) sb += cosine(t.vector(w), t.vector(x));
  return sa / double(a.size()) - sb / double(b.size());
}

// p-value by enumerating every bitmask with |X| bits set.
double oracle_p_value(const std::vector<double>& s, std::size_t nx) {
  const std::size_t n = s.size();
  double observed = 0;
  for (std::size_t i = 0; i < n; ++i) observed += i < nx ? s[i] : -s[i];
  std::size_t hits = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != nx) continue;
    ++total;
    double stat = 0;
    for (std::size_t i = 0; i < n; ++i) stat += (mask >> i & 1u) ? s[i] : -s[i];
    if (stat >= observed - 1e-12) ++hits;
  }
  return double(hits) / double(total);
}

}  // namespace

TEST(WeatAssociation, WorkedExamples) {
  EmbeddingTable t(2);
  t.add("w", {1.0, 0.0});
  t.add("a", {1.0, 0.0});
  t.add("b", {0.0, 1.0});
  const WordSet a("A", {"a"}), b("B", {"b"});
  EXPECT_DOUBLE_EQ(weat_association(t, "w", a, b), 1.0);
  EXPECT_DOUBLE_EQ(weat_association(t, "w", b, a), -1.0);
  EXPECT_DOUBLE_EQ(weat_association(t, "w", a, a), 0.0);
}

TEST(WeatEffectSize, TwoDimensionalToy) {
  EmbeddingTable t(2);
  t.add("x", {1.0, 0.0});
  t.add("y", {0.0, 1.0});
  const auto r = weat_effect_size(t, WordSet("X", {"x"}), WordSet("Y", {"y"}), WordSet("A", {"x"}), WordSet("B", {"y"}));
  EXPECT_NEAR(r.statistic_s, 2.0, 1e-15);
  EXPECT_NEAR(r.effect_size_d, std::sqrt(2.0), 1e-9);
  EXPECT_FALSE(r.p_value.has_value());
  EXPECT_EQ(r.x, "X");
  EXPECT_EQ(r.b, "B");
}

TEST(WeatEffectSize, SameTargetsGiveZero) {
  const auto t = random_table(20, 5, 1);
  const auto x = words("X", {0, 1, 2, 3});
  const auto r = weat_effect_size(t, x, x, words("A", {10, 11}), words("B", {12, 13, 14}));
  EXPECT_NEAR(r.effect_size_d, 0.0, 1e-12);
  EXPECT_NEAR(r.statistic_s, 0.0, 1e-12);
}

TEST(WeatEffectSize, IdenticalAttributesGiveZero) {
  const auto t = random_table(20, 5, 2);
  const auto a = words("A", {10, 11, 12});
  EXPECT_NEAR(weat_effect_size(t, words("X", {0, 1}), words("Y", {2, 3}), a, a).effect_size_d, 0.0, 1e-12);
}

TEST(WeatEffectSize, AntisymmetryBoundsAndScaling) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto t = random_table(30, 8, seed);
    const auto x = words("X", {0, 1, 2, 3}), y = words("Y", {4, 5, 6}), a = words("A", {10, 11, 12}),
               b = words("B", {20, 21, 22, 23});
    const double d = weat_effect_size(t, x, y, a, b).effect_size_d;
    EXPECT_NEAR(weat_effect_size(t, y, x, a, b).effect_size_d, -d, 1e-12);
    EXPECT_NEAR(weat_effect_size(t, x, y, b, a).effect_size_d, -d, 1e-12);
    EXPECT_GE(d, -2.0);
    EXPECT_LE(d, 2.0);
    EXPECT_NEAR(weat_effect_size(t.scaled(37.5), x, y, a, b).effect_size_d, d, 1e-12);
    EXPECT_NEAR(weat_effect_size(t.scaled(1e-3), x, y, a, b).effect_size_d, d, 1e-12);
  }
}

TEST(WeatEffectSize, MatchesIndependentRecomputation) {
  const auto t = random_table(30, 6, 99);
  const auto x = words("X", {0, 1, 2}), y = words("Y", {3, 4, 5, 6}), a = words("A", {10, 11}),
             b = words("B", {12, 13, 14});
  std::vector<double> sx, sy;
  for (const auto& w : x.words()) sx.push_back(oracle_s(t, w, a, b));
  for (const auto& w : y.words()) sy.push_back(oracle_s(t, w, a, b));
  double sumx = 0, sumy = 0;
  for (double v : sx) sumx += v;
  for (double v : sy) sumy += v;
  const double mean = (sumx + sumy) / 7.0;
  double ss = 0;
  for (double v : sx) ss += (v - mean) * (v - mean);
  for (double v : sy) ss += (v - mean) * (v - mean);
  const double d = (sumx / 3.0 - sumy / 4.0) / std::sqrt(ss / 6.0);
  const auto r = weat_effect_size(t, x, y, a, b);
  EXPECT_NEAR(r.statistic_s, sumx - sumy, 1e-12);
  EXPECT_NEAR(r.effect_size_d, d, 1e-12);
}

TEST(WeatEffectSize, MissingWordsAreReportedNotFatal) {
  const auto t = random_table(10, 4, 5);
  const auto r = weat_effect_size(t, WordSet("X", {"w0", "xe"}), words("Y", {1}), WordSet("A", {"w2", "ze"}),
                                  words("B", {3}));
  EXPECT_EQ(r.missing_words, (std::vector<std::string>{"xe", "ze"}));
  EXPECT_THROW(weat_effect_size(t, WordSet("X", {"xe"}), words("Y", {1}), words("A", {2}), words("B", {3})),
               InputError);
}

TEST(WeatEffectSize, NeedsTwoTargets) {
  const auto t = random_table(10, 4, 5);
  EXPECT_THROW(weat_effect_size(t, words("X", {0}), WordSet("Y", {"absent"}), words("A", {2}), words("B", {3})),
               InputError);
}

TEST(WeatPValue, ExhaustiveEnumerationMatchesBitmaskOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = random_table(20, 4, 100 + seed);
    const auto x = words("X", {0, 1, 2}), y = words("Y", {3, 4, 5}), a = words("A", {10, 11}), b = words("B", {12, 13});
    WeatOptions o;
    o.permutations = 20;  // C(6, 3)
    const auto r = weat_effect_size(t, x, y, a, b, o);
    std::vector<double> s;
    for (const auto& w : x.words()) s.push_back(oracle_s(t, w, a, b));
    for (const auto& w : y.words()) s.push_back(oracle_s(t, w, a, b));
    ASSERT_TRUE(r.p_value);
    EXPECT_TRUE(r.exact);
    EXPECT_EQ(r.permutations, 20u);
    EXPECT_EQ(*r.p_value, oracle_p_value(s, 3));
  }
}

TEST(WeatPValue, UnequalSidesAndTies) {
  // All target words identical: every repartition ties, so p = 1.
  EmbeddingTable t(2);
  for (int i = 0; i < 5; ++i) t.add("t" + std::to_string(i), {1.0, 1.0});
  t.add("a", {1.0, 0.0});
  t.add("b", {0.0, 1.0});
  WeatOptions o;
  o.permutations = 1000;
  const auto r = weat_effect_size(t, WordSet("X", {"t0", "t1"}), WordSet("Y", {"t2", "t3", "t4"}), WordSet("A", {"a"}),
                                  WordSet("B", {"b"}), o);
  EXPECT_EQ(r.permutations, 10u);
  EXPECT_EQ(*r.p_value, 1.0);
  EXPECT_EQ(r.effect_size_d, 0.0);
}

TEST(WeatPValue, SampledIsSeededAndWorkerIndependent) {
  const auto t = random_table(60, 5, 7);
  const auto x = words("X", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  const auto y = words("Y", {12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23});
  const auto a = words("A", {40, 41, 42}), b = words("B", {50, 51, 52});
  WeatOptions o;
  o.permutations = 5000;  // far below C(24, 12)
  o.seed = 42;
  o.workers = 1;
  const auto r1 = weat_effect_size(t, x, y, a, b, o);
  o.workers = 6;
  const auto r2 = weat_effect_size(t, x, y, a, b, o);
  EXPECT_FALSE(r1.exact);
  EXPECT_EQ(r1.permutations, 5000u);
  EXPECT_EQ(r1.p_value, r2.p_value);
  EXPECT_GE(*r1.p_value, 0.0);
  EXPECT_LE(*r1.p_value, 1.0);
  o.seed = 43;
  // A different seed draws a different sample (equal only by coincidence).
  const auto r3 = weat_effect_size(t, x, y, a, b, o);
  EXPECT_NEAR(*r3.p_value, *r1.p_value, 0.05);
  o.permutations = 0;
  EXPECT_THROW(weat_effect_size(t, x, y, a, b, o), InputError);
}
