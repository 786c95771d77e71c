#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gaudit/embedding/cosine.hpp"
#include "gaudit/util/parallel.hpp"
#include "gaudit/util/rng.hpp"
#include "gaudit/wordset.hpp"

// Word Embedding Association Test.
//
//   s(w, A, B) = mean_{a in A} cos(w, a) - mean_{b in B} cos(w, b)
//   S(X, Y, A, B) = sum_{x in X} s(x, A, B) - sum_{y in Y} s(y, A, B)
//   d = (mean_X s - mean_Y s) / stddev_{X u Y} s      (sample, n - 1)
//
// The one-sided permutation p-value is the fraction of equal-size
// repartitions (X', Y') of X u Y with S(X', Y') >= S(X, Y).
namespace gaudit::embedding {

struct WeatResult {
  std::string x, y, a, b;
  double statistic_s = 0.0;
  double effect_size_d = 0.0;
  std::optional<double> p_value;
  // Number of repartitions behind p_value; exact is set when every
  // repartition was enumerated.
  std::uint64_t permutations = 0;
  bool exact = false;
  std::vector<std::string> missing_words;
};

struct WeatOptions {
  std::optional<std::uint64_t> permutations;
  std::uint64_t seed = 0;
  std::size_t workers = util::default_concurrency();
};

namespace detail {

struct ResolvedSet {
  std::vector<std::size_t> idx;
};

template <typename Table>
ResolvedSet resolve_set(const Table& table, const WordSet& set, std::vector<std::string>& missing) {
  ResolvedSet r;
  for (const auto& w : set.words()) {
    if (auto i = table.find(w))
      r.idx.push_back(*i);
    else
      missing.push_back(w);
  }
  if (r.idx.empty()) throw InputError("no word of set '" + set.name() + "' is in the embedding table");
  return r;
}

template <typename Table>
double association(const Table& table, std::size_t w, const std::vector<std::size_t>& a,
                   const std::vector<std::size_t>& b) {
  double sa = 0.0, sb = 0.0;
  for (auto i : a) sa += cosine(table, w, i);
  for (auto i : b) sb += cosine(table, w, i);
  return sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size());
}

// S for the partition whose X side is flagged in `in_x`, summed in index
// order so every partition (including the observed one) is evaluated the
// same way.
inline double partition_statistic(const std::vector<double>& s, const std::vector<char>& in_x) {
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) (in_x[i] ? sx : sy) += s[i];
  return sx - sy;
}

// Tolerance for S' >= S comparisons so that repartitions with the same
// statistic up to summation rounding count as ties.
inline double tie_tolerance(const std::vector<double>& s) {
  double mag = 1.0;
  for (double v : s) mag += std::abs(v);
  return 1e-12 * mag;
}

// C(n, k), or nullopt on overflow.
inline std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

template <std::floating_point T>
double weat_association(const BasicEmbeddingTable<T>& table, std::string_view w, const WordSet& a, const WordSet& b) {
  std::vector<std::string> missing;
  const auto ra = detail::resolve_set(table, a, missing);
  const auto rb = detail::resolve_set(table, b, missing);
  return detail::association(table, table.index_of(w), ra.idx, rb.idx);
}

template <std::floating_point T>
WeatResult weat_effect_size(const BasicEmbeddingTable<T>& table, const WordSet& x, const WordSet& y,
                            const WordSet& a, const WordSet& b, const WeatOptions& opts = {}) {
  WeatResult r;
  r.x = x.name();
  r.y = y.name();
  r.a = a.name();
  r.b = b.name();
  const auto rx = detail::resolve_set(table, x, r.missing_words);
  const auto ry = detail::resolve_set(table, y, r.missing_words);
  const auto ra = detail::resolve_set(table, a, r.missing_words);
  const auto rb = detail::resolve_set(table, b, r.missing_words);
  const std::size_t nx = rx.idx.size();
  const std::size_t n = nx + ry.idx.size();
  if (n < 2) throw InputError("WEAT needs at least two target words in total");

  // Association of every target word, X words first.
  std::vector<double> s;
  s.reserve(n);
  for (auto i : rx.idx) s.push_back(detail::association(table, i, ra.idx, rb.idx));
  for (auto i : ry.idx) s.push_back(detail::association(table, i, ra.idx, rb.idx));

  std::vector<char> observed(n, 0);
  std::fill_n(observed.begin(), nx, 1);
  r.statistic_s = detail::partition_statistic(s, observed);

  double sum_x = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) (i < nx ? sum_x : sum_y) += s[i];
  const double mean_x = sum_x / static_cast<double>(nx);
  const double mean_y = sum_y / static_cast<double>(n - nx);
  const double mean_all = (sum_x + sum_y) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : s) ss += (v - mean_all) * (v - mean_all);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  // Zero spread means every association is equal, so the means coincide too.
  r.effect_size_d = sd > 0.0 ? (mean_x - mean_y) / sd : 0.0;

  if (!opts.permutations) return r;
  const double threshold = r.statistic_s - detail::tie_tolerance(s);
  const auto total = detail::binomial(n, nx);

  if (total && *opts.permutations >= *total) {
    // Enumerate every subset of size |X| as the X side.
    std::vector<char> in_x(observed);
    std::uint64_t hits = 0, seen = 0;
    do {
      ++seen;
      if (detail::partition_statistic(s, in_x) >= threshold) ++hits;
    } while (std::prev_permutation(in_x.begin(), in_x.end()));
    r.permutations = seen;
    r.exact = true;
    r.p_value = static_cast<double>(hits) / static_cast<double>(seen);
    return r;
  }

  // Sampled repartitions, in fixed-size chunks with independent seeded
  // streams so the result does not depend on the worker count.
  constexpr std::uint64_t kChunk = 1024;
  const std::uint64_t trials = *opts.permutations;
  if (trials == 0) throw InputError("permutation count must be positive");
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  util::parallel_for(chunks, opts.workers, [&](std::size_t c) {
    std::mt19937_64 rng(util::derive_seed(opts.seed, c));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<char> in_x(n);
    const std::uint64_t count = std::min(kChunk, trials - c * kChunk);
    for (std::uint64_t t = 0; t < count; ++t) {
      util::shuffle(perm, rng);
      std::fill(in_x.begin(), in_x.end(), 0);
      for (std::size_t i = 0; i < nx; ++i) in_x[perm[i]] = 1;
      if (detail::partition_statistic(s, in_x) >= threshold) ++hits[c];
    }
  });
  r.permutations = trials;
  r.p_value = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::uint64_t{0})) /
              static_cast<double>(trials);
  return r;
}

}  // namespace gaudit::embedding
