#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "gaudit/embedding/cosine.hpp"
#include "gaudit/util/parallel.hpp"

namespace gaudit::embedding {

struct Neighbor {
  std::string token;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct NeighborResult {
  std::string query;
  std::vector<Neighbor> neighbors;

  friend bool operator==(const NeighborResult&, const NeighborResult&) = default;
};

struct NeighborOptions {
  bool exclude_self = true;
  // Scan partitions; results do not depend on this.
  std::size_t workers = util::default_concurrency();
};

namespace detail {

struct Scored {
  double sim;
  std::size_t index;
};

// Higher similarity first; equal similarities in lexicographic token order.
template <typename Table>
struct RankBefore {
  const Table* table;
  bool operator()(const Scored& a, const Scored& b) const {
    if (a.sim != b.sim) return a.sim > b.sim;
    return table->token(a.index) < table->token(b.index);
  }
};

}  // namespace detail

// Exact k nearest neighbours by cosine. The vocabulary is scanned in
// parallel chunks, each keeping its own top-k heap; the chunk winners are
// merged and ranked with the same total order, so the output equals a full
// sort of the vocabulary. Zero vectors have no cosine and are skipped.
template <std::floating_point T>
NeighborResult nearest_neighbors(const BasicEmbeddingTable<T>& table, std::string_view query, std::size_t k,
                                 const NeighborOptions& opts = {}) {
  const std::size_t q = table.index_of(query);
  if (table.norm(q) == 0.0) throw DegenerateError("query '" + std::string(query) + "' has a zero vector");
  NeighborResult result{std::string(query), {}};
  if (k == 0) return result;

  const detail::RankBefore<BasicEmbeddingTable<T>> before{&table};
  const std::size_t n = table.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min(opts.workers * 4, (n + 4095) / 4096));
  const std::size_t per = (n + chunks - 1) / chunks;
  std::vector<std::vector<detail::Scored>> partial(chunks);
  const auto qv = table.vector(q);
  const double qn = table.norm(q);

  util::parallel_for(chunks, opts.workers, [&](std::size_t c) {
    auto& heap = partial[c];  // max-heap under `before`: front is the worst kept
    heap.reserve(k + 1);
    const std::size_t end = std::min(n, (c + 1) * per);
    for (std::size_t i = c * per; i < end; ++i) {
      if (opts.exclude_self && i == q) continue;
      const double ni = table.norm(i);
      if (ni == 0.0) continue;
      detail::Scored s{cosine_from_parts(dot(qv, table.vector(i)), qn, ni), i};
      if (heap.size() < k) {
        heap.push_back(s);
        std::push_heap(heap.begin(), heap.end(), before);
      } else if (before(s, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), before);
        heap.back() = s;
        std::push_heap(heap.begin(), heap.end(), before);
      }
    }
  });

  std::vector<detail::Scored> merged;
  for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  const std::size_t keep = std::min(k, merged.size());
  std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(keep), merged.end(), before);
  merged.resize(keep);
  for (const auto& s : merged) result.neighbors.push_back({table.token(s.index), s.sim});
  return result;
}

}  // namespace gaudit::embedding
