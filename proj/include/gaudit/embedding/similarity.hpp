#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gaudit/embedding/cosine.hpp"
#include "gaudit/wordset.hpp"

namespace gaudit::embedding {

struct SimilarityMatrix {
  std::vector<std::string> row_words;
  std::vector<std::string> col_words;
  std::vector<std::vector<double>> values;  // values[i][j] = cosine(row i, col j)
  std::vector<std::string> missing_rows;
  std::vector<std::string> missing_cols;

  double at(std::size_t i, std::size_t j) const { return values.at(i).at(j); }
};

namespace detail {

template <typename Table>
std::vector<std::size_t> resolve(const Table& table, const WordSet& set, std::vector<std::string>& found,
                                 std::vector<std::string>& missing) {
  std::vector<std::size_t> idx;
  for (const auto& w : set.words()) {
    if (auto i = table.find(w)) {
      idx.push_back(*i);
      found.push_back(w);
    } else {
      missing.push_back(w);
    }
  }
  return idx;
}

}  // namespace detail

// Words absent from the table are dropped and listed in missing_rows /
// missing_cols; it is an error only when a whole side is absent.
template <std::floating_point T>
SimilarityMatrix similarity_matrix(const BasicEmbeddingTable<T>& table, const WordSet& rows, const WordSet& cols) {
  SimilarityMatrix m;
  const auto ri = detail::resolve(table, rows, m.row_words, m.missing_rows);
  const auto ci = detail::resolve(table, cols, m.col_words, m.missing_cols);
  if (ri.empty()) throw InputError("no word of row set '" + rows.name() + "' is in the embedding table");
  if (ci.empty()) throw InputError("no word of column set '" + cols.name() + "' is in the embedding table");
  m.values.assign(ri.size(), std::vector<double>(ci.size()));
  for (std::size_t i = 0; i < ri.size(); ++i)
    for (std::size_t j = 0; j < ci.size(); ++j) m.values[i][j] = cosine(table, ri[i], ci[j]);
  return m;
}

struct AverageSimilarity {
  double mean = 0.0;
  double abs_mean = 0.0;
  std::size_t used = 0;
  std::vector<std::string> missing;
};

template <std::floating_point T>
AverageSimilarity average_similarity(const BasicEmbeddingTable<T>& table, std::string_view word, const WordSet& set) {
  const std::size_t w = table.index_of(word);
  AverageSimilarity out;
  std::vector<std::string> found;
  const auto idx = detail::resolve(table, set, found, out.missing);
  if (idx.empty()) throw InputError("no word of set '" + set.name() + "' is in the embedding table");
  double sum = 0.0, abs_sum = 0.0;
  for (auto i : idx) {
    const double c = cosine(table, w, i);
    sum += c;
    abs_sum += std::abs(c);
  }
  out.used = idx.size();
  out.mean = sum / static_cast<double>(idx.size());
  out.abs_mean = abs_sum / static_cast<double>(idx.size());
  return out;
}

}  // namespace gaudit::embedding
