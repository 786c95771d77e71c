#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gaudit/embedding/cosine.hpp"
#include "gaudit/embedding/table.hpp"
#include "gaudit/subspace/symmetric_eigen.hpp"
#include "gaudit/wordset.hpp"

namespace gaudit::subspace {

struct SubspaceReport {
  std::string set_name;
  std::vector<std::string> words;    // resolvable words, in set order
  std::vector<std::string> missing;  // set words absent from the table
  std::vector<std::vector<double>> components;
  std::vector<double> variances;  // covariance eigenvalues (n - 1 denominator)
  std::vector<double> explained_variance_ratio;
  std::map<std::pair<std::string, std::string>, double> pairwise_distances;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  for (auto& x : v) x /= n;
}

// Unit vector orthogonal to `basis`, built from the standard basis vector
// with the largest residual. Used for components beyond the data's rank,
// whose direction is otherwise arbitrary.
inline std::vector<double> orthogonal_completion(const std::vector<std::vector<double>>& basis, std::size_t dim) {
  std::vector<double> best;
  double best_norm = -1.0;
  for (std::size_t e = 0; e < dim; ++e) {
    std::vector<double> v(dim, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double p = dot(v, b);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= p * b[i];
      }
    const double n = std::sqrt(dot(v, v));
    if (n > best_norm + 1e-12) {
      best_norm = n;
      best = std::move(v);
    }
  }
  normalize(best);
  return best;
}

// Flip so the component points towards the uncentered set mean; when it is
// orthogonal to the mean, make the first non-negligible coordinate positive.
inline void orient(std::vector<double>& c, const std::vector<double>& mean) {
  const double mean_norm = std::sqrt(dot(mean, mean));
  const double d = dot(c, mean);
  bool flip = false;
  if (std::abs(d) > 1e-12 * std::max(1.0, mean_norm)) {
    flip = d < 0.0;
  } else {
    for (double x : c)
      if (std::abs(x) > 1e-12) {
        flip = x < 0.0;
        break;
      }
  }
  if (flip)
    for (auto& x : c) x = -x;
}

}  // namespace detail

// Top-k principal components of the mean-centred vectors of the set's
// resolvable words, in decreasing order of variance. The eigenproblem is
// solved on the n x n Gram matrix of the centred words (n is small, the
// dimension may be large) and mapped back to embedding space.
template <std::floating_point T>
SubspaceReport principal_components(const embedding::BasicEmbeddingTable<T>& table, const WordSet& set,
                                    std::size_t k) {
  SubspaceReport r;
  r.set_name = set.name();
  std::vector<std::vector<double>> rows;
  for (const auto& w : set.words()) {
    if (auto i = table.find(w)) {
      r.words.push_back(w);
      auto v = table.vector(*i);
      rows.emplace_back(v.begin(), v.end());
    } else {
      r.missing.push_back(w);
    }
  }
  const std::size_t n = rows.size();
  const std::size_t dim = table.dimension();
  if (n < 2) throw InputError("PCA of '" + set.name() + "' needs at least 2 words in the table, found " + std::to_string(n));
  if (k == 0 || k > std::min(n, dim))
    throw InputError("component count " + std::to_string(k) + " outside [1, " + std::to_string(std::min(n, dim)) + "]");

  std::vector<double> mean(dim, 0.0);
  for (const auto& row : rows)
    for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j];
  for (auto& x : mean) x /= static_cast<double>(n);

  double raw_scale = 0.0;
  for (auto& row : rows) {
    raw_scale += detail::dot(row, row);
    for (std::size_t j = 0; j < dim; ++j) row[j] -= mean[j];
  }

  SquareMatrix gram(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) gram(i, j) = gram(j, i) = detail::dot(rows[i], rows[j]);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += gram(i, i);
  if (total <= 1e-20 * std::max(1.0, raw_scale))
    throw DegenerateError("word vectors of '" + set.name() + "' have zero variance; principal components are undefined");

  const auto eig = symmetric_eigen(gram);
  const double rank_tol = 1e-12 * eig.values.front();
  for (std::size_t c = 0; c < k; ++c) {
    const double lambda = std::max(0.0, eig.values[c]);
    std::vector<double> comp;
    if (lambda > rank_tol) {
      comp.assign(dim, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j) comp[j] += eig.vectors[c][i] * rows[i][j];
      detail::normalize(comp);
      // Re-orthogonalise against earlier components to absorb rounding.
      for (const auto& prev : r.components) {
        const double p = detail::dot(comp, prev);
        for (std::size_t j = 0; j < dim; ++j) comp[j] -= p * prev[j];
      }
      detail::normalize(comp);
      r.explained_variance_ratio.push_back(lambda / total);
      r.variances.push_back(lambda / static_cast<double>(n - 1));
    } else {
      comp = detail::orthogonal_completion(r.components, dim);
      r.explained_variance_ratio.push_back(0.0);
      r.variances.push_back(0.0);
    }
    detail::orient(comp, mean);
    r.components.push_back(std::move(comp));
  }
  return r;
}

// 1 - cosine of the first principal components, in [0, 2].
inline double subspace_distance(const SubspaceReport& a, const SubspaceReport& b) {
  if (a.components.empty() || b.components.empty()) throw InputError("subspace report without components");
  if (a.components.front().size() != b.components.front().size())
    throw InputError("subspaces '" + a.set_name + "' and '" + b.set_name + "' have different dimensions");
  return 1.0 - embedding::cosine(a.components.front(), b.components.front());
}

// Fills each report's pairwise_distances with its distance to every other
// report, keyed (own set name, other set name).
inline void fill_pairwise_distances(std::vector<SubspaceReport>& reports) {
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (std::size_t j = 0; j < reports.size(); ++j) {
      if (i == j) continue;
      const double d = subspace_distance(reports[i], reports[j]);
      reports[i].pairwise_distances[{reports[i].set_name, reports[j].set_name}] = d;
    }
}

}  // namespace gaudit::subspace
