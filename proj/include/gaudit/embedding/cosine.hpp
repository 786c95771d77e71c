#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "gaudit/embedding/table.hpp"

namespace gaudit::embedding {

// Combines a dot product with precomputed norms. Every cosine in the library
// goes through here so cached-norm and direct computations agree bit for bit.
inline double cosine_from_parts(double dot_uv, double norm_u, double norm_v) {
  return std::clamp(dot_uv / (norm_u * norm_v), -1.0, 1.0);
}

template <std::floating_point T>
double cosine(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size())
    throw InputError("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                     std::to_string(v.size()));
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) throw DegenerateError("cosine is undefined for a zero vector");
  return cosine_from_parts(dot(u, v), nu, nv);
}

template <std::floating_point T>
double cosine(const std::vector<T>& u, const std::vector<T>& v) {
  return cosine(std::span<const T>(u), std::span<const T>(v));
}

// Cosine between two vocabulary entries using the table's cached norms.
template <std::floating_point T>
double cosine(const BasicEmbeddingTable<T>& table, std::size_t a, std::size_t b) {
  const double na = table.norm(a);
  const double nb = table.norm(b);
  if (na == 0.0 || nb == 0.0)
    throw DegenerateError("cosine is undefined for the zero vector of '" + table.token(na == 0.0 ? a : b) + "'");
  return cosine_from_parts(dot(table.vector(a), table.vector(b)), na, nb);
}

template <std::floating_point T>
double cosine(const BasicEmbeddingTable<T>& table, std::string_view a, std::string_view b) {
  return cosine(table, table.index_of(a), table.index_of(b));
}

}  // namespace gaudit::embedding
