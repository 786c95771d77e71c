#pragma once

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gaudit/error.hpp"

namespace gaudit::embedding {

// Both reductions accumulate in double whatever the storage type.
template <std::floating_point T>
double dot(std::span<const T> u, std::span<const T> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  return acc;
}

template <std::floating_point T>
double l2_norm(std::span<const T> u) {
  double acc = 0.0;
  for (T x : u) acc += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(acc);
}

// Immutable token -> vector map with a uniform dimension. Vectors are kept
// exactly as loaded; their norms are computed once, on first use, and the
// table is safe to share between threads.
template <std::floating_point T = double>
class BasicEmbeddingTable {
 public:
  using value_type = T;

  BasicEmbeddingTable() = default;

  explicit BasicEmbeddingTable(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw InputError("embedding dimension must be positive");
  }

  BasicEmbeddingTable(const BasicEmbeddingTable& other)
      : dimension_(other.dimension_), tokens_(other.tokens_), index_(other.index_), data_(other.data_) {}
  BasicEmbeddingTable(BasicEmbeddingTable&& other) noexcept
      : dimension_(other.dimension_),
        tokens_(std::move(other.tokens_)),
        index_(std::move(other.index_)),
        data_(std::move(other.data_)) {}
  BasicEmbeddingTable& operator=(BasicEmbeddingTable other) noexcept {
    dimension_ = other.dimension_;
    tokens_ = std::move(other.tokens_);
    index_ = std::move(other.index_);
    data_ = std::move(other.data_);
    norms_.clear();
    norms_once_ = std::make_unique<std::once_flag>();
    return *this;
  }

  // Build-time only; not safe once the table is shared.
  void add(std::string token, std::span<const T> vec) {
    if (vec.size() != dimension_)
      throw InputError("vector for '" + token + "' has dimension " + std::to_string(vec.size()) + ", expected " +
                       std::to_string(dimension_));
    for (T x : vec)
      if (!std::isfinite(x)) throw InputError("vector for '" + token + "' has a non-finite component");
    if (!index_.emplace(token, tokens_.size()).second) throw InputError("duplicate token '" + token + "'");
    tokens_.push_back(std::move(token));
    data_.insert(data_.end(), vec.begin(), vec.end());
  }

  void add(std::string token, std::initializer_list<T> vec) { add(std::move(token), std::span<const T>(vec.begin(), vec.size())); }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  bool contains(std::string_view token) const { return index_.contains(std::string(token)); }

  std::optional<std::size_t> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(std::string_view token) const {
    if (auto i = find(token)) return *i;
    throw InputError("'" + std::string(token) + "' is not in the embedding vocabulary");
  }

  const std::string& token(std::size_t i) const { return tokens_[i]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::span<const T> vector(std::size_t i) const { return {data_.data() + i * dimension_, dimension_}; }
  std::span<const T> vector(std::string_view token) const { return vector(index_of(token)); }

  double norm(std::size_t i) const {
    std::call_once(*norms_once_, [this] {
      norms_.resize(tokens_.size());
      for (std::size_t k = 0; k < tokens_.size(); ++k) norms_[k] = l2_norm(vector(k));
    });
    return norms_[i];
  }

  // A copy with every vector multiplied by factor (used by invariance checks).
  BasicEmbeddingTable scaled(T factor) const {
    BasicEmbeddingTable out(*this);
    for (auto& x : out.data_) x *= factor;
    return out;
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<T> data_;
  mutable std::vector<double> norms_;
  mutable std::unique_ptr<std::once_flag> norms_once_ = std::make_unique<std::once_flag>();
};

using EmbeddingTable = BasicEmbeddingTable<double>;

enum class EmbeddingFormat { plain, headered, autodetect };

inline EmbeddingFormat parse_embedding_format(std::string_view s) {
  if (s == "plain") return EmbeddingFormat::plain;
  if (s == "headered") return EmbeddingFormat::headered;
  if (s == "auto") return EmbeddingFormat::autodetect;
  throw InputError("unknown embedding format '" + std::string(s) + "' (plain, headered or auto)");
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

template <std::floating_point T>
bool parse_real(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_count(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

// Reads a whitespace-separated text table: "token v1 ... vd" per line. The
// headered variant starts with "vocab_size dimension". autodetect treats a
// first line of exactly two integers as a header. Blank lines are ignored.
// Errors carry the 1-based line number.
template <std::floating_point T = double>
BasicEmbeddingTable<T> load_embeddings(std::istream& in, EmbeddingFormat format, const std::string& source = "embeddings") {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> declared_vocab;
  std::size_t dim = 0;
  BasicEmbeddingTable<T> table;
  std::vector<T> buf;
  bool first = true;

  while (std::getline(in, line)) {
    ++lineno;
    auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      std::size_t v = 0, d = 0;
      const bool looks_like_header = fields.size() == 2 && detail::parse_count(fields[0], v) &&
                                     detail::parse_count(fields[1], d);
      if (format == EmbeddingFormat::headered || (format == EmbeddingFormat::autodetect && looks_like_header)) {
        if (!looks_like_header) throw FormatError(source, lineno, "expected header 'vocab_size dimension'");
        if (d == 0) throw FormatError(source, lineno, "header declares dimension 0");
        declared_vocab = v;
        dim = d;
        table = BasicEmbeddingTable<T>(dim);
        continue;
      }
    }
    if (fields.size() < 2) throw FormatError(source, lineno, "line has a token but no vector");
    const std::size_t this_dim = fields.size() - 1;
    if (dim == 0) {
      dim = this_dim;
      table = BasicEmbeddingTable<T>(dim);
    }
    if (this_dim != dim)
      throw FormatError(source, lineno,
                        "dimension mismatch: " + std::to_string(this_dim) + " values, expected " + std::to_string(dim));
    buf.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!detail::parse_real(fields[k + 1], buf[k]))
        throw FormatError(source, lineno, "cannot parse '" + std::string(fields[k + 1]) + "' as a number");
      if (!std::isfinite(buf[k])) throw FormatError(source, lineno, "non-finite value '" + std::string(fields[k + 1]) + "'");
    }
    const std::string token(fields[0]);
    if (table.contains(token)) throw FormatError(source, lineno, "duplicate token '" + token + "'");
    table.add(token, std::span<const T>(buf));
  }
  if (declared_vocab && *declared_vocab != table.size())
    throw FormatError(source, lineno,
                      "header declares " + std::to_string(*declared_vocab) + " entries but file has " +
                          std::to_string(table.size()));
  if (table.dimension() == 0) throw FormatError(source, lineno, "no embedding entries");
  return table;
}

template <std::floating_point T = double>
BasicEmbeddingTable<T> load_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding file " + path.string());
  return load_embeddings<T>(in, format, path.string());
}

}  // namespace gaudit::embedding
