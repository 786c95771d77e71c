#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gaudit/corpus/document.hpp"
#include "gaudit/corpus/tokenize.hpp"
#include "gaudit/util/parallel.hpp"
#include "gaudit/wordset.hpp"

namespace gaudit::corpus {

// Lexicon-word counts over a corpus. Reports from disjoint shards combine
// with merge(); the result is independent of how the corpus was split.
struct FrequencyReport {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total_tokens = 0;

  // Occurrences per million tokens; empty when no tokens were seen.
  std::map<std::string, double> rates() const {
    std::map<std::string, double> out;
    if (total_tokens == 0) return out;
    for (const auto& [word, count] : counts)
      out[word] = static_cast<double>(count) / static_cast<double>(total_tokens) * 1e6;
    return out;
  }

  FrequencyReport& merge(const FrequencyReport& other) {
    for (const auto& [word, count] : other.counts) counts[word] += count;
    total_tokens += other.total_tokens;
    return *this;
  }

  friend FrequencyReport merge(FrequencyReport a, const FrequencyReport& b) { return a.merge(b); }
  friend bool operator==(const FrequencyReport&, const FrequencyReport&) = default;
};

// Incremental counter; feed text in any chunking that does not split tokens
// (whole documents or lines).
class FrequencyCounter {
 public:
  explicit FrequencyCounter(const WordSet& lexicon) {
    for (const auto& w : lexicon.words()) {
      if (w.empty()) throw InputError("lexicon contains the empty string");
      index_.emplace(w, 0);
    }
    if (index_.empty()) throw InputError("lexicon is empty");
  }

  void add(std::string_view text) {
    for_each_token(text, [&](std::string_view surface, ByteSpan) {
      ++total_;
      unicode::fold_case_into(surface, scratch_);
      if (auto it = index_.find(scratch_); it != index_.end()) ++it->second;
    });
  }

  FrequencyReport report() const {
    FrequencyReport r;
    r.total_tokens = total_;
    for (const auto& [word, count] : index_) r.counts[word] = count;
    return r;
  }

 private:
  std::unordered_map<std::string, std::uint64_t> index_;
  std::uint64_t total_ = 0;
  std::string scratch_;
};

// Documents are split into `shards` contiguous partitions counted in
// parallel and merged in partition order.
inline FrequencyReport count_frequencies(std::span<const Document> docs, const WordSet& lexicon,
                                         std::size_t shards = 1) {
  shards = std::max<std::size_t>(1, std::min(shards, std::max<std::size_t>(docs.size(), 1)));
  std::vector<FrequencyReport> partial(shards);
  const std::size_t per = (docs.size() + shards - 1) / shards;
  util::parallel_for(shards, shards, [&](std::size_t s) {
    FrequencyCounter counter(lexicon);
    const std::size_t begin = std::min(docs.size(), s * per);
    const std::size_t end = std::min(docs.size(), begin + per);
    for (std::size_t i = begin; i < end; ++i) counter.add(docs[i].text);
    partial[s] = counter.report();
  });
  FrequencyReport total = FrequencyCounter(lexicon).report();
  for (const auto& p : partial) total.merge(p);
  return total;
}

// Streaming variant for corpora that do not fit in memory: counts
// line by line.
inline FrequencyReport count_frequencies(std::istream& in, const WordSet& lexicon) {
  FrequencyCounter counter(lexicon);
  std::string line;
  while (std::getline(in, line)) counter.add(line);
  return counter.report();
}

// Files are counted concurrently and merged in path order.
inline FrequencyReport count_frequencies(const std::filesystem::path& corpus_root, const WordSet& lexicon,
                                         std::size_t workers = util::default_concurrency()) {
  const auto files = corpus_files(corpus_root);
  std::vector<FrequencyReport> partial(files.size());
  util::parallel_for(files.size(), workers, [&](std::size_t i) {
    std::ifstream in(files[i], std::ios::binary);
    if (!in) throw IoError("cannot open " + files[i].string());
    partial[i] = count_frequencies(in, lexicon);
  });
  FrequencyReport total = FrequencyCounter(lexicon).report();
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace gaudit::corpus
