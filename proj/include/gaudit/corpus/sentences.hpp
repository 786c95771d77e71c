#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gaudit/corpus/document.hpp"
#include "gaudit/corpus/tokenize.hpp"

namespace gaudit::corpus {

// Rule-based splitter: a sentence ends after a run of '.', '!' or '?' that is
// followed by whitespace and then an uppercase letter. Abbreviations are not
// special-cased, so "Dr. Smith" splits after "Dr.".
//
// Returned spans exclude the whitespace between sentences; the text between
// consecutive spans (and before the first / after the last) is whitespace
// only, so the original text is recovered by re-inserting those separators.
inline std::vector<ByteSpan> sentence_spans(std::string_view text) {
  using unicode::decode_at;
  std::vector<ByteSpan> spans;
  const std::size_t n = text.size();

  auto skip_space = [&](std::size_t pos) {
    while (pos < n) {
      auto cp = decode_at(text, pos);
      if (!unicode::is_space(cp.cp)) break;
      pos = cp.end;
    }
    return pos;
  };
  auto is_terminal = [](char c) { return c == '.' || c == '!' || c == '?'; };

  std::size_t start = skip_space(0);
  std::size_t pos = start;
  while (pos < n) {
    if (!is_terminal(text[pos])) {
      pos = decode_at(text, pos).end;
      continue;
    }
    std::size_t punct_end = pos;
    while (punct_end < n && is_terminal(text[punct_end])) ++punct_end;
    const std::size_t next_start = skip_space(punct_end);
    if (next_start > punct_end && next_start < n && unicode::is_upper(decode_at(text, next_start).cp)) {
      spans.push_back({start, punct_end});
      start = next_start;
    }
    pos = next_start > punct_end ? next_start : punct_end;
  }

  std::size_t end = n;
  while (end > start) {
    std::size_t last_begin = end - 1;
    while (last_begin > start && (static_cast<unsigned char>(text[last_begin]) & 0xC0) == 0x80) --last_begin;
    auto cp = decode_at(text, last_begin);
    if (cp.end != end || !unicode::is_space(cp.cp)) break;
    end = last_begin;
  }
  if (end > start) spans.push_back({start, end});
  return spans;
}

inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& s : sentence_spans(text)) out.emplace_back(text.substr(s.begin, s.size()));
  return out;
}

inline std::vector<std::string> split_sentences(const Document& doc) { return split_sentences(doc.text); }

}  // namespace gaudit::corpus
