#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gaudit/corpus/unicode.hpp"

namespace gaudit::corpus {

struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct Token {
  std::string surface;
  std::string normalized;
  ByteSpan span;

  friend bool operator==(const Token&, const Token&) = default;
};

// Calls fn(surface, span) for each maximal run of letters/digits, where an
// apostrophe or hyphen between two word characters stays inside the run.
// Tokens are reported in byte order and never overlap.
template <typename Fn>
void for_each_token(std::string_view text, Fn&& fn) {
  using unicode::decode_at;
  std::size_t pos = 0;
  const std::size_t n = text.size();
  while (pos < n) {
    auto cp = decode_at(text, pos);
    if (!unicode::is_word_char(cp.cp)) {
      pos = cp.end;
      continue;
    }
    const std::size_t begin = cp.begin;
    std::size_t end = cp.end;
    pos = cp.end;
    while (pos < n) {
      auto next = decode_at(text, pos);
      if (unicode::is_word_char(next.cp)) {
        end = pos = next.end;
        continue;
      }
      if (unicode::is_joiner(next.cp) && next.end < n) {
        auto after = decode_at(text, next.end);
        if (unicode::is_word_char(after.cp)) {
          end = pos = after.end;
          continue;
        }
      }
      break;
    }
    fn(text.substr(begin, end - begin), ByteSpan{begin, end});
  }
}

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  for_each_token(text, [&](std::string_view surface, ByteSpan span) {
    tokens.push_back(Token{std::string(surface), unicode::fold_case(surface), span});
  });
  return tokens;
}

}  // namespace gaudit::corpus
