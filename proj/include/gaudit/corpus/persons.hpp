#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gaudit/corpus/tokenize.hpp"

namespace gaudit::corpus {

// Counts person mentions in one sentence. Implementations that depend on an
// external tagger throw BackendError when it cannot be reached, which callers
// must not confuse with a count of zero.
class PersonDetector {
 public:
  virtual ~PersonDetector() = default;
  virtual std::vector<ByteSpan> mentions(std::string_view sentence) const = 0;
  virtual std::string identity() const = 0;

  std::size_t count(std::string_view sentence) const { return mentions(sentence).size(); }
};

// Capitalization heuristic standing in for a named-entity tagger.
//
// A name token is a token starting with an uppercase letter whose case-folded
// form is not a function word or pronoun (so a sentence-initial "The" or
// "They" is not a name, but a sentence-initial "Alice" is). Honorifics
// ("Dr", "Ms", ...) join the name that follows them, also across the
// abbreviation period. A mention is a maximal run of name tokens separated
// only by whitespace.
class HeuristicPersonDetector final : public PersonDetector {
 public:
  std::vector<ByteSpan> mentions(std::string_view sentence) const override {
    const auto tokens = tokenize(sentence);
    std::vector<ByteSpan> out;
    bool open = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto& tok = tokens[i];
      const bool honorific = is_honorific(tok.normalized) && i + 1 < tokens.size() &&
                             is_capitalized(tokens[i + 1].surface);
      const bool name = honorific || (is_capitalized(tok.surface) && !is_stopword(tok.normalized));
      if (!name) {
        open = false;
        continue;
      }
      if (open && joined(sentence, tokens[i - 1], tok)) {
        out.back().end = tok.span.end;
      } else {
        out.push_back(tok.span);
      }
      open = true;
    }
    return out;
  }

  std::string identity() const override { return "heuristic:capitalization-v1"; }

  static bool is_capitalized(std::string_view surface) {
    return !surface.empty() && unicode::is_upper(unicode::decode_at(surface, 0).cp);
  }

  static bool is_honorific(const std::string& folded) {
    static const std::set<std::string> words{"mr", "mrs", "ms", "mx", "miss", "dr", "prof", "professor",
                                             "sir", "dame", "lady", "lord", "rev", "fr", "sr", "st"};
    return words.contains(folded);
  }

  static bool is_stopword(const std::string& folded) {
    static const std::set<std::string> words{
        "a",       "an",      "the",     "this",   "that",    "these",   "those",     "there",   "here",
        "i",       "we",      "you",     "he",     "she",     "it",      "they",      "me",      "us",
        "him",     "her",     "them",    "his",    "hers",    "its",     "our",       "their",   "my",
        "your",    "xe",      "ze",      "ey",     "xey",     "zey",     "when",      "then",    "after",
        "before",  "in",      "on",      "at",     "for",     "from",    "with",      "by",      "as",
        "but",     "and",     "or",      "so",     "if",      "while",   "although",  "however", "later",
        "yesterday", "today", "tomorrow", "soon",  "finally", "meanwhile", "some",    "many",    "most",
        "all",     "both",    "each",    "every",  "one",     "two",     "no",        "not",     "also",
        "during",  "since",   "because", "what",   "who",     "where",   "why",       "how",     "once",
        "now",     "to",      "of",      "about",  "over",    "under",   "until",     "despite", "still",
        "yet",     "thus",    "such",    "another", "other",  "several", "few",       "nobody",  "everyone",
        "someone", "anyone",  "nothing", "everything", "something", "is",  "was",       "are",     "were"};
    return words.contains(folded);
  }

 private:
  // Two name tokens belong to the same mention when only whitespace separates
  // them, or an abbreviation period after an honorific.
  static bool joined(std::string_view sentence, const Token& prev, const Token& next) {
    auto gap = sentence.substr(prev.span.end, next.span.begin - prev.span.end);
    if (!gap.empty() && gap.front() == '.' && is_honorific(prev.normalized)) gap.remove_prefix(1);
    if (gap.empty()) return false;
    for (char c : gap)
      if (c != ' ' && c != '\t') return false;
    return true;
  }
};

inline std::size_t detect_person_mentions(std::string_view sentence) {
  return HeuristicPersonDetector{}.count(sentence);
}

}  // namespace gaudit::corpus
