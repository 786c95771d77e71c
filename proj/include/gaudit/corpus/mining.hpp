#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaudit/corpus/document.hpp"
#include "gaudit/corpus/persons.hpp"
#include "gaudit/corpus/sentences.hpp"
#include "gaudit/corpus/tokenize.hpp"
#include "gaudit/wordset.hpp"

namespace gaudit::corpus {

inline constexpr std::string_view kMask = "[MASK]";

enum class PronounLabel { he, she, they_singular, they_plural };

inline std::string_view to_string(PronounLabel label) {
  switch (label) {
    case PronounLabel::he: return "he";
    case PronounLabel::she: return "she";
    case PronounLabel::they_singular: return "they_singular";
    case PronounLabel::they_plural: return "they_plural";
  }
  return "he";
}

inline PronounLabel parse_label(std::string_view s) {
  if (s == "he") return PronounLabel::he;
  if (s == "she") return PronounLabel::she;
  if (s == "they_singular") return PronounLabel::they_singular;
  if (s == "they_plural") return PronounLabel::they_plural;
  throw InputError("unknown pronoun label '" + std::string(s) +
                   "' (expected he, she, they_singular or they_plural)");
}

// Two consecutive sentences of a document; the second holds exactly one
// pronoun, replaced by "[MASK]" in masked_target. pronoun keeps the surface
// form so the mask can be undone byte for byte.
struct MinedPair {
  std::string doc_id;
  std::string sentence_prev;
  std::string sentence_target;
  std::string pronoun;
  PronounLabel label = PronounLabel::they_plural;
  std::string masked_target;
  ByteSpan pronoun_span;

  std::string unmasked() const {
    const auto at = masked_target.find(kMask);
    if (at == std::string::npos) return masked_target;
    return masked_target.substr(0, at) + pronoun + masked_target.substr(at + kMask.size());
  }

  friend bool operator==(const MinedPair&, const MinedPair&) = default;
};

struct MiningConfig {
  // Minimum person mentions in the preceding sentence for a plural "they".
  std::size_t min_person_mentions = 2;
};

namespace detail {

inline std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto at = hay.find(needle); at != std::string_view::npos; at = hay.find(needle, at + needle.size())) ++n;
  return n;
}

// The single pronoun token of a sentence, or nothing when it has zero or
// several lexicon tokens.
inline std::optional<Token> sole_pronoun(std::string_view sentence, const WordSet& lexicon) {
  std::optional<Token> found;
  for (auto& tok : tokenize(sentence)) {
    if (!lexicon.contains(tok.normalized)) continue;
    if (found) return std::nullopt;
    found = std::move(tok);
  }
  return found;
}

inline MinedPair make_pair(const std::string& doc_id, std::string_view prev, std::string_view target,
                           const Token& pronoun, PronounLabel label) {
  MinedPair p;
  p.doc_id = doc_id;
  p.sentence_prev = std::string(prev);
  p.sentence_target = std::string(target);
  p.pronoun = pronoun.surface;
  p.label = label;
  p.pronoun_span = pronoun.span;
  p.masked_target = std::string(target.substr(0, pronoun.span.begin)) + std::string(kMask) +
                    std::string(target.substr(pronoun.span.end));
  return p;
}

template <typename Accept>
void mine_document(const Document& doc, const WordSet& lexicon, std::string_view target_pronoun, PronounLabel label,
                   Accept&& accept_prev, std::vector<MinedPair>& out) {
  const auto spans = sentence_spans(doc.text);
  for (std::size_t i = 1; i < spans.size(); ++i) {
    const std::string_view prev = std::string_view(doc.text).substr(spans[i - 1].begin, spans[i - 1].size());
    const std::string_view target = std::string_view(doc.text).substr(spans[i].begin, spans[i].size());
    // A literal sentinel in the source would make the mask ambiguous.
    if (target.find(kMask) != std::string_view::npos || prev.find(kMask) != std::string_view::npos) continue;
    const auto pronoun = sole_pronoun(target, lexicon);
    if (!pronoun || pronoun->normalized != target_pronoun) continue;
    if (!accept_prev(prev)) continue;
    out.push_back(make_pair(doc.doc_id, prev, target, *pronoun, label));
  }
}

}  // namespace detail

// Sentence pairs whose second sentence has "they" as its only pronoun and
// whose first sentence mentions at least two people.
template <typename Docs>
std::vector<MinedPair> mine_plural_they(const Docs& docs, const WordSet& pronoun_lexicon,
                                        const PersonDetector& detector = HeuristicPersonDetector{},
                                        const MiningConfig& cfg = {}) {
  if (!pronoun_lexicon.contains("they")) throw InputError("pronoun lexicon must contain 'they'");
  std::vector<MinedPair> out;
  for (const Document& doc : docs)
    detail::mine_document(
        doc, pronoun_lexicon, "they", PronounLabel::they_plural,
        [&](std::string_view prev) { return detector.count(prev) >= cfg.min_person_mentions; }, out);
  return out;
}

// Candidate pairs whose second sentence has target_pronoun as its only
// pronoun. For singular "they" these are candidates for manual review, not
// final data.
template <typename Docs>
std::vector<MinedPair> mine_pronoun_sentences(const Docs& docs, std::string_view target_pronoun,
                                              const WordSet& pronoun_lexicon, PronounLabel label) {
  const auto target = unicode::fold_case(target_pronoun);
  if (!pronoun_lexicon.contains(target))
    throw InputError("target pronoun '" + target + "' is not in the pronoun lexicon");
  std::vector<MinedPair> out;
  for (const Document& doc : docs)
    detail::mine_document(doc, pronoun_lexicon, target, label, [](std::string_view) { return true; }, out);
  return out;
}

// Re-checks the defining predicates of a pair. Returns an empty string when
// valid, otherwise a description of the first violated rule.
inline std::string validate_pair(const MinedPair& p, const WordSet& pronoun_lexicon,
                                 const PersonDetector& detector = HeuristicPersonDetector{},
                                 const MiningConfig& cfg = {}) {
  const auto pronoun = detail::sole_pronoun(p.sentence_target, pronoun_lexicon);
  if (!pronoun) return "target sentence does not contain exactly one pronoun";
  if (pronoun->span != p.pronoun_span || pronoun->surface != p.pronoun) return "pronoun span does not match";
  if (detail::count_occurrences(p.masked_target, kMask) != 1) return "masked target must hold exactly one [MASK]";
  if (p.unmasked() != p.sentence_target) return "mask round trip does not reproduce the target sentence";
  if (p.masked_target.substr(p.pronoun_span.begin, kMask.size()) != kMask) return "mask is not at the pronoun span";
  const auto folded = pronoun->normalized;
  switch (p.label) {
    case PronounLabel::they_plural:
      if (folded != "they") return "they_plural pair without 'they'";
      if (detector.count(p.sentence_prev) < cfg.min_person_mentions)
        return "previous sentence has fewer than " + std::to_string(cfg.min_person_mentions) + " person mentions";
      break;
    case PronounLabel::they_singular:
      if (folded != "they") return "they_singular pair without 'they'";
      break;
    case PronounLabel::he:
      if (folded != "he") return "he pair without 'he'";
      break;
    case PronounLabel::she:
      if (folded != "she") return "she pair without 'she'";
      break;
  }
  return {};
}

// --- line-delimited JSON ------------------------------------------------

inline nlohmann::ordered_json to_json(const MinedPair& p) {
  return nlohmann::ordered_json{{"doc_id", p.doc_id},
                                {"sentence_prev", p.sentence_prev},
                                {"sentence_target", p.sentence_target},
                                {"masked_target", p.masked_target},
                                {"pronoun", p.pronoun},
                                {"label", to_string(p.label)},
                                {"pronoun_span", {p.pronoun_span.begin, p.pronoun_span.end}}};
}

inline MinedPair pair_from_json(const nlohmann::json& j) {
  MinedPair p;
  p.doc_id = j.at("doc_id").get<std::string>();
  p.sentence_prev = j.at("sentence_prev").get<std::string>();
  p.sentence_target = j.at("sentence_target").get<std::string>();
  p.masked_target = j.at("masked_target").get<std::string>();
  p.pronoun = j.at("pronoun").get<std::string>();
  p.label = parse_label(j.at("label").get<std::string>());
  if (j.contains("pronoun_span")) {
    const auto& s = j.at("pronoun_span");
    p.pronoun_span = {s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()};
  } else {
    // Records exported for classifiers carry no span; recover it from the mask.
    const auto at = p.masked_target.find(kMask);
    if (at == std::string::npos) throw InputError("record has neither pronoun_span nor [MASK]");
    p.pronoun_span = {at, at + p.pronoun.size()};
  }
  return p;
}

inline void write_pairs(std::ostream& out, const std::vector<MinedPair>& pairs) {
  for (const auto& p : pairs) out << to_json(p).dump() << '\n';
}

inline std::vector<MinedPair> read_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<MinedPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(pair_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string(), lineno, e.what());
    } catch (const InputError& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
  }
  return out;
}

// Ingests a human-reviewed subset of mined candidates. Every record must
// still satisfy validate_pair; the first failure is reported by record index.
inline std::vector<MinedPair> import_verified(const std::filesystem::path& path, const WordSet& pronoun_lexicon,
                                              const PersonDetector& detector = HeuristicPersonDetector{}) {
  auto pairs = read_pairs(path);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (auto why = validate_pair(pairs[i], pronoun_lexicon, detector); !why.empty())
      throw FormatError(path.string(), 0, "record " + std::to_string(i + 1) + " fails validation: " + why);
  return pairs;
}

}  // namespace gaudit::corpus
