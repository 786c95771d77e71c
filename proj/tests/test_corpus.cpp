#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "gaudit/corpus/dataset.hpp"
#include "gaudit/corpus/document.hpp"
#include "gaudit/corpus/frequency.hpp"
#include "gaudit/corpus/mining.hpp"
#include "gaudit/corpus/sentences.hpp"
#include "gaudit/lexicons.hpp"
#include "support.hpp"

using namespace gaudit;
using namespace gaudit::corpus;
using testing_support::TempDir;
using testing_support::write_text;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<std::string> normalized(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.normalized);
  return out;
}

WordSet he_she_they() { return WordSet("lex", {"he", "she", "they"}, WordRole::pronoun); }

}  // namespace

TEST(Tokenize, EmptyText) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, SimpleSentence) {
  const auto t = tokenize("He said they left.");
  EXPECT_EQ(surfaces(t), (std::vector<std::string>{"He", "said", "they", "left"}));
  EXPECT_EQ(normalized(t), (std::vector<std::string>{"he", "said", "they", "left"}));
  EXPECT_EQ(t[0].span, (ByteSpan{0, 2}));
  EXPECT_EQ(t[3].span, (ByteSpan{13, 17}));
}

TEST(Tokenize, SlashSeparates) {
  EXPECT_EQ(surfaces(tokenize("xe/xem pronouns")), (std::vector<std::string>{"xe", "xem", "pronouns"}));
}

TEST(Tokenize, InternalApostrophesAndHyphens) {
  EXPECT_EQ(surfaces(tokenize("two-spirit folks don't -dash trail- 'quoted'")),
            (std::vector<std::string>{"two-spirit", "folks", "don't", "dash", "trail", "quoted"}));
  // Typographic apostrophe (U+2019) is a joiner as well.
  EXPECT_EQ(surfaces(tokenize("they\xE2\x80\x99re")), (std::vector<std::string>{"they\xE2\x80\x99re"}));
}

TEST(Tokenize, UnicodeLettersAndFolding) {
  const auto t = tokenize("Zoë ÉMILE straße 42");
  EXPECT_EQ(surfaces(t), (std::vector<std::string>{"Zoë", "ÉMILE", "straße", "42"}));
  EXPECT_EQ(t[1].normalized, "émile");
  // Full case folding maps ß to ss.
  EXPECT_EQ(t[2].normalized, "strasse");
}

TEST(Tokenize, SpansAreDisjointOrderedAndInBounds) {
  const std::string text = "Alice's co-worker, Bob — and they/them folks — left at 5pm!";
  const auto t = tokenize(text);
  ASSERT_FALSE(t.empty());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_LT(t[i].span.begin, t[i].span.end);
    EXPECT_LE(t[i].span.end, text.size());
    EXPECT_EQ(text.substr(t[i].span.begin, t[i].span.size()), t[i].surface);
    EXPECT_EQ(t[i].normalized, unicode::fold_case(t[i].surface));
    if (i) EXPECT_LE(t[i - 1].span.end, t[i].span.begin);
  }
}

TEST(Frequency, WorkedExample) {
  const std::vector<Document> docs{{"d", "He said they left. He smiled."}};
  const auto r = count_frequencies(docs, he_she_they());
  EXPECT_EQ(r.counts.at("he"), 2u);
  EXPECT_EQ(r.counts.at("she"), 0u);
  EXPECT_EQ(r.counts.at("they"), 1u);
  EXPECT_EQ(r.total_tokens, 6u);
  EXPECT_DOUBLE_EQ(r.rates().at("he"), 2.0 / 6.0 * 1e6);
}

TEST(Frequency, EmptyCorpus) {
  const auto r = count_frequencies(std::vector<Document>{}, he_she_they());
  EXPECT_EQ(r.total_tokens, 0u);
  for (const auto& [w, c] : r.counts) EXPECT_EQ(c, 0u) << w;
  EXPECT_TRUE(r.rates().empty());
}

TEST(Frequency, RejectsEmptyLexiconWord) {
  EXPECT_THROW(WordSet("bad", {"he", ""}), InputError);
}

TEST(Frequency, ShardMergeMatchesAnyPartition) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> vocab{"he", "She", "THEY", "xe", "ze", "the", "cat", "ran", "Ey"};
  std::vector<Document> docs;
  for (int d = 0; d < 97; ++d) {
    std::string text;
    const int len = static_cast<int>(rng() % 40);
    for (int i = 0; i < len; ++i) text += vocab[rng() % vocab.size()] + (rng() % 5 == 0 ? ". " : " ");
    docs.push_back({"d" + std::to_string(d), text});
  }
  const auto lex = lexicons::pronouns();
  const auto one = count_frequencies(docs, lex, 1);
  for (std::size_t shards : {2u, 3u, 8u, 97u, 200u}) EXPECT_EQ(count_frequencies(docs, lex, shards), one) << shards;

  // merge(count(A), count(B)) == count(A u B) for a random split point.
  const std::size_t cut = 40;
  const auto a = count_frequencies(std::span<const Document>(docs).first(cut), lex);
  const auto b = count_frequencies(std::span<const Document>(docs).subspan(cut), lex);
  EXPECT_EQ(merge(a, b), one);
  EXPECT_EQ(merge(b, a), one);
}

TEST(Frequency, CaseInvariance) {
  const std::vector<Document> docs{{"a", "HE and She and They. XE ze."}};
  std::vector<Document> lowered{{"a", "he and she and they. xe ze."}};
  EXPECT_EQ(count_frequencies(docs, lexicons::pronouns()), count_frequencies(lowered, lexicons::pronouns()));
}

TEST(Frequency, StreamAndDirectoryAgreeWithInMemory) {
  TempDir dir;
  write_text(dir / "b/two.txt", "They left.\nShe stayed. he\n");
  write_text(dir / "a.txt", "He said they left. He smiled.\n");
  const auto docs = read_corpus(dir.path());
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, "a.txt");
  EXPECT_EQ(docs[1].doc_id, "b/two.txt");
  const auto lex = he_she_they();
  EXPECT_EQ(count_frequencies(dir.path(), lex), count_frequencies(docs, lex));
  std::istringstream in("He said they left. He smiled.\n");
  EXPECT_EQ(count_frequencies(in, lex), count_frequencies(std::vector<Document>{docs[0]}, lex));
}

TEST(Frequency, MissingCorpusIsIoError) {
  EXPECT_THROW(count_frequencies(std::filesystem::path("/nonexistent/corpus"), he_she_they()), IoError);
}

TEST(Documents, DocsPerLineIds) {
  TempDir dir;
  write_text(dir / "c.txt", "first line\n\nthird line\r\n");
  CorpusOptions opts;
  opts.docs_per_line = true;
  const auto docs = read_corpus(dir / "c.txt", opts);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, "c.txt:1");
  EXPECT_EQ(docs[1].doc_id, "c.txt:3");
  EXPECT_EQ(docs[1].text, "third line");
}

TEST(Sentences, SplitsOnTerminalPunctuationBeforeUppercase) {
  EXPECT_EQ(split_sentences("A arrived. B left."), (std::vector<std::string>{"A arrived.", "B left."}));
  EXPECT_EQ(split_sentences("no punctuation"), (std::vector<std::string>{"no punctuation"}));
  EXPECT_EQ(split_sentences("Wait!! Really? yes. Ok"), (std::vector<std::string>{"Wait!!", "Really? yes.", "Ok"}));
}

TEST(Sentences, AbbreviationLimit) {
  EXPECT_EQ(split_sentences("Dr. Smith spoke."), (std::vector<std::string>{"Dr.", "Smith spoke."}));
}

TEST(Sentences, ConcatenationWithSeparatorsReproducesText) {
  const std::string text = "  One here.  Two there!\nThree? four. Five\t\n";
  const auto spans = sentence_spans(text);
  ASSERT_EQ(spans.size(), 4u);
  std::string rebuilt = text.substr(0, spans[0].begin);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const std::size_t next = i + 1 < spans.size() ? spans[i + 1].begin : text.size();
    rebuilt += text.substr(spans[i].begin, next - spans[i].begin);
  }
  EXPECT_EQ(rebuilt, text);
  EXPECT_EQ(text.substr(spans[2].begin, spans[2].size()), "Three? four.");
  EXPECT_EQ(text.substr(spans[3].begin, spans[3].size()), "Five");
}

TEST(Persons, WorkedExamples) {
  EXPECT_EQ(detect_person_mentions("Alice Smith and Bob Jones arrived."), 2u);
  EXPECT_EQ(detect_person_mentions("the soccer team arrived."), 0u);
  EXPECT_EQ(detect_person_mentions("Alice plays well."), 1u);
  EXPECT_EQ(detect_person_mentions("The team arrived."), 0u);
  EXPECT_EQ(detect_person_mentions("Alice Smith met Bob."), 2u);
}

TEST(Persons, HonorificsAndPunctuation) {
  EXPECT_EQ(detect_person_mentions("Then Dr. Jane Doe and Mx Lee talked."), 2u);
  EXPECT_EQ(detect_person_mentions("Alice, Bob, and Carol sang."), 3u);
  EXPECT_EQ(detect_person_mentions("They met yesterday."), 0u);
}

TEST(Mining, PluralTheyWorkedExamples) {
  const auto lex = lexicons::pronouns();
  auto mine = [&](const std::string& text) { return mine_plural_they(std::vector<Document>{{"d", text}}, lex); };

  const auto hit = mine("Alice Smith and Bob Jones arrived. They sat down.");
  ASSERT_EQ(hit.size(), 1u);
  EXPECT_EQ(hit[0].label, PronounLabel::they_plural);
  EXPECT_EQ(hit[0].masked_target, "[MASK] sat down.");
  EXPECT_EQ(hit[0].pronoun, "They");
  EXPECT_EQ(hit[0].unmasked(), hit[0].sentence_target);

  EXPECT_TRUE(mine("Alice Smith and Bob Jones arrived. He sat and they waited.").empty());
  EXPECT_TRUE(mine("The team arrived. They sat down.").empty());
  // Possessives count as pronouns too.
  EXPECT_TRUE(mine("Alice and Bob arrived. They took their seats.").empty());
}

TEST(Mining, PronounSentencesWorkedExamples) {
  const auto lex = lexicons::pronouns();
  auto mine = [&](const std::string& text, const std::string& p) {
    return mine_pronoun_sentences(std::vector<Document>{{"d", text}}, p, lex, PronounLabel::he);
  };
  const auto one = mine("Smith arrived early. He sat down.", "he");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].masked_target, "[MASK] sat down.");
  const auto two = mine("He sat. He stood.", "he");
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].sentence_prev, "He sat.");
  EXPECT_EQ(two[0].sentence_target, "He stood.");
  EXPECT_TRUE(mine("Nobody here uses neopronouns. Nope.", "xe").empty());
  EXPECT_THROW(mine("x", "notapronoun"), InputError);
  EXPECT_THROW(parse_label("plural"), InputError);
}

TEST(Mining, MidSentenceMaskRoundTripAndRevalidation) {
  const auto lex = lexicons::pronouns();
  const std::vector<Document> docs{{"d", "Ana Ruiz and Li Wei met. After lunch THEY went home."}};
  const auto pairs = mine_plural_they(docs, lex);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].masked_target, "After lunch [MASK] went home.");
  EXPECT_EQ(pairs[0].pronoun_span, (ByteSpan{12, 16}));
  EXPECT_EQ(validate_pair(pairs[0], lex), "");

  auto broken = pairs[0];
  broken.sentence_prev = "The team met.";
  EXPECT_NE(validate_pair(broken, lex), "");
  broken = pairs[0];
  broken.masked_target = "After lunch they went home.";
  EXPECT_NE(validate_pair(broken, lex), "");
}

TEST(Mining, JsonRoundTripAndImport) {
  TempDir dir;
  const auto lex = lexicons::pronouns();
  const std::vector<Document> docs{{"d1", "Ana Ruiz and Li Wei met. They left."},
                                   {"d2", "Sam Stone and Kim Park sang. Later they rested."}};
  const auto pairs = mine_plural_they(docs, lex);
  ASSERT_EQ(pairs.size(), 2u);
  {
    std::ofstream out(dir / "pairs.jsonl");
    write_pairs(out, pairs);
  }
  EXPECT_EQ(read_pairs(dir / "pairs.jsonl"), pairs);
  EXPECT_EQ(import_verified(dir / "pairs.jsonl", lex), pairs);

  write_text(dir / "bad.jsonl",
             to_json(pairs[0]).dump() + "\n" +
                 R"({"doc_id":"x","sentence_prev":"The team met.","sentence_target":"They left.","masked_target":"[MASK] left.","pronoun":"They","label":"they_plural"})" +
                 "\n");
  EXPECT_THROW(import_verified(dir / "bad.jsonl", lex), FormatError);

  write_text(dir / "garbage.jsonl", "{not json\n");
  try {
    read_pairs(dir / "garbage.jsonl");
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(Mining, Deterministic) {
  const auto lex = lexicons::pronouns();
  std::vector<Document> docs;
  for (int i = 0; i < 20; ++i)
    docs.push_back({"d" + std::to_string(i), "Ana Ruiz and Li Wei met. They left. He stayed. Then she sang."});
  EXPECT_EQ(mine_plural_they(docs, lex), mine_plural_they(docs, lex));
  EXPECT_EQ(mine_pronoun_sentences(docs, "she", lex, PronounLabel::she).size(), 20u);
}

namespace {

std::vector<MinedPair> fake_pairs(PronounLabel label, int n) {
  std::vector<MinedPair> out;
  for (int i = 0; i < n; ++i) {
    MinedPair p;
    p.doc_id = std::string(to_string(label)) + std::to_string(i);
    p.sentence_prev = "Prev " + std::to_string(i) + ".";
    p.sentence_target = "They sat.";
    p.pronoun = "They";
    p.label = label;
    p.masked_target = "[MASK] sat.";
    p.pronoun_span = {0, 4};
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST(Dataset, BalancesClassesAndSplits) {
  const auto ds = export_classifier_dataset(fake_pairs(PronounLabel::they_singular, 120),
                                            fake_pairs(PronounLabel::they_plural, 100), 42);
  EXPECT_EQ(ds.size(), 200u);
  std::map<PronounLabel, int> train, test;
  for (const auto& r : ds.train) {
    ++train[r.label];
    EXPECT_EQ(r.split, "train");
  }
  for (const auto& r : ds.test) {
    ++test[r.label];
    EXPECT_EQ(r.split, "test");
  }
  EXPECT_EQ(train[PronounLabel::they_singular], 80);
  EXPECT_EQ(train[PronounLabel::they_plural], 80);
  EXPECT_EQ(test[PronounLabel::they_singular], 20);
  EXPECT_EQ(test[PronounLabel::they_plural], 20);
}

TEST(Dataset, ErrorsOnEmptyOrSharedLabels) {
  EXPECT_THROW(export_classifier_dataset({}, {}, 1), InputError);
  EXPECT_THROW(export_classifier_dataset(fake_pairs(PronounLabel::he, 3), {}, 1), InputError);
  EXPECT_THROW(export_classifier_dataset(fake_pairs(PronounLabel::he, 3), fake_pairs(PronounLabel::he, 3), 1),
               InputError);
}

TEST(Dataset, SameSeedByteIdenticalFiles) {
  TempDir dir;
  auto build = [&](std::uint64_t seed, const std::string& name) {
    write_dataset(dir / name, export_classifier_dataset(fake_pairs(PronounLabel::he, 50),
                                                        fake_pairs(PronounLabel::they_plural, 60), seed));
    return testing_support::read_text(dir / name);
  };
  const auto a = build(9, "a.jsonl");
  EXPECT_EQ(a, build(9, "b.jsonl"));
  EXPECT_NE(a, build(10, "c.jsonl"));
  const auto back = read_dataset(dir / "a.jsonl");
  EXPECT_EQ(back.train.size(), 80u);
  EXPECT_EQ(back.test.size(), 20u);
}
