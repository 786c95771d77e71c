#pragma once

#include <string>
#include <vector>

#include "gaudit/wordset.hpp"

// Bundled default word lists. Any of them can be replaced at run time by a
// word-set file with the same name.
namespace gaudit::lexicons {

// Pronouns counted and excluded by the corpus tools: binary, they/them
// family, and the common neopronoun sets.
inline const std::vector<std::string>& pronoun_words() {
  static const std::vector<std::string> words{
      "he",     "him",     "his",    "himself",  "she",     "her",    "hers",     "herself",
      "they",   "them",    "their",  "theirs",   "themself", "themselves",
      "xe",     "xem",     "xir",    "xirs",     "xemself", "xey",    "xers",
      "ze",     "zir",     "zirs",   "zem",      "zey",     "zers",   "hir",      "hirs",   "zirself",
      "ey",     "em",      "eir",    "eirs",     "emself"};
  return words;
}

inline WordSet pronouns() { return WordSet("pronouns", pronoun_words(), WordRole::pronoun); }

inline WordSet binary_pronouns() {
  return WordSet("binary_pronouns", {"he", "him", "his", "she", "her", "hers"}, WordRole::target);
}

inline WordSet binary_words() {
  return WordSet("binary_words",
                 {"man", "woman", "herself", "himself", "girl", "boy", "female", "male", "cisman", "ciswoman"},
                 WordRole::target);
}

inline WordSet nonbinary_pronouns() {
  return WordSet("nonbinary_pronouns",
                 {"zey", "ey", "em", "them", "xir", "they", "zem", "ze", "their", "zir", "zers", "eirs", "xey",
                  "xers", "xe", "xem"},
                 WordRole::target);
}

inline WordSet nonbinary_words() {
  return WordSet("nonbinary_words",
                 {"transgender", "queer", "nonbinary", "genderqueer", "genderfluid", "bigender", "two-spirit"},
                 WordRole::target);
}

inline WordSet pleasant() {
  return WordSet("pleasant", {"joy", "love", "peace", "wonderful", "pleasure", "friend", "laughter", "happy"},
                 WordRole::attribute);
}

inline WordSet unpleasant() {
  return WordSet("unpleasant", {"agony", "terrible", "horrible", "nasty", "evil", "war", "awful", "failure"},
                 WordRole::attribute);
}

inline WordSet positive_adjectives() {
  return WordSet("positive_adjectives",
                 {"smart", "wise", "able", "bright", "capable", "ambitious", "calm", "attractive", "great", "good",
                  "caring", "loving", "adventurous"},
                 WordRole::attribute);
}

inline WordSet negative_adjectives() {
  return WordSet("negative_adjectives",
                 {"dumb", "arrogant", "careless", "cruel", "coward", "boring", "lame", "incapable", "rude", "selfish",
                  "dishonest", "lazy", "unkind"},
                 WordRole::attribute);
}

// Small starter list; the full occupation list is supplied by configuration.
inline WordSet occupations() {
  WordSet set("occupations", {"doctor", "engineer", "nurse", "stylist"}, WordRole::occupation);
  set.set_group("male", {"doctor", "engineer"});
  set.set_group("female", {"nurse", "stylist"});
  return set;
}

// Word groups for the gender-subspace comparison.
inline WordSet subspace_binary() {
  return WordSet("binary",
                 {"he", "she", "man", "woman", "hers", "his", "herself", "himself", "girl", "boy", "female", "male"},
                 WordRole::target);
}

inline WordSet subspace_nonbinary() {
  return WordSet("nonbinary", {"they", "them", "xe", "ze", "xir", "zir", "xey", "zey", "xem", "zem", "ey", "em"},
                 WordRole::target);
}

inline WordSet subspace_all() { return join("all", subspace_binary(), subspace_nonbinary()); }

inline WordSetLibrary defaults() {
  WordSetLibrary lib;
  lib.add(pronouns());
  lib.add(binary_pronouns());
  lib.add(binary_words());
  lib.add(join("binary_all", binary_pronouns(), binary_words()));
  lib.add(nonbinary_pronouns());
  lib.add(nonbinary_words());
  lib.add(join("nonbinary_all", nonbinary_pronouns(), nonbinary_words()));
  lib.add(pleasant());
  lib.add(unpleasant());
  lib.add(positive_adjectives());
  lib.add(negative_adjectives());
  lib.add(occupations());
  lib.add(subspace_binary());
  lib.add(subspace_nonbinary());
  lib.add(subspace_all());
  return lib;
}

}  // namespace gaudit::lexicons
