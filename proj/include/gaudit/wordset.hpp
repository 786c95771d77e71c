#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaudit/corpus/unicode.hpp"
#include "gaudit/error.hpp"

namespace gaudit {

enum class WordRole { target, attribute, occupation, pronoun };

inline std::string_view to_string(WordRole role) {
  switch (role) {
    case WordRole::target: return "target";
    case WordRole::attribute: return "attribute";
    case WordRole::occupation: return "occupation";
    case WordRole::pronoun: return "pronoun";
  }
  return "target";
}

inline WordRole parse_word_role(std::string_view s) {
  if (s == "target") return WordRole::target;
  if (s == "attribute") return WordRole::attribute;
  if (s == "occupation") return WordRole::occupation;
  if (s == "pronoun") return WordRole::pronoun;
  throw InputError("unknown word-set role '" + std::string(s) + "'");
}

// A named, case-folded, duplicate-free word list. Insertion order is kept
// because reports list words in the order they were configured.
//
// Optional groups tag subsets of the words (occupation lists are split into
// stereotypically male / female groups); every grouped word must belong to
// the set.
class WordSet {
 public:
  WordSet() = default;

  WordSet(std::string name, const std::vector<std::string>& words, WordRole role = WordRole::target)
      : name_(std::move(name)), role_(role) {
    if (words.empty()) throw InputError("word set '" + name_ + "' is empty");
    std::set<std::string> seen;
    for (const auto& w : words) {
      if (w.empty()) throw InputError("word set '" + name_ + "' contains the empty string");
      auto folded = corpus::unicode::fold_case(w);
      if (!seen.insert(folded).second)
        throw InputError("word set '" + name_ + "' lists '" + folded + "' more than once");
      words_.push_back(std::move(folded));
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& words() const { return words_; }
  WordRole role() const { return role_; }
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view w) const {
    return std::find(words_.begin(), words_.end(), w) != words_.end();
  }

  const std::map<std::string, std::vector<std::string>>& groups() const { return groups_; }

  void set_group(const std::string& group, const std::vector<std::string>& members) {
    std::vector<std::string> folded;
    for (const auto& m : members) {
      auto f = corpus::unicode::fold_case(m);
      if (!contains(f))
        throw InputError("group '" + group + "' of word set '" + name_ + "' names '" + f + "' which is not in the set");
      folded.push_back(std::move(f));
    }
    groups_[group] = std::move(folded);
  }

  // Members of a group; the implicit group "all" is the whole set.
  const std::vector<std::string>& group(const std::string& g) const {
    if (g == "all" && !groups_.contains("all")) return words_;
    auto it = groups_.find(g);
    if (it == groups_.end()) throw InputError("word set '" + name_ + "' has no group '" + g + "'");
    return it->second;
  }

  // Concatenation under a new name (e.g. pronouns + words).
  friend WordSet join(std::string name, const WordSet& a, const WordSet& b) {
    auto words = a.words_;
    for (const auto& w : b.words_)
      if (!a.contains(w)) words.push_back(w);
    return WordSet(std::move(name), words, a.role_);
  }

  friend bool operator==(const WordSet&, const WordSet&) = default;

 private:
  std::string name_;
  std::vector<std::string> words_;
  WordRole role_ = WordRole::target;
  std::map<std::string, std::vector<std::string>> groups_;
};

// Named word sets, looked up by name. Accepts either a bare list per name or
// an object {"role": ..., "words": [...], "groups": {...}}:
//
//   {"pleasant": ["joy", "love"],
//    "occupations": {"role": "occupation", "words": ["nurse", "engineer"],
//                    "groups": {"female": ["nurse"], "male": ["engineer"]}}}
class WordSetLibrary {
 public:
  void add(WordSet set) {
    auto name = set.name();
    sets_.insert_or_assign(std::move(name), std::move(set));
  }

  bool contains(const std::string& name) const { return sets_.contains(name); }

  const WordSet& get(const std::string& name) const {
    auto it = sets_.find(name);
    if (it == sets_.end()) throw InputError("unknown word set '" + name + "'");
    return it->second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : sets_) out.push_back(name);
    return out;
  }

  void merge_json(const nlohmann::json& doc, const std::string& source = "word sets") {
    if (!doc.is_object()) throw FormatError(source, 0, "top level must be an object of named lists");
    for (const auto& [name, value] : doc.items()) {
      try {
        if (value.is_array()) {
          add(WordSet(name, value.get<std::vector<std::string>>()));
          continue;
        }
        if (!value.is_object() || !value.contains("words"))
          throw FormatError(source, 0, "set '" + name + "' must be a list or an object with 'words'");
        WordSet set(name, value.at("words").get<std::vector<std::string>>(),
                    parse_word_role(value.value("role", std::string("target"))));
        if (value.contains("groups"))
          for (const auto& [g, members] : value.at("groups").items())
            set.set_group(g, members.get<std::vector<std::string>>());
        add(std::move(set));
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(source, 0, "set '" + name + "': " + e.what());
      }
    }
  }

  void merge_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open word-set file " + path.string());
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string(), 0, e.what());
    }
    merge_json(doc, path.string());
  }

  nlohmann::json to_json() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, set] : sets_) {
      nlohmann::json entry{{"role", to_string(set.role())}, {"words", set.words()}};
      if (!set.groups().empty()) entry["groups"] = set.groups();
      out[name] = std::move(entry);
    }
    return out;
  }

 private:
  std::map<std::string, WordSet> sets_;
};

// A single word read from a plain list file: one entry per line, '#' starts
// a comment, blank lines ignored.
inline std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

}  // namespace gaudit
