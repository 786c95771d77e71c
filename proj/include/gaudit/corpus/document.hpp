#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "gaudit/error.hpp"

namespace gaudit::corpus {

struct Document {
  std::string doc_id;
  std::string text;
};

struct CorpusOptions {
  // Treat every line of every file as its own document ("file.txt:17").
  bool docs_per_line = false;
};

// Regular files under `root` (recursively) in lexicographic path order, so
// doc ids and mining output do not depend on directory iteration order.
// A plain file is accepted as a one-file corpus.
inline std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(root)) return {root};
  if (!fs::is_directory(root)) throw IoError("corpus path " + root.string() + " is not a file or directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Streams documents to fn one at a time. Doc ids are paths relative to the
// corpus root, suffixed with ":<line>" in docs-per-line mode. Empty lines are
// skipped in docs-per-line mode.
inline void for_each_document(const std::filesystem::path& root, const CorpusOptions& opts,
                              const std::function<void(Document&&)>& fn) {
  namespace fs = std::filesystem;
  const bool single = fs::is_regular_file(root);
  for (const auto& file : corpus_files(root)) {
    const std::string id = single ? file.filename().string() : fs::relative(file, root).generic_string();
    if (!opts.docs_per_line) {
      fn(Document{id, read_file(file)});
      continue;
    }
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      fn(Document{id + ":" + std::to_string(lineno), std::move(line)});
      line.clear();
    }
  }
}

inline std::vector<Document> read_corpus(const std::filesystem::path& root, const CorpusOptions& opts = {}) {
  std::vector<Document> docs;
  for_each_document(root, opts, [&](Document&& d) { docs.push_back(std::move(d)); });
  return docs;
}

}  // namespace gaudit::corpus
