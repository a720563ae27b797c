#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "curio/corpus.hpp"
#include "curio/error.hpp"
#include "curio/io.hpp"

namespace curio {

/// Adjacent-bigram frequency table over the reference corpus. Absent bigrams
/// count as zero; stored counts are always >= 1.
struct BigramTable {
  std::unordered_map<std::string, std::uint64_t> counts;  // "tok1\ttok2"
  std::uint64_t total_bigrams = 0;

  static std::string key(const std::string& a, const std::string& b) {
    std::string k;
    k.reserve(a.size() + b.size() + 1);
    k += a;
    k.push_back('\t');
    k += b;
    return k;
  }

  std::uint64_t lookup(const std::string& a, const std::string& b) const {
    auto it = counts.find(key(a, b));
    return it == counts.end() ? 0 : it->second;
  }
};

inline BigramTable build_bigram_table(const ReferenceCorpus& corpus) {
  if (corpus.headlines.empty())
    throw Error("build_bigram_table: reference corpus is empty");
  BigramTable table;
  for (const auto& h : corpus.headlines) {
    const auto& t = h.tokens;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      ++table.counts[BigramTable::key(t[i], t[i + 1])];
      ++table.total_bigrams;
    }
  }
  return table;
}

/// Reference-corpus frequency of each adjacent bigram of the headline, in
/// reading order. Length is max(0, token_count - 1).
using SurpriseVector = std::vector<std::uint64_t>;

inline SurpriseVector surprise_vector(const BigramTable& table,
                                      const std::vector<std::string>& tokens) {
  SurpriseVector freqs;
  if (tokens.size() < 2) return freqs;
  freqs.reserve(tokens.size() - 1);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
    freqs.push_back(table.lookup(tokens[i], tokens[i + 1]));
  return freqs;
}

/// Longest run of consecutive zeros; 0 for an empty vector.
inline std::uint64_t zero_run(const SurpriseVector& vec) {
  std::uint64_t best = 0, cur = 0;
  for (std::uint64_t v : vec) {
    if (v == 0) {
      ++cur;
      best = std::max(best, cur);
    } else {
      cur = 0;
    }
  }
  return best;
}

/// Largest entry; 0 when the vector is empty or all-zero.
inline std::uint64_t max_nonzero(const SurpriseVector& vec) {
  std::uint64_t best = 0;
  for (std::uint64_t v : vec) best = std::max(best, v);
  return best;
}

struct SurpriseFeatures {
  std::uint64_t zero_run = 0;
  std::uint64_t max_nonzero = 0;
};

inline SurpriseFeatures surprise_features(const BigramTable& table,
                                          const std::vector<std::string>& tokens) {
  SurpriseVector v = surprise_vector(table, tokens);
  return {zero_run(v), max_nonzero(v)};
}

// ---------------------------------------------------------------------------
// Serialization: sorted "token1<TAB>token2<TAB>count" lines.
// ---------------------------------------------------------------------------

inline void save_bigram_table(const BigramTable& table,
                              const std::string& path) {
  std::vector<const std::string*> keys;
  keys.reserve(table.counts.size());
  for (const auto& [k, _] : table.counts) keys.push_back(&k);
  std::sort(keys.begin(), keys.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  std::string out;
  for (const auto* k : keys) {
    out += *k;
    out.push_back('\t');
    out += std::to_string(table.counts.at(*k));
    out.push_back('\n');
  }
  write_file(path, out);
}

inline BigramTable load_bigram_table(const std::string& path) {
  BigramTable table;
  std::string contents = read_file(path);
  std::size_t pos = 0, line_no = 0;
  while (pos < contents.size()) {
    std::size_t eol = contents.find('\n', pos);
    if (eol == std::string::npos) eol = contents.size();
    std::string line = contents.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos
                                             : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw Error(path + ": line " + std::to_string(line_no) +
                  ": expected token1<TAB>token2<TAB>count");
    std::uint64_t count = static_cast<std::uint64_t>(
        parse_int(std::string_view(line).substr(t2 + 1),
                  path + " line " + std::to_string(line_no)));
    if (count == 0)
      throw Error(path + ": line " + std::to_string(line_no) +
                  ": zero count stored");
    table.counts.emplace(line.substr(0, t2), count);
    table.total_bigrams += count;
  }
  return table;
}

}  // namespace curio
