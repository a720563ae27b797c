#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curio/error.hpp"
#include "curio/io.hpp"

namespace curio {

// ---------------------------------------------------------------------------
// Tokenization
//
// Lowercase, whitespace/punctuation split, numerals kept. Apostrophes
// (ASCII ' and U+2019) are removed rather than split on, so contractions stay
// one token ("won't" -> "wont"). Non-ASCII bytes are kept inside tokens.
// ---------------------------------------------------------------------------

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  const std::size_t n = text.size();
  std::size_t i = 0;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == '\'') {
      ++i;
      continue;
    }
    // U+2019 right single quotation mark, also apostrophe-like
    if (c == 0xe2 && i + 2 < n &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x99) {
      i += 3;
      continue;
    }
    if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
      cur.push_back(static_cast<char>(c));
    } else {
      flush();
    }
    ++i;
  }
  flush();
  return out;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

using Bigram = std::pair<std::string, std::string>;

inline std::vector<Bigram> bigrams(const std::vector<std::string>& tokens) {
  std::vector<Bigram> out;
  if (tokens.size() < 2) return out;
  out.reserve(tokens.size() - 1);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
    out.emplace_back(tokens[i], tokens[i + 1]);
  return out;
}

// ---------------------------------------------------------------------------
// Headline datasets
// ---------------------------------------------------------------------------

struct Headline {
  std::int64_t id = 0;
  std::string text;
  std::optional<int> label;  // 1 = clickbait, 0 = non-clickbait
  std::vector<std::string> tokens;

  static Headline make(std::int64_t id, std::string text,
                       std::optional<int> label) {
    Headline h;
    h.id = id;
    h.text = std::move(text);
    h.label = label;
    h.tokens = tokenize(h.text);
    return h;
  }
};

enum class DatasetFormat { csv, jsonl };

inline DatasetFormat parse_dataset_format(std::string_view s) {
  if (s == "csv") return DatasetFormat::csv;
  if (s == "jsonl") return DatasetFormat::jsonl;
  throw Error("unknown dataset format: " + std::string(s));
}

inline const char* to_string(DatasetFormat f) {
  return f == DatasetFormat::csv ? "csv" : "jsonl";
}

namespace detail {

inline std::string strip_bom(std::string s) {
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xef &&
      static_cast<unsigned char>(s[1]) == 0xbb &&
      static_cast<unsigned char>(s[2]) == 0xbf)
    return s.substr(3);
  return s;
}

inline std::string lower_trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  std::string out(s.substr(b, e - b));
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline int parse_label_field(const std::string& raw, std::size_t line) {
  std::string v = lower_trim(raw);
  if (v == "0") return 0;
  if (v == "1") return 1;
  throw Error("line " + std::to_string(line) + ": label must be 0 or 1, got '" +
              raw + "'");
}

}  // namespace detail

/// Loads a labeled headline file. CSV files need a header with a `text`
/// column and, unless `label` is given, a `label` column. JSONL rows are
/// objects with "text" and optionally "label". Ids are assigned sequentially
/// from `start_id` in file order; duplicate texts are retained.
inline std::vector<Headline> load_headlines(const std::string& path,
                                            DatasetFormat format,
                                            std::optional<int> label = {},
                                            std::int64_t start_id = 0) {
  std::vector<Headline> out;
  if (format == DatasetFormat::csv) {
    auto records = parse_csv_file(path);
    if (records.empty()) return out;
    std::vector<std::string> header;
    header.reserve(records[0].fields.size());
    for (std::size_t c = 0; c < records[0].fields.size(); ++c) {
      std::string name = records[0].fields[c];
      if (c == 0) name = detail::strip_bom(name);
      header.push_back(detail::lower_trim(name));
    }
    auto find_col = [&](std::string_view name) -> std::optional<std::size_t> {
      for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) return c;
      return std::nullopt;
    };
    auto text_col = find_col("text");
    if (!text_col) throw Error(path + ": missing 'text' column in CSV header");
    auto label_col = find_col("label");
    if (!label && !label_col)
      throw Error(path + ": missing 'label' column and no explicit label given");
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.fields.size() != header.size())
        throw Error(path + ": line " + std::to_string(rec.line) +
                    ": expected " + std::to_string(header.size()) +
                    " fields, got " + std::to_string(rec.fields.size()));
      std::optional<int> row_label = label;
      if (!row_label)
        row_label = detail::parse_label_field(rec.fields[*label_col], rec.line);
      out.push_back(Headline::make(start_id + static_cast<std::int64_t>(out.size()),
                                   rec.fields[*text_col], row_label));
    }
  } else {
    std::string contents = read_file(path);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= contents.size()) {
      std::size_t eol = contents.find('\n', pos);
      std::string_view line(contents.data() + pos,
                            (eol == std::string::npos ? contents.size() : eol) -
                                pos);
      pos = (eol == std::string::npos) ? contents.size() + 1 : eol + 1;
      ++line_no;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
        line.remove_suffix(1);
      if (line.empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(path + ": line " + std::to_string(line_no) + ": " +
                    e.what());
      }
      if (!obj.is_object() || !obj.contains("text") ||
          !obj["text"].is_string())
        throw Error(path + ": line " + std::to_string(line_no) +
                    ": missing string 'text' field");
      std::optional<int> row_label = label;
      if (!row_label) {
        if (!obj.contains("label") || !obj["label"].is_number_integer())
          throw Error(path + ": line " + std::to_string(line_no) +
                      ": missing integer 'label' field");
        int v = obj["label"].get<int>();
        if (v != 0 && v != 1)
          throw Error(path + ": line " + std::to_string(line_no) +
                      ": label must be 0 or 1");
        row_label = v;
      }
      out.push_back(Headline::make(start_id + static_cast<std::int64_t>(out.size()),
                                   obj["text"].get<std::string>(), row_label));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reference corpus (date-stamped unlabeled headlines)
// ---------------------------------------------------------------------------

/// Dates are YYYYMMDD integers throughout; accepts "YYYYMMDD" or "YYYY-MM-DD".
inline int parse_date(std::string_view s) {
  std::string digits;
  if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
    digits = std::string(s.substr(0, 4)) + std::string(s.substr(5, 2)) +
             std::string(s.substr(8, 2));
  } else {
    digits = std::string(s);
  }
  if (digits.size() != 8) throw Error("bad date '" + std::string(s) + "'");
  for (char c : digits)
    if (c < '0' || c > '9') throw Error("bad date '" + std::string(s) + "'");
  int v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  int mm = (v / 100) % 100, dd = v % 100;
  if (mm < 1 || mm > 12 || dd < 1 || dd > 31)
    throw Error("bad date '" + std::string(s) + "'");
  return v;
}

struct ReferenceCorpus {
  std::vector<Headline> headlines;  // unlabeled
  std::optional<int> start_date;
  std::optional<int> end_date;
  std::string source_name;
  std::size_t skipped_rows = 0;  // rows dropped for unparseable dates
};

/// Loads a reference headline CSV (header: publish_date, headline_text),
/// keeping rows whose date lies in [start, end]. Rows with unparseable dates
/// are skipped and tallied, not fatal. Original order is preserved.
inline ReferenceCorpus load_reference(const std::string& path,
                                      std::optional<int> start = {},
                                      std::optional<int> end = {}) {
  if (start && end && *start > *end)
    throw Error("reference window start " + std::to_string(*start) +
                " is after end " + std::to_string(*end));
  auto records = parse_csv_file(path);
  ReferenceCorpus corpus;
  corpus.start_date = start;
  corpus.end_date = end;
  corpus.source_name = std::filesystem::path(path).stem().string();
  if (records.empty()) return corpus;
  std::vector<std::string> header;
  for (std::size_t c = 0; c < records[0].fields.size(); ++c) {
    std::string name = records[0].fields[c];
    if (c == 0) name = detail::strip_bom(name);
    header.push_back(detail::lower_trim(name));
  }
  std::optional<std::size_t> date_col, text_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "publish_date") date_col = c;
    if (header[c] == "headline_text") text_col = c;
  }
  if (!date_col || !text_col)
    throw Error(path + ": expected 'publish_date' and 'headline_text' columns");
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw Error(path + ": line " + std::to_string(rec.line) + ": expected " +
                  std::to_string(header.size()) + " fields, got " +
                  std::to_string(rec.fields.size()));
    int date = 0;
    try {
      date = parse_date(rec.fields[*date_col]);
    } catch (const Error&) {
      ++corpus.skipped_rows;
      continue;
    }
    if (start && date < *start) continue;
    if (end && date > *end) continue;
    corpus.headlines.push_back(Headline::make(
        static_cast<std::int64_t>(corpus.headlines.size()),
        rec.fields[*text_col], std::nullopt));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Lexicons
// ---------------------------------------------------------------------------

enum class LexiconKind {
  uncertainty,
  anticipation,
  self_concept,
  modal,
  temporal_cue,
  purpose_cue,
  question_cue,
};

struct Lexicon {
  std::string name;
  LexiconKind kind = LexiconKind::uncertainty;
  std::unordered_set<std::string> words;
  std::size_t dropped_entries = 0;  // entries that did not survive tokenize

  bool contains(const std::string& token) const {
    return words.count(token) > 0;
  }

  /// Multiset membership count: repeated tokens count repeatedly.
  std::size_t count_hits(const std::vector<std::string>& tokens) const {
    std::size_t n = 0;
    for (const auto& t : tokens) n += words.count(t);
    return n;
  }
};

/// Loads a lexicon: one entry per line, '#' comments allowed. For
/// kind=anticipation, NRC-style rows (word<TAB>emotion<TAB>flag) are
/// accepted, keeping rows with emotion "anticipation" and flag 1. Entries are
/// normalized through tokenize(); anything that does not come back as exactly
/// one token is dropped and tallied so lexicon and tokenizer cannot drift
/// apart. An empty result is a configuration error.
inline Lexicon load_lexicon(const std::string& path, LexiconKind kind) {
  Lexicon lex;
  lex.name = std::filesystem::path(path).stem().string();
  lex.kind = kind;
  std::string contents = detail::strip_bom(read_file(path));
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    std::size_t eol = contents.find('\n', pos);
    std::string line = contents.substr(
        pos, (eol == std::string::npos ? contents.size() : eol) - pos);
    pos = (eol == std::string::npos) ? contents.size() + 1 : eol + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = detail::lower_trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::string candidate = trimmed;
    if (kind == LexiconKind::anticipation &&
        trimmed.find('\t') != std::string::npos) {
      std::vector<std::string> cols;
      std::size_t p = 0;
      while (true) {
        std::size_t t = trimmed.find('\t', p);
        cols.push_back(trimmed.substr(p, t - p));
        if (t == std::string::npos) break;
        p = t + 1;
      }
      if (cols.size() != 3) {
        ++lex.dropped_entries;
        continue;
      }
      if (cols[1] != "anticipation" || cols[2] != "1") continue;
      candidate = cols[0];
    }
    auto toks = tokenize(candidate);
    if (toks.size() != 1) {
      ++lex.dropped_entries;
      continue;
    }
    lex.words.insert(toks[0]);
  }
  if (lex.words.empty())
    throw Error("lexicon '" + path + "' has no usable entries");
  return lex;
}

}  // namespace curio
