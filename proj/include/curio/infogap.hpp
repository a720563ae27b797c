#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "curio/corpus.hpp"
#include "curio/error.hpp"

namespace curio {

/// Every cue list and window behind the information-gap features, loadable
/// from JSON so each heuristic can be audited and overridden.
struct RuleConfig {
  std::unordered_set<std::string> question_cues;
  std::unordered_set<std::string> modal_words;
  std::unordered_set<std::string> temporal_cues;
  std::unordered_set<std::string> span_expansion;  // determiners/prepositions
  std::unordered_set<std::string> purpose_cues;
  std::unordered_set<std::string> self_pronouns;
  std::unordered_set<std::string> continuous_aux;
  std::unordered_set<std::string> perfect_aux;
  std::unordered_set<std::string> irregular_participles;
  std::unordered_set<std::string> number_words;
  int tense_window = 2;   // aux..participle distance, in tokens
  int min_ing_len = 5;    // shortest token treated as an -ing participle
  int min_ed_len = 4;     // shortest token treated as an -ed participle

  static RuleConfig defaults();
  nlohmann::json to_json() const;
  static RuleConfig from_json(const nlohmann::json& j);
};

inline RuleConfig RuleConfig::defaults() {
  RuleConfig r;
  r.question_cues = {"what", "which", "who",  "whom", "whose", "when",
                     "where", "why",  "how",  "can",  "could", "do",
                     "does",  "did",  "is",   "are",  "was",   "were",
                     "will",  "would", "should"};
  r.modal_words = {"will", "would", "can",   "could", "shall",
                   "should", "may", "might", "must"};
  r.temporal_cues = {"today",    "tomorrow", "now",      "soon",     "never",
                     "always",   "week",     "month",    "year",     "when",
                     "monday",   "tuesday",  "wednesday", "thursday", "friday",
                     "saturday", "sunday",   "january",  "february", "march",
                     "april",    "may",      "june",     "july",     "august",
                     "september", "october", "november", "december"};
  r.span_expansion = {"the",  "a",     "an",    "this",  "that",  "these",
                      "those", "next", "last",  "every", "each",  "in",
                      "on",   "at",    "by",    "during", "until", "till",
                      "since", "of",   "for",   "over",  "within"};
  r.purpose_cues = {"to", "for", "so", "because"};
  r.self_pronouns = {"i",    "me",   "my",    "mine",  "myself",
                     "we",   "us",   "our",   "ours",  "ourselves",
                     "you",  "your", "yours", "yourself", "yourselves"};
  r.continuous_aux = {"am", "is", "are", "was", "were", "been", "being"};
  r.perfect_aux = {"has", "have", "had"};
  r.irregular_participles = {
      "been",   "gone",    "done",   "seen",    "taken",  "given",  "known",
      "shown",  "grown",   "thrown", "broken",  "chosen", "spoken", "written",
      "driven", "eaten",   "fallen", "forgotten", "gotten", "hidden", "won",
      "lost",   "made",    "said",   "told",    "found",  "caught", "taught",
      "bought", "brought", "thought", "sold",   "built",  "sent",   "spent",
      "left",   "kept",    "felt",   "met",     "held",   "heard",  "begun",
      "come",   "become",  "run",    "sung",    "drunk",  "fed",    "led",
      "risen",  "worn",    "torn",   "frozen",  "stolen", "flown",  "drawn"};
  r.number_words = {"one",    "two",   "three",   "four",    "five",
                    "six",    "seven", "eight",   "nine",    "ten",
                    "eleven", "twelve", "thirteen", "fourteen", "fifteen",
                    "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
                    "thirty", "forty", "fifty",   "sixty",   "seventy",
                    "eighty", "ninety", "hundred"};
  return r;
}

namespace detail {

inline nlohmann::json set_to_json(const std::unordered_set<std::string>& s) {
  std::vector<std::string> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return nlohmann::json(v);
}

inline std::unordered_set<std::string> set_from_json(const nlohmann::json& j,
                                                     const char* field) {
  if (!j.is_array()) throw Error(std::string("rule field '") + field +
                                 "' must be an array of strings");
  std::unordered_set<std::string> s;
  for (const auto& e : j) s.insert(e.get<std::string>());
  return s;
}

}  // namespace detail

inline nlohmann::json RuleConfig::to_json() const {
  nlohmann::json j;
  j["question_cues"] = detail::set_to_json(question_cues);
  j["modal_words"] = detail::set_to_json(modal_words);
  j["temporal_cues"] = detail::set_to_json(temporal_cues);
  j["span_expansion"] = detail::set_to_json(span_expansion);
  j["purpose_cues"] = detail::set_to_json(purpose_cues);
  j["self_pronouns"] = detail::set_to_json(self_pronouns);
  j["continuous_aux"] = detail::set_to_json(continuous_aux);
  j["perfect_aux"] = detail::set_to_json(perfect_aux);
  j["irregular_participles"] = detail::set_to_json(irregular_participles);
  j["number_words"] = detail::set_to_json(number_words);
  j["tense_window"] = tense_window;
  j["min_ing_len"] = min_ing_len;
  j["min_ed_len"] = min_ed_len;
  return j;
}

inline RuleConfig RuleConfig::from_json(const nlohmann::json& j) {
  RuleConfig r = defaults();
  auto take = [&](const char* field, std::unordered_set<std::string>& dst) {
    if (j.contains(field)) dst = detail::set_from_json(j[field], field);
  };
  take("question_cues", r.question_cues);
  take("modal_words", r.modal_words);
  take("temporal_cues", r.temporal_cues);
  take("span_expansion", r.span_expansion);
  take("purpose_cues", r.purpose_cues);
  take("self_pronouns", r.self_pronouns);
  take("continuous_aux", r.continuous_aux);
  take("perfect_aux", r.perfect_aux);
  take("irregular_participles", r.irregular_participles);
  take("number_words", r.number_words);
  if (j.contains("tense_window")) r.tense_window = j["tense_window"].get<int>();
  if (j.contains("min_ing_len")) r.min_ing_len = j["min_ing_len"].get<int>();
  if (j.contains("min_ed_len")) r.min_ed_len = j["min_ed_len"].get<int>();
  return r;
}

// ---------------------------------------------------------------------------
// Extractors
// ---------------------------------------------------------------------------

struct InterrogativeFeatures {
  int is_interrogative = 0;
  int question_word_count = 0;
};

/// Interrogative if the raw headline ends with '?' (ignoring trailing
/// whitespace) or the first token is a question cue. The count covers cue
/// tokens anywhere in the headline.
inline InterrogativeFeatures interrogative(const std::vector<std::string>& tokens,
                                           const std::string& raw_text,
                                           const RuleConfig& rules) {
  InterrogativeFeatures f;
  std::size_t end = raw_text.size();
  while (end > 0 && (raw_text[end - 1] == ' ' || raw_text[end - 1] == '\t' ||
                     raw_text[end - 1] == '\n' || raw_text[end - 1] == '\r'))
    --end;
  bool ends_question = end > 0 && raw_text[end - 1] == '?';
  bool starts_cue = !tokens.empty() && rules.question_cues.count(tokens[0]);
  f.is_interrogative = (ends_question || starts_cue) ? 1 : 0;
  for (const auto& t : tokens)
    if (rules.question_cues.count(t)) ++f.question_word_count;
  return f;
}

struct SrlProxyFeatures {
  int modal_count = 0;
  int temporal_span_len = 0;
  int purpose_span_len = 0;
};

/// Lexical stand-ins for the modal/temporal/purpose role labels: modal tokens
/// are counted directly; temporal cues are expanded to contiguous spans over
/// adjacent determiners/prepositions; the purpose span is the suffix from the
/// first purpose cue that is followed by at least one more token.
inline SrlProxyFeatures srl_proxies(const std::vector<std::string>& tokens,
                                    const RuleConfig& rules) {
  SrlProxyFeatures f;
  const std::size_t n = tokens.size();
  for (const auto& t : tokens)
    if (rules.modal_words.count(t)) ++f.modal_count;

  std::vector<char> in_span(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rules.temporal_cues.count(tokens[i])) continue;
    std::size_t lo = i, hi = i;
    while (lo > 0 && rules.span_expansion.count(tokens[lo - 1])) --lo;
    while (hi + 1 < n && rules.span_expansion.count(tokens[hi + 1])) ++hi;
    for (std::size_t j = lo; j <= hi; ++j) in_span[j] = 1;
  }
  for (char c : in_span) f.temporal_span_len += c;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (rules.purpose_cues.count(tokens[i])) {
      f.purpose_span_len = static_cast<int>(n - i);
      break;
    }
  }
  return f;
}

struct LexiconCountFeatures {
  int uncertainty_count = 0;
  int anticipation_count = 0;
};

inline LexiconCountFeatures lexicon_counts(const std::vector<std::string>& tokens,
                                           const Lexicon& uncertainty,
                                           const Lexicon& anticipation) {
  return {static_cast<int>(uncertainty.count_hits(tokens)),
          static_cast<int>(anticipation.count_hits(tokens))};
}

struct SelfFeatures {
  int self_pronoun_count = 0;
  int self_lexicon_hits = 0;
};

/// First/second person pronouns plus total hits across the configured
/// self-concept lexicons (zero lexicons is fine: hits stay 0).
inline SelfFeatures self_features(const std::vector<std::string>& tokens,
                                  const std::vector<const Lexicon*>& self_lexicons,
                                  const RuleConfig& rules) {
  SelfFeatures f;
  for (const auto& t : tokens)
    if (rules.self_pronouns.count(t)) ++f.self_pronoun_count;
  for (const Lexicon* lex : self_lexicons)
    f.self_lexicon_hits += static_cast<int>(lex->count_hits(tokens));
  return f;
}

namespace detail {

inline bool all_digits(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (c < '0' || c > '9') return false;
  return true;
}

inline bool is_year_token(const std::string& t) {
  if (t.size() != 4 || !all_digits(t)) return false;
  int v = (t[0] - '0') * 1000 + (t[1] - '0') * 100 + (t[2] - '0') * 10 +
          (t[3] - '0');
  return v >= 1900 && v <= 2099;
}

/// Matches DD/MM-style date words: 1-2 digits, separator (/ or -), 1-2
/// digits, optionally another separator and a 2- or 4-digit year.
inline bool is_date_pattern(std::string_view w) {
  std::size_t i = 0;
  auto digits = [&](std::size_t lo, std::size_t hi) {
    std::size_t c = 0;
    while (i < w.size() && w[i] >= '0' && w[i] <= '9' && c < hi) {
      ++i;
      ++c;
    }
    return c >= lo && c <= hi;
  };
  auto sep = [&] {
    if (i < w.size() && (w[i] == '/' || w[i] == '-')) {
      ++i;
      return true;
    }
    return false;
  };
  if (!digits(1, 2) || !sep() || !digits(1, 2)) return false;
  if (i == w.size()) return true;
  if (!sep()) return false;
  std::size_t before = i;
  if (!digits(2, 4)) return false;
  std::size_t got = i - before;
  return (got == 2 || got == 4) && i == w.size();
}

/// Raw words split on whitespace with surrounding punctuation stripped, for
/// patterns the tokenizer would break apart (like 12/05/2014).
inline std::vector<std::string> raw_words(const std::string& raw_text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = raw_text.size();
  while (i < n) {
    while (i < n && (raw_text[i] == ' ' || raw_text[i] == '\t' ||
                     raw_text[i] == '\n' || raw_text[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < n && raw_text[j] != ' ' && raw_text[j] != '\t' &&
           raw_text[j] != '\n' && raw_text[j] != '\r')
      ++j;
    if (j > i) {
      std::size_t b = i, e = j;
      auto is_alnum = [&](std::size_t p) {
        char c = raw_text[p];
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
               (c >= 'A' && c <= 'Z');
      };
      while (b < e && !is_alnum(b)) ++b;
      while (e > b && !is_alnum(e - 1)) --e;
      if (e > b) out.push_back(raw_text.substr(b, e - b));
    }
    i = j;
  }
  return out;
}

}  // namespace detail

struct SaliencyFeatures {
  int saliency_count = 0;
  int continuous_tense = 0;
  int perfect_tense = 0;
};

/// Saliency counts temporal cues, 4-digit years (1900-2099) and DD/MM-style
/// date words. Tense flags use an aux + participle window over the tokens.
inline SaliencyFeatures saliency_features(const std::vector<std::string>& tokens,
                                          const std::string& raw_text,
                                          const RuleConfig& rules) {
  SaliencyFeatures f;
  for (const auto& t : tokens) {
    if (rules.temporal_cues.count(t)) ++f.saliency_count;
    else if (detail::is_year_token(t)) ++f.saliency_count;
  }
  for (const auto& w : detail::raw_words(raw_text))
    if (detail::is_date_pattern(w)) ++f.saliency_count;

  const std::size_t n = tokens.size();
  auto ends_with = [](const std::string& t, std::string_view suffix) {
    return t.size() >= suffix.size() &&
           t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t limit = std::min(n, i + 1 + static_cast<std::size_t>(
                                                rules.tense_window));
    if (rules.continuous_aux.count(tokens[i])) {
      for (std::size_t j = i + 1; j < limit; ++j) {
        if (ends_with(tokens[j], "ing") &&
            tokens[j].size() >= static_cast<std::size_t>(rules.min_ing_len)) {
          f.continuous_tense = 1;
          break;
        }
      }
    }
    if (rules.perfect_aux.count(tokens[i])) {
      for (std::size_t j = i + 1; j < limit; ++j) {
        bool ed = ends_with(tokens[j], "ed") &&
                  tokens[j].size() >= static_cast<std::size_t>(rules.min_ed_len);
        if (ed || rules.irregular_participles.count(tokens[j])) {
          f.perfect_tense = 1;
          break;
        }
      }
    }
  }
  return f;
}

struct ListicleFeatures {
  int starts_with_number = 0;
  int contains_number = 0;
};

inline ListicleFeatures listicle_features(const std::vector<std::string>& tokens,
                                          const RuleConfig& rules) {
  ListicleFeatures f;
  auto numeric = [&](const std::string& t) {
    return detail::all_digits(t) || rules.number_words.count(t) > 0;
  };
  if (!tokens.empty() && numeric(tokens[0])) f.starts_with_number = 1;
  for (const auto& t : tokens)
    if (numeric(t)) {
      f.contains_number = 1;
      break;
    }
  return f;
}

// ---------------------------------------------------------------------------
// Combined feature record
// ---------------------------------------------------------------------------

struct InfoGapFeatures {
  int is_interrogative = 0;
  int question_word_count = 0;
  int modal_count = 0;
  int temporal_span_len = 0;
  int purpose_span_len = 0;
  int uncertainty_count = 0;
  int anticipation_count = 0;
  int self_pronoun_count = 0;
  int self_lexicon_hits = 0;
  int saliency_count = 0;
  int continuous_tense = 0;
  int perfect_tense = 0;
  int starts_with_number = 0;
  int contains_number = 0;

  static constexpr int kCount = 14;

  static const std::array<const char*, kCount>& names() {
    static const std::array<const char*, kCount> n = {
        "is_interrogative", "question_word_count", "modal_count",
        "temporal_span_len", "purpose_span_len",   "uncertainty_count",
        "anticipation_count", "self_pronoun_count", "self_lexicon_hits",
        "saliency_count",    "continuous_tense",   "perfect_tense",
        "starts_with_number", "contains_number"};
    return n;
  }

  std::array<double, kCount> as_array() const {
    return {static_cast<double>(is_interrogative),
            static_cast<double>(question_word_count),
            static_cast<double>(modal_count),
            static_cast<double>(temporal_span_len),
            static_cast<double>(purpose_span_len),
            static_cast<double>(uncertainty_count),
            static_cast<double>(anticipation_count),
            static_cast<double>(self_pronoun_count),
            static_cast<double>(self_lexicon_hits),
            static_cast<double>(saliency_count),
            static_cast<double>(continuous_tense),
            static_cast<double>(perfect_tense),
            static_cast<double>(starts_with_number),
            static_cast<double>(contains_number)};
  }
};

/// Bundles rules and lexicons; extract() is a pure function of the headline.
struct InfoGapExtractor {
  RuleConfig rules = RuleConfig::defaults();
  const Lexicon* uncertainty = nullptr;
  const Lexicon* anticipation = nullptr;
  std::vector<const Lexicon*> self_concept;

  InfoGapFeatures extract(const Headline& h) const {
    if (!uncertainty || !anticipation)
      throw Error("infogap extractor needs uncertainty and anticipation lexicons");
    InfoGapFeatures f;
    auto q = interrogative(h.tokens, h.text, rules);
    f.is_interrogative = q.is_interrogative;
    f.question_word_count = q.question_word_count;
    auto s = srl_proxies(h.tokens, rules);
    f.modal_count = s.modal_count;
    f.temporal_span_len = s.temporal_span_len;
    f.purpose_span_len = s.purpose_span_len;
    auto lc = lexicon_counts(h.tokens, *uncertainty, *anticipation);
    f.uncertainty_count = lc.uncertainty_count;
    f.anticipation_count = lc.anticipation_count;
    auto sf = self_features(h.tokens, self_concept, rules);
    f.self_pronoun_count = sf.self_pronoun_count;
    f.self_lexicon_hits = sf.self_lexicon_hits;
    auto sal = saliency_features(h.tokens, h.text, rules);
    f.saliency_count = sal.saliency_count;
    f.continuous_tense = sal.continuous_tense;
    f.perfect_tense = sal.perfect_tense;
    auto li = listicle_features(h.tokens, rules);
    f.starts_with_number = li.starts_with_number;
    f.contains_number = li.contains_number;
    return f;
  }
};

}  // namespace curio
