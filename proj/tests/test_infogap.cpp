#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include "curio/corpus.hpp"
#include "curio/error.hpp"
#include "curio/infogap.hpp"
#include "curio/rng.hpp"
#include "testutil.hpp"

namespace {

const curio::RuleConfig& rules() {
  static const curio::RuleConfig r = curio::RuleConfig::defaults();
  return r;
}

std::vector<std::string> toks(const std::string& text) { return curio::tokenize(text); }

curio::Lexicon make_lexicon(std::vector<std::string> words, curio::LexiconKind kind) {
  curio::Lexicon lex;
  lex.kind = kind;
  for (auto& w : words) lex.words.insert(std::move(w));
  return lex;
}

}  // namespace

TEST_CASE("interrogative flags question marks and leading cues") {
  const std::string q = "Which Disney Cat Are You?";
  const auto f = curio::interrogative(toks(q), q, rules());
  REQUIRE(f.is_interrogative == 1);
  REQUIRE(f.question_word_count == 2);  // which, are

  const std::string plain = "Government passes budget bill";
  const auto g = curio::interrogative(toks(plain), plain, rules());
  REQUIRE(g.is_interrogative == 0);
  REQUIRE(g.question_word_count == 0);

  // Trailing whitespace after the question mark still counts.
  const std::string padded = "really?  ";
  REQUIRE(curio::interrogative(toks(padded), padded, rules()).is_interrogative == 1);

  // Cue mid-sentence is counted but does not set the flag.
  const std::string mid = "the question is why";
  const auto m = curio::interrogative(toks(mid), mid, rules());
  REQUIRE(m.is_interrogative == 0);
  REQUIRE(m.question_word_count == 2);  // is, why

  const auto e = curio::interrogative({}, "", rules());
  REQUIRE(e.is_interrogative == 0);
  REQUIRE(e.question_word_count == 0);
}

TEST_CASE("srl proxies count modals and locate spans") {
  const auto f = curio::srl_proxies(toks("you will never believe what happened"), rules());
  REQUIRE(f.modal_count == 1);        // will
  REQUIRE(f.temporal_span_len == 1);  // never
  REQUIRE(f.purpose_span_len == 0);

  const auto g =
      curio::srl_proxies(toks("minister to visit region for trade talks next week"), rules());
  REQUIRE(g.purpose_span_len > 0);
  REQUIRE(g.temporal_span_len > 0);
  // "to visit region for trade talks next week" is the suffix from "to".
  REQUIRE(g.purpose_span_len == 8);
  // "next week" expands the cue over the adjacent determiner.
  REQUIRE(g.temporal_span_len == 2);

  // A purpose cue as the final token anchors nothing.
  REQUIRE(curio::srl_proxies(toks("what this is for"), rules()).purpose_span_len == 0);
  REQUIRE(curio::srl_proxies({}, rules()).modal_count == 0);
}

TEST_CASE("lexicon_counts tallies hedge and anticipation hits") {
  const auto unc = make_lexicon({"maybe", "possibly"}, curio::LexiconKind::uncertainty);
  const auto ant = make_lexicon({"soon", "wait"}, curio::LexiconKind::anticipation);
  const auto f = curio::lexicon_counts(toks("maybe this could possibly work"), unc, ant);
  REQUIRE(f.uncertainty_count == 2);
  REQUIRE(f.anticipation_count == 0);
  const auto g = curio::lexicon_counts(toks("wait wait soon"), unc, ant);
  REQUIRE(g.anticipation_count == 3);
}

TEST_CASE("self features count pronouns and lexicon hits") {
  const auto f = curio::self_features(toks("you won't believe your eyes"), {}, rules());
  REQUIRE(f.self_pronoun_count == 2);  // you, your
  REQUIRE(f.self_lexicon_hits == 0);

  const auto g = curio::self_features(toks("senate approves bill"), {}, rules());
  REQUIRE(g.self_pronoun_count == 0);
  REQUIRE(g.self_lexicon_hits == 0);

  const auto self = make_lexicon({"life", "yourself"}, curio::LexiconKind::self_concept);
  const auto h = curio::self_features(toks("change your life yourself"), {&self}, rules());
  REQUIRE(h.self_pronoun_count == 2);  // your, yourself
  REQUIRE(h.self_lexicon_hits == 2);   // life, yourself
}

TEST_CASE("saliency counts cues, years, and date patterns") {
  const std::string now = "what is happening right now";
  const auto f = curio::saliency_features(toks(now), now, rules());
  REQUIRE(f.saliency_count == 1);   // now
  REQUIRE(f.continuous_tense == 1);  // is happening
  REQUIRE(f.perfect_tense == 0);

  const std::string arrested = "police have arrested suspect";
  const auto g = curio::saliency_features(toks(arrested), arrested, rules());
  REQUIRE(g.perfect_tense == 1);
  REQUIRE(g.continuous_tense == 0);

  const std::string year = "olympics return in 2024";
  REQUIRE(curio::saliency_features(toks(year), year, rules()).saliency_count == 1);

  const std::string date = "election held on 12/05";
  REQUIRE(curio::saliency_features(toks(date), date, rules()).saliency_count == 1);

  // A full date contributes both the pattern and its year token.
  const std::string full = "election held on 12/05/2014";
  REQUIRE(curio::saliency_features(toks(full), full, rules()).saliency_count == 2);

  const std::string fraction = "12/345 is not a date";
  REQUIRE(curio::saliency_features(toks(fraction), fraction, rules()).saliency_count == 0);

  // Irregular participle after a perfect auxiliary.
  const std::string broken = "they have broken the record";
  REQUIRE(curio::saliency_features(toks(broken), broken, rules()).perfect_tense == 1);

  // Aux too far from the participle.
  const std::string far = "is the market actually really falling";
  REQUIRE(curio::saliency_features(toks(far), far, rules()).continuous_tense == 0);

  // Short -ed words are not participles.
  const std::string red = "wall was red";
  REQUIRE(curio::saliency_features(toks(red), red, rules()).perfect_tense == 0);
}

TEST_CASE("listicle features flag leading and embedded numbers") {
  const auto f = curio::listicle_features(toks("17 Photos That Prove..."), rules());
  REQUIRE(f.starts_with_number == 1);
  REQUIRE(f.contains_number == 1);

  const auto g = curio::listicle_features(toks("man rescues 3 dogs"), rules());
  REQUIRE(g.starts_with_number == 0);
  REQUIRE(g.contains_number == 1);

  const auto h = curio::listicle_features(toks("local man rescues dogs"), rules());
  REQUIRE(h.starts_with_number == 0);
  REQUIRE(h.contains_number == 0);

  // Number words count like digits.
  const auto i = curio::listicle_features(toks("seven secrets of success"), rules());
  REQUIRE(i.starts_with_number == 1);
  REQUIRE(i.contains_number == 1);
}

TEST_CASE("token order does not change order-free counts") {
  const auto unc = make_lexicon({"maybe", "possibly"}, curio::LexiconKind::uncertainty);
  const auto ant = make_lexicon({"soon"}, curio::LexiconKind::anticipation);
  auto tokens = toks("maybe you should possibly buy seven gadgets soon");
  const auto base_lex = curio::lexicon_counts(tokens, unc, ant);
  const auto base_srl = curio::srl_proxies(tokens, rules());
  const auto base_list = curio::listicle_features(tokens, rules());
  curio::Rng rng(67);
  for (int i = 0; i < 10; ++i) {
    rng.shuffle(tokens);
    const auto lex = curio::lexicon_counts(tokens, unc, ant);
    REQUIRE(lex.uncertainty_count == base_lex.uncertainty_count);
    REQUIRE(lex.anticipation_count == base_lex.anticipation_count);
    REQUIRE(curio::srl_proxies(tokens, rules()).modal_count == base_srl.modal_count);
    REQUIRE(curio::listicle_features(tokens, rules()).contains_number == base_list.contains_number);
  }
}

TEST_CASE("counts never exceed the token count and flags are binary") {
  curio::Rng rng(71);
  const std::vector<std::string> pool = {
      "which", "you",  "will",   "never", "17",   "now",  "maybe", "to",
      "for",   "week", "photos", "have",  "been", "is",   "doing", "arrested",
      "the",   "next", "senate", "bill",  "2024", "what", "your",  "so"};
  const auto unc = make_lexicon({"maybe"}, curio::LexiconKind::uncertainty);
  const auto ant = make_lexicon({"soon"}, curio::LexiconKind::anticipation);
  curio::InfoGapExtractor ex;
  ex.uncertainty = &unc;
  ex.anticipation = &ant;
  for (int trial = 0; trial < 60; ++trial) {
    std::string text;
    const std::size_t n = rng.below(12);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) text += ' ';
      text += pool[rng.below(pool.size())];
    }
    const auto h = curio::Headline::make(trial, text, {});
    const auto f = ex.extract(h);
    const int len = static_cast<int>(h.tokens.size());
    REQUIRE((f.is_interrogative == 0 || f.is_interrogative == 1));
    REQUIRE((f.continuous_tense == 0 || f.continuous_tense == 1));
    REQUIRE((f.perfect_tense == 0 || f.perfect_tense == 1));
    REQUIRE((f.starts_with_number == 0 || f.starts_with_number == 1));
    REQUIRE((f.contains_number == 0 || f.contains_number == 1));
    REQUIRE(f.question_word_count <= len);
    REQUIRE(f.modal_count <= len);
    REQUIRE(f.temporal_span_len <= len);
    REQUIRE(f.purpose_span_len <= len);
    REQUIRE(f.uncertainty_count <= len);
    REQUIRE(f.anticipation_count <= len);
    REQUIRE(f.self_pronoun_count <= len);
    REQUIRE(f.saliency_count >= 0);
    for (double v : f.as_array()) REQUIRE(v >= 0.0);
  }
}

TEST_CASE("extractor combines all feature groups") {
  const auto unc = make_lexicon({"maybe"}, curio::LexiconKind::uncertainty);
  const auto ant = make_lexicon({"soon"}, curio::LexiconKind::anticipation);
  curio::InfoGapExtractor ex;
  ex.uncertainty = &unc;
  ex.anticipation = &ant;

  const auto h =
      curio::Headline::make(1, "Which Of These 25 Things Should You Actually Be Doing?", 1);
  const auto f = ex.extract(h);
  REQUIRE(f.is_interrogative == 1);
  REQUIRE(f.starts_with_number == 0);
  REQUIRE(f.contains_number == 1);
  REQUIRE(f.modal_count == 1);  // should
  REQUIRE(f.self_pronoun_count == 1);

  const auto zero = ex.extract(curio::Headline::make(2, "", {}));
  for (double v : zero.as_array()) REQUIRE(v == 0.0);
}

TEST_CASE("extract requires the core lexicons") {
  curio::InfoGapExtractor ex;
  REQUIRE_THROWS_WITH(ex.extract(curio::Headline::make(1, "any text", {})),
                      Catch::Matchers::ContainsSubstring("lexicon"));
}

TEST_CASE("feature vector order is frozen") {
  const auto names = curio::InfoGapFeatures::names();
  REQUIRE(names.size() == curio::InfoGapFeatures::kCount);
  REQUIRE(names[0] == std::string("is_interrogative"));
  REQUIRE(names[4] == std::string("purpose_span_len"));
  REQUIRE(names[13] == std::string("contains_number"));

  curio::InfoGapFeatures f;
  f.is_interrogative = 1;
  f.purpose_span_len = 4;
  f.contains_number = 1;
  const auto arr = f.as_array();
  REQUIRE(arr.size() == curio::InfoGapFeatures::kCount);
  REQUIRE(arr[0] == 1.0);
  REQUIRE(arr[4] == 4.0);
  REQUIRE(arr[13] == 1.0);
  REQUIRE(arr[1] == 0.0);
}

TEST_CASE("rule config round-trips through JSON") {
  const auto base = curio::RuleConfig::defaults();
  const auto j = base.to_json();
  const auto back = curio::RuleConfig::from_json(j);
  REQUIRE(back.to_json() == j);
  REQUIRE(back.question_cues == base.question_cues);
  REQUIRE(back.tense_window == base.tense_window);

  // Partial JSON overrides only the named fields.
  nlohmann::json patch;
  patch["modal_words"] = {"zap"};
  const auto patched = curio::RuleConfig::from_json(patch);
  REQUIRE(patched.modal_words == std::unordered_set<std::string>{"zap"});
  REQUIRE(patched.question_cues == base.question_cues);
  REQUIRE(curio::srl_proxies({"zap", "will"}, patched).modal_count == 1);
}
