#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "curio/corpus.hpp"
#include "curio/error.hpp"
#include "curio/io.hpp"
#include "curio/rng.hpp"

namespace curio {

// ---------------------------------------------------------------------------
// LDA-side preprocessing: a fixed 127-word stop list plus length-1 tokens are
// removed from topic training only. Downstream feature extractors see the
// unfiltered token stream.
// ---------------------------------------------------------------------------

inline constexpr std::array kLdaStopwords = {
    "a",  "about",   "above",   "after",   "again",      "against",  "all",
    "am", "an",      "and",     "any",     "are",        "as",       "at",
    "be", "because", "been",    "before",  "being",      "below",    "between",
    "both",          "but",     "by",      "can",        "cannot",   "could",
    "did",           "do",      "does",    "doing",      "down",     "during",
    "each",          "few",     "for",     "from",       "further",  "had",
    "has",           "have",    "having",  "he",         "her",      "here",
    "hers",          "herself", "him",     "himself",    "his",      "how",
    "i",             "if",      "in",      "into",       "is",       "it",
    "its",           "itself",  "just",    "me",         "more",     "most",
    "my",            "myself",  "no",      "nor",        "not",      "now",
    "of",            "off",     "on",      "once",       "only",     "or",
    "other",         "our",     "ours",    "ourselves",  "out",      "over",
    "own",           "same",    "she",     "should",     "so",       "some",
    "such",          "than",    "that",    "the",        "their",    "theirs",
    "them",          "themselves",         "then",       "there",    "these",
    "they",          "this",    "those",   "through",    "to",       "too",
    "under",         "until",   "up",      "very",       "was",      "we",
    "were",          "what",    "when",    "where",      "which",    "while",
    "who",           "whom",    "why",     "will",       "with",     "would",
    "you",           "your",    "yours",   "yourself",   "yourselves"};

static_assert(kLdaStopwords.size() == 127, "stop list is pinned at 127 words");

inline const std::unordered_set<std::string>& lda_stopword_set() {
  static const std::unordered_set<std::string> set(kLdaStopwords.begin(),
                                                   kLdaStopwords.end());
  return set;
}

inline std::vector<std::string> lda_filter(
    const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  const auto& stop = lda_stopword_set();
  for (const auto& t : tokens)
    if (t.size() > 1 && !stop.count(t)) out.push_back(t);
  return out;
}

// ---------------------------------------------------------------------------
// Model state
// ---------------------------------------------------------------------------

struct TopicModel {
  int num_topics = 0;
  double alpha = 0.0;  // symmetric document-topic prior
  double beta = 0.0;   // symmetric topic-word prior
  std::uint64_t rng_seed = 0;
  int train_sweeps = 0;
  std::vector<std::string> vocab;  // index -> token, sorted
  std::unordered_map<std::string, int> vocab_index;
  std::vector<std::uint32_t> topic_word_counts;  // K x V, row-major
  std::vector<std::uint64_t> topic_totals;       // K

  int vocab_size() const { return static_cast<int>(vocab.size()); }

  std::uint32_t count(int k, int w) const {
    return topic_word_counts[static_cast<std::size_t>(k) * vocab.size() +
                             static_cast<std::size_t>(w)];
  }

  double phi(int k, int w) const {
    return (count(k, w) + beta) /
           (static_cast<double>(topic_totals[static_cast<std::size_t>(k)]) +
            vocab.size() * beta);
  }

  std::vector<double> phi_row(int k) const {
    std::vector<double> row(vocab.size());
    double denom = static_cast<double>(topic_totals[k]) + vocab.size() * beta;
    for (std::size_t w = 0; w < vocab.size(); ++w)
      row[w] = (count(k, static_cast<int>(w)) + beta) / denom;
    return row;
  }

  void rebuild_vocab_index() {
    vocab_index.clear();
    vocab_index.reserve(vocab.size());
    for (std::size_t w = 0; w < vocab.size(); ++w)
      vocab_index.emplace(vocab[w], static_cast<int>(w));
  }
};

struct TopicDistribution {
  std::vector<double> probs;
};

inline double default_alpha(int num_topics) { return 50.0 / num_topics; }

// ---------------------------------------------------------------------------
// Training: collapsed Gibbs sampling
// ---------------------------------------------------------------------------

/// Read-only view of the sampler state handed to the sweep observer; lets
/// callers check count conservation after every sweep.
struct GibbsSweepState {
  int sweep = 0;  // 0-based, called after the sweep completes
  std::uint64_t total_tokens = 0;
  const std::vector<std::uint32_t>& topic_word_counts;
  const std::vector<std::uint64_t>& topic_totals;
  const std::vector<std::uint32_t>& doc_topic_counts;  // D x K
  const std::vector<std::uint32_t>& doc_lengths;
};

using SweepObserver = std::function<void(const GibbsSweepState&)>;

/// Trains an LDA model by collapsed Gibbs sampling over the reference corpus.
/// alpha <= 0 selects the 50/K default. Identical inputs and seed give a
/// bit-identical model.
inline TopicModel train_lda(const ReferenceCorpus& corpus, int num_topics,
                            double alpha, double beta, int sweeps,
                            std::uint64_t seed,
                            const SweepObserver& observer = nullptr) {
  if (num_topics < 2) throw Error("num_topics must be at least 2");
  if (sweeps < 1) throw Error("sweeps must be positive");
  if (beta <= 0) throw Error("beta must be positive");
  if (alpha <= 0) alpha = default_alpha(num_topics);

  // Preprocess: stop/short-token filter, drop docs left empty.
  std::vector<std::vector<std::string>> kept;
  kept.reserve(corpus.headlines.size());
  for (const auto& h : corpus.headlines) {
    auto toks = lda_filter(h.tokens);
    if (!toks.empty()) kept.push_back(std::move(toks));
  }
  if (kept.empty())
    throw Error("reference corpus is empty after LDA preprocessing");

  std::vector<std::string> vocab;
  {
    std::unordered_set<std::string> seen;
    for (const auto& doc : kept)
      for (const auto& t : doc) seen.insert(t);
    vocab.assign(seen.begin(), seen.end());
    std::sort(vocab.begin(), vocab.end());
  }
  const int V = static_cast<int>(vocab.size());
  if (num_topics > V)
    throw Error("num_topics " + std::to_string(num_topics) +
                " exceeds retained vocabulary size " + std::to_string(V));
  std::unordered_map<std::string, int> vocab_index;
  vocab_index.reserve(vocab.size());
  for (int w = 0; w < V; ++w) vocab_index.emplace(vocab[w], w);

  const std::size_t D = kept.size();
  const int K = num_topics;
  std::vector<std::vector<int>> docs(D);
  std::uint64_t total_tokens = 0;
  for (std::size_t d = 0; d < D; ++d) {
    docs[d].reserve(kept[d].size());
    for (const auto& t : kept[d]) docs[d].push_back(vocab_index.at(t));
    total_tokens += docs[d].size();
  }

  std::vector<std::uint32_t> n_kw(static_cast<std::size_t>(K) * V, 0);
  std::vector<std::uint64_t> n_k(K, 0);
  std::vector<std::uint32_t> n_dk(D * static_cast<std::size_t>(K), 0);
  std::vector<std::uint32_t> doc_lengths(D, 0);
  std::vector<std::vector<std::uint16_t>> z(D);

  Rng rng(seed);
  for (std::size_t d = 0; d < D; ++d) {
    z[d].resize(docs[d].size());
    doc_lengths[d] = static_cast<std::uint32_t>(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
      z[d][i] = static_cast<std::uint16_t>(k);
      ++n_kw[static_cast<std::size_t>(k) * V + docs[d][i]];
      ++n_k[k];
      ++n_dk[d * K + k];
    }
  }

  const double v_beta = V * beta;
  std::vector<double> weight(K);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t d = 0; d < D; ++d) {
      auto& zd = z[d];
      const auto& doc = docs[d];
      std::uint32_t* nd = &n_dk[d * K];
      for (std::size_t i = 0; i < doc.size(); ++i) {
        const int w = doc[i];
        const int old_k = zd[i];
        --n_kw[static_cast<std::size_t>(old_k) * V + w];
        --n_k[old_k];
        --nd[old_k];
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
          total += (nd[k] + alpha) *
                   (n_kw[static_cast<std::size_t>(k) * V + w] + beta) /
                   (static_cast<double>(n_k[k]) + v_beta);
          weight[k] = total;
        }
        const double u = rng.uniform01() * total;
        int new_k = 0;
        while (new_k < K - 1 && weight[new_k] <= u) ++new_k;
        zd[i] = static_cast<std::uint16_t>(new_k);
        ++n_kw[static_cast<std::size_t>(new_k) * V + w];
        ++n_k[new_k];
        ++nd[new_k];
      }
    }
    if (observer)
      observer(GibbsSweepState{sweep, total_tokens, n_kw, n_k, n_dk,
                               doc_lengths});
  }

  TopicModel model;
  model.num_topics = K;
  model.alpha = alpha;
  model.beta = beta;
  model.rng_seed = seed;
  model.train_sweeps = sweeps;
  model.vocab = std::move(vocab);
  model.vocab_index = std::move(vocab_index);
  model.topic_word_counts = std::move(n_kw);
  model.topic_totals = std::move(n_k);
  return model;
}

// ---------------------------------------------------------------------------
// Fold-in inference for unseen headlines
// ---------------------------------------------------------------------------

/// Infers a topic distribution for a token list against a frozen model via
/// fold-in Gibbs sampling. Theta is averaged over the final quarter of the
/// sweeps. Out-of-vocabulary tokens are skipped; a headline with no
/// in-vocabulary tokens gets the uniform distribution.
inline TopicDistribution infer(const TopicModel& model,
                               const std::vector<std::string>& tokens,
                               int fold_in_sweeps, std::uint64_t seed) {
  if (fold_in_sweeps < 1) throw Error("fold_in_sweeps must be positive");
  const int K = model.num_topics;
  TopicDistribution dist;
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = model.vocab_index.find(t);
    if (it != model.vocab_index.end()) ids.push_back(it->second);
  }
  if (ids.empty()) {
    dist.probs.assign(K, 1.0 / K);
    return dist;
  }

  const int V = model.vocab_size();
  const double v_beta = V * model.beta;
  const double alpha = model.alpha;
  const double N = static_cast<double>(ids.size());

  Rng rng(seed);
  std::vector<std::uint32_t> local(K, 0);
  std::vector<std::uint16_t> zs(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
    zs[i] = static_cast<std::uint16_t>(k);
    ++local[k];
  }

  std::vector<double> weight(K);
  std::vector<double> theta_sum(K, 0.0);
  const int avg_from = (3 * fold_in_sweeps) / 4;  // final quarter, >= 1 sweep
  int averaged = 0;
  for (int sweep = 0; sweep < fold_in_sweeps; ++sweep) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const int w = ids[i];
      --local[zs[i]];
      double total = 0.0;
      for (int k = 0; k < K; ++k) {
        total += (local[k] + alpha) *
                 (model.topic_word_counts[static_cast<std::size_t>(k) * V + w] +
                  model.beta) /
                 (static_cast<double>(model.topic_totals[k]) + v_beta);
        weight[k] = total;
      }
      const double u = rng.uniform01() * total;
      int new_k = 0;
      while (new_k < K - 1 && weight[new_k] <= u) ++new_k;
      zs[i] = static_cast<std::uint16_t>(new_k);
      ++local[new_k];
    }
    if (sweep >= avg_from) {
      for (int k = 0; k < K; ++k)
        theta_sum[k] += (local[k] + alpha) / (N + K * alpha);
      ++averaged;
    }
  }

  dist.probs.resize(K);
  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    dist.probs[k] = theta_sum[k] / averaged;
    sum += dist.probs[k];
  }
  for (int k = 0; k < K; ++k) dist.probs[k] /= sum;
  return dist;
}

// ---------------------------------------------------------------------------
// Topic inspection and coherence
// ---------------------------------------------------------------------------

/// Top-n tokens of topic k by phi, descending; ties broken alphabetically.
inline std::vector<std::string> top_words(const TopicModel& model, int k,
                                          int n) {
  if (k < 0 || k >= model.num_topics)
    throw Error("topic index " + std::to_string(k) + " out of range");
  if (n < 1) throw Error("top_words needs n >= 1");
  const int V = model.vocab_size();
  std::vector<int> idx(V);
  for (int w = 0; w < V; ++w) idx[w] = w;
  // Same denominator across a row, so count order == phi order.
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    auto ca = model.count(k, a), cb = model.count(k, b);
    if (ca != cb) return ca > cb;
    return model.vocab[a] < model.vocab[b];
  });
  int take = std::min(n, V);
  std::vector<std::string> out;
  out.reserve(take);
  for (int i = 0; i < take; ++i) out.push_back(model.vocab[idx[i]]);
  return out;
}

/// UMass coherence per topic: for the topic's top_n words ranked by phi,
/// sum log((D(w_i, w_j) + 1) / D(w_j)) over pairs with j ranked above i,
/// where D counts document (co-)occurrence in `corpus`. Pairs whose
/// higher-ranked word never occurs are skipped.
inline std::vector<double> coherence_per_topic(const TopicModel& model,
                                               const ReferenceCorpus& corpus,
                                               int top_n) {
  if (top_n < 2) throw Error("coherence needs top_n >= 2");
  const int K = model.num_topics;
  std::vector<std::vector<std::string>> tops(K);
  std::unordered_map<std::string, int> word_id;
  for (int k = 0; k < K; ++k) {
    tops[k] = top_words(model, k, top_n);
    for (const auto& w : tops[k]) word_id.emplace(w, (int)word_id.size());
  }

  std::vector<std::uint64_t> doc_freq(word_id.size(), 0);
  std::map<std::pair<int, int>, std::uint64_t> pair_freq;
  std::vector<int> present;
  for (const auto& h : corpus.headlines) {
    present.clear();
    std::unordered_set<int> uniq;
    for (const auto& t : h.tokens) {
      auto it = word_id.find(t);
      if (it != word_id.end() && uniq.insert(it->second).second)
        present.push_back(it->second);
    }
    std::sort(present.begin(), present.end());
    for (std::size_t a = 0; a < present.size(); ++a) {
      ++doc_freq[present[a]];
      for (std::size_t b = a + 1; b < present.size(); ++b)
        ++pair_freq[{present[a], present[b]}];
    }
  }

  auto co = [&](int a, int b) -> std::uint64_t {
    if (a > b) std::swap(a, b);
    auto it = pair_freq.find({a, b});
    return it == pair_freq.end() ? 0 : it->second;
  };

  std::vector<double> scores(K, 0.0);
  for (int k = 0; k < K; ++k) {
    double s = 0.0;
    const auto& words = tops[k];
    for (std::size_t i = 1; i < words.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        int wi = word_id.at(words[i]);
        int wj = word_id.at(words[j]);
        std::uint64_t dj = doc_freq[wj];
        if (dj == 0) continue;
        s += std::log((static_cast<double>(co(wi, wj)) + 1.0) /
                      static_cast<double>(dj));
      }
    }
    scores[k] = s;
  }
  return scores;
}

inline double coherence(const TopicModel& model, const ReferenceCorpus& corpus,
                        int top_n) {
  auto scores = coherence_per_topic(model, corpus, top_n);
  double total = 0.0;
  for (double s : scores) total += s;
  return total / static_cast<double>(scores.size());
}

// ---------------------------------------------------------------------------
// Topic-count selection by coherence
// ---------------------------------------------------------------------------

struct TopicCountScore {
  int num_topics = 0;
  double coherence = 0.0;
};

struct TopicSelection {
  int best = 0;
  std::vector<TopicCountScore> scores;  // ascending by num_topics
};

/// Argmax coherence; ties resolved toward the smaller topic count.
inline int pick_best_topic_count(const std::vector<TopicCountScore>& scores) {
  if (scores.empty()) throw Error("no candidate scores");
  int best = scores[0].num_topics;
  double best_score = scores[0].coherence;
  for (const auto& s : scores) {
    if (s.coherence > best_score ||
        (s.coherence == best_score && s.num_topics < best)) {
      best = s.num_topics;
      best_score = s.coherence;
    }
  }
  return best;
}

struct SelectTopicsOptions {
  double alpha = -1.0;  // <=0: 50/K per candidate
  double beta = 0.01;
  int sweeps = 200;
  int top_n = 10;
  std::uint64_t seed = 1;
};

inline TopicSelection select_num_topics(const ReferenceCorpus& corpus,
                                        std::vector<int> candidates,
                                        const SelectTopicsOptions& opt = {}) {
  if (candidates.empty()) throw Error("candidate list is empty");
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  TopicSelection sel;
  for (int k : candidates) {
    TopicModel m =
        train_lda(corpus, k, opt.alpha, opt.beta, opt.sweeps,
                  derive_seed(opt.seed, static_cast<std::uint64_t>(k)));
    sel.scores.push_back({k, coherence(m, corpus, opt.top_n)});
  }
  sel.best = pick_best_topic_count(sel.scores);
  return sel;
}

// ---------------------------------------------------------------------------
// Serialization: "CURIOTM1" binary (little-endian) + JSON sidecar.
// Round-trips are bit-exact.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class ByteReader {
 public:
  ByteReader(std::string_view data, const std::string& path)
      : data_(data), path_(path) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= std::uint32_t(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= std::uint64_t(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > data_.size())
      throw Error(path_ + ": truncated topic model file");
  }
  std::string_view data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline constexpr char kTopicModelMagic[9] = "CURIOTM1";

inline void save_topic_model(const TopicModel& model, const std::string& path) {
  std::string out;
  out.reserve(64 + model.vocab.size() * 12 + model.topic_word_counts.size());
  out.append(kTopicModelMagic, 8);
  const int K = model.num_topics;
  const int V = model.vocab_size();
  detail::put_u32(out, static_cast<std::uint32_t>(K));
  detail::put_u32(out, static_cast<std::uint32_t>(V));
  detail::put_f64(out, model.alpha);
  detail::put_f64(out, model.beta);
  detail::put_u64(out, model.rng_seed);
  detail::put_u32(out, static_cast<std::uint32_t>(model.train_sweeps));
  for (const auto& w : model.vocab) {
    detail::put_u32(out, static_cast<std::uint32_t>(w.size()));
    out += w;
  }
  for (int k = 0; k < K; ++k) {
    detail::put_u64(out, model.topic_totals[k]);
    std::uint32_t nnz = 0;
    for (int w = 0; w < V; ++w)
      if (model.count(k, w)) ++nnz;
    detail::put_u32(out, nnz);
    for (int w = 0; w < V; ++w) {
      std::uint32_t c = model.count(k, w);
      if (!c) continue;
      detail::put_u32(out, static_cast<std::uint32_t>(w));
      detail::put_u32(out, c);
    }
  }
  write_file(path, out);

  nlohmann::json side;
  side["format"] = std::string(kTopicModelMagic, 8);
  side["num_topics"] = K;
  side["vocab_size"] = V;
  side["alpha"] = model.alpha;
  side["beta"] = model.beta;
  side["seed"] = model.rng_seed;
  side["train_sweeps"] = model.train_sweeps;
  write_file(path + ".json", side.dump(2) + "\n");
}

inline TopicModel load_topic_model(const std::string& path) {
  std::string data = read_file(path);
  detail::ByteReader r(data, path);
  if (r.bytes(8) != std::string(kTopicModelMagic, 8))
    throw Error(path + ": not a topic model file (bad magic)");
  TopicModel m;
  m.num_topics = static_cast<int>(r.u32());
  const int V = static_cast<int>(r.u32());
  m.alpha = r.f64();
  m.beta = r.f64();
  m.rng_seed = r.u64();
  m.train_sweeps = static_cast<int>(r.u32());
  m.vocab.reserve(V);
  for (int w = 0; w < V; ++w) {
    std::uint32_t len = r.u32();
    m.vocab.push_back(r.bytes(len));
  }
  m.topic_word_counts.assign(static_cast<std::size_t>(m.num_topics) * V, 0);
  m.topic_totals.assign(m.num_topics, 0);
  for (int k = 0; k < m.num_topics; ++k) {
    std::uint64_t total = r.u64();
    std::uint32_t nnz = r.u32();
    std::uint64_t sum = 0;
    for (std::uint32_t i = 0; i < nnz; ++i) {
      std::uint32_t w = r.u32();
      std::uint32_t c = r.u32();
      if (w >= static_cast<std::uint32_t>(V))
        throw Error(path + ": corrupt topic model (word id out of range)");
      m.topic_word_counts[static_cast<std::size_t>(k) * V + w] = c;
      sum += c;
    }
    if (sum != total)
      throw Error(path + ": corrupt topic model (row sum mismatch)");
    m.topic_totals[k] = total;
  }
  if (!r.at_end()) throw Error(path + ": trailing bytes in topic model file");
  m.rebuild_vocab_index();
  return m;
}

}  // namespace curio
