#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curio/corpus.hpp"
#include "curio/error.hpp"
#include "curio/infogap.hpp"
#include "curio/io.hpp"
#include "curio/novelty.hpp"
#include "curio/rng.hpp"
#include "curio/surprise.hpp"
#include "curio/topic_model.hpp"

namespace curio {

inline constexpr const char* kFeatureSchemaVersion = "curio.features.v1";
inline constexpr const char* kModelFormat = "curio.model.v1";

enum class FeatureSet { novelty, surprise, infogap, all };

inline bool uses_novelty(FeatureSet s) {
  return s == FeatureSet::novelty || s == FeatureSet::all;
}
inline bool uses_surprise(FeatureSet s) {
  return s == FeatureSet::surprise || s == FeatureSet::all;
}
inline bool uses_infogap(FeatureSet s) {
  return s == FeatureSet::infogap || s == FeatureSet::all;
}

inline std::string to_string(FeatureSet s) {
  switch (s) {
    case FeatureSet::novelty: return "novelty";
    case FeatureSet::surprise: return "surprise";
    case FeatureSet::infogap: return "infogap";
    case FeatureSet::all: return "all";
  }
  throw Error("unknown feature set");
}

inline FeatureSet parse_feature_set(std::string_view s) {
  if (s == "novelty") return FeatureSet::novelty;
  if (s == "surprise") return FeatureSet::surprise;
  if (s == "infogap") return FeatureSet::infogap;
  if (s == "all") return FeatureSet::all;
  throw Error("unknown feature set '" + std::string(s) +
              "' (expected novelty, surprise, infogap or all)");
}

/// Column names, in the order rows are laid out for each feature set.
inline std::vector<std::string> feature_schema(FeatureSet set) {
  std::vector<std::string> names;
  if (uses_novelty(set)) {
    names.push_back("novelty_kl");
    names.push_back("novelty_hellinger");
  }
  if (uses_surprise(set)) {
    names.push_back("surprise_zero_run");
    names.push_back("surprise_max_nonzero");
  }
  if (uses_infogap(set)) {
    for (const char* n : InfoGapFeatures::names())
      names.push_back(std::string("infogap_") + n);
  }
  return names;
}

struct FeatureMatrix {
  FeatureSet set = FeatureSet::all;
  std::vector<std::string> schema;
  std::vector<std::uint64_t> ids;
  std::vector<int> labels;  // -1 where unknown
  std::vector<std::vector<double>> rows;

  std::size_t size() const { return rows.size(); }
  std::size_t dim() const { return schema.size(); }
};

/// Everything featurize() may need; only the members required by the
/// requested feature set have to be present.
struct FeaturizeResources {
  const TopicModel* topics = nullptr;
  const ExposureDistribution* exposure = nullptr;
  const BigramTable* bigrams = nullptr;
  const InfoGapExtractor* infogap = nullptr;
  int fold_in_sweeps = 50;
};

inline FeatureMatrix featurize(const std::vector<Headline>& headlines,
                               FeatureSet set,
                               const FeaturizeResources& res,
                               std::uint64_t seed) {
  const bool want_novelty = uses_novelty(set);
  const bool want_surprise = uses_surprise(set);
  const bool want_infogap = uses_infogap(set);
  if (want_novelty && (!res.topics || !res.exposure))
    throw Error("featurize: novelty features need a topic model and exposure "
                "distribution");
  if (want_surprise && !res.bigrams)
    throw Error("featurize: surprise features need a bigram table");
  if (want_infogap && !res.infogap)
    throw Error("featurize: infogap features need a rule extractor");

  FeatureMatrix m;
  m.set = set;
  m.schema = feature_schema(set);
  m.ids.reserve(headlines.size());
  m.labels.reserve(headlines.size());
  m.rows.reserve(headlines.size());
  for (const Headline& h : headlines) {
    std::vector<double> row;
    row.reserve(m.schema.size());
    if (want_novelty) {
      TopicDistribution d =
          infer(*res.topics, h.tokens, res.fold_in_sweeps, derive_seed(seed, h.id));
      NoveltyFeatures nf = novelty_features(d, *res.exposure);
      row.push_back(nf.kl);
      row.push_back(nf.hellinger);
    }
    if (want_surprise) {
      SurpriseFeatures sf = surprise_features(*res.bigrams, h.tokens);
      row.push_back(static_cast<double>(sf.zero_run));
      row.push_back(static_cast<double>(sf.max_nonzero));
    }
    if (want_infogap) {
      for (double v : res.infogap->extract(h).as_array()) row.push_back(v);
    }
    m.ids.push_back(h.id);
    m.labels.push_back(h.label.value_or(-1));
    m.rows.push_back(std::move(row));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Features CSV
// ---------------------------------------------------------------------------

inline void save_features_csv(const FeatureMatrix& m, const std::string& path) {
  std::string out = "id,label";
  for (const auto& name : m.schema) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    out += std::to_string(m.ids[i]);
    out += ',';
    out += std::to_string(m.labels[i]);
    for (double v : m.rows[i]) {
      out += ',';
      out += fmt_double(v);
    }
    out += '\n';
  }
  write_file(path, out);
}

inline FeatureMatrix load_features_csv(const std::string& path, FeatureSet set) {
  auto records = parse_csv_file(path);
  if (records.empty()) throw Error(path + ": empty features file");
  const std::vector<std::string> expected = feature_schema(set);
  const auto& header = records[0].fields;
  if (header.size() != expected.size() + 2 || header[0] != "id" ||
      header[1] != "label")
    throw Error(path + ": unexpected features header");
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (header[i + 2] != expected[i])
      throw Error(path + ": feature column " + std::to_string(i + 2) +
                  " is '" + header[i + 2] + "', expected '" + expected[i] + "'");

  FeatureMatrix m;
  m.set = set;
  m.schema = expected;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw Error(path + ":" + std::to_string(rec.line) +
                  ": wrong number of fields");
    m.ids.push_back(static_cast<std::uint64_t>(
        parse_int(rec.fields[0], path + ":" + std::to_string(rec.line))));
    int label = static_cast<int>(
        parse_int(rec.fields[1], path + ":" + std::to_string(rec.line)));
    if (label < -1 || label > 1)
      throw Error(path + ":" + std::to_string(rec.line) + ": bad label " +
                  rec.fields[1]);
    m.labels.push_back(label);
    std::vector<double> row;
    row.reserve(expected.size());
    for (std::size_t c = 2; c < rec.fields.size(); ++c)
      row.push_back(
          parse_double(rec.fields[c], path + ":" + std::to_string(rec.line)));
    m.rows.push_back(std::move(row));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Split
// ---------------------------------------------------------------------------

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified split: each class is shuffled separately and the first
/// floor(train_fraction * class size) rows go to train. Both sides must end
/// up with at least one row of each class.
inline Split stratified_split(const std::vector<int>& labels,
                              double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw Error("train_fraction must be in (0, 1)");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw Error("stratified_split: row " + std::to_string(i) +
                  " has no 0/1 label");
    by_class[labels[i]].push_back(i);
  }
  Split s;
  for (int c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(idx);
    std::size_t n_train =
        static_cast<std::size_t>(train_fraction * static_cast<double>(idx.size()));
    if (n_train == 0 || n_train == idx.size())
      throw Error("stratified_split: class " + std::to_string(c) +
                  " would leave an empty train or test side");
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < n_train ? s.train : s.test).push_back(idx[i]);
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

inline FeatureMatrix take_rows(const FeatureMatrix& m,
                               const std::vector<std::size_t>& idx) {
  FeatureMatrix out;
  out.set = m.set;
  out.schema = m.schema;
  for (std::size_t i : idx) {
    out.ids.push_back(m.ids[i]);
    out.labels.push_back(m.labels[i]);
    out.rows.push_back(m.rows[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Standardizer fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error("standardizer: no rows");
    const std::size_t d = rows[0].size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 0.0);
    for (const auto& r : rows)
      for (double v : r)
        if (!std::isfinite(v)) throw Error("non-finite feature value");
    for (const auto& r : rows)
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    for (std::size_t j = 0; j < d; ++j) s.mean[j] /= static_cast<double>(rows.size());
    for (const auto& r : rows)
      for (std::size_t j = 0; j < d; ++j) {
        double dlt = r[j] - s.mean[j];
        s.stddev[j] += dlt * dlt;
      }
    for (std::size_t j = 0; j < d; ++j) {
      s.stddev[j] = std::sqrt(s.stddev[j] / static_cast<double>(rows.size()));
      if (s.stddev[j] == 0.0) s.stddev[j] = 1.0;  // constant column passes through
    }
    return s;
  }

  std::vector<double> transform(const std::vector<double>& row) const {
    if (row.size() != mean.size())
      throw Error("standardizer: row has " + std::to_string(row.size()) +
                  " features, expected " + std::to_string(mean.size()));
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j)
      out[j] = (row[j] - mean[j]) / stddev[j];
    return out;
  }
};

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

enum class ModelKind { logreg, svm };

inline std::string to_string(ModelKind k) {
  return k == ModelKind::logreg ? "logreg" : "svm";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "logreg") return ModelKind::logreg;
  if (s == "svm") return ModelKind::svm;
  throw Error("unknown model kind '" + std::string(s) +
              "' (expected logreg or svm)");
}

struct TrainingMeta {
  int epochs_run = 0;
  double final_objective = 0.0;
};

struct LinearModel {
  ModelKind kind = ModelKind::logreg;
  FeatureSet set = FeatureSet::all;
  std::string schema_version = kFeatureSchemaVersion;
  std::vector<std::string> schema;
  std::vector<double> weights;
  double bias = 0.0;
  Standardizer standardizer;
  TrainingMeta meta;
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// log(1 + exp(z)) without overflow for large |z|.
inline double log1pexp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

inline void require_both_classes(const std::vector<int>& labels,
                                 const char* who) {
  bool has0 = false, has1 = false;
  for (int lbl : labels) {
    if (lbl == 0) has0 = true;
    else if (lbl == 1) has1 = true;
    else throw Error(std::string(who) + ": rows must have 0/1 labels");
  }
  if (!has0 || !has1)
    throw Error(std::string(who) + ": training set needs both classes");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

struct LogRegOptions {
  int epochs = 500;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::function<void(int epoch, double objective)> on_epoch;
};

/// Mean cross-entropy plus (l2/2)*||w||^2; the bias is not regularized.
inline double logreg_objective(const std::vector<std::vector<double>>& rows,
                               const std::vector<int>& labels,
                               const std::vector<double>& w, double b,
                               double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double z = detail::dot(w, rows[i]) + b;
    // y=1: log(1+e^-z); y=0: log(1+e^z)
    loss += labels[i] == 1 ? detail::log1pexp(-z) : detail::log1pexp(z);
  }
  loss /= static_cast<double>(rows.size());
  double reg = 0.0;
  for (double wi : w) reg += wi * wi;
  return loss + 0.5 * l2 * reg;
}

inline void logreg_gradient(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels,
                            const std::vector<double>& w, double b, double l2,
                            std::vector<double>& gw, double& gb) {
  const std::size_t d = w.size();
  gw.assign(d, 0.0);
  gb = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double z = detail::dot(w, rows[i]) + b;
    double err = sigmoid(z) - static_cast<double>(labels[i]);
    for (std::size_t j = 0; j < d; ++j) gw[j] += err * rows[i][j];
    gb += err;
  }
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t j = 0; j < d; ++j) gw[j] = gw[j] * inv_n + l2 * w[j];
  gb *= inv_n;
}

/// Full-batch gradient descent with a halving line search: a step is only
/// taken if it does not increase the objective, so the objective trace is
/// non-increasing by construction.
inline LinearModel train_logreg(const FeatureMatrix& train,
                                const LogRegOptions& opt = {}) {
  if (train.rows.empty()) throw Error("train_logreg: empty training set");
  if (opt.epochs < 0) throw Error("train_logreg: negative epoch count");
  detail::require_both_classes(train.labels, "train_logreg");

  LinearModel model;
  model.kind = ModelKind::logreg;
  model.set = train.set;
  model.schema = train.schema;
  model.standardizer = Standardizer::fit(train.rows);

  std::vector<std::vector<double>> x;
  x.reserve(train.rows.size());
  for (const auto& r : train.rows) x.push_back(model.standardizer.transform(r));

  const std::size_t d = train.dim();
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  double obj = logreg_objective(x, train.labels, w, b, opt.l2);
  std::vector<double> gw;
  double gb = 0.0;
  int epoch = 0;
  for (; epoch < opt.epochs; ++epoch) {
    logreg_gradient(x, train.labels, w, b, opt.l2, gw, gb);
    double lr = opt.learning_rate;
    std::vector<double> w_next(d);
    double b_next = 0.0, obj_next = 0.0;
    bool stepped = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t j = 0; j < d; ++j) w_next[j] = w[j] - lr * gw[j];
      b_next = b - lr * gb;
      obj_next = logreg_objective(x, train.labels, w_next, b_next, opt.l2);
      if (obj_next <= obj) {
        stepped = true;
        break;
      }
      lr *= 0.5;
    }
    if (!stepped) break;  // no step of any size improves: converged
    w.swap(w_next);
    b = b_next;
    obj = obj_next;
    if (opt.on_epoch) opt.on_epoch(epoch + 1, obj);
  }
  model.weights = std::move(w);
  model.bias = b;
  model.meta.epochs_run = epoch;
  model.meta.final_objective = obj;
  return model;
}

// ---------------------------------------------------------------------------
// Pegasos linear SVM
// ---------------------------------------------------------------------------

struct SvmOptions {
  int iterations = 100000;
  double lambda = 1e-4;
  std::uint64_t seed = 1;
};

/// Pegasos primal objective: (lambda/2)*||w||^2 plus mean hinge loss. Labels
/// are 0/1 and mapped to ±1 internally.
inline double svm_objective(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels,
                            const std::vector<double>& w, double b,
                            double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double y = labels[i] == 1 ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * (detail::dot(w, rows[i]) + b));
  }
  hinge /= static_cast<double>(rows.size());
  double reg = 0.0;
  for (double wi : w) reg += wi * wi;
  return 0.5 * lambda * reg + hinge;
}

/// Single-sample Pegasos with step size 1/(lambda*t) and an unregularized
/// bias. The returned weights are the average over the final half of the
/// iterations, which damps the oscillation of the last raw iterate.
inline LinearModel train_svm(const FeatureMatrix& train,
                             const SvmOptions& opt = {}) {
  if (train.rows.empty()) throw Error("train_svm: empty training set");
  if (opt.iterations < 1) throw Error("train_svm: iterations must be positive");
  if (!(opt.lambda > 0.0)) throw Error("train_svm: lambda must be positive");
  detail::require_both_classes(train.labels, "train_svm");

  LinearModel model;
  model.kind = ModelKind::svm;
  model.set = train.set;
  model.schema = train.schema;
  model.standardizer = Standardizer::fit(train.rows);

  std::vector<std::vector<double>> x;
  x.reserve(train.rows.size());
  for (const auto& r : train.rows) x.push_back(model.standardizer.transform(r));
  std::vector<double> y(train.labels.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = train.labels[i] == 1 ? 1.0 : -1.0;

  const std::size_t d = train.dim();
  const std::size_t n = x.size();
  std::vector<double> w(d, 0.0), w_sum(d, 0.0);
  double b = 0.0, b_sum = 0.0;
  std::size_t averaged = 0;
  Rng rng(opt.seed);
  const int t_avg_from = opt.iterations / 2;  // average over t > T/2
  for (int t = 1; t <= opt.iterations; ++t) {
    std::size_t i = static_cast<std::size_t>(rng.below(n));
    const double eta = 1.0 / (opt.lambda * static_cast<double>(t));
    const double margin = y[i] * (detail::dot(w, x[i]) + b);
    const double shrink = 1.0 - eta * opt.lambda;  // == 1 - 1/t
    for (std::size_t j = 0; j < d; ++j) w[j] *= shrink;
    if (margin < 1.0) {
      for (std::size_t j = 0; j < d; ++j) w[j] += eta * y[i] * x[i][j];
      b += eta * y[i];
    }
    if (t > t_avg_from) {
      for (std::size_t j = 0; j < d; ++j) w_sum[j] += w[j];
      b_sum += b;
      ++averaged;
    }
  }
  model.weights.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    model.weights[j] = w_sum[j] / static_cast<double>(averaged);
  model.bias = b_sum / static_cast<double>(averaged);
  model.meta.epochs_run = opt.iterations;
  model.meta.final_objective =
      svm_objective(x, train.labels, model.weights, model.bias, opt.lambda);
  return model;
}

// ---------------------------------------------------------------------------
// Prediction and evaluation
// ---------------------------------------------------------------------------

struct Prediction {
  double score = 0.0;  // w.x + b on standardized features
  double prob = 0.0;   // sigmoid(score)
  int label = 0;       // score >= 0
};

inline Prediction predict(const LinearModel& model,
                          const std::vector<double>& raw_features) {
  if (raw_features.size() != model.weights.size())
    throw Error("predict: feature vector has " +
                std::to_string(raw_features.size()) + " entries, model expects " +
                std::to_string(model.weights.size()));
  std::vector<double> x = model.standardizer.transform(raw_features);
  Prediction p;
  p.score = detail::dot(model.weights, x) + model.bias;
  p.prob = sigmoid(p.score);
  p.label = p.score >= 0.0 ? 1 : 0;
  return p;
}

struct Metrics {
  std::size_t n = 0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mse = 0.0;
};

/// Clickbait (label 1) is the positive class. F1 falls back to 0 when both
/// precision and recall are 0. MSE is over sigmoid probabilities, putting
/// both model kinds on one scale.
inline Metrics evaluate(const LinearModel& model, const FeatureMatrix& data) {
  if (data.rows.empty()) throw Error("evaluate: empty evaluation set");
  Metrics m;
  m.n = data.rows.size();
  double se = 0.0;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    int label = data.labels[i];
    if (label != 0 && label != 1)
      throw Error("evaluate: rows must have 0/1 labels");
    Prediction p = predict(model, data.rows[i]);
    if (p.label == 1 && label == 1) ++m.tp;
    else if (p.label == 1 && label == 0) ++m.fp;
    else if (p.label == 0 && label == 0) ++m.tn;
    else ++m.fn;
    double d = p.prob - static_cast<double>(label);
    se += d * d;
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.n);
  m.precision = m.tp + m.fp > 0
                    ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp)
                    : 0.0;
  m.recall = m.tp + m.fn > 0
                 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn)
                 : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.mse = se / static_cast<double>(m.n);
  return m;
}

// ---------------------------------------------------------------------------
// Serialization and reports
// ---------------------------------------------------------------------------

inline nlohmann::json model_to_json(const LinearModel& model) {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["kind"] = to_string(model.kind);
  j["feature_set"] = to_string(model.set);
  j["schema_version"] = model.schema_version;
  j["schema"] = model.schema;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["standardizer"]["mean"] = model.standardizer.mean;
  j["standardizer"]["stddev"] = model.standardizer.stddev;
  j["meta"]["epochs_run"] = model.meta.epochs_run;
  j["meta"]["final_objective"] = model.meta.final_objective;
  return j;
}

inline void save_model(const LinearModel& model, const std::string& path) {
  write_file(path, model_to_json(model).dump(2) + "\n");
}

inline LinearModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("format") || j["format"] != kModelFormat)
    throw Error("model file has unexpected format tag");
  LinearModel model;
  model.kind = parse_model_kind(j.at("kind").get<std::string>());
  model.set = parse_feature_set(j.at("feature_set").get<std::string>());
  model.schema_version = j.at("schema_version").get<std::string>();
  model.schema = j.at("schema").get<std::vector<std::string>>();
  model.weights = j.at("weights").get<std::vector<double>>();
  model.bias = j.at("bias").get<double>();
  model.standardizer.mean =
      j.at("standardizer").at("mean").get<std::vector<double>>();
  model.standardizer.stddev =
      j.at("standardizer").at("stddev").get<std::vector<double>>();
  if (model.weights.size() != model.schema.size() ||
      model.standardizer.mean.size() != model.schema.size() ||
      model.standardizer.stddev.size() != model.schema.size())
    throw Error("model file has inconsistent dimensions");
  if (j.contains("meta")) {
    model.meta.epochs_run = j["meta"].value("epochs_run", 0);
    model.meta.final_objective = j["meta"].value("final_objective", 0.0);
  }
  return model;
}

inline LinearModel load_model(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

inline nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["n"] = m.n;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["tn"] = m.tn;
  j["fn"] = m.fn;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["mse"] = m.mse;
  return j;
}

inline Metrics metrics_from_json(const nlohmann::json& j) {
  Metrics m;
  m.n = j.at("n").get<std::size_t>();
  m.tp = j.at("tp").get<std::size_t>();
  m.fp = j.at("fp").get<std::size_t>();
  m.tn = j.at("tn").get<std::size_t>();
  m.fn = j.at("fn").get<std::size_t>();
  m.accuracy = j.at("accuracy").get<double>();
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.mse = j.at("mse").get<double>();
  return m;
}

inline std::string metrics_csv_row(ModelKind kind, FeatureSet set,
                                   const Metrics& m) {
  return to_string(kind) + "," + to_string(set) + "," + fmt_double(m.accuracy) +
         "," + fmt_double(m.f1) + "," + fmt_double(m.mse);
}

inline std::string metrics_table(ModelKind kind, FeatureSet set,
                                 const Metrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-8s %-10s acc=%.4f  f1=%.4f  mse=%.4f  (n=%zu tp=%zu fp=%zu "
                "tn=%zu fn=%zu)",
                to_string(kind).c_str(), to_string(set).c_str(), m.accuracy,
                m.f1, m.mse, m.n, m.tp, m.fp, m.tn, m.fn);
  return std::string(buf);
}

}  // namespace curio
