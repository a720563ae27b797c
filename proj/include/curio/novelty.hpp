#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curio/corpus.hpp"
#include "curio/error.hpp"
#include "curio/rng.hpp"
#include "curio/topic_model.hpp"

namespace curio {

inline constexpr double kDistributionSumTolerance = 1e-6;
inline constexpr double kSmoothingEpsilon = 1e-12;

namespace detail {

inline void check_distribution(std::span<const double> p, const char* which) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw Error(std::string(which) + " has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kDistributionSumTolerance)
    throw Error(std::string(which) + " does not sum to 1 (sum=" +
                fmt_double(sum) + ")");
}

}  // namespace detail

/// D_KL(p || q) = sum_i p(i) ln(p(i)/q(i)), natural log, 0 ln 0 = 0.
/// q must be strictly positive wherever p is; smoothing upstream guarantees
/// this for inferred topic distributions.
inline double kl_divergence(std::span<const double> p,
                            std::span<const double> q) {
  if (p.size() != q.size())
    throw Error("kl_divergence: length mismatch (" + std::to_string(p.size()) +
                " vs " + std::to_string(q.size()) + ")");
  detail::check_distribution(p, "p");
  detail::check_distribution(q, "q");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0)
      throw Error("kl_divergence: q is zero where p has mass (index " +
                  std::to_string(i) + ")");
    sum += p[i] * std::log(p[i] / q[i]);
  }
  // Gibbs' inequality guarantees a nonnegative result; only rounding noise
  // from near-identical inputs can dip below zero, and that is clamped.
  if (sum < 0.0 && sum > -1e-12) sum = 0.0;
  return sum;
}

/// H(p, q) = sqrt( sum_i (sqrt(p_i) - sqrt(q_i))^2 / 2 ); symmetric, in [0,1].
inline double hellinger(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw Error("hellinger: length mismatch (" + std::to_string(p.size()) +
                " vs " + std::to_string(q.size()) + ")");
  detail::check_distribution(p, "p");
  detail::check_distribution(q, "q");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    sum += d * d;
  }
  // The 1e-6 sum tolerance lets disjoint-support inputs overshoot 1 by
  // rounding; the true distance is capped at 1.
  return std::min(1.0, std::sqrt(0.5 * sum));
}

/// Adds epsilon to every entry and renormalizes; keeps divergences finite on
/// distributions with exact zeros (uniform OOV sentinel, deserialized values).
inline std::vector<double> smooth_distribution(
    std::vector<double> probs, double epsilon = kSmoothingEpsilon) {
  double sum = 0.0;
  for (double& v : probs) {
    v += epsilon;
    sum += v;
  }
  for (double& v : probs) v /= sum;
  return probs;
}

/// Mean inferred topic distribution over a corpus: what readers were exposed
/// to. Per-headline fold-in seeds are derived from `seed` and the headline id.
struct ExposureDistribution {
  std::vector<double> probs;
  std::size_t source_size = 0;
};

inline ExposureDistribution exposure(const TopicModel& model,
                                     const ReferenceCorpus& corpus,
                                     std::uint64_t seed,
                                     int fold_in_sweeps = 50) {
  if (corpus.headlines.empty())
    throw Error("exposure: reference corpus is empty");
  const int K = model.num_topics;
  std::vector<double> mean(K, 0.0);
  for (const auto& h : corpus.headlines) {
    TopicDistribution d =
        infer(model, h.tokens, fold_in_sweeps,
              derive_seed(seed, static_cast<std::uint64_t>(h.id)));
    for (int k = 0; k < K; ++k) mean[k] += d.probs[k];
  }
  for (double& v : mean) v /= static_cast<double>(corpus.headlines.size());
  ExposureDistribution e;
  e.probs = smooth_distribution(std::move(mean));
  e.source_size = corpus.headlines.size();
  return e;
}

struct NoveltyFeatures {
  double kl = 0.0;
  double hellinger = 0.0;
};

/// The two novelty features of a headline: KL(headline || exposure) and
/// Hellinger distance, with the headline distribution smoothed the same way
/// the exposure was.
inline NoveltyFeatures novelty_features(const TopicDistribution& headline,
                                        const ExposureDistribution& exp) {
  if (headline.probs.size() != exp.probs.size())
    throw Error("novelty_features: topic count mismatch (" +
                std::to_string(headline.probs.size()) + " vs " +
                std::to_string(exp.probs.size()) + ")");
  std::vector<double> p = smooth_distribution(headline.probs);
  NoveltyFeatures f;
  f.kl = kl_divergence(p, exp.probs);
  f.hellinger = hellinger(p, exp.probs);
  return f;
}

}  // namespace curio
