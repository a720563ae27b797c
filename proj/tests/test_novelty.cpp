#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "curio/error.hpp"
#include "curio/novelty.hpp"
#include "curio/topic_model.hpp"
#include "testutil.hpp"

using curio::hellinger;
using curio::kl_divergence;
using Dist = std::vector<double>;

TEST_CASE("kl and hellinger match the worked pair") {
  const Dist p = {0.5, 0.5}, q = {0.25, 0.75};
  REQUIRE_THAT(kl_divergence(p, q),
               Catch::Matchers::WithinAbs(testutil::kKlHalfVsQuarter, 1e-12));
  REQUIRE_THAT(hellinger(p, q),
               Catch::Matchers::WithinAbs(testutil::kHellingerHalfVsQuarter, 1e-12));
}

TEST_CASE("identical distributions have zero divergence") {
  curio::Rng rng(41);
  for (int i = 0; i < 50; ++i) {
    const auto p = testutil::random_distribution(rng, 2 + rng.below(30));
    REQUIRE(kl_divergence(p, p) == 0.0);
    REQUIRE(hellinger(p, p) == 0.0);
  }
}

TEST_CASE("hellinger is symmetric, bounded, and maximal on disjoint support") {
  REQUIRE(hellinger(Dist{1.0, 0.0}, Dist{0.0, 1.0}) == 1.0);
  curio::Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng.below(30);
    const auto p = testutil::random_distribution(rng, n, 3);
    const auto q = testutil::random_distribution(rng, n, 4);
    const double h = hellinger(p, q);
    REQUIRE(h == hellinger(q, p));
    REQUIRE(h >= 0.0);
    REQUIRE(h <= 1.0);
  }
}

TEST_CASE("kl is non-negative and positive off the diagonal") {
  curio::Rng rng(47);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng.below(30);
    const auto p = testutil::random_distribution(rng, n);
    const auto q = testutil::random_distribution(rng, n);
    const double kl = kl_divergence(p, q);
    REQUIRE(kl >= 0.0);
    if (p != q) REQUIRE(kl > 0.0);
    // Cross-check against extended-precision evaluation.
    REQUIRE_THAT(kl, Catch::Matchers::WithinAbs(static_cast<double>(testutil::kl_oracle(p, q)),
                                                1e-12));
    REQUIRE_THAT(hellinger(p, q),
                 Catch::Matchers::WithinAbs(static_cast<double>(testutil::hellinger_oracle(p, q)),
                                            1e-12));
  }
}

TEST_CASE("kl rejects zeros in q under p's support") {
  REQUIRE_THROWS_WITH(kl_divergence(Dist{1.0, 0.0}, Dist{0.0, 1.0}),
                      Catch::Matchers::ContainsSubstring("q is zero"));
  // Zero in q is fine where p is also zero.
  REQUIRE(kl_divergence(Dist{0.0, 1.0}, Dist{0.0, 1.0}) == 0.0);
}

TEST_CASE("divergences validate their inputs") {
  const Dist p = {0.5, 0.5};
  REQUIRE_THROWS_WITH(kl_divergence(p, Dist{0.3, 0.3, 0.4}),
                      Catch::Matchers::ContainsSubstring("length mismatch"));
  REQUIRE_THROWS_WITH(hellinger(p, Dist{1.0}),
                      Catch::Matchers::ContainsSubstring("length mismatch"));
  REQUIRE_THROWS_WITH(kl_divergence(Dist{0.3, 0.3}, p),
                      Catch::Matchers::ContainsSubstring("sum"));
  REQUIRE_THROWS_WITH(hellinger(p, Dist{0.9, 0.9}),
                      Catch::Matchers::ContainsSubstring("sum"));
  REQUIRE_THROWS_WITH(kl_divergence(Dist{1.2, -0.2}, p),
                      Catch::Matchers::ContainsSubstring("negative"));
}

TEST_CASE("smooth_distribution removes zeros and renormalizes") {
  const auto s = curio::smooth_distribution({0.0, 0.5, 0.5});
  REQUIRE(s.size() == 3);
  double sum = 0.0;
  for (double v : s) {
    REQUIRE(v > 0.0);
    sum += v;
  }
  REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(s[1], Catch::Matchers::WithinAbs(0.5, 1e-9));

  // An all-zero vector becomes uniform.
  const auto u = curio::smooth_distribution({0.0, 0.0, 0.0, 0.0});
  for (double v : u) REQUIRE_THAT(v, Catch::Matchers::WithinAbs(0.25, 1e-12));

  // Heavier smoothing pulls toward uniform.
  const auto heavy = curio::smooth_distribution({1.0, 0.0}, 0.5);
  REQUIRE_THAT(heavy[0], Catch::Matchers::WithinAbs(1.5 / 2.0, 1e-12));
  REQUIRE_THAT(heavy[1], Catch::Matchers::WithinAbs(0.5 / 2.0, 1e-12));
}

TEST_CASE("exposure averages per-headline topic mixtures") {
  const auto synth = testutil::make_synthetic_corpus(29, 120, 20);
  const auto model = curio::train_lda(synth.corpus, 3, 0.5, 0.01, 20, 4);

  curio::ReferenceCorpus two;
  two.headlines.push_back(synth.corpus.headlines[0]);
  two.headlines.push_back(synth.corpus.headlines[1]);
  const std::uint64_t seed = 77;
  const auto exp = curio::exposure(model, two, seed, 16);
  REQUIRE(exp.probs.size() == 3);
  REQUIRE(exp.source_size == 2);

  const auto d0 = curio::infer(model, two.headlines[0].tokens, 16,
                               curio::derive_seed(seed, two.headlines[0].id));
  const auto d1 = curio::infer(model, two.headlines[1].tokens, 16,
                               curio::derive_seed(seed, two.headlines[1].id));
  Dist mean(3);
  for (int k = 0; k < 3; ++k) mean[k] = (d0.probs[k] + d1.probs[k]) / 2.0;
  const auto expected = curio::smooth_distribution(mean);
  REQUIRE(exp.probs == expected);

  REQUIRE_THROWS_WITH(curio::exposure(model, curio::ReferenceCorpus{}, 1),
                      Catch::Matchers::ContainsSubstring("empty"));
}

TEST_CASE("novelty features vanish when a headline matches exposure") {
  const auto synth = testutil::make_synthetic_corpus(31, 120, 20);
  const auto model = curio::train_lda(synth.corpus, 3, 0.5, 0.01, 20, 4);
  const auto exp = curio::exposure(model, synth.corpus, 9, 16);

  curio::TopicDistribution same;
  same.probs = exp.probs;
  const auto f = curio::novelty_features(same, exp);
  REQUIRE(f.kl >= 0.0);
  REQUIRE(f.kl < 1e-9);
  REQUIRE(f.hellinger >= 0.0);
  REQUIRE(f.hellinger < 1e-9);
}

TEST_CASE("novelty grows with distance from exposure") {
  const auto synth = testutil::make_synthetic_corpus(37, 120, 20);
  const auto model = curio::train_lda(synth.corpus, 3, 0.5, 0.01, 20, 4);
  const auto exp = curio::exposure(model, synth.corpus, 9, 16);

  curio::TopicDistribution close, far;
  close.probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  far.probs = {0.98, 0.01, 0.01};
  const auto f_close = curio::novelty_features(close, exp);
  const auto f_far = curio::novelty_features(far, exp);
  // The synthetic exposure is near-uniform, so a concentrated headline is
  // farther from it on both metrics.
  REQUIRE(f_far.kl > f_close.kl);
  REQUIRE(f_far.hellinger > f_close.hellinger);
  REQUIRE(f_far.kl > 0.0);

  curio::TopicDistribution wrong;
  wrong.probs = {0.5, 0.5};
  REQUIRE_THROWS_WITH(curio::novelty_features(wrong, exp),
                      Catch::Matchers::ContainsSubstring("mismatch"));
}
