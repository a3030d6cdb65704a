#include <gtest/gtest.h>

#include <random>

#include "bass/metrics.hpp"
#include "test_util.hpp"

namespace bass {
namespace {

FeatureVector fv(std::vector<float> v) { return FeatureVector(std::move(v), FeatureSource::image); }

TEST(FeatureVector, RejectsDegenerate) {
  EXPECT_THROW(fv({}), DegenerateFeatureError);
  EXPECT_THROW(fv({0, 0, 0}), DegenerateFeatureError);
  EXPECT_THROW(fv({1, std::numeric_limits<float>::quiet_NaN()}), DegenerateFeatureError);
}

TEST(Cosine, Examples) {
  EXPECT_DOUBLE_EQ(cosine(fv({3, 4}), fv({3, 4})), 1.0);
  EXPECT_DOUBLE_EQ(cosine(fv({1, 0}), fv({0, 1})), 0.0);
  EXPECT_NEAR(cosine(fv({1, 2}), fv({2, 1})), 0.8, 1e-15);
  EXPECT_THROW(cosine(fv({1, 2}), fv({1, 2, 3})), ShapeError);
}

TEST(Cosine, SymmetricScaleInvariantBounded) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<float> scale(1e-3f, 1e3f);
  for (int i = 0; i < 500; ++i) {
    const std::size_t d = 1 + rng() % 64;
    FeatureVector a(testing::random_vector(rng, d), FeatureSource::image);
    FeatureVector b(testing::random_vector(rng, d), FeatureSource::image);
    const double ab = cosine(a, b);
    EXPECT_EQ(ab, cosine(b, a));
    EXPECT_NEAR(cosine(a.scaled(scale(rng)), b), ab, 1e-6);
    EXPECT_LE(std::abs(ab), 1.0 + 1e-6);
  }
}

TEST(BalanceReport, Examples) {
  auto p = fv({1, 0, 0});
  auto cand = fv({0, 1, 0});
  auto r = balance_report(cand, p, p, fv({0, 1, 1}), fv({0, 0, 1}));
  EXPECT_EQ(r.text_balance, 0.0);
  EXPECT_EQ(r.text_avg_sim, 0.0);
  EXPECT_NEAR(r.image_avg_sim, (std::sqrt(0.5) + 0.0) / 2, 1e-12);
  EXPECT_NEAR(r.image_balance, std::sqrt(0.5), 1e-12);
}

TEST(BalanceReport, DifferenceFormOnlyChangesImageAverage) {
  auto a = balance_from_similarities(0.3, 0.1, 0.6, 0.2, ImageAverageForm::sum);
  auto b = balance_from_similarities(0.3, 0.1, 0.6, 0.2, ImageAverageForm::difference);
  EXPECT_DOUBLE_EQ(a.image_avg_sim, 0.4);
  EXPECT_DOUBLE_EQ(b.image_avg_sim, 0.2);
  EXPECT_EQ(a.text_balance, b.text_balance);
  EXPECT_EQ(a.image_balance, b.image_balance);
  EXPECT_EQ(a.text_avg_sim, b.text_avg_sim);
}

TEST(BalanceReport, ReconstructionIdentityAndRanges) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    std::vector<FeatureVector> v;
    for (int k = 0; k < 5; ++k) v.emplace_back(testing::random_vector(rng, 16), FeatureSource::image);
    auto r = balance_report(v[0], v[1], v[2], v[3], v[4]);
    const double c1 = cosine(v[0], v[1]);
    EXPECT_NEAR(r.text_balance, std::abs(2 * (c1 - r.text_avg_sim)), 1e-12);
    EXPECT_GE(r.text_balance, 0.0);
    EXPECT_LE(r.text_balance, 2.0);
    EXPECT_LE(r.image_balance, 2.0);
    EXPECT_LE(std::abs(r.text_avg_sim), 1.0);
    EXPECT_LE(std::abs(r.image_avg_sim), 1.0);
  }
}

}  // namespace
}  // namespace bass
