#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bass/digest.hpp"
#include "bass/embedding.hpp"

namespace bass {
namespace {

PromptEmbedding make(std::size_t h, std::size_t w, std::vector<float> v, std::string prompt = "p",
                     std::string enc = "enc") {
  return PromptEmbedding(h, w, std::move(v), std::move(prompt), std::move(enc));
}

PromptEmbedding random_embedding(std::mt19937_64& rng, std::size_t h, std::size_t w, const std::string& prompt) {
  std::normal_distribution<float> g(0.0f, 3.0f);
  std::vector<float> v(h * w);
  for (auto& x : v) x = g(rng);
  return make(h, w, std::move(v), prompt);
}

SwapVector random_swap(std::mt19937_64& rng, std::size_t w) {
  SwapVector f;
  for (std::size_t i = 0; i < w; ++i) f.bits.push_back(rng() & 1);
  return f;
}

TEST(PromptEmbedding, RejectsBadShapeAndNonFinite) {
  EXPECT_THROW(make(2, 2, {1, 2, 3}), ShapeError);
  EXPECT_THROW(make(0, 2, {}), ShapeError);
  EXPECT_THROW(make(1, 2, {1, std::numeric_limits<float>::quiet_NaN()}), InvalidArgument);
  EXPECT_THROW(make(1, 1, {std::numeric_limits<float>::infinity()}), InvalidArgument);
}

TEST(SwapColumns, WorkedExample) {
  auto e1 = make(2, 2, {1, 2, 3, 4}, "a");
  auto e2 = make(2, 2, {5, 6, 7, 8}, "b");
  auto out = swap_columns(e1, e2, SwapVector{{1, 0}, 3});
  EXPECT_EQ(std::vector<float>(out.values().begin(), out.values().end()), (std::vector<float>{1, 6, 3, 8}));
  ASSERT_TRUE(out.parents());
  EXPECT_EQ(out.parents()->first, "a");
  EXPECT_EQ(out.parents()->second, "b");
  EXPECT_EQ(out.swap_id(), 3);
}

TEST(SwapColumns, AllOnesAndAllZerosReturnInputs) {
  auto e1 = make(2, 3, {1, 2, 3, 4, 5, 6});
  auto e2 = make(2, 3, {-1, -2, -3, -4, -5, -6});
  auto ones = swap_columns(e1, e2, SwapVector{{1, 1, 1}});
  auto zeros = swap_columns(e1, e2, SwapVector{{0, 0, 0}});
  EXPECT_TRUE(std::equal(ones.values().begin(), ones.values().end(), e1.values().begin()));
  EXPECT_TRUE(std::equal(zeros.values().begin(), zeros.values().end(), e2.values().begin()));
}

TEST(SwapColumns, Errors) {
  auto e1 = make(2, 2, {1, 2, 3, 4});
  EXPECT_THROW(swap_columns(e1, make(1, 4, {1, 2, 3, 4}), SwapVector{{1, 0}}), ShapeError);
  EXPECT_THROW(swap_columns(e1, make(2, 2, {1, 2, 3, 4}, "p", "other"), SwapVector{{1, 0}}),
               IncompatibleEncoderError);
  EXPECT_THROW(swap_columns(e1, e1, SwapVector{{1, 0, 1}}), ShapeError);
  EXPECT_THROW(swap_columns(e1, e1, SwapVector{{2, 0}}), InvalidArgument);
}

TEST(Mix, InterpolationAndRowSwap) {
  auto e1 = make(1, 1, {2});
  auto e2 = make(1, 1, {4});
  EXPECT_EQ(mix(e1, e2, LinearInterpolation{0.5}).at(0, 0), 3.0f);
  EXPECT_EQ(mix(e1, e2, LinearInterpolation{1.0}).at(0, 0), 2.0f);
  EXPECT_EQ(mix(e1, e2, LinearInterpolation{0.0}).at(0, 0), 4.0f);
  EXPECT_THROW(mix(e1, e2, LinearInterpolation{1.5}), InvalidArgument);
  EXPECT_THROW(mix(e1, e2, LinearInterpolation{-0.1}), InvalidArgument);

  auto a = make(2, 2, {1, 2, 3, 4});
  auto b = make(2, 2, {5, 6, 7, 8});
  auto rows = mix(a, b, RowSwap{{1, 0}});
  EXPECT_EQ(std::vector<float>(rows.values().begin(), rows.values().end()), (std::vector<float>{1, 2, 7, 8}));
  EXPECT_THROW(mix(a, b, RowSwap{{1, 0, 0}}), ShapeError);

  auto cols = mix(a, b, ColumnSwap{SwapVector{{0, 1}}});
  EXPECT_EQ(std::vector<float>(cols.values().begin(), cols.values().end()), (std::vector<float>{5, 2, 7, 4}));
}

TEST(Complement, FlipsAndInvolutes) {
  SwapVector f{{1, 0, 1}, 9};
  EXPECT_EQ(complement(f).bits, (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_EQ(complement(complement(f)), f);
}

TEST(SwapAlgebra, RandomizedIdentities) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + rng() % 6, w = 2 + rng() % 12;
    auto e1 = random_embedding(rng, h, w, "a");
    auto e2 = random_embedding(rng, h, w, "b");
    auto f = random_swap(rng, w);
    auto s = swap_columns(e1, e2, f);
    auto sc = swap_columns(e1, e2, complement(f));
    for (std::size_t i = 0; i < h * w; ++i) {
      const double lhs = double(s.values()[i]) + sc.values()[i];
      const double rhs = double(e1.values()[i]) + e2.values()[i];
      EXPECT_LE(std::abs(lhs - rhs), 1e-6 * std::max(1.0, std::abs(rhs)));
    }
    auto self = swap_columns(e1, e1, f);
    EXPECT_TRUE(std::equal(self.values().begin(), self.values().end(), e1.values().begin()));
    for (std::size_t c = 0; c < w; ++c)
      for (std::size_t r = 0; r < h; ++r) {
        const auto& src = f.bits[c] ? e1 : e2;
        EXPECT_EQ(std::bit_cast<std::uint32_t>(s.at(r, c)), std::bit_cast<std::uint32_t>(src.at(r, c)));
      }
  }
}

TEST(GenerateSwapSet, TwoColumnsHasOnlyTwoAdmissible) {
  auto s = generate_swap_set(2, 2, 99);
  ASSERT_EQ(s.size(), 2u);
  std::set<std::string> got{s[0].to_string(), s[1].to_string()};
  EXPECT_EQ(got, (std::set<std::string>{"01", "10"}));
  EXPECT_THROW(generate_swap_set(2, 3, 99), InfeasibleCountError);
  EXPECT_THROW(generate_swap_set(3, 7, 99), InfeasibleCountError);
  EXPECT_NO_THROW(generate_swap_set(3, 6, 99));
  EXPECT_THROW(generate_swap_set(1, 1, 0), InvalidArgument);
  EXPECT_THROW(generate_swap_set(4, 0, 0), InvalidArgument);
}

TEST(GenerateSwapSet, DeterministicDistinctNonDegenerate) {
  auto a = generate_swap_set(16, 200, 42);
  auto b = generate_swap_set(16, 200, 42);
  EXPECT_EQ(a, b);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, static_cast<int>(i));
    EXPECT_GT(a[i].ones(), 0u);
    EXPECT_LT(a[i].ones(), 16u);
    seen.insert(a[i].to_string());
  }
  EXPECT_EQ(seen.size(), 200u);
  EXPECT_NE(generate_swap_set(16, 200, 43), a);
}

// Regression fixture recorded from the SplitMix64-based generator.
TEST(GenerateSwapSet, GoldenW16N200Seed42) {
  auto s = generate_swap_set(16, 200, 42);
  std::string all;
  std::size_t ones = 0;
  for (const auto& f : s) {
    all += f.to_string() + "\n";
    ones += f.ones();
  }
  EXPECT_EQ(s[0].to_string(), "1000010101001110");
  EXPECT_EQ(s[1].to_string(), "0001101100111111");
  EXPECT_EQ(s[199].to_string(), "1011110011011101");
  EXPECT_EQ(ones, 1598u);
  EXPECT_EQ(sha256_hex(all), "087d5a04f2d08fb2e7a34eeb67f794457caeaf6a0abab6815e6c0cd4f3da21cb");
}

TEST(EmbeddingSerialization, RoundTripsBitExactly) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t h = 1 + rng() % 8, w = 1 + rng() % 16;
    std::vector<float> v(h * w);
    for (auto& x : v) {
      // arbitrary finite bit patterns, including subnormals and -0
      std::uint32_t bits;
      do bits = static_cast<std::uint32_t>(rng()); while (!std::isfinite(std::bit_cast<float>(bits)));
      x = std::bit_cast<float>(bits);
    }
    auto e = make(h, w, v, "A photo of frog", "enc/v1");
    auto bytes = serialize_embedding(e);
    EXPECT_EQ(bytes.substr(0, 8), "BASSEMB1");
    EXPECT_EQ(bytes.size(), 8 + 4 + 4 + 4 + 6 + 4 + 15 + 4 * h * w);
    auto back = deserialize_embedding(bytes);
    EXPECT_EQ(back, e);
    for (std::size_t i = 0; i < v.size(); ++i)
      EXPECT_EQ(std::bit_cast<std::uint32_t>(back.values()[i]), std::bit_cast<std::uint32_t>(v[i]));
  }
}

TEST(EmbeddingSerialization, RejectsCorruptInput) {
  auto bytes = serialize_embedding(make(1, 2, {1, 2}));
  EXPECT_THROW(deserialize_embedding(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(deserialize_embedding(bytes + "x"), FormatError);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_embedding(bad), FormatError);
}

}  // namespace
}  // namespace bass
