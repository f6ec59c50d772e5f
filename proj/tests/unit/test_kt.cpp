#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mcaixi/kt.hpp"

using namespace mcaixi;

namespace {

// Sequential-product oracle: multiply the per-bit predictions directly.
double sequential_log_block(const std::vector<int>& bits) {
  double a = 0, b = 0, logp = 0.0;
  for (int bit : bits) {
    const double p = ((bit ? b : a) + 0.5) / (a + b + 1.0);
    logp += std::log(p);
    (bit ? b : a) += 1.0;
  }
  return logp;
}

}  // namespace

TEST_CASE("kt predictions follow the (c + 1/2) / (n + 1) rule") {
  KtCounts c;
  CHECK(c.predict(1) == 0.5);
  CHECK(c.predict(0) == 0.5);

  c = KtCounts{1, 3, 0.0};
  CHECK(c.predict(1) == Catch::Approx(0.7).epsilon(1e-15));

  c = KtCounts{2, 0, 0.0};
  CHECK(c.predict(1) == Catch::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("predictions for the two symbols sum to one") {
  KtCounts c;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    CHECK(c.predict(0) + c.predict(1) == Catch::Approx(1.0).margin(1e-15));
    c.update(static_cast<int>(rng() & 1));
  }
}

TEST_CASE("update accumulates the log block probability") {
  KtCounts c;
  c.update(1);
  CHECK(c.zeros == 0);
  CHECK(c.ones == 1);
  CHECK(c.log_block == Catch::Approx(std::log(0.5)).epsilon(1e-15));

  KtCounts d;
  for (int bit : {0, 0, 1, 1}) d.update(bit);
  CHECK(std::exp(d.log_block) == Catch::Approx(3.0 / 128.0).epsilon(1e-13));

  KtCounts e;
  for (int bit : {0, 1}) e.update(bit);
  CHECK(e.log_block == Catch::Approx(std::log(1.0 / 8.0)).epsilon(1e-13));
}

TEST_CASE("revert is the exact inverse of update") {
  KtCounts c;
  c.update(1);
  c.revert(1);
  CHECK(c == KtCounts{});

  KtCounts d{5, 7, KtCounts::block_log(5, 7)};
  const KtCounts before = d;
  d.update(0);
  d.revert(0);
  CHECK(d == before);

  KtCounts e;
  for (int bit : {0, 0, 1, 1}) e.update(bit);
  for (int bit : {1, 1, 0, 0}) e.revert(bit);
  CHECK(e == KtCounts{});

  CHECK_THROWS_AS(e.revert(1), std::logic_error);
}

TEST_CASE("block probability is exchangeable") {
  // All permutations of strings up to length 6: the block probability is a
  // pure function of the counts, so every ordering gives the same value.
  for (int len = 1; len <= 6; ++len) {
    for (int ones = 0; ones <= len; ++ones) {
      std::vector<int> bits(static_cast<std::size_t>(len), 0);
      std::fill(bits.begin(), bits.begin() + ones, 1);
      std::sort(bits.begin(), bits.end());
      double reference = 0.0;
      bool first = true;
      do {
        KtCounts c;
        for (int bit : bits) c.update(bit);
        if (first) {
          reference = c.log_block;
          first = false;
        }
        CHECK(c.log_block == reference);  // bit-identical
      } while (std::next_permutation(bits.begin(), bits.end()));
    }
  }
}

TEST_CASE("block probability matches the sequential product oracle") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> bits;
    const int len = 1 + static_cast<int>(rng() % 200);
    for (int i = 0; i < len; ++i) bits.push_back(static_cast<int>(rng() & 1));
    KtCounts c;
    for (int bit : bits) c.update(bit);
    CHECK(c.log_block == Catch::Approx(sequential_log_block(bits)).margin(1e-10));
  }
}

TEST_CASE("closed form: prod (i+1/2) prod (j+1/2) / (a+b)!") {
  for (int a = 0; a <= 6; ++a) {
    for (int b = 0; b <= 6; ++b) {
      double expected = 1.0;
      for (int i = 0; i < a; ++i) expected *= i + 0.5;
      for (int j = 0; j < b; ++j) expected *= j + 0.5;
      for (int k = 1; k <= a + b; ++k) expected /= k;
      CHECK(std::exp(KtCounts::block_log(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b))) ==
            Catch::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("large counts stay finite and consistent across the table limit") {
  // The cumulative tables hand over to the lgamma form above 2^20.
  const std::uint64_t near = (1ULL << 20) - 3;
  for (std::uint64_t k = near; k < near + 6; ++k) {
    const double a = KtCounts::block_log(k, 10);
    CHECK(std::isfinite(a));
    CHECK(a < 0.0);
  }
  // Consecutive values step by log p with p in (0,1).
  const double l1 = KtCounts::block_log(1 << 21, 5);
  const double l2 = KtCounts::block_log((1 << 21) + 1, 5);
  CHECK(l2 < l1);
  CHECK(l2 - l1 > std::log(0.5) * 2);
}
