#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace mcaixi {

// Shared cumulative-log tables backing the KT estimator:
//   half(k) = sum_{i<k} log(i + 1/2)
//   fact(k) = sum_{i<k} log(i + 1)  = log k!
//
// Keeping the block probability a pure function of the counts (rather than a
// running sum in data order) makes it independent of update order, exact
// under revert, and reproducible when a snapshot is reloaded. Values are
// computed once per process and are safe to read from many threads; growth
// is serialised. Beyond the table limit the lgamma form is used, which is
// equally pure.
class KtLog {
 public:
  static double half(std::uint64_t k) {
    if (k < kLimit) return instance().lookup(0, k);
    return std::lgamma(static_cast<double>(k) + 0.5) - kLgammaHalf;
  }

  static double fact(std::uint64_t k) {
    if (k < kLimit) return instance().lookup(1, k);
    return std::lgamma(static_cast<double>(k) + 1.0);
  }

 private:
  static constexpr std::uint64_t kChunkBits = 14;
  static constexpr std::uint64_t kChunkSize = 1ULL << kChunkBits;
  static constexpr std::uint64_t kLimit = 1ULL << 20;
  static constexpr std::uint64_t kNumChunks = kLimit >> kChunkBits;
  static constexpr double kLgammaHalf = 0.5723649429247000870717136756765294;  // lgamma(1/2)

  struct Table {
    std::atomic<double*> chunks[kNumChunks] = {};
    std::uint64_t grown = 0;  // chunks published so far
    double carry = 0.0;       // running sum at the end of the grown region
  };

  static KtLog& instance() {
    static KtLog log;
    return log;
  }

  double lookup(int which, std::uint64_t k) {
    Table& t = tables_[which];
    const std::uint64_t chunk = k >> kChunkBits;
    double* data = t.chunks[chunk].load(std::memory_order_acquire);
    if (!data) {
      grow(which, chunk);
      data = t.chunks[chunk].load(std::memory_order_acquire);
    }
    return data[k & (kChunkSize - 1)];
  }

  void grow(int which, std::uint64_t upto_chunk) {
    std::lock_guard<std::mutex> lock(mutex_);
    Table& t = tables_[which];
    while (t.grown <= upto_chunk) {
      auto data = std::make_unique<double[]>(kChunkSize);
      double acc = t.carry;
      const std::uint64_t base = t.grown << kChunkBits;
      for (std::uint64_t i = 0; i < kChunkSize; ++i) {
        data[i] = acc;
        const double term = static_cast<double>(base + i) + (which == 0 ? 0.5 : 1.0);
        acc += std::log(term);
      }
      t.carry = acc;
      t.chunks[t.grown].store(data.release(), std::memory_order_release);
      ++t.grown;
    }
  }

  Table tables_[2];
  std::mutex mutex_;
};

// Krichevsky-Trofimov estimator state: zero/one counts plus the natural log
// of the block probability of everything this estimator has seen.
struct KtCounts {
  std::uint64_t zeros = 0;
  std::uint64_t ones = 0;
  double log_block = 0.0;

  // Pr(next = bit): (c_bit + 1/2) / (n + 1).
  double predict(int bit) const {
    const double c = static_cast<double>(bit ? ones : zeros);
    const double n = static_cast<double>(zeros + ones);
    return (c + 0.5) / (n + 1.0);
  }

  void update(int bit) {
    ++(bit ? ones : zeros);
    log_block = block_log(zeros, ones);
  }

  void revert(int bit) {
    std::uint64_t& c = bit ? ones : zeros;
    if (c == 0) throw std::logic_error("KtCounts::revert: no matching count");
    --c;
    log_block = block_log(zeros, ones);
  }

  bool fresh() const { return zeros == 0 && ones == 0; }

  // log Pr_kt of any string with a zeros and b ones (order does not matter).
  static double block_log(std::uint64_t a, std::uint64_t b) {
    return KtLog::half(a) + KtLog::half(b) - KtLog::fact(a + b);
  }

  friend bool operator==(const KtCounts&, const KtCounts&) = default;
};

}  // namespace mcaixi
