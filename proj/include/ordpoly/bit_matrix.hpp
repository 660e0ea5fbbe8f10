#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ordpoly {

/// Square boolean matrix with one packed bit row per node.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  std::size_t size() const noexcept { return n_; }

  bool test(std::size_t i, std::size_t j) const {
    return ((row(i)[j / 64] >> (j % 64)) & 1U) != 0;
  }
  void set(std::size_t i, std::size_t j) { row(i)[j / 64] |= std::uint64_t{1} << (j % 64); }
  void reset(std::size_t i, std::size_t j) { row(i)[j / 64] &= ~(std::uint64_t{1} << (j % 64)); }

  /// row(dst) |= row(src)
  void merge_row(std::size_t dst, std::size_t src) {
    std::uint64_t* d = row(dst);
    const std::uint64_t* s = row(src);
    for (std::size_t w = 0; w < words_; ++w) d[w] |= s[w];
  }

  std::size_t row_count(std::size_t i) const {
    std::size_t c = 0;
    const std::uint64_t* r = row(i);
    for (std::size_t w = 0; w < words_; ++w) c += static_cast<std::size_t>(std::popcount(r[w]));
    return c;
  }

  /// Calls f(j) for every set bit j of row i, in increasing order.
  template <class F>
  void for_each_in_row(std::size_t i, F&& f) const {
    const std::uint64_t* r = row(i);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = r[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        f(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  std::span<const std::uint64_t> row_words(std::size_t i) const { return {row(i), words_}; }
  std::size_t words_per_row() const noexcept { return words_; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::uint64_t* row(std::size_t i) { return bits_.data() + i * words_; }
  const std::uint64_t* row(std::size_t i) const { return bits_.data() + i * words_; }

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace ordpoly
