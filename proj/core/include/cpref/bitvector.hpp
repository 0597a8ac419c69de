#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cpref {

// Fixed-width bit vector backed by 64-bit words. Bits past width() are kept zero.
class BitVector {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitVector() = default;
  explicit BitVector(std::size_t width, bool value = false);

  std::size_t width() const noexcept { return width_; }
  std::size_t word_count() const noexcept { return words_.size(); }

  bool test(std::size_t pos) const noexcept {
    return (words_[pos / kWordBits] >> (pos % kWordBits)) & Word{1};
  }
  void set(std::size_t pos) noexcept { words_[pos / kWordBits] |= Word{1} << (pos % kWordBits); }
  void reset(std::size_t pos) noexcept { words_[pos / kWordBits] &= ~(Word{1} << (pos % kWordBits)); }

  std::size_t count() const noexcept;
  bool none() const noexcept;
  bool any() const noexcept { return !none(); }

  bool is_subset_of(const BitVector& other) const noexcept;
  bool intersects(const BitVector& other) const noexcept;

  BitVector& operator&=(const BitVector& other) noexcept;
  BitVector& operator|=(const BitVector& other) noexcept;
  // this &= ~other
  BitVector& subtract(const BitVector& other) noexcept;

  friend BitVector operator&(BitVector lhs, const BitVector& rhs) noexcept { return lhs &= rhs; }
  friend BitVector operator|(BitVector lhs, const BitVector& rhs) noexcept { return lhs |= rhs; }

  friend bool operator==(const BitVector&, const BitVector&) = default;
  // Orders by width, then by bit position 0 first (lowest position set wins).
  friend std::strong_ordering operator<=>(const BitVector& lhs, const BitVector& rhs) noexcept;

  std::span<const Word> words() const noexcept { return words_; }
  std::span<Word> words() noexcept { return words_; }

  // Clears any bits at positions >= width(); call after writing raw words.
  void trim() noexcept;

  // '1'/'0' per position, position 0 leftmost.
  std::string to_string() const;

  std::size_t hash() const noexcept;

  template <class F>
  void for_each_set(F&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word word = words_[w];
      while (word != 0) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(word));
        fn(w * kWordBits + bit);
        word &= word - 1;
      }
    }
  }

  std::vector<std::size_t> positions() const;

 private:
  std::size_t width_ = 0;
  std::vector<Word> words_;
};

// popcount(a & b) without materialising the intersection.
std::size_t and_count(const BitVector& a, const BitVector& b) noexcept;

struct BitVectorHash {
  std::size_t operator()(const BitVector& v) const noexcept { return v.hash(); }
};

}  // namespace cpref
