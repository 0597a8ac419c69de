#include "cpref/bitvector.hpp"

#include <algorithm>
#include <cassert>

namespace cpref {

namespace {

std::size_t words_for(std::size_t width) { return (width + BitVector::kWordBits - 1) / BitVector::kWordBits; }

}  // namespace

BitVector::BitVector(std::size_t width, bool value)
    : width_(width), words_(words_for(width), value ? ~Word{0} : Word{0}) {
  trim();
}

void BitVector::trim() noexcept {
  const std::size_t tail = width_ % kWordBits;
  if (tail != 0 && !words_.empty()) {
    words_.back() &= (Word{1} << tail) - 1;
  }
}

std::size_t BitVector::count() const noexcept {
  std::size_t total = 0;
  for (Word w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

bool BitVector::none() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
}

bool BitVector::is_subset_of(const BitVector& other) const noexcept {
  assert(width_ == other.width_);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

bool BitVector::intersects(const BitVector& other) const noexcept {
  assert(width_ == other.width_);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & other.words_[i]) != 0) return true;
  }
  return false;
}

BitVector& BitVector::operator&=(const BitVector& other) noexcept {
  assert(width_ == other.width_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) noexcept {
  assert(width_ == other.width_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BitVector& BitVector::subtract(const BitVector& other) noexcept {
  assert(width_ == other.width_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

std::strong_ordering operator<=>(const BitVector& lhs, const BitVector& rhs) noexcept {
  if (auto c = lhs.width_ <=> rhs.width_; c != 0) return c;
  for (std::size_t i = 0; i < lhs.words_.size(); ++i) {
    const auto a = lhs.words_[i];
    const auto b = rhs.words_[i];
    if (a == b) continue;
    // The vector holding the lowest differing position sorts first.
    const auto diff = a ^ b;
    const auto low = diff & (~diff + 1);
    return (a & low) != 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

std::string BitVector::to_string() const {
  std::string out(width_, '0');
  for_each_set([&](std::size_t pos) { out[pos] = '1'; });
  return out;
}

std::size_t BitVector::hash() const noexcept {
  // FNV-1a over the words, folded with the width.
  std::uint64_t h = 1469598103934665603ULL ^ width_;
  for (Word w : words_) {
    h ^= w;
    h *= 1099511628211ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

std::vector<std::size_t> BitVector::positions() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each_set([&](std::size_t pos) { out.push_back(pos); });
  return out;
}

std::size_t and_count(const BitVector& a, const BitVector& b) noexcept {
  assert(a.width() == b.width());
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t total = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) total += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  return total;
}

}  // namespace cpref
