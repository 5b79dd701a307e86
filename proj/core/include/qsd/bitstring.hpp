#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace qsd {

/// A computational-basis label of arbitrary width.
///
/// Bit 0 is the least-significant bit (qubit 0). The text form is written
/// most-significant bit leftmost, so "0101" has bits 0 and 2 set.
class BitString {
public:
  using Block = std::uint64_t;

  BitString() = default;
  explicit BitString(std::size_t width) : bits_(width) {}

  /// Parses a binary string (MSB leftmost). Throws ParseError on anything
  /// other than '0'/'1' or on an empty string.
  static BitString parse(std::string_view text);

  std::size_t width() const { return bits_.size(); }
  bool test(std::size_t i) const { return bits_.test(i); }
  void set(std::size_t i, bool value = true) { bits_.set(i, value); }
  void flip(std::size_t i) { bits_.flip(i); }
  std::size_t popcount() const { return bits_.count(); }

  BitString& operator^=(const BitString& other) {
    bits_ ^= other.bits_;
    return *this;
  }
  friend BitString operator^(BitString a, const BitString& b) {
    a ^= b;
    return a;
  }

  bool operator==(const BitString& other) const { return bits_ == other.bits_; }

  /// Numeric comparison of equal-width strings viewed as unsigned integers.
  friend bool integer_less(const BitString& a, const BitString& b) {
    return a.bits_ < b.bits_;
  }

  /// 64-bit hash over the underlying words (width-dependent).
  std::uint64_t hash64() const;

  /// MSB-leftmost text form.
  std::string str() const;

private:
  boost::dynamic_bitset<Block> bits_;
};

} // namespace qsd
