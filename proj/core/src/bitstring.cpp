#include "qsd/bitstring.hpp"

#include "qsd/errors.hpp"

#include <array>
#include <vector>

namespace qsd {

BitString BitString::parse(std::string_view text) {
  if (text.empty()) throw ParseError("empty bit-string");
  BitString out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[text.size() - 1 - i];
    if (c == '1') {
      out.bits_.set(i);
    } else if (c != '0') {
      throw ParseError("invalid character '" + std::string(1, c) + "' in bit-string");
    }
  }
  return out;
}

namespace {

// splitmix64 finalizer; strong enough that bucket indices spread well even
// for structured inputs like Neel-state neighborhoods.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

} // namespace

std::uint64_t BitString::hash64() const {
  std::array<Block, 64> stack_blocks;
  std::vector<Block> heap_blocks;
  const std::size_t n = bits_.num_blocks();
  const Block* blocks = nullptr;
  if (n <= stack_blocks.size()) {
    boost::to_block_range(bits_, stack_blocks.begin());
    blocks = stack_blocks.data();
  } else {
    heap_blocks.resize(n);
    boost::to_block_range(bits_, heap_blocks.begin());
    blocks = heap_blocks.data();
  }
  std::uint64_t h = mix64(static_cast<std::uint64_t>(bits_.size()));
  for (std::size_t i = 0; i < n; ++i) h = mix64(h ^ blocks[i]);
  return h;
}

std::string BitString::str() const {
  std::string s;
  boost::to_string(bits_, s);
  return s;
}

} // namespace qsd
