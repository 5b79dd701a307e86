#include "qsd/subspace.hpp"

#include "qsd/errors.hpp"

#include <algorithm>
#include <bit>

namespace qsd {

void Subspace::reserve_table(std::size_t expected) {
  // Fixed bucket count with load factor <= 0.5; the cardinality is known
  // up front so the table is never grown.
  std::size_t buckets = std::bit_ceil(std::max<std::size_t>(16, expected * 2));
  table_.assign(buckets, kEmpty);
  occupancy_.resize(0);
  occupancy_.resize(buckets);
  mask_ = buckets - 1;
}

bool Subspace::insert(const BitString& b) {
  std::size_t bucket = b.hash64() & mask_;
  while (occupancy_.test(bucket)) {
    if (entries_[table_[bucket]] == b) return false;
    bucket = (bucket + 1) & mask_;
  }
  table_[bucket] = entries_.size();
  occupancy_.set(bucket);
  entries_.push_back(b);
  return true;
}

std::optional<std::size_t> Subspace::find(const BitString& b) const {
  if (entries_.empty()) return std::nullopt;
  std::size_t bucket = b.hash64() & mask_;
  while (true) {
    if (!occupancy_.test(bucket)) return std::nullopt;
    const std::uint64_t e = table_[bucket];
    if (entries_[e] == b) return static_cast<std::size_t>(e);
    bucket = (bucket + 1) & mask_;
  }
}

std::optional<std::size_t> Subspace::find_no_occupancy_gate(const BitString& b) const {
  if (entries_.empty()) return std::nullopt;
  std::size_t bucket = b.hash64() & mask_;
  while (true) {
    const std::uint64_t e = table_[bucket];
    if (e == kEmpty) return std::nullopt;
    if (entries_[e] == b) return static_cast<std::size_t>(e);
    bucket = (bucket + 1) & mask_;
  }
}

void Subspace::refresh_sorted_flag() {
  integer_sorted_ = true;
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (!integer_less(entries_[i - 1], entries_[i])) {
      integer_sorted_ = false;
      break;
    }
  }
}

Subspace Subspace::from_bitstrings(std::span<const BitString> strings, std::uint32_t num_qubits) {
  if (num_qubits == 0) throw ValidationError("subspace width must be at least 1");
  Subspace s;
  s.num_qubits_ = num_qubits;
  s.reserve_table(strings.size());
  s.entries_.reserve(strings.size());
  for (std::size_t i = 0; i < strings.size(); ++i) {
    if (strings[i].width() != num_qubits) {
      throw ValidationError("bit-string " + std::to_string(i) + " has width " +
                            std::to_string(strings[i].width()) + ", expected " +
                            std::to_string(num_qubits));
    }
    s.insert(strings[i]);
  }
  s.refresh_sorted_flag();
  return s;
}

Subspace Subspace::sorted_by_integer_value() const {
  std::vector<BitString> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(),
            [](const BitString& a, const BitString& b) { return integer_less(a, b); });
  return from_bitstrings(sorted, num_qubits_);
}

BitString column_bitstring(const BitString& row, std::span<const std::uint32_t> structure) {
  BitString col = row;
  for (std::uint32_t idx : structure) col.flip(idx);
  return col;
}

} // namespace qsd
