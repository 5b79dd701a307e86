#pragma once

#include "qsd/bitstring.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qsd {

/// Insertion-order-indexed set of equal-width bit-strings with O(1)
/// membership lookup.
///
/// Entries live in a flat vector (indexed access in insertion order, safe
/// for concurrent reads); an open-addressing table maps hashes to entry
/// ordinals. Bucket occupancy is mirrored in a bit-set that is consulted
/// before the bucket array itself, so misses landing on an empty home
/// bucket terminate after a single bit probe. The table is sized up front
/// to a load factor of at most 0.5 and never rehashed; deletion is
/// unsupported.
class Subspace {
public:
  Subspace() = default;

  /// Deduplicates (first occurrence wins) and validates uniform width.
  static Subspace from_bitstrings(std::span<const BitString> strings, std::uint32_t num_qubits);

  std::size_t dim() const { return entries_.size(); }
  std::uint32_t num_qubits() const { return num_qubits_; }
  const BitString& get(std::size_t i) const { return entries_[i]; }
  const std::vector<BitString>& entries() const { return entries_; }

  /// Ordinal index of b, or nullopt. The occupancy bit-set short-circuits
  /// probes of empty buckets.
  std::optional<std::size_t> find(const BitString& b) const;
  bool contains(const BitString& b) const { return find(b).has_value(); }

  /// Verification hook: identical contract to find() with the occupancy
  /// fast path disabled.
  std::optional<std::size_t> find_no_occupancy_gate(const BitString& b) const;

  /// True when entries are ascending by integer value (set at build).
  bool integer_sorted() const { return integer_sorted_; }

  /// Same membership set, re-indexed in ascending integer order.
  Subspace sorted_by_integer_value() const;

  std::size_t bucket_count() const { return table_.size(); }
  std::size_t home_bucket(const BitString& b) const { return b.hash64() & mask_; }

private:
  void reserve_table(std::size_t expected);
  bool insert(const BitString& b);
  void refresh_sorted_flag();

  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

  std::vector<BitString> entries_;
  std::vector<std::uint64_t> table_; // entry ordinal per bucket
  boost::dynamic_bitset<std::uint64_t> occupancy_;
  std::uint64_t mask_ = 0;
  std::uint32_t num_qubits_ = 0;
  bool integer_sorted_ = false;
};

/// Column label for a row under a given off-diagonal structure: the row
/// with bits flipped at the structure indices. Involutive.
BitString column_bitstring(const BitString& row, std::span<const std::uint32_t> structure);

} // namespace qsd
