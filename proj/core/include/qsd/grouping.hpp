#pragma once

#include "qsd/bitstring.hpp"
#include "qsd/operators.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace qsd {

/// Number of distinct ladder-integer values a fermionic group can hold
/// (at most four ladder operators per term), plus one for the end pointer.
inline constexpr int kLadderBuckets = 16;

/// A QubitOperator split into its diagonal part and off-diagonal groups.
///
/// Terms of a group share one off-diagonal structure, so they address the
/// same matrix elements. group g spans offdiag_terms[group_ptrs[g],
/// group_ptrs[g+1]). In fermionic mode terms within a group are ascending
/// by ladder integer and int_ptrs()[g][v] .. [v+1] bounds bucket v.
///
/// Within a group, terms are ordered so that a term and its adjoint occupy
/// mirrored positions; lower-triangle evaluation relies on this to make
/// mirrored sums agree bitwise with direct evaluation.
class GroupedHamiltonian {
public:
  GroupedHamiltonian() = default;

  const std::vector<QubitTerm>& diagonal_terms() const { return diagonal_terms_; }
  const std::vector<QubitTerm>& offdiag_terms() const { return offdiag_terms_; }
  const std::vector<std::int64_t>& group_ptrs() const { return group_ptrs_; }
  const std::vector<std::vector<std::uint32_t>>& group_structures() const {
    return group_structures_;
  }
  const std::vector<std::uint32_t>& group_msob() const { return group_msob_; }
  const std::vector<std::array<std::int64_t, kLadderBuckets + 1>>& int_ptrs() const {
    return int_ptrs_;
  }
  /// XOR masks over num_qubits bits, one per group (structure bits set).
  const std::vector<BitString>& group_masks() const { return group_masks_; }

  std::size_t num_groups() const { return group_structures_.size(); }
  std::uint32_t num_qubits() const { return num_qubits_; }
  bool fermionic() const { return fermionic_; }
  bool hermitian() const { return hermitian_; }

  /// <b|H_diag|b> for an arbitrary bit-string of matching width.
  double diagonal_value(const BitString& row) const;

  friend GroupedHamiltonian group_terms(const QubitOperator& op, bool fermionic);
  friend GroupedHamiltonian trim_groups(const GroupedHamiltonian& gh,
                                        std::span<const double> subspace_diagonal, double tol,
                                        struct TrimInfo* info);

private:
  void finalize_groups(std::vector<std::int64_t> boundaries);

  std::vector<QubitTerm> diagonal_terms_;
  std::vector<QubitTerm> offdiag_terms_;
  std::vector<std::int64_t> group_ptrs_;
  std::vector<std::vector<std::uint32_t>> group_structures_;
  std::vector<std::uint32_t> group_msob_;
  std::vector<std::array<std::int64_t, kLadderBuckets + 1>> int_ptrs_;
  std::vector<BitString> group_masks_;
  std::uint32_t num_qubits_ = 0;
  bool fermionic_ = false;
  bool hermitian_ = false;
};

/// Integer encoding of a term's ladder operators along `structure`
/// (ascending): bit k is 1 iff the code at structure[k] is Raise.
/// Precondition: the term's off-diagonal codes are all ladder operators
/// located exactly at `structure`.
int ladder_integer(const QubitTerm& term, std::span<const std::uint32_t> structure);

/// Row-side counterpart: bit k of the result is the row bit at
/// structure[k]. A term contributes to this row only when its ladder
/// integer equals this value.
int row_ladder_integer(const BitString& row, std::span<const std::uint32_t> structure);

/// Partitions `op` (like-terms combined) into the diagonal part and
/// contiguous off-diagonal groups, stably sorted by (off-diagonal weight,
/// structure). With `fermionic` set, codes are restricted to {Z, P0, P1,
/// Lower, Raise} (X or Y raise ValidationError) and groups are bucketed by
/// ladder integer with int_ptrs populated.
GroupedHamiltonian group_terms(const QubitOperator& op, bool fermionic);

struct TrimInfo {
  std::size_t groups_before = 0;
  std::size_t groups_after = 0;
  double min_splitting = 0.0;
  bool disabled_zero_splitting = false;
};

/// Removes whole off-diagonal groups whose largest |coefficient|, relative
/// to the smallest nonzero diagonal energy splitting over the subspace, is
/// below `tol`. The diagonal group is never trimmed. When every diagonal
/// value coincides the splitting is undefined and trimming is disabled.
GroupedHamiltonian trim_groups(const GroupedHamiltonian& gh,
                               std::span<const double> subspace_diagonal, double tol,
                               TrimInfo* info = nullptr);

} // namespace qsd
