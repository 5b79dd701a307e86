#include "qsd/grouping.hpp"

#include "qsd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace qsd {

int ladder_integer(const QubitTerm& term, std::span<const std::uint32_t> structure) {
  int value = 0;
  std::size_t k = 0;
  for (std::size_t p = 0; p < term.indices.size(); ++p) {
    if (!is_off_diagonal(term.codes[p])) continue;
    if (k >= structure.size() || term.indices[p] != structure[k] || !is_ladder(term.codes[p])) {
      throw ValidationError("ladder_integer: term does not match its group structure");
    }
    if (term.codes[p] == OpCode::Raise) value |= 1 << k;
    ++k;
  }
  if (k != structure.size()) {
    throw ValidationError("ladder_integer: term does not match its group structure");
  }
  return value;
}

int row_ladder_integer(const BitString& row, std::span<const std::uint32_t> structure) {
  int value = 0;
  for (std::size_t k = 0; k < structure.size(); ++k) {
    if (row.test(structure[k])) value |= 1 << k;
  }
  return value;
}

double GroupedHamiltonian::diagonal_value(const BitString& row) const {
  double sum = 0.0;
  for (const QubitTerm& t : diagonal_terms_) {
    double sign = 1.0;
    bool survives = true;
    for (std::size_t k = 0; k < t.indices.size(); ++k) {
      const bool bit = row.test(t.indices[k]);
      switch (t.codes[k]) {
        case OpCode::Z:
          if (bit) sign = -sign;
          break;
        case OpCode::P0:
          survives = !bit;
          break;
        case OpCode::P1:
          survives = bit;
          break;
        default:
          survives = false; // unreachable for diagonal terms
          break;
      }
      if (!survives) break;
    }
    if (survives) sum += sign * t.coefficient.real();
  }
  return sum;
}

namespace {

// Codes with both ladder symbols collapsed to one placeholder; terms that
// are adjoints of each other share this key.
std::vector<OpCode> adjoint_invariant_codes(const QubitTerm& t) {
  std::vector<OpCode> codes = t.codes;
  for (OpCode& c : codes) {
    if (c == OpCode::Raise) c = OpCode::Lower;
  }
  return codes;
}

} // namespace

void GroupedHamiltonian::finalize_groups(std::vector<std::int64_t> boundaries) {
  group_ptrs_ = std::move(boundaries);
  const std::size_t ng = group_ptrs_.empty() ? 0 : group_ptrs_.size() - 1;
  group_structures_.clear();
  group_msob_.clear();
  group_masks_.clear();
  int_ptrs_.clear();
  group_structures_.reserve(ng);
  group_msob_.reserve(ng);
  group_masks_.reserve(ng);

  for (std::size_t g = 0; g < ng; ++g) {
    const std::int64_t begin = group_ptrs_[g];
    const std::int64_t end = group_ptrs_[g + 1];
    auto structure = off_diagonal_structure(offdiag_terms_[begin]);
    group_msob_.push_back(structure.back());
    BitString mask(num_qubits_);
    for (std::uint32_t idx : structure) mask.set(idx);
    group_masks_.push_back(std::move(mask));

    if (fermionic_) {
      if (structure.size() > 4) {
        throw ValidationError("fermionic group with more than four ladder operators");
      }
      std::vector<int> ints;
      ints.reserve(static_cast<std::size_t>(end - begin));
      for (std::int64_t t = begin; t < end; ++t) {
        ints.push_back(ladder_integer(offdiag_terms_[t], structure));
      }
      if (!std::is_sorted(ints.begin(), ints.end())) {
        throw ValidationError("group terms not sorted by ladder integer");
      }
      std::array<std::int64_t, kLadderBuckets + 1> ptrs{};
      std::int64_t t = begin;
      for (int v = 0; v < kLadderBuckets; ++v) {
        ptrs[v] = t;
        while (t < end && ints[static_cast<std::size_t>(t - begin)] == v) ++t;
      }
      ptrs[kLadderBuckets] = end;
      int_ptrs_.push_back(ptrs);
    }
    group_structures_.push_back(std::move(structure));
  }
}

GroupedHamiltonian group_terms(const QubitOperator& op, bool fermionic) {
  GroupedHamiltonian gh;
  gh.num_qubits_ = op.num_qubits();
  gh.fermionic_ = fermionic;
  gh.hermitian_ = is_hermitian(op);

  for (const QubitTerm& t : op.terms()) {
    if (t.off_diagonal_weight() == 0) {
      const double scale = std::max(1.0, std::abs(t.coefficient));
      if (std::abs(t.coefficient.imag()) > 1e-12 * scale) {
        throw ValidationError("diagonal term with non-real coefficient");
      }
      gh.diagonal_terms_.push_back(t);
    } else {
      if (fermionic) {
        for (OpCode c : t.codes) {
          if (c == OpCode::X || c == OpCode::Y) {
            throw ValidationError("fermionic mode forbids X/Y codes (extended alphabet only)");
          }
        }
      }
      gh.offdiag_terms_.push_back(t);
    }
  }

  // Group order: off-diagonal weight, then structure lexicographically.
  // Within a group: ladder integer (fermionic), then the adjoint-invariant
  // key, then raw codes; adjoint partners end up in mirrored slots.
  struct SortRec {
    std::vector<std::uint32_t> structure;
    int ladder_int;
    std::vector<OpCode> neutral_codes;
    std::size_t term;
  };
  std::vector<SortRec> recs;
  recs.reserve(gh.offdiag_terms_.size());
  for (std::size_t i = 0; i < gh.offdiag_terms_.size(); ++i) {
    const QubitTerm& t = gh.offdiag_terms_[i];
    SortRec r;
    r.structure = off_diagonal_structure(t);
    bool all_ladder = true;
    for (OpCode c : t.codes) {
      if (is_off_diagonal(c) && !is_ladder(c)) all_ladder = false;
    }
    r.ladder_int = (fermionic && all_ladder && r.structure.size() <= 4)
                       ? ladder_integer(t, r.structure)
                       : 0;
    r.neutral_codes = adjoint_invariant_codes(t);
    r.term = i;
    recs.push_back(std::move(r));
  }
  std::stable_sort(recs.begin(), recs.end(), [&](const SortRec& a, const SortRec& b) {
    if (a.structure.size() != b.structure.size()) {
      return a.structure.size() < b.structure.size();
    }
    if (a.structure != b.structure) return a.structure < b.structure;
    if (a.ladder_int != b.ladder_int) return a.ladder_int < b.ladder_int;
    const QubitTerm& ta = gh.offdiag_terms_[a.term];
    const QubitTerm& tb = gh.offdiag_terms_[b.term];
    if (ta.indices != tb.indices) return ta.indices < tb.indices;
    if (a.neutral_codes != b.neutral_codes) return a.neutral_codes < b.neutral_codes;
    return ta.codes < tb.codes;
  });

  std::vector<QubitTerm> sorted;
  sorted.reserve(gh.offdiag_terms_.size());
  std::vector<std::int64_t> boundaries;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    if (k == 0 || recs[k].structure != recs[k - 1].structure) {
      boundaries.push_back(static_cast<std::int64_t>(k));
    }
    sorted.push_back(std::move(gh.offdiag_terms_[recs[k].term]));
  }
  boundaries.push_back(static_cast<std::int64_t>(recs.size()));
  if (recs.empty()) boundaries = {0};
  gh.offdiag_terms_ = std::move(sorted);
  gh.finalize_groups(std::move(boundaries));
  return gh;
}

GroupedHamiltonian trim_groups(const GroupedHamiltonian& gh,
                               std::span<const double> subspace_diagonal, double tol,
                               TrimInfo* info) {
  TrimInfo local;
  local.groups_before = gh.num_groups();
  local.groups_after = gh.num_groups();

  if (tol <= 0.0 || gh.num_groups() == 0) {
    if (info) *info = local;
    return gh;
  }

  std::vector<double> diag(subspace_diagonal.begin(), subspace_diagonal.end());
  std::sort(diag.begin(), diag.end());
  double splitting = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < diag.size(); ++i) {
    const double d = diag[i] - diag[i - 1];
    if (d > 0.0) splitting = std::min(splitting, d);
  }
  if (!std::isfinite(splitting)) {
    local.disabled_zero_splitting = true;
    if (info) *info = local;
    return gh;
  }
  local.min_splitting = splitting;

  GroupedHamiltonian out;
  out.num_qubits_ = gh.num_qubits_;
  out.fermionic_ = gh.fermionic_;
  out.hermitian_ = gh.hermitian_;
  out.diagonal_terms_ = gh.diagonal_terms_;

  std::vector<std::int64_t> boundaries{0};
  for (std::size_t g = 0; g < gh.num_groups(); ++g) {
    double max_coeff = 0.0;
    for (std::int64_t t = gh.group_ptrs_[g]; t < gh.group_ptrs_[g + 1]; ++t) {
      max_coeff = std::max(max_coeff, std::abs(gh.offdiag_terms_[t].coefficient));
    }
    if (max_coeff / splitting < tol) continue;
    for (std::int64_t t = gh.group_ptrs_[g]; t < gh.group_ptrs_[g + 1]; ++t) {
      out.offdiag_terms_.push_back(gh.offdiag_terms_[t]);
    }
    boundaries.push_back(static_cast<std::int64_t>(out.offdiag_terms_.size()));
  }
  out.finalize_groups(std::move(boundaries));
  local.groups_after = out.num_groups();
  if (info) *info = local;
  return out;
}

} // namespace qsd
