#include "qsd/operators.hpp"

#include "qsd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <tuple>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsd {

std::string opcode_token(OpCode code, std::uint32_t index) {
  switch (code) {
    case OpCode::Z: return "Z" + std::to_string(index);
    case OpCode::P0: return "P0_" + std::to_string(index);
    case OpCode::P1: return "P1_" + std::to_string(index);
    case OpCode::X: return "X" + std::to_string(index);
    case OpCode::Y: return "Y" + std::to_string(index);
    case OpCode::Lower: return "-" + std::to_string(index);
    case OpCode::Raise: return "+" + std::to_string(index);
  }
  return "?";
}

int QubitTerm::off_diagonal_weight() const {
  int w = 0;
  for (OpCode c : codes) w += is_off_diagonal(c) ? 1 : 0;
  return w;
}

std::vector<std::uint32_t> off_diagonal_structure(const QubitTerm& term) {
  std::vector<std::uint32_t> structure;
  for (std::size_t k = 0; k < term.codes.size(); ++k) {
    if (is_off_diagonal(term.codes[k])) structure.push_back(term.indices[k]);
  }
  return structure;
}

namespace {

void validate_term(const QubitTerm& term, std::uint32_t num_qubits) {
  if (term.indices.size() != term.codes.size()) {
    throw ValidationError("term has " + std::to_string(term.indices.size()) +
                          " indices but " + std::to_string(term.codes.size()) + " codes");
  }
  for (std::size_t k = 0; k < term.indices.size(); ++k) {
    if (k > 0 && term.indices[k] <= term.indices[k - 1]) {
      throw ValidationError("term indices not strictly ascending");
    }
    if (term.indices[k] >= num_qubits) {
      throw ValidationError("term index " + std::to_string(term.indices[k]) +
                            " out of range for " + std::to_string(num_qubits) + " qubits");
    }
  }
}

// Canonical term order: weight, then indices, then codes. Coefficients do
// not participate so the order is stable under like-term combination.
bool term_less(const QubitTerm& a, const QubitTerm& b) {
  if (a.codes.size() != b.codes.size()) return a.codes.size() < b.codes.size();
  if (a.indices != b.indices) return a.indices < b.indices;
  return a.codes < b.codes;
}

using TermKey = std::pair<std::vector<std::uint32_t>, std::vector<OpCode>>;

} // namespace

QubitOperator::QubitOperator(std::vector<QubitTerm> terms, std::uint32_t num_qubits)
    : terms_(std::move(terms)), num_qubits_(num_qubits) {
  for (const QubitTerm& t : terms_) validate_term(t, num_qubits_);
}

void QubitOperator::add_term(QubitTerm term) {
  validate_term(term, num_qubits_);
  terms_.push_back(std::move(term));
}

QubitOperator combine_like_terms(const QubitOperator& op, double drop_tol) {
  // Bucket term indices by total weight; buckets are independent.
  std::size_t max_weight = 0;
  for (const QubitTerm& t : op.terms()) {
    max_weight = std::max(max_weight, t.codes.size());
  }
  std::vector<std::vector<std::size_t>> buckets(max_weight + 1);
  for (std::size_t i = 0; i < op.terms().size(); ++i) {
    buckets[op.terms()[i].codes.size()].push_back(i);
  }

  std::vector<std::vector<QubitTerm>> combined(buckets.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::size_t w = 0; w < buckets.size(); ++w) {
    // Accumulation runs in input order per key, so sums are reproducible.
    std::map<TermKey, Complex> acc;
    for (std::size_t i : buckets[w]) {
      const QubitTerm& t = op.terms()[i];
      acc[TermKey{t.indices, t.codes}] += t.coefficient;
    }
    for (auto& [key, coeff] : acc) {
      if (std::abs(coeff) <= drop_tol) continue;
      combined[w].push_back(QubitTerm{coeff, key.first, key.second});
    }
  }

  std::vector<QubitTerm> out;
  for (auto& bucket : combined) {
    out.insert(out.end(), std::make_move_iterator(bucket.begin()),
               std::make_move_iterator(bucket.end()));
  }
  std::sort(out.begin(), out.end(), term_less);
  return QubitOperator(std::move(out), op.num_qubits());
}

QubitOperator dagger(const QubitOperator& op) {
  std::vector<QubitTerm> terms;
  terms.reserve(op.size());
  for (const QubitTerm& t : op.terms()) {
    QubitTerm d = t;
    d.coefficient = std::conj(d.coefficient);
    for (OpCode& c : d.codes) {
      if (c == OpCode::Lower) {
        c = OpCode::Raise;
      } else if (c == OpCode::Raise) {
        c = OpCode::Lower;
      }
    }
    terms.push_back(std::move(d));
  }
  return QubitOperator(std::move(terms), op.num_qubits());
}

bool is_hermitian(const QubitOperator& op, double tol) {
  QubitOperator diff(op.num_qubits());
  for (const QubitTerm& t : op.terms()) diff.add_term(t);
  const QubitOperator adj = dagger(op);
  for (const QubitTerm& t : adj.terms()) {
    QubitTerm n = t;
    n.coefficient = -n.coefficient;
    diff.add_term(std::move(n));
  }
  const QubitOperator combined = combine_like_terms(diff);
  for (const QubitTerm& t : combined.terms()) {
    if (std::abs(t.coefficient) > tol) return false;
  }
  return true;
}

bool has_real_matrix(const QubitOperator& op) {
  for (const QubitTerm& t : op.terms()) {
    if (t.coefficient.imag() != 0.0) return false;
    int y_count = 0;
    for (OpCode c : t.codes) y_count += (c == OpCode::Y) ? 1 : 0;
    if (y_count % 2 != 0) return false;
  }
  return true;
}

QubitOperator to_pauli_basis(const QubitOperator& op) {
  QubitOperator out(op.num_qubits());
  struct Partial {
    Complex coeff;
    std::size_t pos;
    std::vector<std::uint32_t> indices;
    std::vector<OpCode> codes;
  };
  for (const QubitTerm& t : op.terms()) {
    std::vector<Partial> work{Partial{t.coefficient, 0, {}, {}}};
    while (!work.empty()) {
      Partial p = std::move(work.back());
      work.pop_back();
      if (p.pos == t.codes.size()) {
        out.add_term(QubitTerm{p.coeff, std::move(p.indices), std::move(p.codes)});
        continue;
      }
      const std::uint32_t idx = t.indices[p.pos];
      const OpCode c = t.codes[p.pos];
      auto branch = [&](Complex factor, std::optional<OpCode> code) {
        Partial q = p;
        q.coeff *= factor;
        q.pos += 1;
        if (code) {
          q.indices.push_back(idx);
          q.codes.push_back(*code);
        }
        work.push_back(std::move(q));
      };
      switch (c) {
        case OpCode::Z:
        case OpCode::X:
        case OpCode::Y:
          branch(1.0, c);
          break;
        case OpCode::P0: // (I + Z)/2
          branch(0.5, std::nullopt);
          branch(0.5, OpCode::Z);
          break;
        case OpCode::P1: // (I - Z)/2
          branch(0.5, std::nullopt);
          branch(-0.5, OpCode::Z);
          break;
        case OpCode::Lower: // (X + iY)/2
          branch(0.5, OpCode::X);
          branch(Complex(0.0, 0.5), OpCode::Y);
          break;
        case OpCode::Raise: // (X - iY)/2
          branch(0.5, OpCode::X);
          branch(Complex(0.0, -0.5), OpCode::Y);
          break;
      }
    }
  }
  return combine_like_terms(out);
}

FermionOperator::FermionOperator(double constant, std::vector<FermionTerm> terms,
                                 std::uint32_t num_modes)
    : constant_(constant), terms_(std::move(terms)), num_modes_(num_modes) {
  for (const FermionTerm& t : terms_) {
    if (t.mode_indices.size() != t.dagger_flags.size()) {
      throw ValidationError("fermionic term has mismatched index/dagger lengths");
    }
  }
}

void FermionOperator::add_term(FermionTerm term) {
  if (term.mode_indices.size() != term.dagger_flags.size()) {
    throw ValidationError("fermionic term has mismatched index/dagger lengths");
  }
  terms_.push_back(std::move(term));
}

std::optional<OpCode> merge_pair(OpCode left, OpCode right) {
  auto slot = [](OpCode c) -> int {
    switch (c) {
      case OpCode::P0: return 0;
      case OpCode::P1: return 1;
      case OpCode::Lower: return 2;
      case OpCode::Raise: return 3;
      default: throw ValidationError("merge_pair: symbol outside {P0, P1, Lower, Raise}");
    }
  };
  // left x right, left applied after right. 2x2 matrix products of
  // |0><0|, |1><1|, |0><1|, |1><0|; all surviving products carry unit sign.
  static constexpr std::int8_t kNull = -1;
  static constexpr std::int8_t table[4][4] = {
      // right:  P0     P1     Lower  Raise
      {0, kNull, 2, kNull},     // left P0
      {kNull, 1, kNull, 3},     // left P1
      {kNull, 2, kNull, 0},     // left Lower
      {3, kNull, 1, kNull},     // left Raise
  };
  static constexpr OpCode decode[4] = {OpCode::P0, OpCode::P1, OpCode::Lower, OpCode::Raise};
  const std::int8_t r = table[slot(left)][slot(right)];
  if (r == kNull) return std::nullopt;
  return decode[r];
}

namespace {

struct SymbolAtIndex {
  std::uint32_t index;
  OpCode code;
};

// Shared canonicalization: stable insertion sort by index with one sign
// flip per transposition of two odd-parity (single ladder) operators,
// then left-to-right merging of equal-index runs.
std::optional<QubitTerm> normalize_symbols(std::vector<SymbolAtIndex> ops, Complex coeff) {
  for (std::size_t i = 1; i < ops.size(); ++i) {
    for (std::size_t j = i; j > 0 && ops[j - 1].index > ops[j].index; --j) {
      if (is_ladder(ops[j - 1].code) && is_ladder(ops[j].code)) coeff = -coeff;
      std::swap(ops[j - 1], ops[j]);
    }
  }
  QubitTerm out;
  out.coefficient = coeff;
  std::size_t k = 0;
  while (k < ops.size()) {
    OpCode merged = ops[k].code;
    std::size_t j = k + 1;
    while (j < ops.size() && ops[j].index == ops[k].index) {
      const auto m = merge_pair(merged, ops[j].code);
      if (!m) return std::nullopt;
      merged = *m;
      ++j;
    }
    out.indices.push_back(ops[k].index);
    out.codes.push_back(merged);
    k = j;
  }
  return out;
}

} // namespace

std::optional<QubitTerm> normalize(const FermionTerm& term) {
  std::vector<SymbolAtIndex> ops;
  ops.reserve(term.mode_indices.size());
  for (std::size_t k = 0; k < term.mode_indices.size(); ++k) {
    ops.push_back(SymbolAtIndex{term.mode_indices[k],
                                term.dagger_flags[k] ? OpCode::Raise : OpCode::Lower});
  }
  return normalize_symbols(std::move(ops), term.coefficient);
}

std::optional<QubitTerm> normalize_extended(const QubitTerm& term) {
  if (term.indices.size() != term.codes.size()) {
    throw ValidationError("extended term has mismatched index/code lengths");
  }
  std::vector<SymbolAtIndex> ops;
  ops.reserve(term.codes.size());
  for (std::size_t k = 0; k < term.codes.size(); ++k) {
    const OpCode c = term.codes[k];
    if (c != OpCode::P0 && c != OpCode::P1 && !is_ladder(c)) {
      throw ValidationError("normalize_extended: symbol outside {P0, P1, Lower, Raise}");
    }
    ops.push_back(SymbolAtIndex{term.indices[k], c});
  }
  return normalize_symbols(std::move(ops), term.coefficient);
}

QubitOperator jordan_wigner(const FermionOperator& op) {
  QubitOperator out(op.num_modes());
  out.add_term(QubitTerm{Complex(op.constant(), 0.0), {}, {}});

  for (const FermionTerm& ft : op.terms()) {
    for (std::uint32_t m : ft.mode_indices) {
      if (m >= op.num_modes()) {
        throw ValidationError("fermionic mode index " + std::to_string(m) +
                              " out of range for " + std::to_string(op.num_modes()) + " modes");
      }
    }
    const auto normalized = normalize(ft);
    if (!normalized) continue;
    const QubitTerm& nt = *normalized;

    std::vector<std::uint32_t> ladder_positions;
    for (std::size_t k = 0; k < nt.codes.size(); ++k) {
      if (is_ladder(nt.codes[k])) ladder_positions.push_back(nt.indices[k]);
    }

    QubitTerm jw;
    jw.coefficient = nt.coefficient;
    if (nt.indices.empty()) {
      out.add_term(std::move(jw));
      continue;
    }

    // Per site q the local factor is s_q * Z^{n(q)} with n(q) the number of
    // ladder operators at indices above q. Z^odd flips the sign of Lower
    // and P1, leaves Raise and P0, and contributes a bare Z elsewhere.
    const std::uint32_t top = nt.indices.back();
    std::size_t in_term = 0;     // walks nt.indices
    std::size_t consumed = 0;    // ladder positions <= q
    for (std::uint32_t q = 0; q <= top; ++q) {
      while (consumed < ladder_positions.size() && ladder_positions[consumed] <= q) ++consumed;
      const bool odd_parity = ((ladder_positions.size() - consumed) % 2) != 0;
      if (in_term < nt.indices.size() && nt.indices[in_term] == q) {
        const OpCode c = nt.codes[in_term];
        if (odd_parity && (c == OpCode::Lower || c == OpCode::P1)) {
          jw.coefficient = -jw.coefficient;
        }
        jw.indices.push_back(q);
        jw.codes.push_back(c);
        ++in_term;
      } else if (odd_parity) {
        jw.indices.push_back(q);
        jw.codes.push_back(OpCode::Z);
      }
    }
    out.add_term(std::move(jw));
  }
  return combine_like_terms(out);
}

} // namespace qsd
