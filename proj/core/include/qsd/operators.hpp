#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qsd {

using Complex = std::complex<double>;

/// Single-qubit operator alphabet. Codes above P1 are off-diagonal.
/// The numeric values are part of the on-disk and in-memory contract:
/// [Z, P0, P1, X, Y, Lower, Raise] -> [0, 1, 2, 3, 4, 5, 6].
enum class OpCode : std::uint8_t {
  Z = 0,
  P0 = 1,    // |0><0|
  P1 = 2,    // |1><1|
  X = 3,
  Y = 4,
  Lower = 5, // |0><1|
  Raise = 6, // |1><0|
};

inline bool is_diagonal(OpCode c) { return static_cast<std::uint8_t>(c) <= 2; }
inline bool is_off_diagonal(OpCode c) { return static_cast<std::uint8_t>(c) > 2; }
inline bool is_ladder(OpCode c) { return c == OpCode::Lower || c == OpCode::Raise; }

/// Text token for an op acting on qubit `index`, e.g. "X0", "P1_3", "+2".
std::string opcode_token(OpCode code, std::uint32_t index);

/// One product term c * W where W is a sparse word of single-qubit
/// operators. Identity factors are never stored; indices are strictly
/// ascending and carry one code each.
struct QubitTerm {
  Complex coefficient;
  std::vector<std::uint32_t> indices;
  std::vector<OpCode> codes;

  int weight() const { return static_cast<int>(codes.size()); }
  int off_diagonal_weight() const;
};

/// Indices at which a term's off-diagonal operators act, ascending.
/// Empty for diagonal terms.
std::vector<std::uint32_t> off_diagonal_structure(const QubitTerm& term);

class QubitOperator {
public:
  explicit QubitOperator(std::uint32_t num_qubits) : num_qubits_(num_qubits) {}
  QubitOperator(std::vector<QubitTerm> terms, std::uint32_t num_qubits);

  const std::vector<QubitTerm>& terms() const { return terms_; }
  std::uint32_t num_qubits() const { return num_qubits_; }
  std::size_t size() const { return terms_.size(); }

  void add_term(QubitTerm term);

private:
  std::vector<QubitTerm> terms_;
  std::uint32_t num_qubits_ = 0;
};

/// Sums coefficients of terms with identical (indices, codes), bucketing
/// by total weight so buckets can be processed in parallel. Terms whose
/// combined |coefficient| <= drop_tol are removed; the default removes
/// exact zeros only. Output terms are sorted by (weight, indices, codes).
QubitOperator combine_like_terms(const QubitOperator& op, double drop_tol = 0.0);

/// Hermitian adjoint: conjugate coefficients, swap Lower <-> Raise.
QubitOperator dagger(const QubitOperator& op);

/// True when op equals its adjoint after like-term combination, to within
/// `tol` on each coefficient.
bool is_hermitian(const QubitOperator& op, double tol = 0.0);

/// True when every matrix element of op is real: all coefficients have
/// zero imaginary part and every term holds an even number of Y factors.
bool has_real_matrix(const QubitOperator& op);

/// Rewrites projection and ladder operators as linear combinations of
/// identity and Pauli factors: P0=(I+Z)/2, P1=(I-Z)/2, Lower=(X+iY)/2,
/// Raise=(X-iY)/2. Output codes are restricted to {Z, X, Y}.
QubitOperator to_pauli_basis(const QubitOperator& op);

/// Product of fermionic ladder operators with a coefficient. Entry k acts
/// on mode_indices[k], a creation operator when dagger_flags[k] is true.
/// The product is written left to right: entry 0 is applied last.
struct FermionTerm {
  Complex coefficient;
  std::vector<std::uint32_t> mode_indices;
  std::vector<bool> dagger_flags;
};

class FermionOperator {
public:
  explicit FermionOperator(std::uint32_t num_modes) : num_modes_(num_modes) {}
  FermionOperator(double constant, std::vector<FermionTerm> terms, std::uint32_t num_modes);

  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }
  const std::vector<FermionTerm>& terms() const { return terms_; }
  std::uint32_t num_modes() const { return num_modes_; }

  void add_term(FermionTerm term);

private:
  double constant_ = 0.0;
  std::vector<FermionTerm> terms_;
  std::uint32_t num_modes_ = 0;
};

/// Product of two same-mode extended symbols, left applied after right.
/// Total on {Lower, Raise, P0, P1}; nullopt encodes the null operator.
std::optional<OpCode> merge_pair(OpCode left, OpCode right);

/// Canonicalizes a ladder-operator product: sorts operators by mode index
/// (one sign flip per transposition of single ladder operators on distinct
/// indices), merges repeated indices via merge_pair, and drops null terms.
/// The result carries one symbol from {Lower, Raise, P0, P1} per index.
std::optional<QubitTerm> normalize(const FermionTerm& term);

/// Same canonicalization applied to an already-extended symbol product
/// (codes restricted to {P0, P1, Lower, Raise}, indices possibly repeated
/// and unsorted). Idempotent on its own output.
std::optional<QubitTerm> normalize_extended(const QubitTerm& term);

/// Extended Jordan-Wigner transform. Ladder operators keep their symbol
/// and absorb the parity string Z_{j-1} x ... x Z_0; projection operators
/// map to themselves. Output codes are restricted to {Z, P0, P1, Lower,
/// Raise}, like terms combined, the constant carried through as the
/// weight-0 term. Throws ValidationError when a term index >= num_modes.
QubitOperator jordan_wigner(const FermionOperator& op);

} // namespace qsd
