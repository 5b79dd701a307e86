#pragma once

#include "qsd/bitstring.hpp"
#include "qsd/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsd {

/// Term-list format:
///
///   # format=1
///   qubits N
///   coeff_re [coeff_im] op0 op1 ...
///
/// Ops are SymbolIndex tokens: X0, Y1, Z3, P0_4, P1_7, +2, -5. '#' starts
/// a comment. A second numeric token of the form +k/-k (no decimal point
/// or exponent) is read as a ladder operator; write imaginary parts with a
/// decimal point to disambiguate. Duplicate indices within a term, unknown
/// symbols and indices >= N are reported with their line number.
QubitOperator parse_term_list(std::string_view text);

/// Inverse of parse_term_list on canonicalized operators (combine_like_terms
/// ordering; coefficients rendered with 17 significant digits).
std::string emit_term_list(const QubitOperator& op);

struct FcidumpData {
  std::uint32_t norb = 0;
  int nelec = 0;
  int ms2 = 0;
  double core_energy = 0.0;
  FermionOperator op{0};
};

/// FCIDUMP subset: a header giving NORB/NELEC/MS2 — either the namelist
/// form "&FCI NORB=2,NELEC=2,MS2=0, ... /" or a bare "NORB NELEC MS2"
/// integer line — followed by whitespace-separated "value i j k l" lines
/// with 1-based orbital indices in chemist notation. i=j=k=l=0 carries the
/// core energy. Real-integral 8-fold permutational symmetry is expanded;
/// repeated entries overwrite. Spin orbitals are interleaved:
/// mode(p, spin) = 2p + spin.
FcidumpData parse_fcidump(std::string_view text);

/// Bit-string list: one binary string per line (MSB leftmost), optional
/// whitespace-separated trailing count column (ignored), '#' comments.
/// Inconsistent widths are reported with their line number.
std::vector<BitString> parse_bitstring_lines(std::string_view text);

std::string emit_bitstring_lines(const std::vector<BitString>& strings);

/// Machine-readable run report; keys emitted in a fixed order.
struct RunReport {
  std::optional<double> eigenvalue;
  std::optional<double> residual;
  std::optional<int> iterations;
  std::optional<bool> converged;
  std::int64_t dim = 0;
  std::optional<std::int64_t> nnz;
  std::optional<std::size_t> num_groups;
  std::optional<std::size_t> num_groups_after_trim;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::string mode;
  std::optional<std::size_t> ramps_subspace_dim;
};

std::string emit_report(const RunReport& report);

} // namespace qsd
