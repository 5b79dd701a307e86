#pragma once

#include "qsd/bitstring.hpp"
#include "qsd/operators.hpp"

#include <cstdint>
#include <vector>

namespace qsd {

/// Open antiferromagnetic XXZ chain:
///   H = sum_i J (X_i X_{i+1} + Y_i Y_{i+1}) + Z_i Z_{i+1}
QubitOperator heisenberg_xxz_chain(std::uint32_t length, double coupling_j);

/// |0101..01> with qubit 0 (rightmost) set: even sites occupied.
BitString neel_state(std::uint32_t length);

/// How magnetization-violating samples one bit-flip away from the Neel
/// state are handled when generating its neighborhood.
enum class NeelCorrection {
  /// Flip one compensating opposite bit: the neighborhood becomes every
  /// equal-magnetization string at Hamming distance two.
  Repair,
  /// Drop corrupted samples: the Neel state alone.
  Discard,
};

/// hamming = 0 gives the Neel state only; hamming = 1 adds its corrected
/// single-bit-flip neighborhood under the chosen correction rule.
std::vector<BitString> neel_hamming_subspace(std::uint32_t length, int hamming,
                                             NeelCorrection correction);

} // namespace qsd
