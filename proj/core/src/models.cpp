#include "qsd/models.hpp"

#include "qsd/errors.hpp"

namespace qsd {

QubitOperator heisenberg_xxz_chain(std::uint32_t length, double coupling_j) {
  if (length < 2) throw ValidationError("chain length must be at least 2");
  QubitOperator op(length);
  for (std::uint32_t i = 0; i + 1 < length; ++i) {
    op.add_term(QubitTerm{Complex(coupling_j, 0.0), {i, i + 1}, {OpCode::X, OpCode::X}});
    op.add_term(QubitTerm{Complex(coupling_j, 0.0), {i, i + 1}, {OpCode::Y, OpCode::Y}});
    op.add_term(QubitTerm{Complex(1.0, 0.0), {i, i + 1}, {OpCode::Z, OpCode::Z}});
  }
  return combine_like_terms(op);
}

BitString neel_state(std::uint32_t length) {
  if (length < 1) throw ValidationError("chain length must be at least 1");
  BitString b(length);
  for (std::uint32_t i = 0; i < length; i += 2) b.set(i);
  return b;
}

std::vector<BitString> neel_hamming_subspace(std::uint32_t length, int hamming,
                                             NeelCorrection correction) {
  if (hamming != 0 && hamming != 1) {
    throw ValidationError("hamming distance must be 0 or 1");
  }
  const BitString neel = neel_state(length);
  std::vector<BitString> out{neel};
  if (hamming == 0 || correction == NeelCorrection::Discard) return out;

  // A corrupted sample differs from the Neel state at one bit; restoring
  // the total magnetization flips one bit of the opposite parity. The
  // reachable set is every equal-popcount string at Hamming distance two.
  for (std::uint32_t i = 0; i < length; ++i) {
    if (!neel.test(i)) continue;
    for (std::uint32_t j = 0; j < length; ++j) {
      if (neel.test(j)) continue;
      BitString b = neel;
      b.flip(i);
      b.flip(j);
      out.push_back(std::move(b));
    }
  }
  return out;
}

} // namespace qsd
