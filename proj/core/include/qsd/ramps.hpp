#pragma once

#include "qsd/grouping.hpp"
#include "qsd/subspace.hpp"

#include <cstdint>

namespace qsd {

struct RampsConfig {
  /// Target eigenenergy E the perturbative expansion is taken around.
  double target_energy = 0.0;
  /// Relative amplitude threshold; candidates with |amp| > tolerance are
  /// admitted. +infinity admits nothing.
  double tolerance = 1e-8;
  /// Maximum number of expansion rounds.
  int max_depth = 4;
  /// When set, candidate bit-strings outside this subspace are rejected,
  /// limiting the recursive search to the sampled subspace. Seeds must be
  /// members. Not owned; must outlive the call.
  const Subspace* restrict_to = nullptr;
  /// Candidates with |E - H_kk| below degeneracy_floor_scale * max(1, |E|,
  /// seed diagonals) are skipped and counted, not admitted.
  double degeneracy_floor_scale = 1e-10;
};

struct RampsStats {
  std::size_t admitted = 0;
  std::size_t degeneracy_skips = 0;
  int depth_reached = 0;
};

/// Recursive minimal perturbative subspace construction.
///
/// Breadth-first over expansion rounds: every frontier row b_j is coupled
/// through each off-diagonal group to b_k = b_j ^ mask, with chained
/// amplitude amp = prefactor * |H_jk|^2 / (E - H_kk). Candidates with
/// |amp| > tolerance join the output and carry prefactor amp / (E - H_kk)
/// into the next round. Each bit-string keeps the largest |prefactor| seen
/// and is re-expanded only when a strictly larger one arrives, which makes
/// the admitted set shrink monotonically as the tolerance grows. Output
/// preserves seed order, then admissions in round order.
Subspace ramps(const GroupedHamiltonian& gh, const Subspace& s0, const RampsConfig& cfg,
               RampsStats* stats = nullptr);

} // namespace qsd
