#include "qsd/ramps.hpp"

#include "qsd/errors.hpp"
#include "qsd/matrix.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

namespace qsd {

namespace {

struct BitStringHash {
  std::size_t operator()(const BitString& b) const { return b.hash64(); }
};

struct IntegerLess {
  bool operator()(const BitString& a, const BitString& b) const { return integer_less(a, b); }
};

} // namespace

Subspace ramps(const GroupedHamiltonian& gh, const Subspace& s0, const RampsConfig& cfg,
               RampsStats* stats) {
  if (!(cfg.tolerance > 0.0)) throw ValidationError("ramps: tolerance must be positive");
  if (cfg.max_depth < 1) throw ValidationError("ramps: max_depth must be at least 1");
  if (!std::isfinite(cfg.target_energy) || cfg.target_energy == 0.0) {
    throw ValidationError("ramps: target energy must be finite and nonzero");
  }
  if (s0.dim() > 0 && gh.num_qubits() != s0.num_qubits()) {
    throw ValidationError("ramps: operator and seed subspace widths differ");
  }
  if (cfg.restrict_to != nullptr) {
    for (const BitString& b : s0.entries()) {
      if (!cfg.restrict_to->contains(b)) {
        throw ValidationError("ramps: seed bit-string " + b.str() +
                              " is outside the restriction subspace");
      }
    }
  }

  RampsStats local;
  const double energy = cfg.target_energy;

  double scale = std::max(1.0, std::abs(energy));
  for (const BitString& b : s0.entries()) {
    scale = std::max(scale, std::abs(gh.diagonal_value(b)));
  }
  const double floor = cfg.degeneracy_floor_scale * scale;

  // Best |prefactor| seen per bit-string; a string is re-expanded only when
  // a strictly larger prefactor arrives.
  std::unordered_map<BitString, double, BitStringHash> best;
  std::vector<BitString> admitted;

  // Frontier kept in integer order so results do not depend on discovery
  // order.
  std::map<BitString, double, IntegerLess> frontier;
  for (const BitString& b : s0.entries()) {
    const double pre = 1.0 / energy;
    best[b] = std::abs(pre);
    frontier.emplace(b, pre);
  }

  for (int depth = 1; depth <= cfg.max_depth && !frontier.empty(); ++depth) {
    local.depth_reached = depth;
    std::map<BitString, double, IntegerLess> next;
    for (const auto& [row, prefactor] : frontier) {
      for (std::size_t g = 0; g < gh.num_groups(); ++g) {
        const Complex hjk = group_element(gh, g, row);
        if (hjk == Complex(0.0, 0.0)) continue;
        const BitString col = row ^ gh.group_masks()[g];
        if (cfg.restrict_to != nullptr && !cfg.restrict_to->contains(col)) continue;
        const double denom = energy - gh.diagonal_value(col);
        if (std::abs(denom) < floor) {
          ++local.degeneracy_skips;
          continue;
        }
        const double amp = prefactor * std::norm(hjk) / denom;
        if (!(std::abs(amp) > cfg.tolerance)) continue;
        const double next_pre = amp / denom;

        auto it = best.find(col);
        if (it == best.end()) {
          best.emplace(col, std::abs(next_pre));
          admitted.push_back(col);
          next.emplace(col, next_pre);
        } else if (std::abs(next_pre) > it->second) {
          it->second = std::abs(next_pre);
          auto [nit, inserted] = next.emplace(col, next_pre);
          if (!inserted && std::abs(next_pre) > std::abs(nit->second)) {
            nit->second = next_pre;
          }
        }
      }
    }
    frontier = std::move(next);
  }

  local.admitted = admitted.size();
  if (stats) *stats = local;

  std::vector<BitString> out = s0.entries();
  out.insert(out.end(), admitted.begin(), admitted.end());
  return Subspace::from_bitstrings(out, gh.num_qubits());
}

} // namespace qsd
