#pragma once

#include "qsd/matrix.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qsd {

enum class InitialVector { Uniform, SpikeAtMinDiagonal, User };
enum class PreconditionerKind { None, ShiftedJacobi };

struct SolveOptions {
  /// Residual threshold, relative to a running estimate of ||H||.
  double tol = 1e-10;
  /// Cap on operator applications (SpMV calls).
  int max_iter = 2000;
  InitialVector initial = InitialVector::SpikeAtMinDiagonal;
  PreconditionerKind precond = PreconditionerKind::ShiftedJacobi;
  /// Used when initial == User; cast to the operator's scalar type.
  std::vector<std::complex<double>> user_initial;
  /// Seeds the stagnation-escape vectors; everything else is deterministic.
  std::uint64_t seed = 0;
  /// Subspace dimension at which the solver restarts.
  int max_basis = 24;
};

template <class Scalar>
struct EigenResult {
  double eigenvalue = 0.0;
  std::vector<Scalar> eigenvector; // normalized
  double residual = 0.0;           // ||H v - lambda v||_2, recomputed at exit
  int iterations = 0;              // operator applications
  bool converged = false;
};

/// Lowest eigenpair of a Hermitian operator through the SpMV contract.
///
/// Davidson iteration, block size one: Rayleigh-Ritz over an orthonormal
/// basis grown by the (optionally shifted-Jacobi preconditioned) residual;
/// with no preconditioner the basis is the Krylov space of the initial
/// vector, i.e. restarted Lanczos with full reorthogonalization. The
/// Jacobi shift is the current Ritz value. The returned eigenvalue is the
/// Rayleigh quotient of the returned vector. Deterministic given options.
///
/// `diagonal` provides the operator diagonal for the spike initial vector
/// and the Jacobi preconditioner. Non-convergence returns the best pair
/// found with converged=false.
template <class Scalar>
EigenResult<Scalar> solve_lowest(const LinearOperator<Scalar>& op,
                                 std::span<const double> diagonal, const SolveOptions& opts = {});

extern template EigenResult<double> solve_lowest<double>(const LinearOperator<double>&,
                                                         std::span<const double>,
                                                         const SolveOptions&);
extern template EigenResult<std::complex<double>> solve_lowest<std::complex<double>>(
    const LinearOperator<std::complex<double>>&, std::span<const double>, const SolveOptions&);

/// All eigenvalues (ascending) and eigenvectors (columns) of a small dense
/// symmetric matrix, by cyclic Jacobi rotations. Exposed for reuse in the
/// Rayleigh-Ritz step; not intended for large matrices.
void jacobi_eigensolve(std::vector<double>& a, int n, std::vector<double>& eigenvalues,
                       std::vector<double>& eigenvectors);

} // namespace qsd
