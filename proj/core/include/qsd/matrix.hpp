#pragma once

#include "qsd/bitstring.hpp"
#include "qsd/grouping.hpp"
#include "qsd/subspace.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace qsd {

/// Cached <b_i|H_diag|b_i> over a subspace, in subspace index order.
struct DiagonalCache {
  std::vector<double> values;
};

/// Diagonal matrix elements, computed row-parallel. Terms with projection
/// operators short-circuit to zero as soon as one projector fails.
DiagonalCache compute_diagonal(const GroupedHamiltonian& gh, const Subspace& s);

/// Canonical CSR triple. Column indices are strictly ascending within each
/// row; every row stores its diagonal entry even when the value is zero,
/// so the sparsity structure does not depend on floating-point
/// cancellation.
template <class Scalar, class Index = std::int32_t>
struct CsrMatrix {
  std::int64_t dim = 0;
  std::vector<std::int64_t> indptr;
  std::vector<Index> indices;
  std::vector<Scalar> data;

  std::int64_t nnz() const { return indptr.empty() ? 0 : indptr.back(); }
};

/// Bits needed for column indices of a dim x dim matrix: 32 below 2^31,
/// 64 above.
int required_index_bits(std::int64_t dim);

/// Sum over a group's surviving terms at this row; the column is implied
/// by the group mask. Zero is a valid result meaning "no entry". With
/// use_ladder_buckets set (fermionic mode), only the int_ptrs bucket
/// matching the row ladder integer is scanned.
Complex group_element(const GroupedHamiltonian& gh, std::size_t g, const BitString& row,
                      bool use_ladder_buckets = true);

/// True when the element addressed by this group at this row falls in the
/// lower triangle: flipping the most-significant off-diagonal bit from 1
/// to 0 can only lower the column's integer value. Requires an
/// integer-sorted subspace.
inline bool msob_is_lower(const BitString& row, std::uint32_t group_msob) {
  return row.test(group_msob);
}

enum class BuildMode { TwoPass, Fast };

struct BuildOptions {
  BuildMode mode = BuildMode::Fast;
  /// nullopt resolves to: Hermitian operator and integer-sorted subspace.
  std::optional<bool> lower_only;
  /// Verification hook; disabling must not change the output.
  bool use_ladder_buckets = true;
};

/// Built matrix with scalar type chosen from the operator: real storage
/// when every coefficient and phase is real, complex otherwise.
class SubspaceMatrix {
public:
  using Real = CsrMatrix<double>;
  using Cplx = CsrMatrix<std::complex<double>>;

  SubspaceMatrix(Real m) : m_(std::move(m)) {}
  SubspaceMatrix(Cplx m) : m_(std::move(m)) {}

  bool is_real() const { return std::holds_alternative<Real>(m_); }
  const Real& real() const { return std::get<Real>(m_); }
  const Cplx& cplx() const { return std::get<Cplx>(m_); }
  std::int64_t dim() const;
  std::int64_t nnz() const;

private:
  std::variant<Real, Cplx> m_;
};

/// Two-pass CSR construction: pass one counts nonzero entries per row,
/// pass two fills indices/data. With lower_only, elements are evaluated in
/// the lower triangle only and mirrored by conjugation; the output is
/// always the full Hermitian matrix.
SubspaceMatrix build_csr_two_pass(const GroupedHamiltonian& gh, const Subspace& s,
                                  const DiagonalCache& diag, const BuildOptions& opts = {});

/// Single-pass construction into per-row growable buffers, converted to
/// canonical CSR with one copy. Output is identical to build_csr_two_pass
/// in structure and values.
SubspaceMatrix build_csr_fast(const GroupedHamiltonian& gh, const Subspace& s,
                              const DiagonalCache& diag, const BuildOptions& opts = {});

/// Dispatches on opts.mode.
SubspaceMatrix build_csr(const GroupedHamiltonian& gh, const Subspace& s,
                         const DiagonalCache& diag, const BuildOptions& opts = {});

/// y = A x, row-parallel; within a row, products accumulate in index
/// order, so results are reproducible across thread counts.
template <class Scalar, class Index>
void spmv(const CsrMatrix<Scalar, Index>& m, std::span<const Scalar> x, std::span<Scalar> y);

/// SpMV contract shared by explicit matrices and matrix-free evaluation.
template <class Scalar>
class LinearOperator {
public:
  virtual ~LinearOperator() = default;
  virtual std::int64_t dim() const = 0;
  virtual void apply(std::span<const Scalar> x, std::span<Scalar> y) const = 0;
};

template <class Scalar, class Index = std::int32_t>
class CsrOperator final : public LinearOperator<Scalar> {
public:
  explicit CsrOperator(const CsrMatrix<Scalar, Index>& m) : m_(&m) {}
  std::int64_t dim() const override { return m_->dim; }
  void apply(std::span<const Scalar> x, std::span<Scalar> y) const override {
    spmv(*m_, x, y);
  }

private:
  const CsrMatrix<Scalar, Index>* m_;
};

/// Matrix-free y = H x: matrix elements are recomputed on every call,
/// nothing is stored between calls. Rows are evaluated fully (no
/// lower-triangle shortcut) so each output slot has a single writer.
/// References must outlive the operator.
template <class Scalar>
class MatrixFreeOperator final : public LinearOperator<Scalar> {
public:
  MatrixFreeOperator(const GroupedHamiltonian& gh, const Subspace& s, const DiagonalCache& diag,
                     bool use_ladder_buckets = true)
      : gh_(&gh), s_(&s), diag_(&diag), use_ladder_buckets_(use_ladder_buckets) {}
  std::int64_t dim() const override { return static_cast<std::int64_t>(s_->dim()); }
  void apply(std::span<const Scalar> x, std::span<Scalar> y) const override;

private:
  const GroupedHamiltonian* gh_;
  const Subspace* s_;
  const DiagonalCache* diag_;
  bool use_ladder_buckets_;
};

/// Matrix Market coordinate export, 1-based, 17 significant digits.
void write_matrix_market(std::ostream& os, const CsrMatrix<double>& m);
void write_matrix_market(std::ostream& os, const CsrMatrix<std::complex<double>>& m);
void write_matrix_market(std::ostream& os, const SubspaceMatrix& m);

extern template void spmv<double, std::int32_t>(const CsrMatrix<double, std::int32_t>&,
                                                std::span<const double>, std::span<double>);
extern template void spmv<std::complex<double>, std::int32_t>(
    const CsrMatrix<std::complex<double>, std::int32_t>&, std::span<const std::complex<double>>,
    std::span<std::complex<double>>);
extern template void spmv<double, std::int64_t>(const CsrMatrix<double, std::int64_t>&,
                                                std::span<const double>, std::span<double>);
extern template class MatrixFreeOperator<double>;
extern template class MatrixFreeOperator<std::complex<double>>;

} // namespace qsd
