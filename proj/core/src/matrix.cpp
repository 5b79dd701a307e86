#include "qsd/matrix.hpp"

#include "qsd/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cinttypes>
#include <cstdio>
#include <memory>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsd {

namespace {

inline Complex apply_phase(Complex c, int k) {
  // c * i^k, componentwise and exact.
  switch (k & 3) {
    case 0: return c;
    case 1: return Complex(-c.imag(), c.real());
    case 2: return Complex(-c.real(), -c.imag());
    default: return Complex(c.imag(), -c.real());
  }
}

Complex eval_term_range(const GroupedHamiltonian& gh, std::int64_t t0, std::int64_t t1,
                        const BitString& row) {
  Complex sum(0.0, 0.0);
  const auto& terms = gh.offdiag_terms();
  for (std::int64_t t = t0; t < t1; ++t) {
    const QubitTerm& term = terms[static_cast<std::size_t>(t)];
    int k = 0;
    bool survives = true;
    for (std::size_t p = 0; p < term.indices.size() && survives; ++p) {
      const bool bit = row.test(term.indices[p]);
      switch (term.codes[p]) {
        case OpCode::Z:
          if (bit) k += 2;
          break;
        case OpCode::P0:
          survives = !bit;
          break;
        case OpCode::P1:
          survives = bit;
          break;
        case OpCode::X:
          break;
        case OpCode::Y:
          k += bit ? 1 : 3;
          break;
        case OpCode::Lower: // |0><1|: needs row bit 0
          survives = !bit;
          break;
        case OpCode::Raise: // |1><0|: needs row bit 1
          survives = bit;
          break;
      }
    }
    if (survives) sum += apply_phase(term.coefficient, k);
  }
  return sum;
}

// Walks one row's off-diagonal groups through the survival chain
// {MSOB (lower_only) -> ladder bucket nonempty -> column in subspace ->
// element nonzero} and emits (column index, value) for survivors.
template <class Emit>
void scan_row_offdiag(const GroupedHamiltonian& gh, const Subspace& s, const BitString& row,
                      bool lower_only, bool use_ladder_buckets, Emit&& emit) {
  const std::size_t ng = gh.num_groups();
  for (std::size_t g = 0; g < ng; ++g) {
    if (lower_only && !msob_is_lower(row, gh.group_msob()[g])) continue;
    std::int64_t t0 = gh.group_ptrs()[g];
    std::int64_t t1 = gh.group_ptrs()[g + 1];
    if (gh.fermionic() && use_ladder_buckets) {
      const int v = row_ladder_integer(row, gh.group_structures()[g]);
      t0 = gh.int_ptrs()[g][static_cast<std::size_t>(v)];
      t1 = gh.int_ptrs()[g][static_cast<std::size_t>(v) + 1];
      if (t0 == t1) continue; // whole group rejected without a lookup
    }
    const BitString col = row ^ gh.group_masks()[g];
    const auto j = s.find(col);
    if (!j) continue;
    const Complex val = eval_term_range(gh, t0, t1, row);
    if (val == Complex(0.0, 0.0)) continue;
    emit(*j, val);
  }
}

template <class Scalar>
Scalar to_scalar(Complex v);
template <>
double to_scalar<double>(Complex v) {
  return v.real();
}
template <>
Complex to_scalar<Complex>(Complex v) {
  return v;
}

inline double conj_scalar(double v) { return v; }
inline Complex conj_scalar(Complex v) { return std::conj(v); }

bool gh_has_real_matrix(const GroupedHamiltonian& gh) {
  for (const QubitTerm& t : gh.diagonal_terms()) {
    if (t.coefficient.imag() != 0.0) return false;
  }
  for (const QubitTerm& t : gh.offdiag_terms()) {
    if (t.coefficient.imag() != 0.0) return false;
    int y = 0;
    for (OpCode c : t.codes) y += (c == OpCode::Y) ? 1 : 0;
    if (y % 2 != 0) return false;
  }
  return true;
}

bool resolve_lower_only(const GroupedHamiltonian& gh, const Subspace& s,
                        const BuildOptions& opts) {
  if (opts.lower_only.has_value()) {
    if (*opts.lower_only) {
      if (!gh.hermitian()) {
        throw ValidationError("lower-triangle evaluation requires a Hermitian operator");
      }
      if (!s.integer_sorted()) {
        throw ValidationError("lower-triangle evaluation requires an integer-sorted subspace");
      }
    }
    return *opts.lower_only;
  }
  return gh.hermitian() && s.integer_sorted();
}

void check_widths(const GroupedHamiltonian& gh, const Subspace& s) {
  if (s.dim() > 0 && gh.num_qubits() != s.num_qubits()) {
    throw ValidationError("operator acts on " + std::to_string(gh.num_qubits()) +
                          " qubits but subspace strings have width " +
                          std::to_string(s.num_qubits()));
  }
}

void check_index_width(std::int64_t n) {
  if (required_index_bits(n) != 32) {
    throw ValidationError("matrix with dim/nnz " + std::to_string(n) +
                          " requires 64-bit indices; 32-bit CSR output is the configured width");
  }
}

template <class Scalar>
void sort_rows(CsrMatrix<Scalar>& m) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256)
#endif
  for (std::int64_t i = 0; i < m.dim; ++i) {
    std::vector<std::pair<std::int32_t, Scalar>> row;
    row.reserve(static_cast<std::size_t>(m.indptr[i + 1] - m.indptr[i]));
    for (std::int64_t k = m.indptr[i]; k < m.indptr[i + 1]; ++k) {
      row.emplace_back(m.indices[static_cast<std::size_t>(k)],
                       m.data[static_cast<std::size_t>(k)]);
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t r = 0; r < row.size(); ++r) {
      const std::size_t k = static_cast<std::size_t>(m.indptr[i]) + r;
      m.indices[k] = row[r].first;
      m.data[k] = row[r].second;
    }
  }
}

template <class Scalar>
CsrMatrix<Scalar> two_pass_impl(const GroupedHamiltonian& gh, const Subspace& s,
                                const DiagonalCache& diag, bool lower_only,
                                bool use_ladder_buckets) {
  const std::int64_t dim = static_cast<std::int64_t>(s.dim());
  check_index_width(dim);
  CsrMatrix<Scalar> m;
  m.dim = dim;
  m.indptr.assign(static_cast<std::size_t>(dim) + 1, 0);
  if (dim == 0) return m;

  std::unique_ptr<std::atomic<std::int64_t>[]> counts(new std::atomic<std::int64_t>[dim]);
  for (std::int64_t i = 0; i < dim; ++i) counts[i].store(0, std::memory_order_relaxed);

  // Pass 1: count entries per row. Mirrored upper-triangle entries are
  // counted at their destination row via atomic increments; counts are
  // order-independent.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (std::int64_t i = 0; i < dim; ++i) {
    std::int64_t own = 1; // structural diagonal
    scan_row_offdiag(gh, s, s.get(static_cast<std::size_t>(i)), lower_only, use_ladder_buckets,
                     [&](std::size_t j, Complex) {
                       own += 1;
                       if (lower_only) {
                         counts[j].fetch_add(1, std::memory_order_relaxed);
                       }
                     });
    counts[i].fetch_add(own, std::memory_order_relaxed);
  }

  for (std::int64_t i = 0; i < dim; ++i) {
    m.indptr[static_cast<std::size_t>(i) + 1] =
        m.indptr[static_cast<std::size_t>(i)] + counts[i].load(std::memory_order_relaxed);
  }
  const std::int64_t nnz = m.indptr[static_cast<std::size_t>(dim)];
  check_index_width(nnz);
  m.indices.resize(static_cast<std::size_t>(nnz));
  m.data.resize(static_cast<std::size_t>(nnz));

  // Pass 2: fill. Slots within a row are claimed through an atomic cursor
  // (mirrors arrive from other rows); a final per-row sort by column
  // restores canonical order, so output does not depend on thread count.
  for (std::int64_t i = 0; i < dim; ++i) {
    counts[i].store(m.indptr[static_cast<std::size_t>(i)], std::memory_order_relaxed);
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (std::int64_t i = 0; i < dim; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    const std::int64_t dslot = counts[i].fetch_add(1, std::memory_order_relaxed);
    m.indices[static_cast<std::size_t>(dslot)] = static_cast<std::int32_t>(i);
    m.data[static_cast<std::size_t>(dslot)] = to_scalar<Scalar>(Complex(diag.values[ui], 0.0));
    scan_row_offdiag(
        gh, s, s.get(ui), lower_only, use_ladder_buckets, [&](std::size_t j, Complex val) {
          const std::int64_t a = counts[i].fetch_add(1, std::memory_order_relaxed);
          m.indices[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(j);
          m.data[static_cast<std::size_t>(a)] = to_scalar<Scalar>(val);
          if (lower_only) {
            const std::int64_t b = counts[j].fetch_add(1, std::memory_order_relaxed);
            m.indices[static_cast<std::size_t>(b)] = static_cast<std::int32_t>(i);
            m.data[static_cast<std::size_t>(b)] = conj_scalar(to_scalar<Scalar>(val));
          }
        });
  }

  sort_rows(m);
  return m;
}

template <class Scalar>
CsrMatrix<Scalar> fast_impl(const GroupedHamiltonian& gh, const Subspace& s,
                            const DiagonalCache& diag, bool lower_only,
                            bool use_ladder_buckets) {
  const std::int64_t dim = static_cast<std::int64_t>(s.dim());
  check_index_width(dim);
  CsrMatrix<Scalar> m;
  m.dim = dim;
  m.indptr.assign(static_cast<std::size_t>(dim) + 1, 0);
  if (dim == 0) return m;

  using Entry = std::pair<std::int32_t, Scalar>;
  std::vector<std::vector<Entry>> rows(static_cast<std::size_t>(dim));
  struct Mirror {
    std::int64_t row;
    std::int32_t col;
    Scalar val;
  };
  std::vector<Mirror> mirrors;

  // Single pass: rows own their buffers; mirrored entries are collected
  // per thread and appended afterwards so no buffer has two writers.
#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<Mirror> local;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 64) nowait
#endif
    for (std::int64_t i = 0; i < dim; ++i) {
      const std::size_t ui = static_cast<std::size_t>(i);
      auto& row = rows[ui];
      row.emplace_back(static_cast<std::int32_t>(i),
                       to_scalar<Scalar>(Complex(diag.values[ui], 0.0)));
      scan_row_offdiag(gh, s, s.get(ui), lower_only, use_ladder_buckets,
                       [&](std::size_t j, Complex val) {
                         row.emplace_back(static_cast<std::int32_t>(j), to_scalar<Scalar>(val));
                         if (lower_only) {
                           local.push_back(Mirror{static_cast<std::int64_t>(j),
                                                  static_cast<std::int32_t>(i),
                                                  conj_scalar(to_scalar<Scalar>(val))});
                         }
                       });
    }
#ifdef _OPENMP
#pragma omp critical
#endif
    mirrors.insert(mirrors.end(), local.begin(), local.end());
  }
  for (const Mirror& e : mirrors) {
    rows[static_cast<std::size_t>(e.row)].emplace_back(e.col, e.val);
  }

  for (std::int64_t i = 0; i < dim; ++i) {
    m.indptr[static_cast<std::size_t>(i) + 1] =
        m.indptr[static_cast<std::size_t>(i)] +
        static_cast<std::int64_t>(rows[static_cast<std::size_t>(i)].size());
  }
  const std::int64_t nnz = m.indptr[static_cast<std::size_t>(dim)];
  check_index_width(nnz);
  m.indices.resize(static_cast<std::size_t>(nnz));
  m.data.resize(static_cast<std::size_t>(nnz));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256)
#endif
  for (std::int64_t i = 0; i < dim; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    std::sort(row.begin(), row.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::size_t k = static_cast<std::size_t>(m.indptr[static_cast<std::size_t>(i)]);
    for (const Entry& e : row) {
      m.indices[k] = e.first;
      m.data[k] = e.second;
      ++k;
    }
  }
  return m;
}

} // namespace

DiagonalCache compute_diagonal(const GroupedHamiltonian& gh, const Subspace& s) {
  check_widths(gh, s);
  DiagonalCache cache;
  cache.values.resize(s.dim());
  const std::int64_t dim = static_cast<std::int64_t>(s.dim());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256)
#endif
  for (std::int64_t i = 0; i < dim; ++i) {
    cache.values[static_cast<std::size_t>(i)] = gh.diagonal_value(s.get(static_cast<std::size_t>(i)));
  }
  return cache;
}

int required_index_bits(std::int64_t dim) {
  return dim < (std::int64_t{1} << 31) ? 32 : 64;
}

Complex group_element(const GroupedHamiltonian& gh, std::size_t g, const BitString& row,
                      bool use_ladder_buckets) {
  std::int64_t t0 = gh.group_ptrs()[g];
  std::int64_t t1 = gh.group_ptrs()[g + 1];
  if (gh.fermionic() && use_ladder_buckets) {
    const int v = row_ladder_integer(row, gh.group_structures()[g]);
    t0 = gh.int_ptrs()[g][static_cast<std::size_t>(v)];
    t1 = gh.int_ptrs()[g][static_cast<std::size_t>(v) + 1];
  }
  return eval_term_range(gh, t0, t1, row);
}

std::int64_t SubspaceMatrix::dim() const {
  return std::visit([](const auto& m) { return m.dim; }, m_);
}

std::int64_t SubspaceMatrix::nnz() const {
  return std::visit([](const auto& m) { return m.nnz(); }, m_);
}

SubspaceMatrix build_csr_two_pass(const GroupedHamiltonian& gh, const Subspace& s,
                                  const DiagonalCache& diag, const BuildOptions& opts) {
  check_widths(gh, s);
  const bool lower = resolve_lower_only(gh, s, opts);
  if (gh_has_real_matrix(gh)) {
    return SubspaceMatrix(two_pass_impl<double>(gh, s, diag, lower, opts.use_ladder_buckets));
  }
  return SubspaceMatrix(two_pass_impl<Complex>(gh, s, diag, lower, opts.use_ladder_buckets));
}

SubspaceMatrix build_csr_fast(const GroupedHamiltonian& gh, const Subspace& s,
                              const DiagonalCache& diag, const BuildOptions& opts) {
  check_widths(gh, s);
  const bool lower = resolve_lower_only(gh, s, opts);
  if (gh_has_real_matrix(gh)) {
    return SubspaceMatrix(fast_impl<double>(gh, s, diag, lower, opts.use_ladder_buckets));
  }
  return SubspaceMatrix(fast_impl<Complex>(gh, s, diag, lower, opts.use_ladder_buckets));
}

SubspaceMatrix build_csr(const GroupedHamiltonian& gh, const Subspace& s,
                         const DiagonalCache& diag, const BuildOptions& opts) {
  return opts.mode == BuildMode::TwoPass ? build_csr_two_pass(gh, s, diag, opts)
                                         : build_csr_fast(gh, s, diag, opts);
}

template <class Scalar, class Index>
void spmv(const CsrMatrix<Scalar, Index>& m, std::span<const Scalar> x, std::span<Scalar> y) {
  if (static_cast<std::int64_t>(x.size()) != m.dim ||
      static_cast<std::int64_t>(y.size()) != m.dim) {
    throw ValidationError("spmv: vector length does not match matrix dimension");
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < m.dim; ++i) {
    Scalar acc{};
    for (std::int64_t k = m.indptr[static_cast<std::size_t>(i)];
         k < m.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      acc += m.data[static_cast<std::size_t>(k)] *
             x[static_cast<std::size_t>(m.indices[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
}

template void spmv<double, std::int32_t>(const CsrMatrix<double, std::int32_t>&,
                                         std::span<const double>, std::span<double>);
template void spmv<std::complex<double>, std::int32_t>(
    const CsrMatrix<std::complex<double>, std::int32_t>&, std::span<const std::complex<double>>,
    std::span<std::complex<double>>);
template void spmv<double, std::int64_t>(const CsrMatrix<double, std::int64_t>&,
                                         std::span<const double>, std::span<double>);

template <class Scalar>
void MatrixFreeOperator<Scalar>::apply(std::span<const Scalar> x, std::span<Scalar> y) const {
  const std::int64_t n = dim();
  if (static_cast<std::int64_t>(x.size()) != n || static_cast<std::int64_t>(y.size()) != n) {
    throw ValidationError("matvec: vector length does not match operator dimension");
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    Scalar acc = to_scalar<Scalar>(Complex(diag_->values[ui], 0.0)) * x[ui];
    scan_row_offdiag(*gh_, *s_, s_->get(ui), /*lower_only=*/false, use_ladder_buckets_,
                     [&](std::size_t j, Complex val) { acc += to_scalar<Scalar>(val) * x[j]; });
    y[ui] = acc;
  }
}

template class MatrixFreeOperator<double>;
template class MatrixFreeOperator<std::complex<double>>;

namespace {

void render_value(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  os << buf;
}

} // namespace

void write_matrix_market(std::ostream& os, const CsrMatrix<double>& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.dim << " " << m.dim << " " << m.nnz() << "\n";
  for (std::int64_t i = 0; i < m.dim; ++i) {
    for (std::int64_t k = m.indptr[static_cast<std::size_t>(i)];
         k < m.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      os << (i + 1) << " " << (m.indices[static_cast<std::size_t>(k)] + 1) << " ";
      render_value(os, m.data[static_cast<std::size_t>(k)]);
      os << "\n";
    }
  }
}

void write_matrix_market(std::ostream& os, const CsrMatrix<std::complex<double>>& m) {
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << m.dim << " " << m.dim << " " << m.nnz() << "\n";
  for (std::int64_t i = 0; i < m.dim; ++i) {
    for (std::int64_t k = m.indptr[static_cast<std::size_t>(i)];
         k < m.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      os << (i + 1) << " " << (m.indices[static_cast<std::size_t>(k)] + 1) << " ";
      render_value(os, m.data[static_cast<std::size_t>(k)].real());
      os << " ";
      render_value(os, m.data[static_cast<std::size_t>(k)].imag());
      os << "\n";
    }
  }
}

void write_matrix_market(std::ostream& os, const SubspaceMatrix& m) {
  if (m.is_real()) {
    write_matrix_market(os, m.real());
  } else {
    write_matrix_market(os, m.cplx());
  }
}

} // namespace qsd
