#include "qsd/solver.hpp"

#include "qsd/errors.hpp"
#include "qsd/models.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace qsd;
using test::DenseMatrix;

namespace {

Subspace full_space(std::uint32_t n) {
  std::vector<BitString> strings;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    BitString b(n);
    for (std::uint32_t q = 0; q < n; ++q) {
      if (v & (std::uint64_t{1} << q)) b.set(q);
    }
    strings.push_back(std::move(b));
  }
  return Subspace::from_bitstrings(strings, n);
}

struct Problem {
  GroupedHamiltonian gh;
  Subspace s;
  DiagonalCache diag;
  SubspaceMatrix m;
};

Problem make_problem(const QubitOperator& op, const Subspace& s) {
  auto gh = group_terms(op, false);
  auto diag = compute_diagonal(gh, s);
  auto m = build_csr(gh, s, diag);
  return Problem{std::move(gh), s, std::move(diag), std::move(m)};
}

} // namespace

TEST_CASE("jacobi_eigensolve matches LAPACK on small matrices") {
  std::mt19937_64 rng(127);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 7;
    DenseMatrix dm(static_cast<std::size_t>(n));
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
      for (int c = r; c < n; ++c) {
        const double v = dist(rng);
        a[r * n + c] = v;
        a[c * n + r] = v;
        dm.at(r, c) = v;
        dm.at(c, r) = v;
      }
    }
    std::vector<double> evals, evecs;
    jacobi_eigensolve(a, n, evals, evecs);
    const auto expect = test::dense_eigenvalues(dm);
    for (int k = 0; k < n; ++k) CHECK(std::abs(evals[k] - expect[k]) < 1e-12);
  }
}

TEST_CASE("solve_lowest on a 1x1 operator returns the element") {
  CsrMatrix<double> m;
  m.dim = 1;
  m.indptr = {0, 1};
  m.indices = {0};
  m.data = {-3.25};
  const CsrOperator<double> op(m);
  const std::vector<double> diag{-3.25};
  const auto r = solve_lowest(op, diag);
  CHECK(r.converged);
  CHECK(r.eigenvalue == -3.25);
}

TEST_CASE("solve_lowest finds the closed-form 2x2 ground state") {
  CsrMatrix<double> m;
  m.dim = 2;
  m.indptr = {0, 2, 4};
  m.indices = {0, 1, 0, 1};
  m.data = {-1.0, 0.6, 0.6, -1.0};
  const CsrOperator<double> op(m);
  const std::vector<double> diag{-1.0, -1.0};
  const auto r = solve_lowest(op, diag);
  CHECK(r.converged);
  CHECK(std::abs(r.eigenvalue - (-1.6)) < 1e-10);
}

TEST_CASE("solve_lowest matches dense diagonalization on Heisenberg chains") {
  for (std::uint32_t length : {2u, 5u, 8u}) {
    const auto op = heisenberg_xxz_chain(length, 0.3);
    const Problem p = make_problem(op, full_space(length));
    const CsrOperator<double> handle(p.m.real());
    SolveOptions opts;
    opts.tol = 1e-11;
    opts.max_iter = 4000;
    const auto r = solve_lowest(handle, p.diag.values, opts);
    const double expect = test::dense_ground_energy(test::dense_operator(op));
    CHECK(r.converged);
    CHECK(std::abs(r.eigenvalue - expect) < 1e-9);
  }
}

TEST_CASE("reported quantities are self-consistent") {
  std::mt19937_64 rng(131);
  const auto op = test::random_pauli_operator(rng, 6, 25);
  const Problem p = make_problem(op, test::random_subspace(rng, 6, 48, true));
  const CsrOperator<double> handle(p.m.real());
  const auto r = solve_lowest(handle, p.diag.values);

  // Rayleigh quotient of the returned vector equals the returned value.
  const std::size_t n = r.eigenvector.size();
  std::vector<double> hv(n);
  handle.apply(std::span<const double>(r.eigenvector), std::span<double>(hv));
  double quotient = 0.0, vnorm = 0.0, rnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    quotient += r.eigenvector[i] * hv[i];
    vnorm += r.eigenvector[i] * r.eigenvector[i];
  }
  CHECK(std::abs(vnorm - 1.0) < 1e-12);
  CHECK(std::abs(quotient - r.eigenvalue) < 1e-12);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = hv[i] - r.eigenvalue * r.eigenvector[i];
    rnorm += d * d;
  }
  CHECK(std::abs(std::sqrt(rnorm) - r.residual) < 1e-12);
}

TEST_CASE("preconditioning changes iterations, not the answer") {
  const auto op = heisenberg_xxz_chain(7, 0.3);
  const Problem p = make_problem(op, full_space(7));
  const CsrOperator<double> handle(p.m.real());
  SolveOptions none;
  none.precond = PreconditionerKind::None;
  none.tol = 1e-11;
  none.max_iter = 6000;
  SolveOptions jacobi;
  jacobi.precond = PreconditionerKind::ShiftedJacobi;
  jacobi.tol = 1e-11;
  jacobi.max_iter = 6000;
  const auto a = solve_lowest(handle, p.diag.values, none);
  const auto b = solve_lowest(handle, p.diag.values, jacobi);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::abs(a.eigenvalue - b.eigenvalue) < 1e-9);
}

TEST_CASE("matrix-free and CSR handles agree") {
  const auto op = heisenberg_xxz_chain(6, 0.3);
  const auto gh = group_terms(op, false);
  const Subspace s = full_space(6);
  const DiagonalCache diag = compute_diagonal(gh, s);
  const auto m = build_csr(gh, s, diag);
  const CsrOperator<double> csr(m.real());
  const MatrixFreeOperator<double> mf(gh, s, diag);
  SolveOptions opts;
  opts.tol = 1e-11;
  const auto a = solve_lowest(csr, diag.values, opts);
  const auto b = solve_lowest(mf, diag.values, opts);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::abs(a.eigenvalue - b.eigenvalue) < 1e-10);
}

TEST_CASE("complex Hermitian operators solve through the embedding") {
  QubitOperator op(1);
  op.add_term(QubitTerm{0.7, {0}, {OpCode::Y}});
  op.add_term(QubitTerm{0.2, {0}, {OpCode::Z}});
  const auto gh = group_terms(op, false);
  const Subspace s = full_space(1);
  const DiagonalCache diag = compute_diagonal(gh, s);
  const auto m = build_csr(gh, s, diag);
  REQUIRE(!m.is_real());
  const CsrOperator<Complex> handle(m.cplx());
  const auto r = solve_lowest(handle, diag.values);
  CHECK(r.converged);
  CHECK(std::abs(r.eigenvalue - (-std::sqrt(0.53))) < 1e-10);
}

TEST_CASE("complex matrix-free handle agrees with complex CSR") {
  QubitOperator op(2);
  op.add_term(QubitTerm{0.7, {0}, {OpCode::Y}});
  op.add_term(QubitTerm{0.4, {1}, {OpCode::Y}});
  op.add_term(QubitTerm{0.2, {0}, {OpCode::Z}});
  const auto gh = group_terms(op, false);
  const Subspace s = full_space(2);
  const DiagonalCache diag = compute_diagonal(gh, s);
  const auto m = build_csr(gh, s, diag);
  REQUIRE(!m.is_real());
  const CsrOperator<Complex> csr(m.cplx());
  const MatrixFreeOperator<Complex> mf(gh, s, diag);
  const auto a = solve_lowest(csr, diag.values);
  const auto b = solve_lowest(mf, diag.values);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::abs(a.eigenvalue - b.eigenvalue) < 1e-10);
}

TEST_CASE("initial vector options converge to the same energy") {
  const auto op = heisenberg_xxz_chain(5, 0.3);
  const Problem p = make_problem(op, full_space(5));
  const CsrOperator<double> handle(p.m.real());
  const double expect = test::dense_ground_energy(test::dense_operator(op));

  for (InitialVector init :
       {InitialVector::Uniform, InitialVector::SpikeAtMinDiagonal, InitialVector::User}) {
    SolveOptions opts;
    opts.initial = init;
    opts.tol = 1e-11;
    opts.max_iter = 4000;
    if (init == InitialVector::User) {
      opts.user_initial.assign(p.s.dim(), Complex(1.0, 0.0));
      opts.user_initial[0] = Complex(2.0, 0.0);
    }
    const auto r = solve_lowest(handle, p.diag.values, opts);
    CHECK(r.converged);
    CHECK(std::abs(r.eigenvalue - expect) < 1e-9);
  }

  SolveOptions bad;
  bad.initial = InitialVector::User;
  bad.user_initial.assign(3, Complex(1.0, 0.0));
  CHECK_THROWS_AS(solve_lowest(handle, p.diag.values, bad), ValidationError);
}

TEST_CASE("non-convergence is reported, not hidden") {
  const auto op = heisenberg_xxz_chain(8, 0.3);
  const Problem p = make_problem(op, full_space(8));
  const CsrOperator<double> handle(p.m.real());
  SolveOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 3;
  const auto r = solve_lowest(handle, p.diag.values, opts);
  CHECK(!r.converged);
  CHECK(r.residual > 0.0);
  CHECK(!r.eigenvector.empty());
}

TEST_CASE("solver is deterministic") {
  const auto op = heisenberg_xxz_chain(6, 0.3);
  const Problem p = make_problem(op, full_space(6));
  const CsrOperator<double> handle(p.m.real());
  SolveOptions opts;
  opts.seed = 42;
  const auto a = solve_lowest(handle, p.diag.values, opts);
  const auto b = solve_lowest(handle, p.diag.values, opts);
  CHECK(a.eigenvalue == b.eigenvalue);
  CHECK(a.iterations == b.iterations);
  CHECK(a.eigenvector == b.eigenvector);
}

TEST_CASE("solver input validation") {
  CsrMatrix<double> m;
  m.dim = 2;
  m.indptr = {0, 1, 2};
  m.indices = {0, 1};
  m.data = {1.0, 2.0};
  const CsrOperator<double> handle(m);
  const std::vector<double> diag{1.0, 2.0};
  SolveOptions bad_tol;
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(solve_lowest(handle, diag, bad_tol), ValidationError);
  const std::vector<double> short_diag{1.0};
  CHECK_THROWS_AS(solve_lowest(handle, short_diag), ValidationError);
}
