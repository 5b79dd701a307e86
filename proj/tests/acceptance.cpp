// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Usage: qsd_acceptance <path-to-qsd-cli>

#include "qsd/grouping.hpp"
#include "qsd/io.hpp"
#include "qsd/matrix.hpp"
#include "qsd/models.hpp"
#include "qsd/operators.hpp"
#include "qsd/ramps.hpp"
#include "qsd/solver.hpp"
#include "qsd/subspace.hpp"
#include "support/oracles.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace qsd;
using test::DenseMatrix;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

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

bool matrices_identical(const SubspaceMatrix& a, const SubspaceMatrix& b) {
  if (a.is_real() != b.is_real()) return false;
  if (a.is_real()) {
    return a.real().indptr == b.real().indptr && a.real().indices == b.real().indices &&
           a.real().data == b.real().data;
  }
  return a.cplx().indptr == b.cplx().indptr && a.cplx().indices == b.cplx().indices &&
         a.cplx().data == b.cplx().data;
}

// ---------------------------------------------------------------- 1
Check merging_rules() {
  Check c;
  const OpCode symbols[4] = {OpCode::Lower, OpCode::Raise, OpCode::P0, OpCode::P1};
  int entries = 0;
  for (OpCode left : symbols) {
    for (OpCode right : symbols) {
      const DenseMatrix product =
          test::matmul(test::dense_of_code(left), test::dense_of_code(right));
      DenseMatrix expected(2);
      if (const auto merged = merge_pair(left, right)) {
        expected = test::dense_of_code(*merged);
      }
      c.require(test::max_abs_diff(product, expected) == 0.0,
                "merge rule mismatch at entry " + std::to_string(entries));
      ++entries;
    }
  }
  c.require(entries == 16, "expected 16 entries");
  return c;
}

// ---------------------------------------------------------------- 2
Check jw_equivalence() {
  Check c;
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t modes = 2 + static_cast<std::uint32_t>(trial % 5);
    const FermionOperator fop = test::random_fermion_operator(rng, modes, 1 + trial % 8);
    const DenseMatrix ours = test::dense_operator(jordan_wigner(fop));
    const DenseMatrix reference = test::dense_fermion_pauli_jw(fop);
    const double diff = test::max_abs_diff(ours, reference);
    c.require(diff <= 1e-12,
              "trial " + std::to_string(trial) + " max deviation " + std::to_string(diff));
  }
  return c;
}

// ---------------------------------------------------------------- 3
Check restriction_consistency() {
  Check c;
  std::mt19937_64 rng(1003);
  for (std::uint32_t length = 2; length <= 10; ++length) {
    const QubitOperator op = heisenberg_xxz_chain(length, 0.3);
    const DenseMatrix dense = test::dense_operator(op);
    const auto gh = group_terms(op, false);
    std::uniform_int_distribution<std::size_t> dim_dist(1, std::size_t{1} << length);
    for (int rep = 0; rep < 100; ++rep) {
      const Subspace s = test::random_subspace(rng, length, dim_dist(rng), rep % 2 == 0);
      const auto m = build_csr(gh, s, compute_diagonal(gh, s));
      const double diff = test::max_abs_diff(test::to_dense(m), test::slice(dense, s));
      c.require(diff <= 1e-13, "L=" + std::to_string(length) + " rep " + std::to_string(rep) +
                                   " deviation " + std::to_string(diff));
      if (!c.ok) return c;
    }
  }
  return c;
}

// ---------------------------------------------------------------- 4
Check build_mode_equivalence() {
  Check c;
  std::mt19937_64 rng(1004);
  int instance = 0;
  auto check_instance = [&](const GroupedHamiltonian& gh, const Subspace& s) {
    const DiagonalCache diag = compute_diagonal(gh, s);
    const auto reference =
        build_csr(gh, s, diag, BuildOptions{BuildMode::TwoPass, std::nullopt, true});
    const BuildOptions variants[] = {
        {BuildMode::Fast, std::nullopt, true},
        {BuildMode::TwoPass, false, true},
        {BuildMode::TwoPass, true, true},
        {BuildMode::Fast, false, true},
        {BuildMode::TwoPass, std::nullopt, false},
        {BuildMode::Fast, std::nullopt, false},
    };
    for (const auto& v : variants) {
      c.require(matrices_identical(reference, build_csr(gh, s, diag, v)),
                "instance " + std::to_string(instance) + " differs across build modes");
    }
    ++instance;
  };

  for (std::uint32_t length : {2u, 4u, 6u, 8u}) {
    const QubitOperator op = heisenberg_xxz_chain(length, 0.3);
    const auto gh = group_terms(op, false);
    check_instance(gh, full_space(length).sorted_by_integer_value());
    check_instance(gh, test::random_subspace(rng, length, (std::size_t{1} << length) / 2 + 1,
                                             /*sorted=*/true));
  }
  for (int rep = 0; rep < 6; ++rep) {
    FermionOperator fop = test::random_fermion_operator(rng, 6, 10, /*complex=*/false);
    FermionOperator herm(6);
    herm.set_constant(fop.constant());
    for (const FermionTerm& t : fop.terms()) {
      herm.add_term(t);
      FermionTerm adj;
      adj.coefficient = std::conj(t.coefficient);
      for (std::size_t k = t.mode_indices.size(); k-- > 0;) {
        adj.mode_indices.push_back(t.mode_indices[k]);
        adj.dagger_flags.push_back(!t.dagger_flags[k]);
      }
      herm.add_term(std::move(adj));
    }
    const auto gh = group_terms(jordan_wigner(herm), true);
    check_instance(gh, test::random_subspace(rng, 6, 40, /*sorted=*/true));
  }
  return c;
}

// ---------------------------------------------------------------- 5
Check matrix_free_equivalence() {
  Check c;
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::uint32_t length : {4u, 8u, 12u}) {
    const QubitOperator op = heisenberg_xxz_chain(length, 0.3);
    const auto gh = group_terms(op, false);
    const Subspace s = length <= 10
                           ? full_space(length)
                           : test::random_subspace(rng, length, 2000, /*sorted=*/true);
    const DiagonalCache diag = compute_diagonal(gh, s);
    const auto m = build_csr(gh, s, diag);
    const MatrixFreeOperator<double> mf(gh, s, diag);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> x(s.dim());
      for (double& v : x) v = dist(rng);
      std::vector<double> y_csr(s.dim()), y_mf(s.dim());
      spmv(m.real(), std::span<const double>(x), std::span<double>(y_csr));
      mf.apply(std::span<const double>(x), std::span<double>(y_mf));
      for (std::size_t i = 0; i < s.dim(); ++i) {
        c.require(std::abs(y_csr[i] - y_mf[i]) <= 1e-12,
                  "L=" + std::to_string(length) + " rep " + std::to_string(rep) +
                      " component deviation");
        if (!c.ok) return c;
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------- 6
Check eigen_correctness() {
  Check c;
  {
    const QubitOperator op = heisenberg_xxz_chain(2, 0.3);
    const auto gh = group_terms(op, false);
    const std::vector<BitString> pair{BitString::parse("01"), BitString::parse("10")};
    const Subspace s = Subspace::from_bitstrings(pair, 2);
    const DiagonalCache diag = compute_diagonal(gh, s);
    const auto m = build_csr(gh, s, diag);
    const CsrOperator<double> h(m.real());
    const auto r = solve_lowest(h, diag.values);
    c.require(r.converged, "pair subspace did not converge");
    c.require(std::abs(r.eigenvalue - (-1.6)) <= 1e-10,
              "pair eigenvalue " + std::to_string(r.eigenvalue));
  }
  for (std::uint32_t length = 2; length <= 10; ++length) {
    const QubitOperator op = heisenberg_xxz_chain(length, 0.3);
    const auto gh = group_terms(op, false);
    const Subspace s = full_space(length);
    const DiagonalCache diag = compute_diagonal(gh, s);
    const auto m = build_csr(gh, s, diag);
    const CsrOperator<double> h(m.real());
    SolveOptions opts;
    opts.tol = 1e-11;
    opts.max_iter = 20000;
    const auto r = solve_lowest(h, diag.values, opts);
    const double expect = test::dense_ground_energy(test::dense_operator(op));
    c.require(r.converged, "L=" + std::to_string(length) + " did not converge");
    c.require(std::abs(r.eigenvalue - expect) <= 1e-9,
              "L=" + std::to_string(length) + " deviation " +
                  std::to_string(std::abs(r.eigenvalue - expect)));
  }
  return c;
}

// ---------------------------------------------------------------- 7
Check ramps_convergence() {
  Check c;
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> diag_coeff(0.7, 1.9);
  std::uniform_real_distribution<double> off_coeff(0.01, 0.05);

  for (int instance = 0; instance < 20; ++instance) {
    const std::uint32_t n = 7 + static_cast<std::uint32_t>(instance % 3); // dim 128..512
    QubitOperator op(n);
    for (std::uint32_t q = 0; q < n; ++q) {
      op.add_term(QubitTerm{diag_coeff(rng) * (q + 1), {q}, {OpCode::Z}});
    }
    for (std::uint32_t q = 0; q < n; ++q) {
      op.add_term(QubitTerm{off_coeff(rng), {q}, {OpCode::X}});
    }
    if (instance % 2 == 0) {
      op.add_term(QubitTerm{off_coeff(rng), {0, 1}, {OpCode::X, OpCode::X}});
      op.add_term(QubitTerm{off_coeff(rng), {0, 1}, {OpCode::Y, OpCode::Y}});
    }
    op = combine_like_terms(op);
    const auto gh = group_terms(op, false);
    const Subspace full = full_space(n);
    const DiagonalCache diag = compute_diagonal(gh, full);

    std::size_t argmin = 0;
    for (std::size_t i = 1; i < full.dim(); ++i) {
      if (diag.values[i] < diag.values[argmin]) argmin = i;
    }
    const std::vector<BitString> seed{full.get(argmin)};
    const Subspace s0 = Subspace::from_bitstrings(seed, n);

    RampsConfig cfg;
    cfg.target_energy = diag.values[argmin];
    cfg.restrict_to = &full;
    cfg.max_depth = static_cast<int>(n) + 2;

    // tau = infinity returns the seeds exactly
    cfg.tolerance = std::numeric_limits<double>::infinity();
    const Subspace none = ramps(gh, s0, cfg);
    c.require(none.dim() == 1 && none.get(0) == s0.get(0),
              "instance " + std::to_string(instance) + ": tau=inf changed the seeds");

    const double e_full = test::dense_ground_energy(test::dense_operator(op));

    auto subspace_energy = [&](const Subspace& s) {
      const auto sorted = s.sorted_by_integer_value();
      const DiagonalCache d = compute_diagonal(gh, sorted);
      const auto m = build_csr(gh, sorted, d);
      const CsrOperator<double> h(m.real());
      SolveOptions opts;
      opts.tol = 1e-12;
      opts.max_iter = 20000;
      const auto r = solve_lowest(h, d.values, opts);
      return r.eigenvalue;
    };

    std::set<std::string> previous_set;
    double previous_error = std::numeric_limits<double>::infinity();
    bool first = true;
    double final_error = 0.0;
    for (double tau : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
      cfg.tolerance = tau;
      const Subspace out = ramps(gh, s0, cfg);
      std::set<std::string> out_set;
      for (std::size_t i = 0; i < out.dim(); ++i) out_set.insert(out.get(i).str());
      if (!first) {
        for (const auto& member : previous_set) {
          c.require(out_set.count(member) == 1,
                    "instance " + std::to_string(instance) + ": monotonicity violated");
        }
      }
      const double err = std::abs(subspace_energy(out) - e_full);
      c.require(err <= previous_error + 5e-9,
                "instance " + std::to_string(instance) + ": error increased along the sweep");
      previous_error = err;
      previous_set = std::move(out_set);
      final_error = err;
      first = false;
      if (!c.ok) return c;
    }
    c.require(final_error <= 1e-8, "instance " + std::to_string(instance) +
                                       ": final deviation " + std::to_string(final_error));
  }
  return c;
}

// ---------------------------------------------------------------- 8
Check wide_registers() {
  Check c;
  const std::uint32_t n = 200;
  QubitOperator op(n);
  for (std::uint32_t q = 0; q < n; ++q) op.add_term(QubitTerm{1.0, {q}, {OpCode::Z}});
  const auto gh = group_terms(op, false);

  std::mt19937_64 rng(1008);
  std::vector<BitString> strings;
  for (int i = 0; i < 1000; ++i) {
    BitString b(n);
    for (std::uint32_t q = 0; q < n; ++q) {
      if (rng() & 1) b.set(q);
    }
    strings.push_back(std::move(b));
  }
  const Subspace s = Subspace::from_bitstrings(strings, n);
  const DiagonalCache diag = compute_diagonal(gh, s);
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const double expect = static_cast<double>(n) - 2.0 * static_cast<double>(s.get(i).popcount());
    c.require(diag.values[i] == expect, "diagonal value disagrees with the popcount formula");
  }
  const auto m = build_csr(gh, s, diag);
  c.require(m.nnz() == static_cast<std::int64_t>(s.dim()), "diagonal operator is not diagonal");
  const CsrOperator<double> h(m.real());
  const auto r = solve_lowest(h, diag.values);
  double min_diag = diag.values[0];
  for (double v : diag.values) min_diag = std::min(min_diag, v);
  c.require(r.converged && std::abs(r.eigenvalue - min_diag) <= 1e-10,
            "eigenvalue does not match the smallest diagonal value");
  return c;
}

// ---------------------------------------------------------------- 9
Check nonzero_fraction() {
  Check c;
  std::mt19937_64 rng(1009);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t n = 5 + static_cast<std::uint32_t>(trial % 6); // up to 10
    const int m = 1 + trial % 4;
    std::vector<std::uint32_t> indices;
    while (static_cast<int>(indices.size()) < m) {
      const std::uint32_t q = static_cast<std::uint32_t>(rng() % n);
      if (std::find(indices.begin(), indices.end(), q) == indices.end()) indices.push_back(q);
    }
    std::sort(indices.begin(), indices.end());
    QubitTerm term;
    term.coefficient = 1.0;
    term.indices = indices;
    bool diagonal = true;
    for (int k = 0; k < m; ++k) {
      const int pick = static_cast<int>(rng() % 4);
      const OpCode code = pick == 0   ? OpCode::P0
                          : pick == 1 ? OpCode::P1
                          : pick == 2 ? OpCode::Lower
                                      : OpCode::Raise;
      if (is_off_diagonal(code)) diagonal = false;
      term.codes.push_back(code);
    }
    QubitOperator op(n);
    op.add_term(term);
    const auto gh = group_terms(op, /*fermionic=*/!diagonal);
    const Subspace s = full_space(n);

    std::size_t nonzero_rows = 0;
    if (diagonal) {
      for (std::size_t i = 0; i < s.dim(); ++i) {
        if (gh.diagonal_value(s.get(i)) != 0.0) ++nonzero_rows;
      }
    } else {
      for (std::size_t i = 0; i < s.dim(); ++i) {
        if (group_element(gh, 0, s.get(i)) != Complex(0.0, 0.0)) ++nonzero_rows;
      }
    }
    c.require(nonzero_rows == (std::size_t{1} << (n - static_cast<std::uint32_t>(m))),
              "trial " + std::to_string(trial) + ": " + std::to_string(nonzero_rows) +
                  " nonzero rows for n=" + std::to_string(n) + " m=" + std::to_string(m));
  }
  return c;
}

// ---------------------------------------------------------------- 10
struct CliRun {
  int exit_code = -1;
  std::string out;
  std::map<std::string, std::string> files;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliRun run_cli(const fs::path& dir, const std::string& args,
               const std::vector<std::string>& outputs) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd = g_cli_path + " " + args + " > " + out.string() + " 2> " +
                          (dir / "stderr.txt").string();
  CliRun r;
  const int status = std::system(cmd.c_str());
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  for (const auto& f : outputs) r.files[f] = slurp(dir / f);
  return r;
}

std::string normalized_report(const std::string& text) {
  if (text.empty()) return text;
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return text;
  j.erase("timings_ms"); // wall-clock; everything else must match bitwise
  return j.dump();
}

Check determinism() {
  Check c;
  const fs::path dir = fs::temp_directory_path() / "qsd_acceptance_run";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Inputs: a Heisenberg chain and a fermionic problem.
  {
    std::ofstream op(dir / "chain.terms");
    op << "qubits 6\n";
    for (int i = 0; i + 1 < 6; ++i) {
      op << "0.3 X" << i << " X" << i + 1 << "\n0.3 Y" << i << " Y" << i + 1 << "\n1.0 Z" << i
         << " Z" << i + 1 << "\n";
    }
  }
  {
    std::ofstream bits(dir / "chain.bits");
    for (int v = 0; v < 64; ++v) {
      std::string s;
      for (int q = 5; q >= 0; --q) s += (v & (1 << q)) ? '1' : '0';
      bits << s << "\n";
    }
  }
  {
    std::ofstream f(dir / "mol.fcidump");
    f << "&FCI NORB=2,NELEC=2,MS2=0,\n/\n0.674488 1 1 1 1\n0.663468 1 1 2 2\n"
      << "0.181349 1 2 1 2\n0.697397 2 2 2 2\n-1.252477 1 1 0 0\n-0.475934 2 2 0 0\n"
      << "0.713753 0 0 0 0\n";
  }
  std::ofstream(dir / "seed.bits") << "000101\n";

  struct Command {
    std::string name;
    std::string args;
    std::vector<std::string> outputs;
  };
  const std::string chain = (dir / "chain.terms").string() + " " + (dir / "chain.bits").string();
  const std::vector<Command> commands = {
      {"jw", "jw " + (dir / "mol.fcidump").string() + " -o " + (dir / "jw.terms").string(),
       {"jw.terms"}},
      {"build-two-pass", "build " + chain + " --mode two-pass -o " + (dir / "a.mtx").string(),
       {"a.mtx"}},
      {"build-fast", "build " + chain + " --mode fast -o " + (dir / "b.mtx").string(),
       {"b.mtx"}},
      {"solve", "solve " + chain + " --tol 1e-10", {}},
      {"solve-matrix-free", "solve " + chain + " --matrix-free --tol 1e-10", {}},
      {"ramps",
       "ramps " + (dir / "chain.terms").string() + " " + (dir / "seed.bits").string() +
           " --tol 1e-6 --full-subspace " + (dir / "chain.bits").string() + " -o " +
           (dir / "r.bits").string(),
       {"r.bits"}},
      {"neel-subspace", "neel-subspace 6 --hamming 1 -o " + (dir / "n.bits").string(),
       {"n.bits"}},
  };

  for (const auto& cmd : commands) {
    const CliRun one = run_cli(dir, "--threads 1 " + cmd.args, cmd.outputs);
    const CliRun two = run_cli(dir, "--threads 2 " + cmd.args, cmd.outputs);
    c.require(one.exit_code == two.exit_code, cmd.name + ": exit codes differ");
    c.require(one.exit_code == 0, cmd.name + ": nonzero exit");
    c.require(normalized_report(one.out) == normalized_report(two.out),
              cmd.name + ": reports differ across thread counts");
    for (const auto& f : cmd.outputs) {
      c.require(one.files.at(f) == two.files.at(f),
                cmd.name + ": output file " + f + " differs across thread counts");
      c.require(!one.files.at(f).empty(), cmd.name + ": output file " + f + " is empty");
    }
  }

  // Matrix Market output is also mode-independent.
  c.require(slurp(dir / "a.mtx") == slurp(dir / "b.mtx"),
            "two-pass and fast Matrix Market outputs differ");
  fs::remove_all(dir);
  return c;
}

struct Criterion {
  int number;
  std::string name;
  std::function<Check()> run;
  double limit_seconds; // 0 = unlimited
};

} // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    g_cli_path = argv[1];
  } else {
    std::cerr << "usage: qsd_acceptance <path-to-qsd-cli>\n";
    return 2;
  }

  const std::vector<Criterion> criteria = {
      {1, "merging-rule table vs dense products", merging_rules, 1.0},
      {2, "extended JW equals the Pauli-decomposition oracle", jw_equivalence, 10.0},
      {3, "CSR equals the dense restriction", restriction_consistency, 60.0},
      {4, "all build modes produce identical matrices", build_mode_equivalence, 60.0},
      {5, "matrix-free matvec equals CSR spmv", matrix_free_equivalence, 0.0},
      {6, "eigensolver matches closed forms and dense diagonalization", eigen_correctness, 0.0},
      {7, "ramps subspaces converge monotonically", ramps_convergence, 0.0},
      {8, "200-qubit diagonal build and solve", wide_registers, 5.0},
      {9, "nonzero-row fraction is 1/2^m", nonzero_fraction, 0.0},
      {10, "thread-count determinism of every command", determinism, 0.0},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = criterion.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.limit_seconds > 0.0 && seconds > criterion.limit_seconds) {
      c.ok = false;
      c.detail = "runtime " + std::to_string(seconds) + "s exceeds " +
                 std::to_string(criterion.limit_seconds) + "s";
    }
    std::printf("%s [%2d] %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL", criterion.number,
                criterion.name.c_str(), seconds, c.ok ? "" : " -- ",
                c.ok ? "" : c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
