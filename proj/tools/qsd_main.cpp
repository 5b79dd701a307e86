// qsd: subspace projection and eigensolving for qubit and fermionic
// Hamiltonians over sampled bit-string subspaces.

#include "qsd/errors.hpp"
#include "qsd/grouping.hpp"
#include "qsd/io.hpp"
#include "qsd/matrix.hpp"
#include "qsd/models.hpp"
#include "qsd/operators.hpp"
#include "qsd/ramps.hpp"
#include "qsd/solver.hpp"
#include "qsd/subspace.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using qsd::Complex;

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNoConvergence = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qsd::ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qsd::ValidationError("cannot write '" + path + "'");
  out << content;
}

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

private:
  std::chrono::steady_clock::time_point start_;
};

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

bool resolve_fermionic(const std::string& mode, const qsd::QubitOperator& op) {
  if (mode == "on") return true;
  if (mode == "off") return false;
  // auto: ladder-only off-diagonal alphabets benefit from bucket skipping
  bool any_offdiag = false;
  for (const auto& t : op.terms()) {
    for (qsd::OpCode c : t.codes) {
      if (!qsd::is_off_diagonal(c)) continue;
      any_offdiag = true;
      if (!qsd::is_ladder(c)) return false;
    }
  }
  return any_offdiag;
}

std::optional<bool> resolve_lower(const std::string& mode) {
  if (mode == "on") return true;
  if (mode == "off") return false;
  return std::nullopt;
}

struct Pipeline {
  qsd::QubitOperator op{0};
  qsd::Subspace subspace;
  qsd::GroupedHamiltonian gh;
  qsd::DiagonalCache diag;
  std::size_t groups_before_trim = 0;
  qsd::TrimInfo trim;
};

// Shared front half of build/solve: parse, combine, group, cache the
// diagonal, optionally trim groups.
Pipeline prepare(const std::string& op_path, const std::string& bits_path,
                 const std::string& fermionic_mode, bool sort_subspace, double trim_tol,
                 qsd::RunReport& report, Stopwatch& watch) {
  Pipeline p;
  p.op = qsd::combine_like_terms(qsd::parse_term_list(read_file(op_path)));
  const auto strings = qsd::parse_bitstring_lines(read_file(bits_path));
  report.timings_ms.emplace_back("parse", watch.lap_ms());

  p.subspace = qsd::Subspace::from_bitstrings(strings, p.op.num_qubits());
  if (sort_subspace) p.subspace = p.subspace.sorted_by_integer_value();
  report.timings_ms.emplace_back("subspace", watch.lap_ms());

  p.gh = qsd::group_terms(p.op, resolve_fermionic(fermionic_mode, p.op));
  p.groups_before_trim = p.gh.num_groups();
  report.timings_ms.emplace_back("group", watch.lap_ms());

  p.diag = qsd::compute_diagonal(p.gh, p.subspace);
  report.timings_ms.emplace_back("diagonal", watch.lap_ms());

  if (trim_tol > 0.0) {
    p.gh = qsd::trim_groups(p.gh, p.diag.values, trim_tol, &p.trim);
    if (p.trim.disabled_zero_splitting) {
      std::cerr << "warning: all diagonal values coincide; group trimming disabled\n";
    }
    report.timings_ms.emplace_back("trim", watch.lap_ms());
  }
  report.dim = static_cast<std::int64_t>(p.subspace.dim());
  report.num_groups = p.groups_before_trim;
  report.num_groups_after_trim = p.gh.num_groups();
  return p;
}

int cmd_jw(const std::string& in_path, const std::string& out_path, bool pauli_oracle) {
  const auto data = qsd::parse_fcidump(read_file(in_path));
  qsd::QubitOperator q = qsd::jordan_wigner(data.op);
  if (pauli_oracle) q = qsd::to_pauli_basis(q);
  const std::string text = qsd::emit_term_list(q);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
    std::cerr << "wrote " << q.size() << " terms over " << q.num_qubits() << " qubits to "
              << out_path << "\n";
  }
  return 0;
}

int cmd_build(const std::string& op_path, const std::string& bits_path,
              const std::string& out_path, const std::string& mode,
              const std::string& lower_mode, const std::string& fermionic_mode,
              bool sort_subspace, double trim_tol, bool no_bucket_skip) {
  Stopwatch watch;
  qsd::RunReport report;
  Pipeline p = prepare(op_path, bits_path, fermionic_mode, sort_subspace, trim_tol, report,
                       watch);

  qsd::BuildOptions opts;
  opts.mode = mode == "two-pass" ? qsd::BuildMode::TwoPass : qsd::BuildMode::Fast;
  opts.lower_only = resolve_lower(lower_mode);
  opts.use_ladder_buckets = !no_bucket_skip;
  const qsd::SubspaceMatrix m = qsd::build_csr(p.gh, p.subspace, p.diag, opts);
  report.timings_ms.emplace_back("build", watch.lap_ms());

  std::ostringstream mm;
  qsd::write_matrix_market(mm, m);
  write_file(out_path, mm.str());
  report.timings_ms.emplace_back("write", watch.lap_ms());

  report.nnz = m.nnz();
  report.mode = mode;
  std::cout << qsd::emit_report(report);
  return 0;
}

int cmd_solve(const std::string& op_path, const std::string& bits_path, bool matrix_free,
              const std::string& mode, const std::string& lower_mode,
              const std::string& fermionic_mode, bool sort_subspace, double trim_tol,
              bool no_bucket_skip, double tol, int max_iter, const std::string& init,
              const std::string& init_file, const std::string& precond, std::uint64_t seed) {
  Stopwatch watch;
  qsd::RunReport report;
  Pipeline p = prepare(op_path, bits_path, fermionic_mode, sort_subspace, trim_tol, report,
                       watch);

  qsd::SolveOptions sopts;
  sopts.tol = tol;
  sopts.max_iter = max_iter;
  sopts.seed = seed;
  sopts.precond = precond == "none" ? qsd::PreconditionerKind::None
                                    : qsd::PreconditionerKind::ShiftedJacobi;
  if (!init_file.empty()) {
    sopts.initial = qsd::InitialVector::User;
    std::istringstream in(read_file(init_file));
    double v = 0.0;
    while (in >> v) sopts.user_initial.emplace_back(v, 0.0);
  } else {
    sopts.initial = init == "uniform" ? qsd::InitialVector::Uniform
                                      : qsd::InitialVector::SpikeAtMinDiagonal;
  }

  double eigenvalue = 0.0, residual = 0.0;
  int iterations = 0;
  bool converged = false;
  const bool real_path = qsd::has_real_matrix(p.op);
  if (matrix_free) {
    report.mode = "matrix-free";
    if (real_path) {
      const qsd::MatrixFreeOperator<double> h(p.gh, p.subspace, p.diag, !no_bucket_skip);
      const auto r = qsd::solve_lowest(h, p.diag.values, sopts);
      eigenvalue = r.eigenvalue;
      residual = r.residual;
      iterations = r.iterations;
      converged = r.converged;
    } else {
      const qsd::MatrixFreeOperator<Complex> h(p.gh, p.subspace, p.diag, !no_bucket_skip);
      const auto r = qsd::solve_lowest(h, p.diag.values, sopts);
      eigenvalue = r.eigenvalue;
      residual = r.residual;
      iterations = r.iterations;
      converged = r.converged;
    }
  } else {
    qsd::BuildOptions opts;
    opts.mode = mode == "two-pass" ? qsd::BuildMode::TwoPass : qsd::BuildMode::Fast;
    opts.lower_only = resolve_lower(lower_mode);
    opts.use_ladder_buckets = !no_bucket_skip;
    const qsd::SubspaceMatrix m = qsd::build_csr(p.gh, p.subspace, p.diag, opts);
    report.timings_ms.emplace_back("build", watch.lap_ms());
    report.nnz = m.nnz();
    report.mode = mode;
    if (m.is_real()) {
      const qsd::CsrOperator<double> h(m.real());
      const auto r = qsd::solve_lowest(h, p.diag.values, sopts);
      eigenvalue = r.eigenvalue;
      residual = r.residual;
      iterations = r.iterations;
      converged = r.converged;
    } else {
      const qsd::CsrOperator<Complex> h(m.cplx());
      const auto r = qsd::solve_lowest(h, p.diag.values, sopts);
      eigenvalue = r.eigenvalue;
      residual = r.residual;
      iterations = r.iterations;
      converged = r.converged;
    }
  }
  report.timings_ms.emplace_back("solve", watch.lap_ms());

  report.eigenvalue = eigenvalue;
  report.residual = residual;
  report.iterations = iterations;
  report.converged = converged;
  std::cout << qsd::emit_report(report);
  return converged ? 0 : kExitNoConvergence;
}

int cmd_ramps(const std::string& op_path, const std::string& seeds_path,
              const std::string& out_path, const std::string& full_path, double tol,
              int max_depth, std::optional<double> energy, const std::string& fermionic_mode) {
  Stopwatch watch;
  qsd::RunReport report;
  report.mode = "ramps";

  const auto op = qsd::combine_like_terms(qsd::parse_term_list(read_file(op_path)));
  const auto seed_strings = qsd::parse_bitstring_lines(read_file(seeds_path));
  report.timings_ms.emplace_back("parse", watch.lap_ms());

  const auto gh = qsd::group_terms(op, resolve_fermionic(fermionic_mode, op));
  report.num_groups = gh.num_groups();
  report.num_groups_after_trim = gh.num_groups();
  const auto seeds = qsd::Subspace::from_bitstrings(seed_strings, op.num_qubits());
  if (seeds.dim() == 0) throw qsd::ValidationError("ramps needs at least one seed bit-string");
  report.dim = static_cast<std::int64_t>(seeds.dim());

  qsd::Subspace full;
  qsd::RampsConfig cfg;
  if (!full_path.empty()) {
    full = qsd::Subspace::from_bitstrings(qsd::parse_bitstring_lines(read_file(full_path)),
                                          op.num_qubits());
    cfg.restrict_to = &full;
  }
  cfg.tolerance = tol;
  cfg.max_depth = max_depth;
  if (energy.has_value()) {
    cfg.target_energy = *energy;
  } else {
    // Default target: the lowest diagonal value over the seeds.
    double e = gh.diagonal_value(seeds.get(0));
    for (std::size_t i = 1; i < seeds.dim(); ++i) {
      e = std::min(e, gh.diagonal_value(seeds.get(i)));
    }
    cfg.target_energy = e;
  }
  report.timings_ms.emplace_back("prepare", watch.lap_ms());

  qsd::RampsStats stats;
  const qsd::Subspace out = qsd::ramps(gh, seeds, cfg, &stats);
  report.timings_ms.emplace_back("ramps", watch.lap_ms());
  report.ramps_subspace_dim = out.dim();

  write_file(out_path, qsd::emit_bitstring_lines(out.entries()));
  report.timings_ms.emplace_back("write", watch.lap_ms());
  std::cerr << "ramps: " << seeds.dim() << " seeds -> " << out.dim() << " bit-strings (depth "
            << stats.depth_reached << ", " << stats.degeneracy_skips << " degeneracy skips)\n";
  std::cout << qsd::emit_report(report);
  return 0;
}

int cmd_neel_subspace(std::uint32_t length, int hamming, const std::string& correction,
                      const std::string& out_path) {
  const auto rule = correction == "discard" ? qsd::NeelCorrection::Discard
                                            : qsd::NeelCorrection::Repair;
  const auto strings = qsd::neel_hamming_subspace(length, hamming, rule);
  const std::string text = qsd::emit_bitstring_lines(strings);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
    std::cerr << "wrote " << strings.size() << " bit-strings to " << out_path << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse and matrix-free subspace representations of qubit and fermionic "
               "Hamiltonians over sampled bit-strings"};
  app.set_version_flag("--version", "qsd 0.1.0");
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: OpenMP runtime)");

  std::string jw_in, jw_out;
  bool jw_pauli = false;
  auto* jw = app.add_subcommand("jw", "Transform a fermionic integral file (FCIDUMP subset) "
                                      "into an extended-alphabet term list");
  jw->add_option("fermion-file", jw_in, "FCIDUMP-subset input")->required();
  jw->add_option("-o,--output", jw_out, "Output term-list path (default: stdout)");
  jw->add_flag("--pauli-oracle", jw_pauli,
               "Emit the classic Pauli decomposition instead (cross-check hook)");

  std::string op_path, bits_path, out_path;
  std::string mode = "fast", lower_mode = "auto", fermionic_mode = "auto";
  bool sort_subspace = false, no_bucket_skip = false;
  double trim_tol = 0.0;

  auto add_common = [&](CLI::App* cmd, bool with_output) {
    cmd->add_option("operator", op_path, "Term-list operator file")->required();
    cmd->add_option("bitstrings", bits_path, "Bit-string subspace file")->required();
    if (with_output) {
      cmd->add_option("-o,--output", out_path, "Output path")->required();
    }
    cmd->add_option("--mode", mode, "CSR build mode")
        ->check(CLI::IsMember({"two-pass", "fast"}));
    cmd->add_option("--lower-only", lower_mode,
                    "Lower-triangle evaluation (auto: Hermitian + sorted subspace)")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    cmd->add_option("--fermionic", fermionic_mode,
                    "Ladder-integer bucketing (auto: ladder-only alphabets)")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    cmd->add_flag("--sort-subspace", sort_subspace,
                  "Re-index the subspace in ascending integer order");
    cmd->add_option("--trim-tol", trim_tol, "Group trimming tolerance (0 disables)");
    cmd->add_flag("--no-bucket-skip", no_bucket_skip,
                  "Disable the ladder-integer bucket skip (verification hook)");
  };

  auto* build = app.add_subcommand("build", "Project the operator into the subspace and "
                                            "write a Matrix Market CSR matrix");
  add_common(build, true);

  auto* solve = app.add_subcommand("solve", "Project and compute the lowest eigenpair");
  add_common(solve, false);
  bool matrix_free = false;
  double tol = 1e-10;
  int max_iter = 2000;
  std::string init = "spike", init_file, precond = "jacobi";
  std::uint64_t seed = 0;
  solve->add_flag("--matrix-free", matrix_free, "Recompute elements on the fly; no matrix");
  solve->add_option("--tol", tol, "Residual tolerance relative to the operator norm");
  solve->add_option("--max-iter", max_iter, "Operator-application cap");
  solve->add_option("--init", init, "Initial vector")
      ->check(CLI::IsMember({"uniform", "spike"}));
  solve->add_option("--init-file", init_file, "Initial vector from file (one entry per line)");
  solve->add_option("--precond", precond, "Preconditioner")
      ->check(CLI::IsMember({"none", "jacobi"}));
  solve->add_option("--seed", seed, "Seed for stagnation-escape restarts");

  auto* rampscmd = app.add_subcommand("ramps", "Prune/extend a seed subspace by recursive "
                                               "perturbative amplitudes");
  std::string seeds_path, full_path;
  double ramps_tol = 1e-8;
  int max_depth = 4;
  double energy_value = 0.0;
  rampscmd->add_option("operator", op_path, "Term-list operator file")->required();
  rampscmd->add_option("seeds", seeds_path, "Seed bit-string file")->required();
  rampscmd->add_option("-o,--output", out_path, "Output bit-string file")->required();
  rampscmd->add_option("--full-subspace", full_path,
                       "Restrict admissions to this sampled subspace");
  rampscmd->add_option("--tol", ramps_tol, "Amplitude tolerance");
  rampscmd->add_option("--max-depth", max_depth, "Maximum recursion depth");
  auto* energy_opt = rampscmd->add_option(
      "--energy", energy_value, "Target energy (default: lowest seed diagonal)");
  rampscmd->add_option("--fermionic", fermionic_mode, "Ladder-integer bucketing")
      ->check(CLI::IsMember({"auto", "on", "off"}));

  auto* neel = app.add_subcommand("neel-subspace", "Write the Neel state and optionally its "
                                                   "corrected Hamming-1 neighborhood");
  std::uint32_t length = 0;
  int hamming = 1;
  std::string correction = "repair";
  neel->add_option("L", length, "Chain length")->required();
  neel->add_option("--hamming", hamming, "Neighborhood distance (0 or 1)");
  neel->add_option("--correction", correction,
                   "Treatment of magnetization-violating samples")
      ->check(CLI::IsMember({"repair", "discard"}));
  neel->add_option("-o,--output", out_path, "Output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  apply_threads(threads);

  try {
    if (app.got_subcommand(jw)) return cmd_jw(jw_in, jw_out, jw_pauli);
    if (app.got_subcommand(build)) {
      return cmd_build(op_path, bits_path, out_path, mode, lower_mode, fermionic_mode,
                       sort_subspace, trim_tol, no_bucket_skip);
    }
    if (app.got_subcommand(solve)) {
      return cmd_solve(op_path, bits_path, matrix_free, mode, lower_mode, fermionic_mode,
                       sort_subspace, trim_tol, no_bucket_skip, tol, max_iter, init, init_file,
                       precond, seed);
    }
    if (app.got_subcommand(rampscmd)) {
      std::optional<double> energy;
      if (energy_opt->count() > 0) energy = energy_value;
      return cmd_ramps(op_path, seeds_path, out_path, full_path, ramps_tol, max_depth, energy,
                       fermionic_mode);
    }
    if (app.got_subcommand(neel)) {
      return cmd_neel_subspace(length, hamming, correction, out_path);
    }
  } catch (const qsd::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const qsd::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
