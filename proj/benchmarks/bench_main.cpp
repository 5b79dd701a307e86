#include "qsd/grouping.hpp"
#include "qsd/matrix.hpp"
#include "qsd/models.hpp"
#include "qsd/operators.hpp"
#include "qsd/subspace.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace qsd;

std::vector<BitString> random_strings(std::uint32_t width, std::size_t count,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<BitString> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    BitString b(width);
    for (std::uint32_t q = 0; q < width; ++q) {
      if (rng() & 1) b.set(q);
    }
    out.push_back(std::move(b));
  }
  return out;
}

FermionOperator synthetic_integrals(std::uint32_t norb, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  FermionOperator op(2 * norb);
  auto mode = [](std::uint32_t p, std::uint32_t s) { return 2 * p + s; };
  for (std::uint32_t p = 0; p < norb; ++p) {
    for (std::uint32_t q = p; q < norb; ++q) {
      const double h = dist(rng);
      for (std::uint32_t s = 0; s < 2; ++s) {
        op.add_term(FermionTerm{h, {mode(p, s), mode(q, s)}, {true, false}});
        if (p != q) op.add_term(FermionTerm{h, {mode(q, s), mode(p, s)}, {true, false}});
      }
    }
  }
  for (std::uint32_t p = 0; p < norb; ++p) {
    for (std::uint32_t q = 0; q < norb; ++q) {
      for (std::uint32_t r = 0; r < norb; ++r) {
        const double v = 0.1 * dist(rng);
        for (std::uint32_t s1 = 0; s1 < 2; ++s1) {
          for (std::uint32_t s2 = 0; s2 < 2; ++s2) {
            op.add_term(FermionTerm{
                0.5 * v,
                {mode(p, s1), mode(q, s2), mode(q, s2), mode(r, s1)},
                {true, true, false, false}});
          }
        }
      }
    }
  }
  return op;
}

struct SpinFixture {
  QubitOperator op;
  GroupedHamiltonian gh;
  Subspace subspace;
  DiagonalCache diag;

  SpinFixture(std::uint32_t length, std::size_t dim)
      : op(heisenberg_xxz_chain(length, 0.3)),
        gh(group_terms(op, false)),
        subspace(Subspace::from_bitstrings(random_strings(length, dim, 7), length)
                     .sorted_by_integer_value()),
        diag(compute_diagonal(gh, subspace)) {}
};

const SpinFixture& spin_fixture() {
  static SpinFixture f(24, 20000);
  return f;
}

void BM_subspace_lookup_hit(benchmark::State& state) {
  const auto& f = spin_fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.subspace.find(f.subspace.get(i)));
    i = (i + 1) % f.subspace.dim();
  }
}
BENCHMARK(BM_subspace_lookup_hit);

void BM_subspace_lookup_miss(benchmark::State& state) {
  const auto& f = spin_fixture();
  const auto probes = random_strings(24, 4096, 99);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.subspace.find(probes[i]));
    i = (i + 1) % probes.size();
  }
}
BENCHMARK(BM_subspace_lookup_miss);

void BM_subspace_lookup_miss_no_occupancy_gate(benchmark::State& state) {
  const auto& f = spin_fixture();
  const auto probes = random_strings(24, 4096, 99);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.subspace.find_no_occupancy_gate(probes[i]));
    i = (i + 1) % probes.size();
  }
}
BENCHMARK(BM_subspace_lookup_miss_no_occupancy_gate);

void BM_sort_by_integer_value(benchmark::State& state) {
  const auto strings = random_strings(200, 20000, 11);
  const Subspace s = Subspace::from_bitstrings(strings, 200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.sorted_by_integer_value());
  }
}
BENCHMARK(BM_sort_by_integer_value);

void BM_build_csr_two_pass(benchmark::State& state) {
  const auto& f = spin_fixture();
  BuildOptions opts;
  opts.mode = BuildMode::TwoPass;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_csr(f.gh, f.subspace, f.diag, opts));
  }
}
BENCHMARK(BM_build_csr_two_pass)->Unit(benchmark::kMillisecond);

void BM_build_csr_fast(benchmark::State& state) {
  const auto& f = spin_fixture();
  BuildOptions opts;
  opts.mode = BuildMode::Fast;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_csr(f.gh, f.subspace, f.diag, opts));
  }
}
BENCHMARK(BM_build_csr_fast)->Unit(benchmark::kMillisecond);

void BM_spmv_csr(benchmark::State& state) {
  const auto& f = spin_fixture();
  const auto m = build_csr(f.gh, f.subspace, f.diag);
  std::vector<double> x(f.subspace.dim(), 1.0), y(f.subspace.dim());
  for (auto _ : state) {
    spmv(m.real(), std::span<const double>(x), std::span<double>(y));
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_spmv_csr)->Unit(benchmark::kMillisecond);

void BM_matvec_matrix_free(benchmark::State& state) {
  const auto& f = spin_fixture();
  const MatrixFreeOperator<double> h(f.gh, f.subspace, f.diag);
  std::vector<double> x(f.subspace.dim(), 1.0), y(f.subspace.dim());
  for (auto _ : state) {
    h.apply(std::span<const double>(x), std::span<double>(y));
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_matvec_matrix_free)->Unit(benchmark::kMillisecond);

void BM_jordan_wigner(benchmark::State& state) {
  const auto fop = synthetic_integrals(8, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(jordan_wigner(fop));
  }
}
BENCHMARK(BM_jordan_wigner)->Unit(benchmark::kMillisecond);

void BM_group_terms_fermionic(benchmark::State& state) {
  const auto q = jordan_wigner(synthetic_integrals(8, 3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(group_terms(q, true));
  }
}
BENCHMARK(BM_group_terms_fermionic)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
