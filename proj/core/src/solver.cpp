#include "qsd/solver.hpp"

#include "qsd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qsd {

void jacobi_eigensolve(std::vector<double>& a, int n, std::vector<double>& eigenvalues,
                       std::vector<double>& eigenvectors) {
  auto at = [&](std::vector<double>& m, int i, int j) -> double& { return m[i * n + j]; };
  eigenvectors.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) at(eigenvectors, i, i) = 1.0;

  double frob = 0.0;
  for (double v : a) frob += v * v;
  frob = std::sqrt(frob);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += 2.0 * at(a, p, q) * at(a, p, q);
    }
    if (std::sqrt(off) <= 1e-15 * std::max(1.0, frob)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double app = at(a, p, p);
        const double aqq = at(a, q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(a, k, p);
          const double akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(a, p, k);
          const double aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = at(eigenvectors, k, p);
          const double vkq = at(eigenvectors, k, q);
          at(eigenvectors, k, p) = c * vkp - s * vkq;
          at(eigenvectors, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return at(a, x, x) < at(a, y, y); });
  eigenvalues.resize(n);
  std::vector<double> sorted_vecs(static_cast<std::size_t>(n) * n);
  for (int c = 0; c < n; ++c) {
    eigenvalues[c] = at(a, order[c], order[c]);
    for (int r = 0; r < n; ++r) sorted_vecs[r * n + c] = at(eigenvectors, r, order[c]);
  }
  eigenvectors = std::move(sorted_vecs);
}

namespace {

template <class Scalar>
double real_part(Scalar v);
template <>
double real_part(double v) {
  return v;
}
template <>
double real_part(std::complex<double> v) {
  return v.real();
}

template <class Scalar>
Scalar conj_of(Scalar v);
template <>
double conj_of(double v) {
  return v;
}
template <>
std::complex<double> conj_of(std::complex<double> v) {
  return std::conj(v);
}

template <class Scalar>
Scalar dot(std::span<const Scalar> a, std::span<const Scalar> b) {
  Scalar acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += conj_of(a[i]) * b[i];
  return acc;
}

template <class Scalar>
double norm2(std::span<const Scalar> a) {
  double acc = 0.0;
  for (const Scalar& v : a) acc += std::norm(v);
  return std::sqrt(acc);
}

template <class Scalar>
void axpy(Scalar alpha, std::span<const Scalar> x, std::span<Scalar> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

template <class Scalar>
void scale(std::span<Scalar> x, double alpha) {
  for (Scalar& v : x) v *= alpha;
}

template <class Scalar>
void fill_random(std::vector<Scalar>& v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Scalar& e : v) {
    if constexpr (std::is_same_v<Scalar, double>) {
      e = dist(rng);
    } else {
      const double re = dist(rng);
      const double im = dist(rng);
      e = Scalar(re, im);
    }
  }
}

// Smallest eigenpair of the Hermitian projection T (m x m, row-major).
// The complex case is embedded into a real symmetric matrix of twice the
// size; any eigenvector of the embedding maps back to a valid complex one.
template <class Scalar>
void smallest_ritz_pair(const std::vector<Scalar>& t, int m, double& theta,
                        std::vector<Scalar>& s) {
  std::vector<double> dense;
  int n = 0;
  if constexpr (std::is_same_v<Scalar, double>) {
    n = m;
    dense = t;
  } else {
    n = 2 * m;
    dense.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const std::complex<double> v = t[i * m + j];
        dense[i * n + j] = v.real();
        dense[(i + m) * n + (j + m)] = v.real();
        dense[(i + m) * n + j] = v.imag();
        dense[i * n + (j + m)] = -v.imag();
      }
    }
  }
  std::vector<double> evals;
  std::vector<double> evecs;
  jacobi_eigensolve(dense, n, evals, evecs);
  theta = evals[0];
  s.resize(m);
  if constexpr (std::is_same_v<Scalar, double>) {
    for (int i = 0; i < m; ++i) s[i] = evecs[i * n + 0];
  } else {
    for (int i = 0; i < m; ++i) {
      s[i] = std::complex<double>(evecs[i * n + 0], evecs[(i + m) * n + 0]);
    }
    const double nrm = norm2(std::span<const Scalar>(s));
    if (nrm > 0.0) {
      for (auto& v : s) v /= nrm;
    }
  }
}

} // namespace

template <class Scalar>
EigenResult<Scalar> solve_lowest(const LinearOperator<Scalar>& op,
                                 std::span<const double> diagonal, const SolveOptions& opts) {
  const std::int64_t n64 = op.dim();
  if (n64 < 1) throw ValidationError("solve_lowest: operator dimension must be at least 1");
  if (opts.tol <= 0.0) throw ValidationError("solve_lowest: tol must be positive");
  if (static_cast<std::int64_t>(diagonal.size()) != n64) {
    throw ValidationError("solve_lowest: diagonal length does not match operator dimension");
  }
  const std::size_t n = static_cast<std::size_t>(n64);

  EigenResult<Scalar> result;
  std::mt19937_64 rng(opts.seed ^ 0x5851f42d4c957f2dull);

  double hscale = 1.0;
  for (double d : diagonal) hscale = std::max(hscale, std::abs(d));

  // Initial vector.
  std::vector<Scalar> t(n, Scalar{});
  switch (opts.initial) {
    case InitialVector::Uniform:
      std::fill(t.begin(), t.end(), Scalar(1.0));
      break;
    case InitialVector::SpikeAtMinDiagonal: {
      std::size_t k = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (diagonal[i] < diagonal[k]) k = i;
      }
      t[k] = Scalar(1.0);
      break;
    }
    case InitialVector::User: {
      if (opts.user_initial.size() != n) {
        throw ValidationError("solve_lowest: user initial vector has wrong length");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<Scalar, double>) {
          t[i] = opts.user_initial[i].real();
        } else {
          t[i] = opts.user_initial[i];
        }
      }
      if (norm2(std::span<const Scalar>(t)) == 0.0) {
        throw ValidationError("solve_lowest: user initial vector is zero");
      }
      break;
    }
  }

  const int max_basis = std::max(2, std::min<int>(opts.max_basis, static_cast<int>(n)));
  std::vector<std::vector<Scalar>> basis;     // V
  std::vector<std::vector<Scalar>> images;    // W = H V
  std::vector<Scalar> projected;              // T = V^H W, row-major, current m x m
  std::vector<Scalar> x(n), hx(n), resid(n);
  double theta = 0.0;
  double best_resid = std::numeric_limits<double>::infinity();
  int injections = 0;

  auto orthonormalize = [&](std::vector<Scalar>& v) -> bool {
    double nrm = norm2(std::span<const Scalar>(v));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) return false;
    scale(std::span<Scalar>(v), 1.0 / nrm);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const Scalar c = dot(std::span<const Scalar>(b), std::span<const Scalar>(v));
        axpy(-c, std::span<const Scalar>(b), std::span<Scalar>(v));
      }
    }
    // v entered with unit norm; a collapsed norm means it lies in span(V).
    nrm = norm2(std::span<const Scalar>(v));
    if (nrm < 1e-10) return false;
    scale(std::span<Scalar>(v), 1.0 / nrm);
    return true;
  };

  while (result.iterations < opts.max_iter) {
    if (!orthonormalize(t)) {
      if (basis.size() >= n) break; // basis spans the whole space
      fill_random(t, rng);
      ++injections;
      if (injections > 16 || !orthonormalize(t)) break;
    }
    basis.push_back(t);
    images.emplace_back(n);
    op.apply(std::span<const Scalar>(basis.back()), std::span<Scalar>(images.back()));
    ++result.iterations;

    // Grow T by one row/column.
    const int m = static_cast<int>(basis.size());
    std::vector<Scalar> grown(static_cast<std::size_t>(m) * m, Scalar{});
    for (int i = 0; i < m - 1; ++i) {
      for (int j = 0; j < m - 1; ++j) grown[i * m + j] = projected[i * (m - 1) + j];
    }
    for (int i = 0; i < m; ++i) {
      const Scalar v =
          dot(std::span<const Scalar>(basis[i]), std::span<const Scalar>(images.back()));
      grown[i * m + (m - 1)] = v;
      grown[(m - 1) * m + i] = conj_of(v);
    }
    projected = std::move(grown);

    std::vector<Scalar> ritz;
    smallest_ritz_pair(projected, m, theta, ritz);
    hscale = std::max(hscale, std::abs(theta));

    std::fill(x.begin(), x.end(), Scalar{});
    std::fill(hx.begin(), hx.end(), Scalar{});
    for (int i = 0; i < m; ++i) {
      axpy(ritz[i], std::span<const Scalar>(basis[i]), std::span<Scalar>(x));
      axpy(ritz[i], std::span<const Scalar>(images[i]), std::span<Scalar>(hx));
    }
    for (std::size_t i = 0; i < n; ++i) resid[i] = hx[i] - Scalar(theta) * x[i];
    const double rn = norm2(std::span<const Scalar>(resid));

    if (rn < best_resid) {
      best_resid = rn;
      result.eigenvector = x;
    }
    if (rn <= opts.tol * std::max(1.0, hscale)) {
      result.converged = true;
      break;
    }
    if (basis.size() >= n) break; // exact in the full space; nothing to add

    if (m >= max_basis) {
      // Restart from the current Ritz vector.
      const double xn = norm2(std::span<const Scalar>(x));
      std::vector<Scalar> v0 = x;
      scale(std::span<Scalar>(v0), 1.0 / xn);
      std::vector<Scalar> w0 = hx;
      scale(std::span<Scalar>(w0), 1.0 / xn);
      basis.assign(1, std::move(v0));
      images.assign(1, std::move(w0));
      projected.assign(1, dot(std::span<const Scalar>(basis[0]),
                              std::span<const Scalar>(images[0])));
    }

    t = resid;
    if (opts.precond == PreconditionerKind::ShiftedJacobi) {
      const double floor = 1e-10 * std::max(1.0, hscale);
      for (std::size_t i = 0; i < n; ++i) {
        double denom = diagonal[i] - theta; // dynamic shift at the Ritz value
        if (std::abs(denom) < floor) denom = (denom < 0.0) ? -floor : floor;
        t[i] = t[i] / Scalar(denom);
      }
    }
  }

  // Report the Rayleigh quotient and a freshly recomputed residual for the
  // returned vector.
  if (result.eigenvector.empty()) result.eigenvector = std::move(x);
  const double vn = norm2(std::span<const Scalar>(result.eigenvector));
  if (vn > 0.0) scale(std::span<Scalar>(result.eigenvector), 1.0 / vn);
  op.apply(std::span<const Scalar>(result.eigenvector), std::span<Scalar>(hx));
  ++result.iterations;
  result.eigenvalue = real_part(
      dot(std::span<const Scalar>(result.eigenvector), std::span<const Scalar>(hx)));
  for (std::size_t i = 0; i < n; ++i) {
    resid[i] = hx[i] - Scalar(result.eigenvalue) * result.eigenvector[i];
  }
  result.residual = norm2(std::span<const Scalar>(resid));
  if (result.residual <= opts.tol * std::max(1.0, hscale)) result.converged = true;
  return result;
}

template EigenResult<double> solve_lowest<double>(const LinearOperator<double>&,
                                                  std::span<const double>, const SolveOptions&);
template EigenResult<std::complex<double>> solve_lowest<std::complex<double>>(
    const LinearOperator<std::complex<double>>&, std::span<const double>, const SolveOptions&);

} // namespace qsd
