#include "ndcz/eigen.hpp"

#include <algorithm>
#include <cmath>

namespace ndcz {

namespace {

double off_diagonal_sq(const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a[i * n + j] * a[i * n + j];
  return s;
}

}  // namespace

std::vector<double> jacobi_symmetric(std::vector<double> a, std::size_t n) {
  if (n == 0) return {};
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return std::vector<double>(n, 0.0);
  const double tol = 1e-24 * scale * scale * n * n;
  for (int sweep = 0; sweep < 100 && off_diagonal_sq(a, n) > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a[p * n + q];
        if (apq == 0.0) continue;
        double app = a[p * n + p], aqq = a[q * n + q];
        double theta = 0.5 * (aqq - app) / apq;
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> jacobi_hermitian(std::vector<std::complex<double>> a,
                                     std::size_t m) {
  using C = std::complex<double>;
  if (m == 0) return {};
  double scale = 0.0;
  for (const C& v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return std::vector<double>(m, 0.0);
  auto off = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) s += std::norm(a[i * m + j]);
    return s;
  };
  const double tol = 1e-24 * scale * scale * m * m;
  for (int sweep = 0; sweep < 100 && off() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        C apq = a[p * m + q];
        double mag = std::abs(apq);
        if (mag == 0.0) continue;
        // phase that makes the pivot real, then a real Jacobi rotation
        C phase = apq / mag;
        double app = a[p * m + p].real(), aqq = a[q * m + q].real();
        double theta = 0.5 * (aqq - app) / mag;
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        // columns: [p q] <- [p q] * [[c, s], [-s̄, c]] with phase folded in
        for (std::size_t k = 0; k < m; ++k) {
          C akp = a[k * m + p], akq = a[k * m + q];
          a[k * m + p] = c * akp - s * (akq * std::conj(phase));
          a[k * m + q] = s * (akp * phase) + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          C apk = a[p * m + k], aqk = a[q * m + k];
          a[p * m + k] = c * apk - s * (phase * aqk);
          a[q * m + k] = s * (std::conj(phase) * apk) + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(m);
  for (std::size_t i = 0; i < m; ++i) ev[i] = a[i * m + i].real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace kernels {

void matvec(const std::vector<double>& a, std::size_t n,
            const std::vector<double>& x, std::vector<double>& y) {
  y.resize(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    const double* row = a.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

}  // namespace kernels

double spectral_norm(const std::vector<double>& a, std::size_t n) {
  if (n == 0) return 0.0;
  double amax = 0.0;
  for (double v : a) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) return 0.0;

  std::vector<double> v(n), av(n), atav(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * (i % 7);
  double sigma = 0.0;
  const int cap = 20000;
  for (int it = 0; it < cap; ++it) {
    kernels::matvec(a, n, v, av);
    // A^T (A v), serial accumulation
    for (std::size_t j = 0; j < n; ++j) atav[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = a.data() + i * n;
      double s = av[i];
      for (std::size_t j = 0; j < n; ++j) atav[j] += row[j] * s;
    }
    double nrm = 0.0;
    for (double x : atav) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return 0.0;
    double next = std::sqrt(nrm);  // ||A^T A v|| -> lambda_max estimate
    for (std::size_t j = 0; j < n; ++j) v[j] = atav[j] / nrm;
    if (it > 2 && std::abs(next - sigma) <= 1e-8 * std::max(next, 1e-300)) {
      return next;
    }
    sigma = next;
  }
  // dense fallback
  std::vector<double> g(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a[k * n + i] * a[k * n + j];
      g[i * n + j] = s;
    }
  auto ev = jacobi_symmetric(std::move(g), n);
  return std::sqrt(std::max(0.0, ev.back()));
}

double spectral_norm_complex(const std::vector<std::complex<double>>& a,
                             std::size_t n) {
  using C = std::complex<double>;
  if (n == 0) return 0.0;
  double amax = 0.0;
  for (const C& v : a) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) return 0.0;
  std::vector<C> v(n), av(n), atav(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = C(1.0 + 0.01 * (i % 7), 0.3 * (i % 3));
  double sigma = 0.0;
  const int cap = 20000;
  for (int it = 0; it < cap; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      C s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * v[j];
      av[i] = s;
    }
    for (std::size_t j = 0; j < n; ++j) atav[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        atav[j] += std::conj(a[i * n + j]) * av[i];
    double nrm = 0.0;
    for (const C& x : atav) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return 0.0;
    double next = std::sqrt(nrm);
    for (std::size_t j = 0; j < n; ++j) v[j] = atav[j] / nrm;
    if (it > 2 && std::abs(next - sigma) <= 1e-8 * std::max(next, 1e-300))
      return next;
    sigma = next;
  }
  std::vector<C> g(n * n, C(0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      C s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += std::conj(a[k * n + i]) * a[k * n + j];
      g[i * n + j] = s;
    }
  auto ev = jacobi_hermitian(std::move(g), n);
  return std::sqrt(std::max(0.0, ev.back()));
}

}  // namespace ndcz
