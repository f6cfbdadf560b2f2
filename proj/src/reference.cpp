#include "ndcz/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ndcz/operators.hpp"
#include "ndcz/sparse.hpp"
#include "ndcz/spaces.hpp"

namespace ndcz {

namespace reference_detail {
std::vector<TolsaReport> tolsa_norms_serial(
    const PointMeasure& mu, const std::vector<ScalarField>& fields,
    double beta);
}

namespace reference {

NeighborTable build_neighbor_table(const PointMeasure& mu) {
  const std::size_t n = mu.size();
  NeighborTable t;
  t.order.resize(n);
  t.dist.resize(n);
  t.wprefix.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = mu.dist(i, j);
    auto& ord = t.order[i];
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0u);
    std::sort(ord.begin(), ord.end(), [&](uint32_t a, uint32_t b) {
      if (d[a] != d[b]) return d[a] < d[b];
      return a < b;
    });
    t.dist[i].resize(n);
    t.wprefix[i].resize(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      t.dist[i][k] = d[ord[k]];
      acc += mu.weight(ord[k]);
      t.wprefix[i][k] = acc;
    }
  }
  return t;
}

double growth_constant(const PointMeasure& mu, const std::vector<double>& grid,
                       double degree) {
  const auto& t = mu.neighbors();
  double best = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& d = t.dist[i];
    const auto& wp = t.wprefix[i];
    std::size_t k = 0;
    for (double r : grid) {
      while (k < d.size() && d[k] <= r) ++k;
      if (k == 0) continue;
      best = std::max(best, wp[k - 1] / std::pow(r, degree));
    }
  }
  return best;
}

std::vector<TolsaReport> tolsa_norms(const PointMeasure& mu,
                                     const std::vector<ScalarField>& fields,
                                     double beta) {
  return reference_detail::tolsa_norms_serial(mu, fields, beta);
}

A2Report a2_characteristic(const PointMeasure& mu, const Weight& w,
                           double alpha_p, double beta_p) {
  if (!(beta_p > std::pow(alpha_p, mu.dim())))
    throw std::invalid_argument("a2: beta' must exceed alpha'^d");
  const auto& grid = mu.canonical_grid();
  const auto& t = mu.neighbors();
  A2Report best;
  for (std::size_t c = 0; c < mu.size(); ++c) {
    std::size_t last = std::numeric_limits<std::size_t>::max();
    for (double r : grid) {
      std::size_t cnt = t.count_within(c, r);
      if (cnt == 0) continue;
      double mass = t.wprefix[c][cnt - 1];
      if (t.mass_within(c, alpha_p * r) > beta_p * mass) continue;
      if (cnt == last) continue;
      last = cnt;
      double aw = 0.0, ainv = 0.0;
      for (std::size_t k = 0; k < cnt; ++k) {
        uint32_t i = t.order[c][k];
        aw += mu.weight(i) * w.values[i];
        ainv += mu.weight(i) / w.values[i];
      }
      double v = (aw / mass) * (ainv / mass);
      if (v > best.value) {
        best.value = v;
        best.center = static_cast<int64_t>(c);
        best.radius = r;
      }
    }
  }
  if (best.center < 0)
    throw std::invalid_argument("a2: no doubling ball in the canonical family");
  return best;
}

void matvec(const std::vector<double>& m, std::size_t n,
            const std::vector<double>& x, std::vector<double>& y) {
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = m.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

std::vector<double> assemble_kernel_matrix(const PointMeasure& mu,
                                           const KernelSpec& spec) {
  const std::size_t n = mu.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i * n + j] = spec.eval(mu, i, j) * mu.weight(j);
  return m;
}

}  // namespace reference
}  // namespace ndcz
