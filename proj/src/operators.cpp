#include "ndcz/operators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "ndcz/eigen.hpp"

namespace ndcz {

KernelSpec KernelSpec::parse(const std::string& text, const PointMeasure& mu) {
  KernelSpec k;
  if (text == "cauchy") {
    k.kind = KernelKind::cauchy;
    k.degree = 1.0;
    if (mu.dim() > 2)
      throw std::invalid_argument("cauchy kernel needs d <= 2");
  } else if (text.rfind("riesz:", 0) == 0) {
    k.kind = KernelKind::riesz;
    k.riesz_component = std::stoi(text.substr(6));
    if (k.riesz_component < 0 || k.riesz_component >= mu.dim())
      throw std::invalid_argument("riesz component out of range");
    k.degree = mu.growth_degree();
  } else if (text.rfind("custom:", 0) == 0) {
    k.kind = KernelKind::custom;
    k.degree = mu.growth_degree();
    std::string path = text.substr(7);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open kernel table: " + path);
    nlohmann::json j;
    in >> j;
    for (const auto& row : j)
      for (const auto& v : row) k.custom.push_back(v.get<double>());
    if (k.custom.size() != mu.size() * mu.size())
      throw std::runtime_error("kernel table shape does not match measure");
  } else {
    throw std::invalid_argument("unknown kernel: " + text);
  }
  return k;
}

double KernelSpec::eval(const PointMeasure& mu, std::size_t i,
                        std::size_t j) const {
  if (i == j) return 0.0;
  double d = mu.dist(i, j);
  if (d < epsilon || d == 0.0) return 0.0;
  switch (kind) {
    case KernelKind::cauchy: {
      if (mu.dim() == 1) return 1.0 / (mu.point(i)[0] - mu.point(j)[0]);
      // real component of the complex-plane kernel 1/(z_i - z_j)
      return (mu.point(i)[0] - mu.point(j)[0]) / (d * d);
    }
    case KernelKind::riesz: {
      double num = mu.point(i)[riesz_component] - mu.point(j)[riesz_component];
      return num / std::pow(d, degree + 1.0);
    }
    case KernelKind::custom:
      return custom[i * mu.size() + j];
  }
  return 0.0;
}

KernelValidation validate_kernel(const PointMeasure& mu, const KernelSpec& k) {
  KernelValidation rep;
  const std::size_t n = mu.size();
  std::vector<double> per_row(n, 0.0);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == static_cast<long long>(j)) continue;
      double d = mu.dist(i, j);
      best = std::max(best,
                      std::abs(k.eval(mu, i, j)) * std::pow(d, k.degree));
    }
    per_row[i] = best;
  }
  for (double v : per_row) rep.size_constant = std::max(rep.size_constant, v);
  rep.size_ok =
      k.kind == KernelKind::custom || rep.size_constant <= 1.0 + 1e-9;

  // Lipschitz ratio on sampled triples with |x - x'| <= |x - y| / 2
  std::size_t stride = 1;
  while (n * n * n / (stride * stride * stride) > 8000000) ++stride;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; i += stride)
    for (std::size_t ip = 0; ip < n; ip += stride) {
      if (ip == i) continue;
      double dxx = mu.dist(i, ip);
      for (std::size_t j = 0; j < n; j += stride) {
        if (j == i || j == ip) continue;
        double d = mu.dist(i, j);
        if (!(dxx <= 0.5 * d)) continue;
        double diff = std::abs(k.eval(mu, i, j) - k.eval(mu, ip, j));
        worst = std::max(worst, diff * std::pow(d, k.degree + k.gamma) /
                                    std::pow(dxx, k.gamma));
      }
    }
  rep.lipschitz_ratio = worst;
  return rep;
}

namespace kernels {

std::vector<double> assemble_kernel_matrix(const PointMeasure& mu,
                                           const KernelSpec& spec) {
  const std::size_t n = mu.size();
  std::vector<double> m(n * n, 0.0);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i * n + j] = spec.eval(mu, i, j) * mu.weight(j);
  return m;
}

}  // namespace kernels

DiscreteOperator build_operator(const PointMeasure& mu, const KernelSpec& k) {
  DiscreteOperator t;
  t.n = mu.size();
  t.spec = k;
  t.matrix = kernels::assemble_kernel_matrix(mu, k);
  return t;
}

ScalarField apply(const DiscreteOperator& t, const ScalarField& f) {
  if (f.size() != t.n)
    throw std::invalid_argument("apply: field size mismatch");
  ScalarField out;
  kernels::matvec(t.matrix, t.n, f, out);
  return out;
}

namespace {

std::vector<double> conjugated_matrix(const PointMeasure& mu,
                                      const DiscreteOperator& t,
                                      const std::vector<double>* weight) {
  // S = D^{1/2} K D^{1/2} with D_ii = m_i w_i: the L2(w dmu) operator norm of
  // T equals the spectral norm of S when entry (i,j) is scaled by
  // sqrt(w_i / w_j); matrix already carries the m_j factor.
  const std::size_t n = t.n;
  std::vector<double> s(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double wi = weight ? (*weight)[i] : 1.0;
      double wj = weight ? (*weight)[j] : 1.0;
      s[i * n + j] = t.matrix[i * n + j] *
                     std::sqrt(mu.weight(i) * wi / (mu.weight(j) * wj));
    }
  }
  return s;
}

}  // namespace

double l2_norm_estimate(const PointMeasure& mu, const DiscreteOperator& t) {
  return spectral_norm(conjugated_matrix(mu, t, nullptr), t.n);
}

double weighted_l2_norm(const PointMeasure& mu, const DiscreteOperator& t,
                        const std::vector<double>& w) {
  return spectral_norm(conjugated_matrix(mu, t, &w), t.n);
}

ScalarField maximal_centered(const PointMeasure& mu, const ScalarField& f) {
  const std::size_t n = mu.size();
  ScalarField out(n, 0.0);
  const auto& t = mu.neighbors();
#pragma omp parallel for schedule(static)
  for (long long x = 0; x < static_cast<long long>(n); ++x) {
    const auto& ord = t.order[x];
    const auto& d = t.dist[x];
    double best = std::abs(f[x]);  // the piece below the closest neighbor
    double num = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      num += mu.weight(ord[k]) * std::abs(f[ord[k]]);
      if (k + 1 < n && d[k + 1] == d[k]) continue;  // same radius step
      if (d[k] == 0.0) continue;
      double den = t.mass_within(x, 5.0 * d[k]);
      best = std::max(best, num / den);
    }
    out[x] = best;
  }
  return out;
}

ScalarField maximal_lattice(const PointMeasure& mu, const Lattice& lat,
                            const ScalarField& f, double alpha) {
  const std::size_t n = mu.size();
  const auto& t = mu.neighbors();
  // per cube: integral of |f| over 56 B_Q and mass of alpha B_Q
  std::vector<double> ratio(lat.cubes.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (long long q = 0; q < static_cast<long long>(lat.cubes.size()); ++q) {
    const Cube& c = lat.cubes[q];
    std::size_t cnt = t.count_within(c.center_index, 56.0 * c.radius);
    double num = 0.0;
    for (std::size_t k = 0; k < cnt; ++k) {
      uint32_t i = t.order[c.center_index][k];
      num += mu.weight(i) * std::abs(f[i]);
    }
    double den = t.mass_within(c.center_index, alpha * c.radius);
    ratio[q] = den > 0.0 ? num / den : 0.0;
  }
  ScalarField out(n, 0.0);
  for (std::size_t g = 0; g < lat.gens.size(); ++g)
    for (std::size_t i = 0; i < n; ++i)
      out[i] = std::max(out[i], ratio[lat.cube_of[g][i]]);
  return out;
}

CZDecomposition cz_decompose(const Filtration& f, const ScalarField& field,
                             double lambda) {
  const std::size_t n = field.size();
  for (double v : field)
    if (v < 0.0)
      throw std::invalid_argument("cz_decompose: field must be nonnegative");
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) l1 += f.weights[i] * field[i];
  if (!(lambda > l1 / f.total_mass))
    throw std::invalid_argument(
        "cz_decompose: lambda must exceed the global average of f");

  CZDecomposition out;
  out.lambda = lambda;

  // maximal atoms with average above lambda, found top-down
  std::vector<uint32_t> stack = {f.root};
  while (!stack.empty()) {
    uint32_t a = stack.back();
    stack.pop_back();
    const SigmaAtom& atom = f.atoms[a];
    if (atom.sigma_parent >= 0 && f.avg(field, a) > lambda) {
      out.maximal_atoms.push_back(a);
      continue;
    }
    for (uint32_t k : atom.kids) stack.push_back(k);
  }
  std::sort(out.maximal_atoms.begin(), out.maximal_atoms.end());

  // phi_k = sum over maximal atoms at level k of f chi_Q - E_{k-1}[f chi_Q]
  std::vector<int> levels;
  for (uint32_t a : out.maximal_atoms) levels.push_back(f.atoms[a].level);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  out.good = field;
  double mean_defect = 0.0;
  for (int lvl : levels) {
    ScalarField phi(n, 0.0);
    for (uint32_t a : out.maximal_atoms) {
      const SigmaAtom& atom = f.atoms[a];
      if (atom.level != lvl) continue;
      const SigmaAtom& parent = f.atoms[atom.sigma_parent];
      double integral = 0.0;
      for (uint32_t i : atom.members) integral += f.weights[i] * field[i];
      double spread = integral / parent.mass;
      for (uint32_t i : atom.members) phi[i] += field[i];
      for (uint32_t i : parent.members) phi[i] -= spread;
      // the piece integrates to zero over the parent cell
      double piece = integral - spread * parent.mass;
      mean_defect = std::max(mean_defect, std::abs(piece));
    }
    double pl1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.good[i] -= phi[i];
      pl1 += f.weights[i] * std::abs(phi[i]);
    }
    out.bad_l1 += pl1;
    out.phi_levels.push_back(lvl);
    out.phis.push_back(std::move(phi));
  }
  for (std::size_t i = 0; i < n; ++i)
    out.good_l2_sq += f.weights[i] * out.good[i] * out.good[i];
  out.mean_zero_defect = l1 > 0.0 ? mean_defect / l1 : mean_defect;
  return out;
}

Weak11Report weak11_report(const PointMeasure& mu, const DiscreteOperator& t,
                           const std::vector<ScalarField>& fields,
                           const std::vector<double>& lambdas) {
  Weak11Report rep;
  for (std::size_t fi = 0; fi < fields.size(); ++fi) {
    ScalarField tf = apply(t, fields[fi]);
    double l1 = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      l1 += mu.weight(i) * std::abs(fields[fi][i]);
    for (double lam : lambdas) {
      double m = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i)
        if (std::abs(tf[i]) > lam) m += mu.weight(i);
      double v = l1 > 0.0 ? lam * m / l1 : 0.0;
      rep.rows.push_back({fi, lam, v});
      rep.max_value = std::max(rep.max_value, v);
    }
  }
  return rep;
}

}  // namespace ndcz
