#include "ndcz/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ndcz {

double weighted_median(const PointMeasure& mu, const std::vector<uint32_t>& s,
                       const ScalarField& f) {
  if (s.empty()) throw std::invalid_argument("weighted_median: empty set");
  std::vector<std::pair<double, double>> vw;  // (value, weight)
  vw.reserve(s.size());
  double total = 0.0;
  for (uint32_t i : s) {
    vw.emplace_back(f[i], mu.weight(i));
    total += mu.weight(i);
  }
  std::sort(vw.begin(), vw.end());
  // group equal values, then take the smallest admissible one
  double below = 0.0;
  std::size_t k = 0;
  while (k < vw.size()) {
    double v = vw[k].first;
    double at = 0.0;
    while (k < vw.size() && vw[k].first == v) {
      at += vw[k].second;
      ++k;
    }
    double above = total - below - at;
    if (below <= 0.5 * total && above <= 0.5 * total) return v;
    below += at;
  }
  return vw.back().first;  // unreachable for positive weights
}

double lambda_oscillation(const PointMeasure& mu,
                          const std::vector<uint32_t>& s, const ScalarField& f,
                          double lambda) {
  if (s.empty()) throw std::invalid_argument("lambda_oscillation: empty set");
  std::vector<std::pair<double, double>> vw;
  vw.reserve(s.size());
  double total = 0.0;
  for (uint32_t i : s) {
    vw.emplace_back(f[i], mu.weight(i));
    total += mu.weight(i);
  }
  std::sort(vw.begin(), vw.end());
  const double target = lambda * total;
  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  double window = 0.0;
  for (std::size_t i = 0; i < vw.size(); ++i) {
    if (j < i) {
      j = i;
      window = 0.0;
    }
    while (j < vw.size() && window < target) window += vw[j++].second;
    if (window < target) break;
    best = std::min(best, vw[j - 1].first - vw[i].first);
    window -= vw[i].second;
  }
  return std::isinf(best) ? 0.0 : best;
}

namespace {

struct BuildState {
  const PointMeasure& mu;
  const Filtration& fil;
  const ScalarField& f;
  double lambda;
  SparseFamily family;
  std::vector<double> medians;
  std::vector<double> oscillations;
  std::vector<double> levels;
};

// Smallest t with mu({|f - med| > t} ∩ Q) <= mu(Q) / 4.
double quarter_mass_level(const BuildState& st,
                          const std::vector<uint32_t>& members, double med,
                          double mass) {
  std::vector<std::pair<double, double>> av;  // (|f - med|, weight)
  av.reserve(members.size());
  for (uint32_t i : members)
    av.emplace_back(std::abs(st.f[i] - med), st.fil.weights[i]);
  std::sort(av.begin(), av.end());
  std::vector<double> suffix(av.size() + 1, 0.0);
  for (std::size_t k = av.size(); k-- > 0;)
    suffix[k] = suffix[k + 1] + av[k].second;
  std::size_t g = 0;
  while (g < av.size()) {
    std::size_t h = g;
    while (h < av.size() && av[h].first == av[g].first) ++h;
    if (suffix[h] <= 0.25 * mass) return av[g].first;
    g = h;
  }
  return av.back().first;
}

// Depth-first stopping recursion; returns the family slot of the cube.
std::size_t build_entry(BuildState& st, uint32_t atom_id, int32_t parent_slot) {
  const std::size_t slot = st.family.atoms.size();
  st.family.atoms.push_back(atom_id);
  st.family.parent.push_back(parent_slot);
  st.family.witness.emplace_back();

  const SigmaAtom& q = st.fil.atoms[atom_id];
  const double med = weighted_median(st.mu, q.members, st.f);
  const double osc = lambda_oscillation(st.mu, q.members, st.f, st.lambda);
  // Raising the exceedance level to the quarter-mass quantile keeps the
  // selected children below half the parent mass, so the family stays
  // sparse; every exceedance point still lands in a selected child.
  const double level =
      std::max(osc, quarter_mass_level(st, q.members, med, q.mass));
  st.medians.push_back(med);
  st.oscillations.push_back(osc);
  st.levels.push_back(level);

  // stopping children: maximal atoms R properly inside Q where the
  // exceedance set covers more than half of R
  std::vector<uint32_t> selected;
  std::vector<uint32_t> stack(q.kids.rbegin(), q.kids.rend());
  while (!stack.empty()) {
    uint32_t r = stack.back();
    stack.pop_back();
    const SigmaAtom& ra = st.fil.atoms[r];
    double bad = 0.0;
    for (uint32_t i : ra.members)
      if (std::abs(st.f[i] - med) > level) bad += st.fil.weights[i];
    if (bad > 0.5 * ra.mass) {
      selected.push_back(r);
    } else {
      for (auto it = ra.kids.rbegin(); it != ra.kids.rend(); ++it)
        stack.push_back(*it);
    }
  }

  std::vector<char> taken(st.fil.weights.size(), 0);
  for (uint32_t r : selected)
    for (uint32_t i : st.fil.atoms[r].members) taken[i] = 1;
  for (uint32_t i : q.members)
    if (!taken[i]) st.family.witness[slot].push_back(i);

  for (uint32_t r : selected)
    build_entry(st, r, static_cast<int32_t>(slot));
  return slot;
}

}  // namespace

SparseDecomposition sparse_decompose(const PointMeasure& mu,
                                     const Filtration& fil,
                                     const ScalarField& f, uint32_t q0,
                                     double lambda) {
  if (!(lambda > 0.25 && lambda < 0.5))
    throw std::invalid_argument("sparse_decompose: lambda must be in (1/4, 1/2)");
  const SigmaAtom& top = fil.atoms[q0];
  {
    std::vector<char> in(fil.weights.size(), 0);
    for (uint32_t i : top.members) in[i] = 1;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] != 0.0 && !in[i])
        throw std::invalid_argument("sparse_decompose: f not supported in q0");
  }

  BuildState st{mu, fil, f, lambda, {}, {}, {}, {}};
  build_entry(st, q0, -1);

  SparseDecomposition out;
  out.family = std::move(st.family);
  out.cert.medians = std::move(st.medians);
  out.cert.oscillations = std::move(st.oscillations);
  out.cert.levels = std::move(st.levels);

  // eta from the actual witnesses
  out.family.eta = 1.0;
  for (std::size_t e = 0; e < out.family.atoms.size(); ++e) {
    double wmass = 0.0;
    for (uint32_t i : out.family.witness[e]) wmass += fil.weights[i];
    out.family.eta =
        std::min(out.family.eta, wmass / fil.atoms[out.family.atoms[e]].mass);
  }

  // pointwise certificate
  const std::size_t n = f.size();
  out.cert.lhs.assign(n, 0.0);
  out.cert.rhs.assign(n, 0.0);
  const double m0 = out.cert.medians.front();
  for (uint32_t i : top.members) out.cert.lhs[i] = std::abs(f[i] - m0);
  for (std::size_t e = 0; e < out.family.atoms.size(); ++e) {
    double jump = out.family.parent[e] >= 0
                      ? std::abs(out.cert.medians[e] -
                                 out.cert.medians[out.family.parent[e]])
                      : 0.0;
    double term = out.cert.levels[e] + jump;
    for (uint32_t i : fil.atoms[out.family.atoms[e]].members)
      out.cert.rhs[i] += term;
  }
  out.cert.min_ratio = std::numeric_limits<double>::infinity();
  for (uint32_t i : top.members) {
    if (out.cert.lhs[i] <= 0.0) continue;
    ++out.cert.defined_points;
    double r = out.cert.rhs[i] / out.cert.lhs[i];
    out.cert.min_ratio = std::min(out.cert.min_ratio, r);
    out.cert.max_ratio = std::max(out.cert.max_ratio, r);
  }
  if (out.cert.defined_points == 0) out.cert.min_ratio = 0.0;
  return out;
}

DominationReport dominate(const PointMeasure& mu, const Filtration& fil,
                          const DiscreteOperator& t, const ScalarField& f,
                          uint32_t q0, double lambda) {
  ScalarField tf = apply(t, f);
  // restrict Tf to Q0 for the oscillation machinery (f lives there)
  const SigmaAtom& top = fil.atoms[q0];
  ScalarField tfq(tf.size(), 0.0);
  for (uint32_t i : top.members) tfq[i] = tf[i];
  SparseDecomposition sd = sparse_decompose(mu, fil, tfq, q0, lambda);

  ScalarField mc = maximal_centered(mu, f);
  DominationReport rep;
  rep.bound.assign(tf.size(), 0.0);
  for (std::size_t e = 0; e < sd.family.atoms.size(); ++e) {
    const SigmaAtom& a = fil.atoms[sd.family.atoms[e]];
    double inf = std::numeric_limits<double>::infinity();
    for (uint32_t i : a.members) inf = std::min(inf, mc[i]);
    for (uint32_t i : a.members) rep.bound[i] += inf;
  }
  for (uint32_t i : top.members) {
    if (rep.bound[i] > 0.0) {
      rep.max_ratio = std::max(rep.max_ratio, std::abs(tfq[i]) / rep.bound[i]);
    } else if (tfq[i] != 0.0) {
      rep.failed = true;
      if (rep.witness_point < 0) rep.witness_point = static_cast<int64_t>(i);
    }
  }
  rep.family = std::move(sd.family);
  return rep;
}

A2Report a2_characteristic(const PointMeasure& mu, const Weight& w,
                           double alpha_p, double beta_p) {
  if (w.values.size() != mu.size())
    throw std::invalid_argument("a2: weight size mismatch");
  for (double v : w.values)
    if (!(v > 0.0)) throw std::invalid_argument("a2: weight must be positive");
  if (!(beta_p > std::pow(alpha_p, mu.dim())))
    throw std::invalid_argument("a2: beta' must exceed alpha'^d");

  const std::size_t n = mu.size();
  const auto& grid = mu.canonical_grid();
  const auto& t = mu.neighbors();
  std::vector<A2Report> per_center(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long c = 0; c < static_cast<long long>(n); ++c) {
    // prefix sums of w dmu and w^{-1} dmu along this center's ordering
    std::vector<double> pw(n), pinv(n);
    double aw = 0.0, ainv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      uint32_t i = t.order[c][k];
      aw += mu.weight(i) * w.values[i];
      ainv += mu.weight(i) / w.values[i];
      pw[k] = aw;
      pinv[k] = ainv;
    }
    A2Report best;
    std::size_t last_eval = std::numeric_limits<std::size_t>::max();
    for (double r : grid) {
      std::size_t cnt = t.count_within(c, r);
      if (cnt == 0) continue;
      bool dbl = t.mass_within(c, alpha_p * r) <= beta_p * t.wprefix[c][cnt - 1];
      if (!dbl) continue;
      if (cnt == last_eval) continue;  // same trace, same value
      last_eval = cnt;
      double m = t.wprefix[c][cnt - 1];
      double v = (pw[cnt - 1] / m) * (pinv[cnt - 1] / m);
      if (v > best.value) {
        best.value = v;
        best.center = c;
        best.radius = r;
      }
    }
    per_center[c] = best;
  }
  A2Report out;
  for (const auto& b : per_center)
    if (b.center >= 0 && b.value > out.value) out = b;
  if (out.center < 0)
    throw std::invalid_argument("a2: no doubling ball in the canonical family");
  return out;
}

WeightedNormReport weighted_norm_experiment(const PointMeasure& mu,
                                            const DiscreteOperator& t,
                                            const Weight& w, double alpha_p,
                                            double beta_p) {
  WeightedNormReport rep;
  rep.op_norm = weighted_l2_norm(mu, t, w.values);
  rep.a2 = a2_characteristic(mu, w, alpha_p, beta_p).value;
  rep.ratio2 = rep.op_norm / (rep.a2 * rep.a2);
  rep.ratio1 = rep.op_norm / rep.a2;
  return rep;
}

}  // namespace ndcz
