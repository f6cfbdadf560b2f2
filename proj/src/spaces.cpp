#include "ndcz/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ndcz {

SigmaNormReport rbmo_sigma_norm(const Filtration& f, const ScalarField& field,
                                double p) {
  if (p < 1.0) throw std::invalid_argument("rbmo_sigma_norm: p must be >= 1");
  SigmaNormReport rep;
  rep.p = p;
  rep.experimental_p = p != 1.0 && p != 2.0;
  for (const SigmaAtom& a : f.atoms) {
    double base = a.sigma_parent >= 0
                      ? f.avg(field, static_cast<uint32_t>(a.sigma_parent))
                      : f.avg(field, a.id);
    double s = 0.0;
    for (uint32_t i : a.members)
      s += f.weights[i] * std::pow(std::abs(field[i] - base), p);
    double v = std::pow(s / a.mass, 1.0 / p);
    if (v > rep.value) {
      rep.value = v;
      rep.witness_atom = a.id;
    }
  }
  return rep;
}

double h1_sigma_norm(const Filtration& f, const ScalarField& field) {
  const std::size_t n = field.size();
  std::vector<double> sq(n, 0.0);
  ScalarField prev = cond_exp(f, field, 0);
  for (int k = 1; k <= f.depth; ++k) {
    ScalarField cur = cond_exp(f, field, k);
    for (std::size_t i = 0; i < n; ++i) {
      double d = cur[i] - prev[i];
      sq[i] += d * d;
    }
    prev = std::move(cur);
  }
  double out = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    out += f.weights[i] * std::sqrt(sq[i]);
  return out;
}

// ---------------------------------------------------------------------------
// canonical-ball-family norms

namespace {

// Per-center trace decomposition of the canonical family: radii with equal
// member counts describe the same ball trace and occupy one contiguous
// radius range, so averages and oscillations are computed once per
// (center, trace) and the pair scan walks traces, not radii.
struct FamilyIndex {
  std::vector<double> radii;             // the grid
  std::vector<uint32_t> count;           // [c * R + ri]
  std::vector<char> doubling;            // [c * R + ri], (2, beta)
  std::vector<uint32_t> trace_of;        // [c * R + ri] -> local trace index
  std::vector<uint32_t> trace_offset;    // per center, into trace arrays
  std::vector<uint32_t> trace_count;     // members per (center, trace)
  std::vector<double> trace_mass;
  std::vector<char> trace_doubling;      // any radius with this trace doubling
  std::vector<double> trace_first_dbl_r; // witness radius
  std::vector<std::vector<uint32_t>> trace_dbl_ri;  // doubling radius indices

  std::size_t ntraces() const { return trace_count.size(); }
  uint32_t trace_id(std::size_t c, std::size_t ri) const {
    return trace_offset[c] + trace_of[c * radii.size() + ri];
  }
};

FamilyIndex build_family(const PointMeasure& mu, double beta) {
  FamilyIndex fx;
  fx.radii = mu.canonical_grid();
  const std::size_t n = mu.size();
  const std::size_t R = fx.radii.size();
  const auto& t = mu.neighbors();
  fx.count.resize(n * R);
  fx.doubling.resize(n * R);
  fx.trace_of.resize(n * R);
  fx.trace_offset.resize(n + 1, 0);
  for (std::size_t c = 0; c < n; ++c) {
    fx.trace_offset[c] = static_cast<uint32_t>(fx.trace_count.size());
    bool fresh = true;
    uint32_t prev = 0;
    for (std::size_t ri = 0; ri < R; ++ri) {
      double r = fx.radii[ri];
      uint32_t cnt = static_cast<uint32_t>(t.count_within(c, r));
      double mass = cnt ? t.wprefix[c][cnt - 1] : 0.0;
      bool dbl = t.mass_within(c, 2.0 * r) <= beta * mass;
      fx.count[c * R + ri] = cnt;
      fx.doubling[c * R + ri] = dbl;
      if (fresh || cnt != prev) {
        fx.trace_count.push_back(cnt);
        fx.trace_mass.push_back(mass);
        fx.trace_doubling.push_back(0);
        fx.trace_first_dbl_r.push_back(0.0);
        fx.trace_dbl_ri.emplace_back();
        fresh = false;
      }
      prev = cnt;
      uint32_t tid = static_cast<uint32_t>(fx.trace_count.size()) - 1;
      fx.trace_of[c * R + ri] = tid - fx.trace_offset[c];
      if (dbl) {
        fx.trace_dbl_ri[tid].push_back(static_cast<uint32_t>(ri));
        if (!fx.trace_doubling[tid]) {
          fx.trace_doubling[tid] = 1;
          fx.trace_first_dbl_r[tid] = r;
        }
      }
    }
  }
  fx.trace_offset[n] = static_cast<uint32_t>(fx.trace_count.size());
  return fx;
}

struct BestEntry {
  double value = 0.0;
  int64_t c1 = -1, c2 = -1;
  double r1 = 0.0, r2 = 0.0;
};

void take_better(BestEntry& dst, const BestEntry& src) {
  if (src.value > dst.value) dst = src;
}

double k_coefficient_fast(const PointMeasure& mu, std::size_t c1, double r1,
                          double need) {
  const double n = mu.growth_degree();
  int steps = 0;
  while (std::ldexp(r1, steps) < need) ++steps;
  double k = 1.0;
  for (int j = 0; j <= steps; ++j) {
    double r = std::ldexp(r1, j);
    k += mu.neighbors().mass_within(c1, r) / std::pow(r, n);
  }
  return k;
}

// Shared worker: the sup scans for one c1 against the whole family.
// Deterministic for a fixed c1 regardless of the thread that runs it.
void scan_center(const PointMeasure& mu, const FamilyIndex& fx,
                 const std::vector<ScalarField>& fields,
                 const std::vector<double>& trace_avg,  // [trace * F + f]
                 std::size_t c1, std::vector<BestEntry>& star_best,
                 std::vector<BestEntry>& dist_best) {
  const std::size_t n = mu.size();
  const std::size_t R = fx.radii.size();
  const std::size_t F = fields.size();
  const auto& t = mu.neighbors();

  // star part: one evaluation per doubling trace at this center
  for (uint32_t tid = fx.trace_offset[c1]; tid < fx.trace_offset[c1 + 1];
       ++tid) {
    if (!fx.trace_doubling[tid]) continue;
    uint32_t cnt = fx.trace_count[tid];
    double mass = fx.trace_mass[tid];
    for (std::size_t f = 0; f < F; ++f) {
      double a = trace_avg[tid * F + f];
      double s = 0.0;
      for (uint32_t k = 0; k < cnt; ++k) {
        uint32_t i = t.order[c1][k];
        s += mu.weight(i) * std::abs(fields[f][i] - a);
      }
      BestEntry e;
      e.value = s / mass;
      e.c1 = static_cast<int64_t>(c1);
      e.r1 = fx.trace_first_dbl_r[tid];
      take_better(star_best[f], e);
    }
  }

  // nested-pair part: B1 at this center against every ball containing it.
  // maxd_pref[c2][k]: farthest distance to c1 among the k+1 nearest points
  // of c2, so the K coefficient needs no per-pair member scan.
  std::vector<std::vector<double>> maxd_pref(n);
  for (std::size_t c2 = 0; c2 < n; ++c2) {
    maxd_pref[c2].resize(n);
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      m = std::max(m, mu.dist(t.order[c2][k], c1));
      maxd_pref[c2][k] = m;
    }
  }

  for (std::size_t r1i = 0; r1i < R; ++r1i) {
    if (!fx.doubling[c1 * R + r1i]) continue;
    const double r1 = fx.radii[r1i];
    const uint32_t t1 = fx.trace_id(c1, r1i);
    for (std::size_t c2 = 0; c2 < n; ++c2) {
      const double rmin = mu.dist(c1, c2) + r1;  // geometric containment
      std::size_t ri = std::lower_bound(fx.radii.begin(), fx.radii.end(),
                                        rmin) -
                       fx.radii.begin();
      if (ri >= R) continue;
      for (uint32_t t2 = fx.trace_id(c2, ri); t2 < fx.trace_offset[c2 + 1];
           ++t2) {
        const auto& dbl_ris = fx.trace_dbl_ri[t2];
        auto it = std::lower_bound(dbl_ris.begin(), dbl_ris.end(),
                                   static_cast<uint32_t>(ri));
        if (it == dbl_ris.end()) continue;
        uint32_t cnt2 = fx.trace_count[t2];
        double need = cnt2 ? maxd_pref[c2][cnt2 - 1] : 0.0;
        double kc = k_coefficient_fast(mu, c1, r1, need);
        for (std::size_t f = 0; f < F; ++f) {
          BestEntry e;
          e.value =
              std::abs(trace_avg[t1 * F + f] - trace_avg[t2 * F + f]) / kc;
          e.c1 = static_cast<int64_t>(c1);
          e.c2 = static_cast<int64_t>(c2);
          e.r1 = r1;
          e.r2 = fx.radii[*it];
          take_better(dist_best[f], e);
        }
      }
    }
  }
}

std::vector<TolsaReport> tolsa_norms_impl(const PointMeasure& mu,
                                          const std::vector<ScalarField>& fields,
                                          double beta, bool parallel) {
  for (const auto& f : fields)
    if (f.size() != mu.size())
      throw std::invalid_argument("tolsa_norms: field size mismatch");
  const std::size_t n = mu.size();
  const std::size_t F = fields.size();
  FamilyIndex fx = build_family(mu, beta);

  // per-(center,trace) field averages
  const auto& t = mu.neighbors();
  std::vector<double> trace_avg(fx.ntraces() * F, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    for (uint32_t tid = fx.trace_offset[c]; tid < fx.trace_offset[c + 1];
         ++tid) {
      uint32_t cnt = fx.trace_count[tid];
      for (std::size_t f = 0; f < F; ++f) {
        double s = 0.0;
        for (uint32_t k = 0; k < cnt; ++k) {
          uint32_t i = t.order[c][k];
          s += mu.weight(i) * fields[f][i];
        }
        trace_avg[tid * F + f] = s / fx.trace_mass[tid];
      }
    }
  }

  std::vector<std::vector<BestEntry>> star(n), dist(n);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long long c1 = 0; c1 < static_cast<long long>(n); ++c1) {
    star[c1].assign(F, {});
    dist[c1].assign(F, {});
    scan_center(mu, fx, fields, trace_avg, c1, star[c1], dist[c1]);
  }

  std::vector<TolsaReport> out(F);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t f = 0; f < F; ++f) {
      if (star[c][f].value > out[f].star) {
        out[f].star = star[c][f].value;
        out[f].star_center = star[c][f].c1;
        out[f].star_radius = star[c][f].r1;
      }
      if (dist[c][f].value > out[f].dist) {
        out[f].dist = dist[c][f].value;
        out[f].d_center1 = dist[c][f].c1;
        out[f].d_center2 = dist[c][f].c2;
        out[f].d_radius1 = dist[c][f].r1;
        out[f].d_radius2 = dist[c][f].r2;
      }
    }
  }
  for (auto& r : out) r.value = std::max(r.star, r.dist);
  return out;
}

}  // namespace

std::vector<TolsaReport> tolsa_norms(const PointMeasure& mu,
                                     const std::vector<ScalarField>& fields,
                                     double beta) {
  return tolsa_norms_impl(mu, fields, beta, true);
}

InclusionReport inclusion_ratio(const PointMeasure& mu, const Filtration& f,
                                const std::vector<ScalarField>& fields,
                                double beta) {
  InclusionReport rep;
  auto tolsa = tolsa_norms(mu, fields, beta);
  bool any = false;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    double sn = rbmo_sigma_norm(f, fields[i], 1.0).value;
    double tn = tolsa[i].value;
    if (sn == 0.0 && tn == 0.0) {
      rep.ratios.push_back(0.0);
      continue;
    }
    any = true;
    double r = sn / tn;
    rep.ratios.push_back(r);
    if (r > rep.max_ratio) {
      rep.max_ratio = r;
      rep.witness_field = i;
    }
  }
  if (!any)
    throw std::invalid_argument("inclusion_ratio: all fields are constant");
  return rep;
}

// ---------------------------------------------------------------------------
// atomic blocks

ScalarField assemble_block(const AtomicBlock& b, std::size_t n) {
  ScalarField out(n, 0.0);
  for (std::size_t j = 0; j < b.coeffs.size(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      out[i] += b.coeffs[j] * b.parts[j][i];
  return out;
}

BlockValidation validate_atomic_block(const Filtration& f,
                                      const AtomicBlock& b) {
  BlockValidation out;
  for (double l : b.coeffs) out.value += std::abs(l);
  if (b.coeffs.size() != b.supports.size() ||
      b.coeffs.size() != b.parts.size()) {
    out.reason = "shape";
    return out;
  }
  if (b.base_level < 0 || b.base_level > f.depth) {
    out.reason = "base_level";
    return out;
  }
  const double pp = b.p;
  if (!(pp > 1.0)) {
    out.reason = "exponent";
    return out;
  }
  const std::size_t n = f.weights.size();
  for (std::size_t j = 0; j < b.parts.size(); ++j) {
    const SigmaAtom& a = f.atoms[b.supports[j]];
    if (a.level < b.base_level) {
      out.reason = "support level";
      return out;
    }
    std::vector<char> in(n, 0);
    for (uint32_t i : a.members) in[i] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i] && b.parts[j][i] != 0.0) {
        out.reason = "support";
        return out;
      }
    double norm;
    if (std::isinf(pp)) {
      norm = 0.0;
      for (uint32_t i : a.members) norm = std::max(norm, std::abs(b.parts[j][i]));
    } else {
      double s = 0.0;
      for (uint32_t i : a.members)
        s += f.weights[i] * std::pow(std::abs(b.parts[j][i]), pp);
      norm = std::pow(s, 1.0 / pp);
    }
    double pconj = std::isinf(pp) ? 1.0 : pp / (pp - 1.0);
    double bound = std::pow(a.mass, -1.0 / pconj) /
                   static_cast<double>(a.level - b.base_level + 1);
    if (norm > bound * (1.0 + 1e-12)) {
      out.reason = "size";
      return out;
    }
  }
  ScalarField bb = assemble_block(b, n);
  double scale = 0.0;
  for (double v : bb) scale = std::max(scale, std::abs(v));
  ScalarField e = cond_exp(f, bb, b.base_level);
  for (double v : e)
    if (std::abs(v) > 1e-10 * std::max(scale, 1e-300)) {
      out.reason = "mean";
      return out;
    }
  out.valid = true;
  return out;
}

JNReport john_nirenberg_report(const Filtration& f, const ScalarField& field,
                               int points) {
  JNReport rep;
  rep.norm = rbmo_sigma_norm(f, field, 1.0).value;
  if (rep.norm <= 0.0)
    throw std::invalid_argument("john_nirenberg_report: constant field");
  for (int j = 1; j <= points; ++j) {
    double tt = rep.norm * 3.0 * j / points;
    double worst = 0.0;
    for (const SigmaAtom& a : f.atoms) {
      double base = a.sigma_parent >= 0
                        ? f.avg(field, static_cast<uint32_t>(a.sigma_parent))
                        : f.avg(field, a.id);
      double m = 0.0;
      for (uint32_t i : a.members)
        if (std::abs(field[i] - base) > tt) m += f.weights[i];
      worst = std::max(worst, m / a.mass);
    }
    rep.rows.emplace_back(tt, worst);
  }
  // least-squares fit of log(ratio) over the decaying positive range
  std::vector<std::pair<double, double>> pts;
  for (auto& [tt, ratio] : rep.rows)
    if (ratio > 0.0) pts.emplace_back(tt, std::log(ratio));
  if (pts.size() < 3) {
    rep.degenerate = true;
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = pts.size() * sxx - sx * sx;
  if (denom <= 0.0) {
    rep.degenerate = true;
    return rep;
  }
  rep.rate = -(pts.size() * sxy - sx * sy) / denom;
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].second != pts[i - 1].second) ++distinct;
  if (distinct < 2) rep.degenerate = true;
  return rep;
}

// serial reference of the ball-family scan, kept for tests and the bench
namespace reference_detail {
std::vector<TolsaReport> tolsa_norms_serial(
    const PointMeasure& mu, const std::vector<ScalarField>& fields,
    double beta) {
  return tolsa_norms_impl(mu, fields, beta, false);
}
}  // namespace reference_detail

}  // namespace ndcz
