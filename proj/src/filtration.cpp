#include "ndcz/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ndcz {

double Filtration::avg(const ScalarField& f, uint32_t atom_id) const {
  const SigmaAtom& a = atoms[atom_id];
  if (a.members.size() == 1) return f[a.members.front()];  // exact
  double s = 0.0;
  for (uint32_t i : a.members) s += weights[i] * f[i];
  return s / a.mass;
}

Filtration build_filtration(const PointMeasure& mu, const Lattice& lat) {
  const uint32_t root_cube = lat.gens.front().front();
  if (!lat.cubes[root_cube].doubling)
    throw std::invalid_argument(
        "filtration: root cube is not doubling; enlarge k_min");

  Filtration f;
  f.weights = mu.weights();
  f.total_mass = mu.total_mass();

  auto make_atom = [&](uint32_t cube_id, int level, int32_t parent,
                       bool doubling) {
    SigmaAtom a;
    a.id = static_cast<uint32_t>(f.atoms.size());
    a.cube_id = cube_id;
    a.level = level;
    a.sigma_parent = parent;
    a.doubling = doubling;
    a.members = lat.cubes[cube_id].members;
    a.mass = 0.0;
    for (uint32_t i : a.members) a.mass += f.weights[i];
    if (parent >= 0) {
      a.gen_gap = lat.cubes[cube_id].generation -
                  lat.cubes[f.atoms[parent].cube_id].generation;
      f.atoms[parent].kids.push_back(a.id);
    }
    if (!doubling) f.all_doubling = false;
    f.atoms.push_back(a);
    return a.id;
  };

  f.root = make_atom(root_cube, 0, -1, true);

  // Children of an atom are the maximal doubling cubes properly contained in
  // it; same-set relabels at deeper generations are descended through, and a
  // non-doubling leaf becomes a flagged orphan singleton.
  std::vector<uint32_t> queue = {f.root};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const uint32_t aid = queue[qi];
    const uint32_t qcube = f.atoms[aid].cube_id;
    const std::size_t qsize = lat.cubes[qcube].members.size();
    std::vector<uint32_t> stack(lat.kids[qcube].rbegin(),
                                lat.kids[qcube].rend());
    std::vector<uint32_t> found;
    while (!stack.empty()) {
      uint32_t t = stack.back();
      stack.pop_back();
      const Cube& tc = lat.cubes[t];
      if (tc.members.size() == qsize) {
        for (auto it = lat.kids[t].rbegin(); it != lat.kids[t].rend(); ++it)
          stack.push_back(*it);
        continue;
      }
      if (tc.doubling) {
        found.push_back(t);
      } else if (!lat.kids[t].empty()) {
        for (auto it = lat.kids[t].rbegin(); it != lat.kids[t].rend(); ++it)
          stack.push_back(*it);
      } else {
        found.push_back(t);  // orphan: non-doubling singleton leaf
      }
    }
    std::sort(found.begin(), found.end(), [&](uint32_t a, uint32_t b) {
      return lat.cubes[a].center_index < lat.cubes[b].center_index;
    });
    for (uint32_t t : found) {
      uint32_t kid = make_atom(t, f.atoms[aid].level + 1,
                               static_cast<int32_t>(aid),
                               lat.cubes[t].doubling);
      queue.push_back(kid);
    }
  }

  // materialize levels, persisting leaves
  f.level_atoms.push_back({f.root});
  for (;;) {
    const auto& cur = f.level_atoms.back();
    std::vector<uint32_t> next;
    bool refined = false;
    for (uint32_t a : cur) {
      if (f.atoms[a].kids.empty()) {
        next.push_back(a);
      } else {
        refined = true;
        for (uint32_t k : f.atoms[a].kids) next.push_back(k);
      }
    }
    if (!refined) break;
    f.level_atoms.push_back(std::move(next));
  }
  f.depth = static_cast<int>(f.level_atoms.size()) - 1;

  f.atom_of.assign(f.level_atoms.size(),
                   std::vector<uint32_t>(mu.size(), 0));
  for (std::size_t l = 0; l < f.level_atoms.size(); ++l)
    for (uint32_t a : f.level_atoms[l])
      for (uint32_t i : f.atoms[a].members) f.atom_of[l][i] = a;
  return f;
}

ScalarField cond_exp(const Filtration& f, const ScalarField& field, int level) {
  if (level < 0 || level > f.depth)
    throw std::invalid_argument("cond_exp: level out of range");
  ScalarField out(field.size(), 0.0);
  for (uint32_t a : f.level_atoms[level]) {
    double v = f.avg(field, a);
    for (uint32_t i : f.atoms[a].members) out[i] = v;
  }
  return out;
}

ScalarField mart_diff(const Filtration& f, const ScalarField& field, int level) {
  if (level == 0) return cond_exp(f, field, 0);
  ScalarField hi = cond_exp(f, field, level);
  ScalarField lo = cond_exp(f, field, level - 1);
  for (std::size_t i = 0; i < hi.size(); ++i) hi[i] -= lo[i];
  return hi;
}

double property_iv_integral(const PointMeasure& mu, const Lattice& lat,
                            const Filtration& f, uint32_t atom_id,
                            uint32_t point_index) {
  const SigmaAtom& q = f.atoms[atom_id];
  if (q.sigma_parent < 0)
    throw std::invalid_argument("property_iv_integral: atom is the root");
  const SigmaAtom& r = f.atoms[q.sigma_parent];
  const Cube& qc = lat.cubes[q.cube_id];
  const Cube& rc = lat.cubes[r.cube_id];
  const double alpha = lat.params.alpha;
  const double n = mu.growth_degree();
  double total = 0.0;
  for (std::size_t y = 0; y < mu.size(); ++y) {
    if (y == point_index) continue;
    if (mu.dist(y, rc.center_index) > alpha * rc.radius) continue;
    if (mu.dist(y, qc.center_index) <= 56.0 * qc.radius) continue;
    total += mu.weight(y) / std::pow(mu.dist(y, point_index), n);
  }
  return total;
}

double c_iv_constant(const PointMeasure& mu, const Lattice& lat,
                     const Filtration& f) {
  std::vector<double> per_atom(f.atoms.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long a = 0; a < static_cast<long long>(f.atoms.size()); ++a) {
    if (f.atoms[a].sigma_parent < 0) continue;
    double best = 0.0;
    for (uint32_t x : f.atoms[a].members)
      best = std::max(best, property_iv_integral(
                                mu, lat, f, static_cast<uint32_t>(a), x));
    per_atom[a] = best;
  }
  double sup = 0.0;
  for (double v : per_atom) sup = std::max(sup, v);
  return sup;
}

double K_coefficient(const PointMeasure& mu, const Ball& b1, const Ball& b2) {
  const double n = mu.growth_degree();
  double need = 0.0;
  for (std::size_t y = 0; y < mu.size(); ++y)
    if (mu.dist_to(y, b2.center) <= b2.radius)
      need = std::max(need, mu.dist_to(y, b1.center));
  int steps = 0;
  while (std::ldexp(b1.radius, steps) < need) ++steps;
  double k = 1.0;
  for (int j = 0; j <= steps; ++j) {
    double r = std::ldexp(b1.radius, j);
    k += mu.ball_mass(Ball(b1.center, r)) / std::pow(r, n);
  }
  return k;
}

KeyDecayReport key_decay_check(const PointMeasure& mu, const Lattice& lat,
                               const Filtration& f) {
  KeyDecayReport rep;
  const double alpha = lat.params.alpha;
  const double A = lat.params.scale_base();
  const double n = mu.growth_degree();
  for (const SigmaAtom& q : f.atoms) {
    if (q.sigma_parent < 0) continue;
    const Cube& rc = lat.cubes[f.atoms[q.sigma_parent].cube_id];
    const double mass_r = mu.ball_mass(lat.ball_of(mu, rc, alpha));
    const std::size_t qsize = lat.cubes[q.cube_id].members.size();
    int32_t t = lat.cubes[q.cube_id].parent;
    while (t >= 0 && t != static_cast<int32_t>(rc.id)) {
      const Cube& tc = lat.cubes[t];
      if (tc.members.size() > qsize && tc.members.size() < rc.members.size()) {
        ++rep.chains_checked;
        double bound =
            std::pow(A, -10.0 * n * (tc.generation - rc.generation - 1)) *
            mass_r;
        double mass_t = mu.ball_mass(lat.ball_of(mu, tc, alpha));
        double ratio = bound > 0.0
                           ? mass_t / bound
                           : (mass_t > 0.0 ? std::numeric_limits<double>::infinity()
                                           : 0.0);
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        if (mass_t > bound) ++rep.violations;
      }
      t = tc.parent;
    }
  }
  return rep;
}

KRatioReport k_ratio_report(const PointMeasure& mu, const Lattice& lat,
                            const Filtration& f) {
  KRatioReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const SigmaAtom& q : f.atoms) {
    int32_t anc = q.sigma_parent;
    while (anc >= 0) {
      const SigmaAtom& r = f.atoms[anc];
      int gap = q.level - r.level;
      const Cube& qc = lat.cubes[q.cube_id];
      const Cube& rc = lat.cubes[r.cube_id];
      double k = K_coefficient(mu, mu.ball_at(qc.center_index, qc.radius),
                               mu.ball_at(rc.center_index, rc.radius));
      double ratio = k / static_cast<double>(gap);
      rep.min_ratio = std::min(rep.min_ratio, ratio);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      ++rep.pairs;
      anc = r.sigma_parent;
    }
  }
  if (rep.pairs == 0) rep.min_ratio = 0.0;
  return rep;
}

}  // namespace ndcz
