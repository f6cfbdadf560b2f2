#include "ndcz/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ndcz {

double LatticeParams::beta() const { return std::pow(alpha, ell); }

double LatticeParams::scale_base() const {
  if (A > 0.0) return A;
  int mm = m;
  if (mm <= 0) {
    mm = 1;
    while (std::pow(alpha, mm * ell) <= beta()) ++mm;
  }
  return std::pow(alpha, mm * ell);
}

void LatticeParams::validate(int dim) const {
  if (!(alpha > 1.0)) throw std::invalid_argument("lattice: alpha must be > 1");
  if (ell < 1) throw std::invalid_argument("lattice: ell must be >= 1");
  if (paper_mode) {
    if (alpha < 100.0)
      throw std::invalid_argument("lattice: paper mode requires alpha >= 100");
    if (ell < dim + 1)
      throw std::invalid_argument("lattice: paper mode requires ell >= d+1");
  }
  if (scale_base() < beta())
    throw std::invalid_argument("lattice: A must be >= beta");
}

std::vector<std::size_t> five_r_cover(
    const PointMeasure& mu,
    const std::vector<std::pair<uint32_t, double>>& candidates,
    std::ptrdiff_t forced) {
  if (candidates.empty()) return {};
  double sup = 0.0;
  for (const auto& c : candidates) sup = std::max(sup, c.second);
  if (forced >= 0) {
    if (forced >= static_cast<std::ptrdiff_t>(candidates.size()))
      throw std::invalid_argument("five_r_cover: forced index out of range");
    if (candidates[forced].second < 0.5 * sup)
      throw std::invalid_argument(
          "five_r_cover: forced candidate violates the half-sup precondition");
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (candidates[a].second != candidates[b].second)
      return candidates[a].second > candidates[b].second;
    if (candidates[a].first != candidates[b].first)
      return candidates[a].first < candidates[b].first;
    return a < b;
  });
  if (forced >= 0) {
    auto it = std::find(order.begin(), order.end(),
                        static_cast<std::size_t>(forced));
    order.erase(it);
    order.insert(order.begin(), static_cast<std::size_t>(forced));
  }

  std::vector<std::size_t> selected;
  for (std::size_t pos : order) {
    const auto& [ci, ri] = candidates[pos];
    bool disjoint = true;
    for (std::size_t s : selected) {
      const auto& [cj, rj] = candidates[s];
      if (mu.dist(ci, cj) <= ri + rj) {
        disjoint = false;
        break;
      }
    }
    if (disjoint) selected.push_back(pos);
  }
  return selected;
}

double choose_radius(const PointMeasure& mu, std::size_t x, int k,
                     const LatticeParams& params, bool* doubling) {
  const double A = params.scale_base();
  const double lo = std::pow(A, -static_cast<double>(k));
  const double hi = params.beta() * lo;
  const auto& grid = mu.radius_grid(params.alpha);

  auto try_radius = [&](double r) {
    return mu.is_doubling_at(x, r, params.alpha, params.beta());
  };

  if (try_radius(lo)) {
    if (doubling) *doubling = true;
    return lo;
  }
  auto it = std::lower_bound(grid.begin(), grid.end(), lo);
  for (; it != grid.end() && *it <= hi; ++it) {
    if (try_radius(*it)) {
      if (doubling) *doubling = true;
      return *it;
    }
  }
  if (doubling) *doubling = false;
  return lo;
}

namespace {

// Result of covering one parent at one generation.
struct ParentCover {
  std::vector<uint32_t> centers;               // selected center indices
  std::vector<double> radii;                   // r(Q) for each selected
  std::vector<bool> doubling;
  std::vector<std::vector<uint32_t>> members;  // per selected cube
  bool forcing_skipped = false;
};

ParentCover cover_parent(const PointMeasure& mu,
                         const std::vector<uint32_t>& pool, int k,
                         const LatticeParams& params, uint32_t x0) {
  ParentCover out;
  std::vector<std::pair<uint32_t, double>> cands;  // (center, 5 r_k(x))
  std::vector<double> base_radius(pool.size());
  std::vector<bool> base_doubling(pool.size());
  cands.reserve(pool.size());
  double sup5 = 0.0;
  std::ptrdiff_t forced = -1;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    bool dbl = false;
    double r = choose_radius(mu, pool[p], k, params, &dbl);
    base_radius[p] = r;
    base_doubling[p] = dbl;
    cands.emplace_back(pool[p], 5.0 * r);
    sup5 = std::max(sup5, 5.0 * r);
    if (pool[p] == x0) forced = static_cast<std::ptrdiff_t>(p);
  }
  if (forced >= 0 && cands[forced].second < 0.5 * sup5) {
    forced = -1;
    out.forcing_skipped = true;
  }

  auto selected = five_r_cover(mu, cands, forced);

  // stable cube order: by center index
  std::sort(selected.begin(), selected.end(),
            [&](std::size_t a, std::size_t b) {
              return cands[a].first < cands[b].first;
            });

  out.centers.reserve(selected.size());
  for (std::size_t s : selected) {
    out.centers.push_back(cands[s].first);
    out.radii.push_back(base_radius[s]);
    out.doubling.push_back(base_doubling[s]);
  }
  out.members.resize(selected.size());

  // nearest selected center, ties to the lower center index
  for (uint32_t y : pool) {
    std::size_t best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < out.centers.size(); ++s) {
      double d = mu.dist(y, out.centers[s]);
      if (d < bestd || (d == bestd && out.centers[s] < out.centers[best])) {
        bestd = d;
        best = s;
      }
    }
    out.members[best].push_back(y);
  }
  // drop empty cells (cannot happen: every selected center self-assigns)
  return out;
}

int auto_k_min(const PointMeasure& mu, double A) {
  const double diam = mu.diameter();
  if (diam <= 0.0) return 0;
  // largest k with A^-k >= diam, so that every candidate ball spans supp(mu)
  int k = static_cast<int>(std::floor(-std::log(diam) / std::log(A)));
  while (std::pow(A, -static_cast<double>(k)) < diam) --k;
  while (std::pow(A, -static_cast<double>(k + 1)) >= diam) ++k;
  return k;
}

int auto_k_max(const PointMeasure& mu, const LatticeParams& params, double A) {
  const double dmin = mu.min_gap();
  if (dmin <= 0.0) return 0;
  // smallest k with beta A^-k < dmin / max(10, alpha): guarantees that the
  // finest generation consists of singletons whose dilated balls are still
  // singletons (hence doubling)
  const double cap = dmin / std::max(10.0, params.alpha);
  int k = static_cast<int>(std::ceil(std::log(params.beta() / cap) / std::log(A)));
  while (params.beta() * std::pow(A, -static_cast<double>(k)) >= cap) ++k;
  while (k > 0 &&
         params.beta() * std::pow(A, -static_cast<double>(k - 1)) < cap)
    --k;
  return k;
}

uint32_t pick_designated_point(const PointMeasure& mu) {
  // proxy for the paper's x0: most mass within the median pairwise distance
  const double r = mu.median_gap();
  uint32_t best = 0;
  double bestm = -1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double m = mu.neighbors().mass_within(i, r);
    if (m > bestm) {
      bestm = m;
      best = static_cast<uint32_t>(i);
    }
  }
  return best;
}

void verify_lattice(const PointMeasure& mu, Lattice& lat) {
  auto& rep = lat.reports;
  rep.partition_ok = true;
  rep.nesting_ok = true;
  rep.five_b_disjoint_ok = true;
  rep.radius_sandwich_ok = true;
  const double A = lat.params.scale_base();
  const double beta = lat.params.beta();

  std::size_t contained_ball = 0, contained_cube = 0;
  std::size_t total_pairs = 0, disjoint_pairs = 0;
  for (std::size_t g = 0; g < lat.gens.size(); ++g) {
    int k = lat.k_min + static_cast<int>(g);
    const double lo = std::pow(A, -static_cast<double>(k));
    std::vector<char> seen(mu.size(), 0);
    for (uint32_t id : lat.gens[g]) {
      const Cube& q = lat.cubes[id];
      for (uint32_t y : q.members) {
        if (seen[y]) rep.partition_ok = false;
        seen[y] = 1;
      }
      if (!(lo <= q.radius && q.radius <= beta * lo))
        rep.radius_sandwich_ok = false;
      if (q.parent >= 0) {
        const Cube& p = lat.cubes[q.parent];
        if (!std::includes(p.members.begin(), p.members.end(),
                           q.members.begin(), q.members.end()))
          rep.nesting_ok = false;
      }
      // B_Q ∩ supp ⊂ Q and Q ⊂ 28 B_Q
      bool ball_in = true;
      for (std::size_t j = 0; j < mu.size(); ++j)
        if (mu.dist(j, q.center_index) <= q.radius &&
            !std::binary_search(q.members.begin(), q.members.end(),
                                static_cast<uint32_t>(j)))
          ball_in = false;
      bool cube_in = true;
      for (uint32_t y : q.members)
        if (mu.dist(y, q.center_index) > 28.0 * q.radius) cube_in = false;
      contained_ball += ball_in;
      contained_cube += cube_in;
    }
    for (std::size_t j = 0; j < mu.size(); ++j)
      if (!seen[j]) rep.partition_ok = false;

    // 5B disjointness inside each parent (exact), plus a global diagnostic
    for (std::size_t a = 0; a < lat.gens[g].size(); ++a) {
      for (std::size_t b = a + 1; b < lat.gens[g].size(); ++b) {
        const Cube& qa = lat.cubes[lat.gens[g][a]];
        const Cube& qb = lat.cubes[lat.gens[g][b]];
        double d = mu.dist(qa.center_index, qb.center_index);
        bool dis = d > 5.0 * (qa.radius + qb.radius);
        ++total_pairs;
        disjoint_pairs += dis;
        if (qa.parent == qb.parent && !dis) rep.five_b_disjoint_ok = false;
      }
    }
  }
  rep.global_five_b_disjoint_frac =
      total_pairs ? static_cast<double>(disjoint_pairs) /
                        static_cast<double>(total_pairs)
                  : 1.0;
  rep.frac_ball_in_cube =
      static_cast<double>(contained_ball) / static_cast<double>(lat.cubes.size());
  rep.frac_cube_in_28ball =
      static_cast<double>(contained_cube) / static_cast<double>(lat.cubes.size());
}

}  // namespace

Lattice build_lattice(const PointMeasure& mu, const LatticeParams& params) {
  params.validate(mu.dim());
  Lattice lat;
  lat.params = params;
  const double A = params.scale_base();

  if (mu.size() == 1) {
    lat.k_min = lat.k_max = 0;
    lat.designated_point = 0;
    Cube q;
    q.id = 0;
    q.generation = 0;
    q.center_index = 0;
    q.radius = 1.0;  // unit-radius convention for a one-point measure
    q.members = {0};
    q.parent = -1;
    q.doubling = true;
    lat.cubes.push_back(q);
    lat.gens = {{0}};
    lat.kids = {{}};
    lat.cube_of = {{0}};
    verify_lattice(mu, lat);
    return lat;
  }

  lat.k_min = params.k_min == LatticeParams::kAuto ? auto_k_min(mu, A)
                                                   : params.k_min;
  lat.k_max = params.k_max == LatticeParams::kAuto
                  ? auto_k_max(mu, params, A)
                  : params.k_max;
  if (lat.k_max < lat.k_min)
    throw std::invalid_argument("lattice: k_max < k_min");
  lat.designated_point = pick_designated_point(mu);

  const int ngens = lat.k_max - lat.k_min + 1;
  lat.gens.assign(ngens, {});
  lat.cube_of.assign(ngens, std::vector<uint32_t>(mu.size(), 0));

  // generation k_min: one virtual parent holding everything
  std::vector<std::vector<uint32_t>> parent_pools;
  {
    std::vector<uint32_t> all(mu.size());
    std::iota(all.begin(), all.end(), 0u);
    parent_pools.push_back(std::move(all));
  }
  std::vector<int32_t> parent_ids = {-1};

  for (int g = 0; g < ngens; ++g) {
    const int k = lat.k_min + g;
    std::vector<ParentCover> covers(parent_pools.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long p = 0; p < static_cast<long long>(parent_pools.size()); ++p)
      covers[p] = cover_parent(mu, parent_pools[p], k, params,
                               lat.designated_point);

    bool skipped = false;
    std::vector<std::vector<uint32_t>> next_pools;
    std::vector<int32_t> next_parent_ids;
    for (std::size_t p = 0; p < covers.size(); ++p) {
      ParentCover& c = covers[p];
      skipped = skipped || c.forcing_skipped;
      for (std::size_t s = 0; s < c.centers.size(); ++s) {
        Cube q;
        q.id = static_cast<uint32_t>(lat.cubes.size());
        q.generation = k;
        q.center_index = c.centers[s];
        q.radius = c.radii[s];
        q.doubling = c.doubling[s];
        q.members = std::move(c.members[s]);
        std::sort(q.members.begin(), q.members.end());
        q.parent = parent_ids[p];
        lat.gens[g].push_back(q.id);
        for (uint32_t y : q.members) lat.cube_of[g][y] = q.id;
        next_pools.push_back(q.members);
        next_parent_ids.push_back(static_cast<int32_t>(q.id));
        lat.cubes.push_back(std::move(q));
      }
    }
    if (skipped) lat.reports.forcing_skipped_generations.push_back(k);
    if (g == 0 && lat.gens[0].size() != 1)
      throw std::invalid_argument(
          "lattice: generation k_min is not a single cube; decrease k_min");
    parent_pools = std::move(next_pools);
    parent_ids = std::move(next_parent_ids);
  }

  lat.kids.assign(lat.cubes.size(), {});
  for (const Cube& q : lat.cubes)
    if (q.parent >= 0) lat.kids[q.parent].push_back(q.id);

  verify_lattice(mu, lat);
  return lat;
}

BoundaryReport boundary_report(const PointMeasure& mu, const Lattice& lat,
                               uint32_t cube_id, int i) {
  if (i < 1) throw std::invalid_argument("boundary_report: i must be >= 1");
  const Cube& q = lat.cubes[cube_id];
  const double A = lat.params.scale_base();
  const double scale = std::pow(A, -static_cast<double>(q.generation + i));
  std::vector<char> in_q(mu.size(), 0);
  for (uint32_t y : q.members) in_q[y] = 1;

  BoundaryReport rep;
  for (std::size_t x = 0; x < mu.size(); ++x) {
    double d = std::numeric_limits<double>::infinity();
    if (in_q[x]) {
      for (std::size_t y = 0; y < mu.size(); ++y)
        if (!in_q[y]) d = std::min(d, mu.dist(x, y));
      if (d < scale) rep.int_mass += mu.weight(x);
    } else {
      for (uint32_t y : q.members) d = std::min(d, mu.dist(x, y));
      if (d < scale) rep.ext_mass += mu.weight(x);
    }
  }
  const double beta = lat.params.beta();
  const double base = std::pow(beta, -3.0 * mu.dim() - 1.0) * A;  // c_d = 1
  rep.bound = std::pow(base, -static_cast<double>(i)) *
              mu.ball_mass(lat.ball_of(mu, q, 90.0));
  rep.within_bound = rep.ext_mass + rep.int_mass <= rep.bound;
  return rep;
}

}  // namespace ndcz
