#pragma once

// The doubling filtration extracted from a lattice: atoms are the maximal
// doubling proper descendants of their parent atom, organized into levels
// with the root at level 0. Conditional expectations, martingale differences
// and the regularity diagnostics live here.

#include <cstdint>
#include <vector>

#include "ndcz/lattice.hpp"
#include "ndcz/measure.hpp"

namespace ndcz {

struct SigmaAtom {
  uint32_t id = 0;
  uint32_t cube_id = 0;
  int level = 0;           // 0 at the root; children increment by exactly 1
  int32_t sigma_parent = -1;  // atom id of Q hat
  int gen_gap = 0;         // gen(cube) - gen(parent cube); >= 1 below the root
  bool doubling = false;   // false only for flagged orphan singletons
  double mass = 0.0;
  std::vector<uint32_t> members;
  std::vector<uint32_t> kids;
};

struct Filtration {
  std::vector<SigmaAtom> atoms;  // id-indexed
  uint32_t root = 0;
  int depth = 0;  // valid levels are 0..depth
  // Materialized partitions: singleton leaves persist to deeper levels, so
  // every level is a full partition of the support.
  std::vector<std::vector<uint32_t>> level_atoms;
  std::vector<std::vector<uint32_t>> atom_of;  // [level][point] -> atom id
  std::vector<double> weights;                 // point weights snapshot
  double total_mass = 0.0;
  bool all_doubling = true;

  const SigmaAtom& atom(uint32_t id) const { return atoms[id]; }
  double avg(const ScalarField& f, uint32_t atom_id) const;
};

/// Builds the filtration top-down. Throws std::invalid_argument when the
/// lattice root is not doubling (enlarge the generation range).
Filtration build_filtration(const PointMeasure& mu, const Lattice& lat);

/// E_k f: the level-k atom average at every point.
ScalarField cond_exp(const Filtration& f, const ScalarField& field, int level);

/// D_k f = E_k f - E_{k-1} f for k >= 1; by convention D_0 f = E_0 f.
ScalarField mart_diff(const Filtration& f, const ScalarField& field, int level);

/// Discrete regularity integral of an atom against its parent's dilated
/// ball: sum over y in alpha B_R \ 56 B_Q, y != x, of w_y / |x-y|^n.
double property_iv_integral(const PointMeasure& mu, const Lattice& lat,
                            const Filtration& f, uint32_t atom_id,
                            uint32_t point_index);

/// sup of property_iv_integral over non-root atoms and their points.
double c_iv_constant(const PointMeasure& mu, const Lattice& lat,
                     const Filtration& f);

/// K_{B1,B2} = 1 + sum_{j=0}^{N} mu(2^j B1) / r(2^j B1)^n, N the smallest
/// l >= 0 with supp(mu) ∩ B2 inside 2^l B1.
double K_coefficient(const PointMeasure& mu, const Ball& b1, const Ball& b2);

struct KeyDecayReport {
  std::size_t chains_checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // mass(alpha B_T) / bound; <= 1 when the paper
                             // inequality holds
};

/// Checks the geometric decay of non-doubling intermediate cubes between
/// every atom and its sigma-parent. Asserted in paper mode only.
KeyDecayReport key_decay_check(const PointMeasure& mu, const Lattice& lat,
                               const Filtration& f);

struct KRatioReport {
  double min_ratio = 0.0;  // K_{B_Q,B_R} / (level difference)
  double max_ratio = 0.0;
  std::size_t pairs = 0;
};

/// K_{B_Q,B_R} against the level gap over all nested atom pairs.
KRatioReport k_ratio_report(const PointMeasure& mu, const Lattice& lat,
                            const Filtration& f);

}  // namespace ndcz
