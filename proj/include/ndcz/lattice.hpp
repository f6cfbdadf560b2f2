#pragma once

// Hierarchical cube lattice over a discrete measure, built generation by
// generation from a 5R greedy ball covering with doubling-radius selection.
// Each generation partitions the support; construction is intra-parent, so
// nesting holds by construction and the ball containments B_Q c Q c 28 B_Q
// are verified empirically and reported.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ndcz/measure.hpp"

namespace ndcz {

struct LatticeParams {
  double alpha = 4.0;  // dilation parameter, >= 100 in paper mode
  int ell = 2;         // beta = alpha^ell
  int m = 0;           // A = alpha^(ell*m); 0 = smallest m with alpha^(m*ell) > beta
  double A = 0.0;      // 0 = derive from m
  int k_min = kAuto;
  int k_max = kAuto;
  bool paper_mode = false;

  static constexpr int kAuto = std::numeric_limits<int>::min();

  double beta() const;
  double scale_base() const;  // resolved A
  /// Throws std::invalid_argument when the parameter invariants fail
  /// (alpha > 1, A >= beta, and in paper mode alpha >= 100, ell >= d+1).
  void validate(int dim) const;
};

struct Cube {
  uint32_t id = 0;
  int generation = 0;
  uint32_t center_index = 0;
  double radius = 0.0;  // r(Q); the selected covering ball is 5 B_Q
  std::vector<uint32_t> members;  // sorted support indices
  int32_t parent = -1;            // cube id, -1 for the root generation
  bool doubling = false;          // B_Q is (alpha,beta)-doubling
};

struct LatticeReports {
  bool partition_ok = false;
  bool nesting_ok = false;
  bool five_b_disjoint_ok = false;  // intra-parent, exact geometric check
  bool radius_sandwich_ok = false;
  double frac_ball_in_cube = 0.0;   // fraction of cubes with B_Q ∩ supp ⊂ Q
  double frac_cube_in_28ball = 0.0; // fraction with Q ⊂ 28 B_Q
  double global_five_b_disjoint_frac = 0.0;  // diagnostic only
  std::vector<int> forcing_skipped_generations;
};

struct Lattice {
  LatticeParams params;
  int k_min = 0;
  int k_max = 0;
  uint32_t designated_point = 0;  // x0
  std::vector<Cube> cubes;        // id-indexed, all generations
  std::vector<std::vector<uint32_t>> gens;     // [k - k_min] -> cube ids
  std::vector<std::vector<uint32_t>> kids;     // cube id -> child cube ids
  std::vector<std::vector<uint32_t>> cube_of;  // [k - k_min][point] -> cube id
  LatticeReports reports;

  const Cube& cube(uint32_t id) const { return cubes[id]; }
  std::size_t generations() const { return gens.size(); }
  int gen_index(int k) const { return k - k_min; }
  Ball ball_of(const PointMeasure& mu, const Cube& q, double dilation) const {
    return mu.ball_at(q.center_index, dilation * q.radius);
  }
};

/// Greedy 5R covering. `candidates` are (center index, radius) pairs; the
/// forced candidate (index into `candidates`, or -1) is selected first and
/// must have radius >= half the sup, otherwise std::invalid_argument.
/// Returns positions of the selected candidates; the selected balls are
/// pairwise disjoint and every candidate center lies in the 5-dilate of some
/// selected ball.
std::vector<std::size_t> five_r_cover(
    const PointMeasure& mu,
    const std::vector<std::pair<uint32_t, double>>& candidates,
    std::ptrdiff_t forced);

/// Smallest radius in [alpha^i A^-k, beta alpha^i A^-k] ∩ (radius grid ∪ {lo})
/// whose ball at x is (alpha,beta)-doubling; the window floor when none is.
double choose_radius(const PointMeasure& mu, std::size_t x, int k,
                     const LatticeParams& params, bool* doubling = nullptr);

/// Builds the full lattice. Auto generation range: the coarsest generation is
/// a single root cube and the finest consists of doubling singletons.
Lattice build_lattice(const PointMeasure& mu, const LatticeParams& params);

struct BoundaryReport {
  double ext_mass = 0.0;
  double int_mass = 0.0;
  double bound = 0.0;  // (c_d beta^{-3d-1} A)^{-i} mu(90 B_Q), with c_d = 1
  bool within_bound = false;
};

/// Collar masses of a cube at scale A^{-k-i} against the small-boundary
/// bound. Diagnostic only.
BoundaryReport boundary_report(const PointMeasure& mu, const Lattice& lat,
                               uint32_t cube_id, int i);

}  // namespace ndcz
