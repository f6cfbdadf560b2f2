#pragma once

// Discrete measures of polynomial growth on R^d (d <= 3): weighted point
// clouds with closed-ball mass queries, doubling tests and the canonical
// radius grid on which every sup over radii is evaluated.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ndcz {

inline constexpr int kMaxDim = 3;

struct Ball {
  std::array<double, kMaxDim> center{};
  double radius = 0.0;  // > 0

  Ball() = default;
  Ball(std::array<double, kMaxDim> c, double r) : center(c), radius(r) {}
};

/// A function on supp(mu): one real value per support point, index-aligned to
/// the measure's lexicographically sorted point order.
using ScalarField = std::vector<double>;

/// Per-center sorted-distance structure. Ball masses at support centers are
/// prefix sums over this ordering, so every sup over radii reduces to a walk
/// over a center's own distance list.
struct NeighborTable {
  // order[i]: point indices sorted by (distance to i, index)
  std::vector<std::vector<uint32_t>> order;
  // dist[i]: distances in the same order (dist[i][0] == 0, the center itself)
  std::vector<std::vector<double>> dist;
  // wprefix[i][k]: total weight of the first k+1 points in order[i]
  std::vector<std::vector<double>> wprefix;

  std::size_t count_within(std::size_t i, double r) const;
  double mass_within(std::size_t i, double r) const;  // closed ball
};

class PointMeasure {
 public:
  PointMeasure() = default;

  /// Builds a measure from raw points. Points are sorted lexicographically,
  /// exact duplicates are merged by summing weights, and the growth constant
  /// is computed over the canonical radius grid.
  static PointMeasure from_points(const std::vector<std::vector<double>>& pts,
                                  const std::vector<double>& weights,
                                  double growth_degree);

  /// Loads a measure from JSON ({"dim","growth_degree","points","weights"})
  /// or CSV (coordinate columns + "weight" column, header row). Throws
  /// std::runtime_error on parse failure, nonpositive weight or empty input.
  static PointMeasure load(const std::string& path, double growth_degree);

  void save(const std::string& path) const;

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const double* point(std::size_t i) const { return coords_.data() + i * dim_; }
  std::array<double, kMaxDim> point_array(std::size_t i) const;
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }
  double growth_degree() const { return growth_degree_; }
  double growth_constant() const { return growth_constant_; }

  double dist(std::size_t i, std::size_t j) const;
  double dist_to(std::size_t i, const double* x) const;
  double dist_to(std::size_t i, const std::array<double, kMaxDim>& x) const;

  double diameter() const { return diameter_; }
  /// Smallest positive pairwise distance (0 for a one-point measure).
  double min_gap() const { return min_gap_; }
  /// Lower median of the pairwise distance list (0 for a one-point measure).
  double median_gap() const { return median_gap_; }

  /// Sorted, deduplicated positive pairwise distances.
  const std::vector<double>& pairwise_distances() const { return pdist_; }

  /// Canonical radius grid for dilation parameter `alpha`: the pairwise
  /// distances plus their alpha-multiples, with the unit radius always
  /// present. Masses are step functions of the radius, so ball quantities
  /// only ever need to be evaluated here. Cached per alpha.
  const std::vector<double>& radius_grid(double alpha) const;

  /// Default grid (alpha = 2, matching the (2,beta)-doubling ball family).
  const std::vector<double>& canonical_grid() const { return radius_grid(2.0); }

  const NeighborTable& neighbors() const { return table_; }

  Ball ball_at(std::size_t i, double r) const { return Ball(point_array(i), r); }

  /// Mass of the closed ball (support points y with |y - center| <= radius).
  double ball_mass(const Ball& b) const;

  /// (alpha,beta)-doubling test: mass(alpha B) <= beta * mass(B). Zero-mass
  /// balls are doubling iff their dilate is also zero-mass.
  bool is_doubling(const Ball& b, double alpha, double beta) const;
  bool is_doubling_at(std::size_t i, double r, double alpha, double beta) const;

  /// Restriction to a nonempty index subset; growth metadata is recomputed.
  PointMeasure restrict(const std::vector<std::size_t>& idx) const;

 private:
  void finalize();  // sort, merge, tables, growth certificate

  int dim_ = 1;
  double growth_degree_ = 1.0;
  std::vector<double> coords_;   // size() * dim_, lexicographically sorted
  std::vector<double> weights_;  // positive
  double total_mass_ = 0.0;
  double diameter_ = 0.0;
  double min_gap_ = 0.0;
  double median_gap_ = 0.0;
  double growth_constant_ = 0.0;
  std::vector<double> pdist_;
  NeighborTable table_;
  mutable std::map<double, std::vector<double>> grid_cache_;
};

ScalarField load_field(const std::string& path, std::size_t expected_size);
void save_field(const std::string& path, const ScalarField& f);

namespace kernels {

/// Builds the per-center sorted-distance table (parallel over centers).
NeighborTable build_neighbor_table(const PointMeasure& mu);

/// sup over support centers x and grid radii r of mass(B(x,r)) / r^n
/// (parallel over centers; the per-center walk is serial and deterministic).
double growth_constant(const PointMeasure& mu, const std::vector<double>& grid,
                       double degree);

}  // namespace kernels

}  // namespace ndcz
