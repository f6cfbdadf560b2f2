#include "ndcz/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ndcz {

using nlohmann::json;

std::size_t NeighborTable::count_within(std::size_t i, double r) const {
  const auto& d = dist[i];
  return std::upper_bound(d.begin(), d.end(), r) - d.begin();
}

double NeighborTable::mass_within(std::size_t i, double r) const {
  std::size_t c = count_within(i, r);
  return c == 0 ? 0.0 : wprefix[i][c - 1];
}

std::array<double, kMaxDim> PointMeasure::point_array(std::size_t i) const {
  std::array<double, kMaxDim> a{};
  for (int k = 0; k < dim_; ++k) a[k] = coords_[i * dim_ + k];
  return a;
}

double PointMeasure::dist(std::size_t i, std::size_t j) const {
  return dist_to(i, point(j));
}

double PointMeasure::dist_to(std::size_t i, const double* x) const {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double d = coords_[i * dim_ + k] - x[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double PointMeasure::dist_to(std::size_t i,
                             const std::array<double, kMaxDim>& x) const {
  return dist_to(i, x.data());
}

PointMeasure PointMeasure::from_points(
    const std::vector<std::vector<double>>& pts,
    const std::vector<double>& weights, double growth_degree) {
  if (pts.empty()) throw std::runtime_error("empty measure");
  if (pts.size() != weights.size())
    throw std::runtime_error("points/weights size mismatch");
  int d = static_cast<int>(pts.front().size());
  if (d < 1 || d > kMaxDim)
    throw std::runtime_error("dimension must be in [1, 3]");
  PointMeasure mu;
  mu.dim_ = d;
  mu.growth_degree_ = growth_degree;
  mu.coords_.reserve(pts.size() * d);
  for (const auto& p : pts) {
    if (static_cast<int>(p.size()) != d)
      throw std::runtime_error("inconsistent point dimension");
    for (double c : p) mu.coords_.push_back(c);
  }
  mu.weights_ = weights;
  for (double w : weights)
    if (!(w > 0.0)) throw std::runtime_error("nonpositive weight");
  mu.finalize();
  return mu;
}

void PointMeasure::finalize() {
  const std::size_t n = weights_.size();
  // lexicographic sort + merge of exact duplicates
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    for (int k = 0; k < dim_; ++k) {
      double x = coords_[a * dim_ + k], y = coords_[b * dim_ + k];
      if (x != y) return x < y;
    }
    return false;
  });
  std::vector<double> c2;
  std::vector<double> w2;
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t i = perm[r];
    bool same = !w2.empty();
    if (same)
      for (int k = 0; k < dim_; ++k)
        same = same && c2[c2.size() - dim_ + k] == coords_[i * dim_ + k];
    if (same) {
      w2.back() += weights_[i];
    } else {
      for (int k = 0; k < dim_; ++k) c2.push_back(coords_[i * dim_ + k]);
      w2.push_back(weights_[i]);
    }
  }
  coords_ = std::move(c2);
  weights_ = std::move(w2);
  total_mass_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);

  table_ = kernels::build_neighbor_table(*this);

  // pairwise distance statistics from the table (last entry of each row is
  // the farthest point from that center)
  const std::size_t m = weights_.size();
  pdist_.clear();
  diameter_ = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& d = table_.dist[i];
    for (std::size_t k = 1; k < d.size(); ++k) pdist_.push_back(d[k]);
    if (!d.empty()) diameter_ = std::max(diameter_, d.back());
  }
  std::sort(pdist_.begin(), pdist_.end());
  median_gap_ = pdist_.empty() ? 0.0 : pdist_[(pdist_.size() - 1) / 2];
  pdist_.erase(std::unique(pdist_.begin(), pdist_.end()), pdist_.end());
  min_gap_ = pdist_.empty() ? 0.0 : pdist_.front();

  grid_cache_.clear();
  growth_constant_ =
      kernels::growth_constant(*this, canonical_grid(), growth_degree_);
}

const std::vector<double>& PointMeasure::radius_grid(double alpha) const {
  auto it = grid_cache_.find(alpha);
  if (it != grid_cache_.end()) return it->second;
  std::vector<double> g;
  g.reserve(2 * pdist_.size() + 1);
  for (double d : pdist_) {
    g.push_back(d);
    g.push_back(d * alpha);
  }
  g.push_back(1.0);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return grid_cache_.emplace(alpha, std::move(g)).first->second;
}

double PointMeasure::ball_mass(const Ball& b) const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    if (dist_to(i, b.center) <= b.radius) m += weights_[i];
  return m;
}

bool PointMeasure::is_doubling(const Ball& b, double alpha, double beta) const {
  double inner = ball_mass(b);
  double outer = ball_mass(Ball(b.center, alpha * b.radius));
  if (inner == 0.0) return outer == 0.0;
  return outer <= beta * inner;
}

bool PointMeasure::is_doubling_at(std::size_t i, double r, double alpha,
                                  double beta) const {
  double inner = table_.mass_within(i, r);
  double outer = table_.mass_within(i, alpha * r);
  if (inner == 0.0) return outer == 0.0;
  return outer <= beta * inner;
}

PointMeasure PointMeasure::restrict(const std::vector<std::size_t>& idx) const {
  if (idx.empty()) throw std::runtime_error("restrict: empty index set");
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  pts.reserve(idx.size());
  for (std::size_t i : idx) {
    if (i >= size()) throw std::runtime_error("restrict: index out of range");
    pts.emplace_back(point(i), point(i) + dim_);
    w.push_back(weights_[i]);
  }
  return from_points(pts, w, growth_degree_);
}

// ---------------------------------------------------------------------------
// file I/O

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

PointMeasure PointMeasure::load(const std::string& path, double growth_degree) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file: " + path);
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    std::string line;
    if (!std::getline(in, line))
      throw std::runtime_error("empty csv measure file: " + path);
    auto header = split_csv_line(line);
    int wcol = -1;
    std::vector<int> ccols;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (trim(header[c]) == "weight")
        wcol = static_cast<int>(c);
      else
        ccols.push_back(static_cast<int>(c));
    }
    if (wcol < 0) throw std::runtime_error("csv measure needs a weight column");
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cells = split_csv_line(line);
      if (cells.size() != header.size())
        throw std::runtime_error("csv row width mismatch");
      std::vector<double> p;
      for (int c : ccols) p.push_back(std::stod(cells[c]));
      pts.push_back(std::move(p));
      w.push_back(std::stod(cells[wcol]));
    }
  } else {
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("measure parse failure: ") + e.what());
    }
    if (j.contains("growth_degree") && growth_degree <= 0.0)
      growth_degree = j["growth_degree"].get<double>();
    for (const auto& p : j.at("points"))
      pts.push_back(p.get<std::vector<double>>());
    w = j.at("weights").get<std::vector<double>>();
  }
  if (growth_degree <= 0.0)
    throw std::runtime_error("growth degree must be positive");
  return from_points(pts, w, growth_degree);
}

void PointMeasure::save(const std::string& path) const {
  json j;
  j["dim"] = dim_;
  j["growth_degree"] = growth_degree_;
  json pts = json::array();
  for (std::size_t i = 0; i < size(); ++i)
    pts.push_back(std::vector<double>(point(i), point(i) + dim_));
  j["points"] = std::move(pts);
  j["weights"] = weights_;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write measure file: " + path);
  out << j.dump(2) << "\n";
}

ScalarField load_field(const std::string& path, std::size_t expected_size) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field file: " + path);
  ScalarField f;
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    std::string line;
    if (!std::getline(in, line))
      throw std::runtime_error("empty csv field file: " + path);
    auto header = split_csv_line(line);
    int vcol = -1;
    for (std::size_t c = 0; c < header.size(); ++c)
      if (trim(header[c]) == "value") vcol = static_cast<int>(c);
    if (vcol < 0) throw std::runtime_error("csv field needs a value column");
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      f.push_back(std::stod(split_csv_line(line)[vcol]));
    }
  } else {
    json j;
    in >> j;
    f = j.get<std::vector<double>>();
  }
  if (expected_size != 0 && f.size() != expected_size)
    throw std::runtime_error("field length does not match measure size");
  return f;
}

void save_field(const std::string& path, const ScalarField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write field file: " + path);
  out << json(f).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// kernels

namespace kernels {

namespace detail {

void fill_neighbor_row(const PointMeasure& mu, std::size_t i,
                       std::vector<uint32_t>& order, std::vector<double>& dist,
                       std::vector<double>& wprefix) {
  const std::size_t n = mu.size();
  order.resize(n);
  dist.resize(n);
  wprefix.resize(n);
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = mu.dist(i, j);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (d[a] != d[b]) return d[a] < d[b];
    return a < b;
  });
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    dist[k] = d[order[k]];
    acc += mu.weight(order[k]);
    wprefix[k] = acc;
  }
}

double growth_at_center(const NeighborTable& t, std::size_t i,
                        const std::vector<double>& grid, double degree) {
  // masses only jump at this center's own distances; walk both sorted lists
  const auto& d = t.dist[i];
  const auto& wp = t.wprefix[i];
  double best = 0.0;
  std::size_t k = 0;
  for (double r : grid) {
    while (k < d.size() && d[k] <= r) ++k;
    if (k == 0) continue;
    best = std::max(best, wp[k - 1] / std::pow(r, degree));
  }
  return best;
}

}  // namespace detail

NeighborTable build_neighbor_table(const PointMeasure& mu) {
  const std::size_t n = mu.size();
  NeighborTable t;
  t.order.resize(n);
  t.dist.resize(n);
  t.wprefix.resize(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    detail::fill_neighbor_row(mu, i, t.order[i], t.dist[i], t.wprefix[i]);
  return t;
}

double growth_constant(const PointMeasure& mu, const std::vector<double>& grid,
                       double degree) {
  const std::size_t n = mu.size();
  const NeighborTable& t = mu.neighbors();
  std::vector<double> per_center(n, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    per_center[i] = detail::growth_at_center(t, i, grid, degree);
  double best = 0.0;
  for (double v : per_center) best = std::max(best, v);
  return best;
}

}  // namespace kernels

}  // namespace ndcz
