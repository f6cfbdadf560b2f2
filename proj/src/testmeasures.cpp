#include "ndcz/testmeasures.hpp"

#include <cmath>
#include <stdexcept>

namespace ndcz {

PointMeasure make_uniform(std::size_t points_per_axis, int dim) {
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  if (dim == 1) {
    const double step = 1.0 / static_cast<double>(points_per_axis - 1);
    for (std::size_t i = 0; i < points_per_axis; ++i) {
      pts.push_back({static_cast<double>(i) * step});
      w.push_back(1.0 / static_cast<double>(points_per_axis));
    }
    return PointMeasure::from_points(pts, w, 1.0);
  }
  if (dim == 2) {
    const double step = 1.0 / static_cast<double>(points_per_axis - 1);
    const std::size_t total = points_per_axis * points_per_axis;
    for (std::size_t i = 0; i < points_per_axis; ++i)
      for (std::size_t j = 0; j < points_per_axis; ++j) {
        pts.push_back({i * step, j * step});
        w.push_back(1.0 / static_cast<double>(total));
      }
    return PointMeasure::from_points(pts, w, 2.0);
  }
  throw std::invalid_argument("make_uniform: dim must be 1 or 2");
}

PointMeasure make_cantor(int depth) {
  std::vector<double> lefts = {0.0};
  double len = 1.0;
  for (int d = 0; d < depth; ++d) {
    len /= 3.0;
    std::vector<double> next;
    for (double l : lefts) {
      next.push_back(l);
      next.push_back(l + 2.0 * len);
    }
    lefts = std::move(next);
  }
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  const double mass = std::pow(0.5, depth);
  for (double l : lefts) {
    pts.push_back({l + 0.5 * len});
    w.push_back(mass);
  }
  return PointMeasure::from_points(pts, w, std::log(2.0) / std::log(3.0));
}

PointMeasure make_gauss(std::size_t points) {
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  const double h = 8.0 / static_cast<double>(points);
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    double x = -4.0 + (static_cast<double>(i) + 0.5) * h;
    double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    pts.push_back({x});
    w.push_back(density * h);
    total += density * h;
  }
  for (double& v : w) v /= total;
  return PointMeasure::from_points(pts, w, 1.0);
}

PointMeasure make_ladder(int levels) {
  std::vector<std::vector<double>> pts = {{0.0}};
  std::vector<double> w = {1.0};
  for (int i = 0; i <= levels; ++i) {
    double x = std::pow(4.0, i);
    double mass = std::pow(32.0, i);
    pts.push_back({x});
    w.push_back(mass);
    pts.push_back({-x});
    w.push_back(mass);
  }
  return PointMeasure::from_points(pts, w, 1.0);
}

PointMeasure make_dumbbell() {
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  for (int i = 0; i < 100; ++i) {
    pts.push_back({0.001 * i});
    w.push_back(1.0);
  }
  for (int i = 0; i < 30; ++i) {
    pts.push_back({10.0 + 0.001 * i});
    w.push_back(0.001);
  }
  return PointMeasure::from_points(pts, w, 1.0);
}

PointMeasure bundled_measure(const std::string& name) {
  if (name == "uniform64") return make_uniform(64);
  if (name == "uniform256") return make_uniform(256);
  if (name == "uniform512") return make_uniform(512);
  if (name == "uniform1024") return make_uniform(1024);
  if (name == "uniform2d484") return make_uniform(22, 2);
  if (name == "cantor5") return make_cantor(5);
  if (name == "gauss64") return make_gauss(64);
  if (name == "gauss128") return make_gauss(128);
  if (name == "ladder") return make_ladder();
  if (name == "dumbbell") return make_dumbbell();
  throw std::invalid_argument("unknown bundled measure: " + name);
}

const std::vector<std::string>& bundled_names() {
  static const std::vector<std::string> names = {
      "uniform256", "cantor5", "gauss128", "ladder", "dumbbell"};
  return names;
}

}  // namespace ndcz
