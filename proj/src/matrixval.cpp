#include "ndcz/matrixval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "ndcz/eigen.hpp"

namespace ndcz {

CMat CMat::identity(int mm) {
  CMat u(mm);
  for (int i = 0; i < mm; ++i) u.at(i, i) = 1.0;
  return u;
}

CMat CMat::adjoint() const {
  CMat out(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = std::conj(at(j, i));
  return out;
}

CMat CMat::operator+(const CMat& o) const {
  CMat out = *this;
  out += o;
  return out;
}

CMat CMat::operator-(const CMat& o) const {
  CMat out = *this;
  for (std::size_t k = 0; k < a.size(); ++k) out.a[k] -= o.a[k];
  return out;
}

CMat CMat::operator*(const CMat& o) const {
  CMat out(m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      Cplx v = at(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < m; ++j) out.at(i, j) += v * o.at(k, j);
    }
  return out;
}

CMat& CMat::operator+=(const CMat& o) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += o.a[k];
  return *this;
}

CMat& CMat::axpy(Cplx c, const CMat& o) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += c * o.a[k];
  return *this;
}

CMat CMat::scaled(Cplx c) const {
  CMat out = *this;
  for (auto& v : out.a) v *= c;
  return out;
}

double CMat::op_norm() const {
  return spectral_norm_complex(a, static_cast<std::size_t>(m));
}

double CMat::max_eig() const {
  auto ev = jacobi_hermitian(a, static_cast<std::size_t>(m));
  return ev.empty() ? 0.0 : ev.back();
}

double CMat::min_eig() const {
  auto ev = jacobi_hermitian(a, static_cast<std::size_t>(m));
  return ev.empty() ? 0.0 : ev.front();
}

CMat MatrixField::get(std::size_t i) const {
  CMat out(m);
  std::copy(values.begin() + i * m * m, values.begin() + (i + 1) * m * m,
            out.a.begin());
  return out;
}

void MatrixField::set(std::size_t i, const CMat& v) {
  std::copy(v.a.begin(), v.a.end(), values.begin() + i * m * m);
}

MatrixField MatrixField::adjoint() const {
  MatrixField out = *this;
  for (std::size_t i = 0; i < npoints; ++i) out.set(i, get(i).adjoint());
  return out;
}

double MatrixField::sup_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < npoints; ++i)
    best = std::max(best, get(i).op_norm());
  return best;
}

MatrixField MatrixField::load(const std::string& path, std::size_t expected,
                              int expected_m) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix field: " + path);
  nlohmann::json j;
  in >> j;
  MatrixField f;
  f.npoints = j.size();
  if (expected != 0 && f.npoints != expected)
    throw std::runtime_error("matrix field length does not match measure");
  if (f.npoints == 0) throw std::runtime_error("empty matrix field");
  f.m = static_cast<int>(j.front().size());
  if (expected_m != 0 && f.m != expected_m)
    throw std::runtime_error("matrix field has wrong block size");
  f.values.reserve(f.npoints * f.m * f.m);
  for (const auto& pt : j) {
    if (static_cast<int>(pt.size()) != f.m)
      throw std::runtime_error("ragged matrix field");
    for (const auto& row : pt) {
      if (static_cast<int>(row.size()) != f.m)
        throw std::runtime_error("ragged matrix field");
      for (const auto& e : row)
        f.values.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return f;
}

void MatrixField::save(const std::string& path) const {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < npoints; ++i) {
    nlohmann::json pt = nlohmann::json::array();
    for (int r = 0; r < m; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < m; ++c) {
        const Cplx& v = values[(i * m + r) * m + c];
        row.push_back({v.real(), v.imag()});
      }
      pt.push_back(std::move(row));
    }
    j.push_back(std::move(pt));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix field: " + path);
  out << j.dump(2) << "\n";
}

MatrixKernel MatrixKernel::scalar_times(const KernelSpec& k, const CMat& u) {
  MatrixKernel out;
  out.m = u.m;
  out.scalar = k;
  out.factor = u;
  return out;
}

CMat MatrixKernel::eval(const PointMeasure& mu, std::size_t i,
                        std::size_t j) const {
  if (i == j) return CMat(m);
  if (!table.empty()) {
    CMat out(m);
    std::size_t base = (i * mu.size() + j) * m * m;
    std::copy(table.begin() + base, table.begin() + base + m * m,
              out.a.begin());
    return out;
  }
  return factor.scaled(scalar.eval(mu, i, j));
}

MatrixField apply_matrix(const PointMeasure& mu, const MatrixKernel& k,
                         const MatrixField& f) {
  MatrixField out;
  out.m = k.m;
  out.npoints = mu.size();
  out.values.assign(out.npoints * k.m * k.m, 0.0);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(mu.size()); ++i) {
    CMat acc(k.m);
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (static_cast<std::size_t>(i) == j) continue;
      acc += (k.eval(mu, i, j) * f.get(j)).scaled(mu.weight(j));
    }
    out.set(i, acc);
  }
  return out;
}

namespace {

// avg over an index list of a matrix field
CMat average(const PointMeasure& mu, const MatrixField& f,
             const std::vector<uint32_t>& idx) {
  CMat acc(f.m);
  double mass = 0.0;
  for (uint32_t i : idx) {
    acc.axpy(mu.weight(i), f.get(i));
    mass += mu.weight(i);
  }
  return acc.scaled(1.0 / mass);
}

// || avg over idx of (f - base)*(f - base) ||^(1/2)
double column_osc(const PointMeasure& mu, const MatrixField& f,
                  const std::vector<uint32_t>& idx, const CMat& base) {
  CMat acc(f.m);
  double mass = 0.0;
  for (uint32_t i : idx) {
    CMat d = f.get(i) - base;
    acc.axpy(mu.weight(i), d.adjoint() * d);
    mass += mu.weight(i);
  }
  acc = acc.scaled(1.0 / mass);
  return std::sqrt(std::max(0.0, acc.max_eig()));
}

}  // namespace

double rbmo_sigma_c_norm(const Filtration& fil, const MatrixField& f) {
  double best = 0.0;
  for (const SigmaAtom& a : fil.atoms) {
    // weights in the filtration snapshot equal the measure weights
    CMat base(f.m);
    double pm = 0.0;
    const std::vector<uint32_t>& src =
        a.sigma_parent >= 0 ? fil.atoms[a.sigma_parent].members : a.members;
    for (uint32_t i : src) {
      base.axpy(fil.weights[i], f.get(i));
      pm += fil.weights[i];
    }
    base = base.scaled(1.0 / pm);
    CMat acc(f.m);
    for (uint32_t i : a.members) {
      CMat d = f.get(i) - base;
      acc.axpy(fil.weights[i], d.adjoint() * d);
    }
    acc = acc.scaled(1.0 / a.mass);
    best = std::max(best, std::sqrt(std::max(0.0, acc.max_eig())));
  }
  return best;
}

double rbmo_sigma_norm_twosided(const Filtration& fil, const MatrixField& f) {
  return std::max(rbmo_sigma_c_norm(fil, f),
                  rbmo_sigma_c_norm(fil, f.adjoint()));
}

KSReport kadison_schwarz_check(const Filtration& fil, const MatrixField& f) {
  KSReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (const SigmaAtom& a : fil.atoms) {
    CMat avg(f.m), sq(f.m);
    for (uint32_t i : a.members) {
      CMat v = f.get(i);
      avg.axpy(fil.weights[i], v);
      sq.axpy(fil.weights[i], v.adjoint() * v);
    }
    avg = avg.scaled(1.0 / a.mass);
    sq = sq.scaled(1.0 / a.mass);
    CMat gap = sq - avg.adjoint() * avg;
    double lo = gap.min_eig();
    rep.scale = std::max(rep.scale, sq.max_eig());
    if (lo < rep.min_gap) {
      rep.min_gap = lo;
      rep.witness_atom = a.id;
    }
  }
  if (fil.atoms.empty()) rep.min_gap = 0.0;
  rep.ok = rep.min_gap >= -1e-10 * std::max(rep.scale, 1.0);
  return rep;
}

double matrix_size_constant(const PointMeasure& mu, const MatrixKernel& k) {
  double best = 0.0;
  const double n = k.scalar.degree;
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (i == j) continue;
      best = std::max(best, k.eval(mu, i, j).op_norm() *
                                std::pow(mu.dist(i, j), n));
    }
  return best;
}

HormanderReport hormander_report(const PointMeasure& mu, const Lattice& lat,
                                 const MatrixKernel& k) {
  HormanderReport rep;
  const double alpha = lat.params.alpha;
  for (const Cube& q : lat.cubes) {
    // sample pairs inside B_Q (the members within the ball, strided to ~6)
    std::vector<uint32_t> inside;
    for (uint32_t i : q.members)
      if (mu.dist(i, q.center_index) <= q.radius) inside.push_back(i);
    if (inside.size() < 2) continue;
    ++rep.balls;
    std::size_t stride = std::max<std::size_t>(1, inside.size() / 6);
    for (std::size_t a = 0; a < inside.size(); a += stride) {
      for (std::size_t b = a + 1; b < inside.size(); b += stride) {
        uint32_t z1 = inside[a], z2 = inside[b];
        double sum = 0.0;
        for (std::size_t y = 0; y < mu.size(); ++y) {
          if (mu.dist(y, q.center_index) <= alpha * q.radius) continue;
          sum += (k.eval(mu, z1, y) - k.eval(mu, z2, y)).op_norm() *
                 mu.weight(y);
          sum += (k.eval(mu, y, z1) - k.eval(mu, y, z2)).op_norm() *
                 mu.weight(y);
        }
        rep.max_sum = std::max(rep.max_sum, sum);
      }
    }
  }
  return rep;
}

ModuleBoundsReport module_bounds(const PointMeasure& mu,
                                 const MatrixKernel& k) {
  const std::size_t n = mu.size();
  const int m = k.m;
  std::vector<Cplx> block(n * m * n * m, 0.0);
  std::vector<Cplx> blockadj(n * m * n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      CMat v = k.eval(mu, i, j);
      double s = std::sqrt(mu.weight(i) * mu.weight(j));
      CMat va = v.adjoint();
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
          block[(i * m + r) * n * m + (j * m + c)] = s * v.at(r, c);
          blockadj[(i * m + r) * n * m + (j * m + c)] = s * va.at(r, c);
        }
    }
  ModuleBoundsReport rep;
  rep.col_norm = spectral_norm_complex(block, n * m);
  rep.row_norm = spectral_norm_complex(blockadj, n * m);
  return rep;
}

TheoremDTerms theorem_d_terms(const PointMeasure& mu, const Lattice& lat,
                              const Filtration& fil, const MatrixKernel& k,
                              const MatrixField& f, uint32_t atom_id) {
  const SigmaAtom& q = fil.atoms[atom_id];
  if (q.sigma_parent < 0)
    throw std::invalid_argument("theorem_d_terms: atom is the root");
  double fa = f.sup_norm();
  if (fa == 0.0) throw std::invalid_argument("theorem_d_terms: zero field");
  const SigmaAtom& parent = fil.atoms[q.sigma_parent];
  const Cube& qc = lat.cubes[q.cube_id];
  const Cube& pc = lat.cubes[parent.cube_id];
  const double alpha = lat.params.alpha;
  const std::size_t n = mu.size();
  const int m = k.m;

  // region masks over the y index
  std::vector<char> in_q(n, 0), in_p(n, 0);
  for (std::size_t y = 0; y < n; ++y) {
    if (mu.dist(y, qc.center_index) <= alpha * qc.radius) in_q[y] = 1;
    if (mu.dist(y, pc.center_index) <= alpha * pc.radius) in_p[y] = 1;
  }

  auto apply_region = [&](std::size_t x, auto&& pred) {
    CMat acc(m);
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x || !pred(y)) continue;
      acc += (k.eval(mu, x, y) * f.get(y)).scaled(mu.weight(y));
    }
    return acc;
  };

  TheoremDTerms out;

  // I: local part averaged over Q
  {
    CMat acc(m);
    for (uint32_t x : q.members) {
      CMat v = apply_region(x, [&](std::size_t y) { return in_q[y] != 0; });
      acc.axpy(mu.weight(x), v.adjoint() * v);
    }
    out.local = std::sqrt(std::max(0.0, acc.scaled(1.0 / q.mass).max_eig()));
  }

  // II: parent average of the alpha B_{Q hat} part, a constant matrix
  {
    CMat c(m);
    for (uint32_t z : parent.members) {
      CMat v = apply_region(z, [&](std::size_t y) { return in_p[y] != 0; });
      c.axpy(mu.weight(z), v);
    }
    c = c.scaled(1.0 / parent.mass);
    out.parent = std::sqrt(std::max(0.0, (c.adjoint() * c).max_eig()));
  }

  // III: annulus alpha B_{Q hat} \ alpha B_Q
  {
    CMat acc(m);
    for (uint32_t x : q.members) {
      CMat v = apply_region(
          x, [&](std::size_t y) { return in_p[y] && !in_q[y]; });
      acc.axpy(mu.weight(x), v.adjoint() * v);
    }
    out.annulus = std::sqrt(std::max(0.0, acc.scaled(1.0 / q.mass).max_eig()));
  }

  // IV: far part against the parent average (kernel differences)
  {
    std::vector<CMat> far(n, CMat(m));
    CMat faravg(m);
    for (uint32_t z : parent.members) {
      far[z] = apply_region(z, [&](std::size_t y) { return !in_p[y]; });
      faravg.axpy(mu.weight(z), far[z]);
    }
    faravg = faravg.scaled(1.0 / parent.mass);
    CMat acc(m);
    for (uint32_t x : q.members) {
      CMat v = apply_region(x, [&](std::size_t y) { return !in_p[y]; });
      CMat d = v - faravg;
      acc.axpy(mu.weight(x), d.adjoint() * d);
    }
    out.far = std::sqrt(std::max(0.0, acc.scaled(1.0 / q.mass).max_eig()));
  }

  out.total = out.local + out.parent + out.annulus + out.far;

  // left side: full operator oscillation against the parent average
  {
    MatrixField tf = apply_matrix(mu, k, f);
    CMat base(m);
    for (uint32_t z : parent.members) base.axpy(mu.weight(z), tf.get(z));
    base = base.scaled(1.0 / parent.mass);
    CMat acc(m);
    for (uint32_t x : q.members) {
      CMat d = tf.get(x) - base;
      acc.axpy(mu.weight(x), d.adjoint() * d);
    }
    out.lhs = std::sqrt(std::max(0.0, acc.scaled(1.0 / q.mass).max_eig()));
  }
  out.ratio = out.lhs / fa;
  return out;
}

}  // namespace ndcz
