#pragma once

// Operator-valued fields and kernels: the column RBMO norm over matrix
// fields, the Kadison-Schwarz positivity check, operator Hormander sums and
// the four-term endpoint split.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ndcz/filtration.hpp"
#include "ndcz/lattice.hpp"
#include "ndcz/measure.hpp"
#include "ndcz/operators.hpp"

namespace ndcz {

using Cplx = std::complex<double>;

/// Dense m x m complex matrix, row-major. Small (m <= 8); all eigen work
/// goes through the cyclic Jacobi solver for reproducibility.
struct CMat {
  int m = 0;
  std::vector<Cplx> a;

  CMat() = default;
  explicit CMat(int mm) : m(mm), a(static_cast<std::size_t>(mm) * mm) {}
  static CMat identity(int mm);

  Cplx& at(int i, int j) { return a[static_cast<std::size_t>(i) * m + j]; }
  const Cplx& at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * m + j];
  }
  CMat adjoint() const;
  CMat operator+(const CMat& o) const;
  CMat operator-(const CMat& o) const;
  CMat operator*(const CMat& o) const;
  CMat& operator+=(const CMat& o);
  CMat& axpy(Cplx c, const CMat& o);  // this += c * o
  CMat scaled(Cplx c) const;
  double op_norm() const;      // largest singular value
  double max_eig() const;      // Hermitian input
  double min_eig() const;      // Hermitian input
};

struct MatrixField {
  int m = 0;
  std::size_t npoints = 0;
  std::vector<Cplx> values;  // npoints * m * m

  CMat get(std::size_t i) const;
  void set(std::size_t i, const CMat& v);
  MatrixField adjoint() const;
  /// max over points of the matrix operator norm (the L_inf(A) norm)
  double sup_norm() const;

  static MatrixField load(const std::string& path, std::size_t expected,
                          int expected_m = 0);
  void save(const std::string& path) const;
};

/// Kernel acting by left multiplication: scalar kernel times a constant
/// matrix factor, or a full per-pair table.
struct MatrixKernel {
  int m = 1;
  KernelSpec scalar;
  CMat factor;              // identity when not set
  std::vector<Cplx> table;  // optional: (i*n + j) blocks, row-major

  static MatrixKernel scalar_times(const KernelSpec& k, const CMat& u);
  CMat eval(const PointMeasure& mu, std::size_t i, std::size_t j) const;
};

/// Tf(x_i) = sum_j K(i,j) f(x_j) w_j with the diagonal excluded.
MatrixField apply_matrix(const PointMeasure& mu, const MatrixKernel& k,
                         const MatrixField& f);

/// Column norm: sup over atoms of || avg over Q of |f - <f>_{Q hat}|^2 ||^(1/2)
/// with |g|^2 = g* g; the root atom uses its own average.
double rbmo_sigma_c_norm(const Filtration& fil, const MatrixField& f);

/// max of the column norms of f and f*.
double rbmo_sigma_norm_twosided(const Filtration& fil, const MatrixField& f);

struct KSReport {
  double min_gap = 0.0;  // smallest eigenvalue of <|f|^2>_Q - |<f>_Q|^2
  double scale = 0.0;    // largest <|f|^2>_Q eigenvalue seen
  int64_t witness_atom = -1;
  bool ok = false;  // min_gap >= -1e-10 * scale
};

KSReport kadison_schwarz_check(const Filtration& fil, const MatrixField& f);

struct TheoremDTerms {
  double local = 0.0;    // I: near part over alpha B_Q
  double parent = 0.0;   // II: parent average of the alpha B_{Q hat} part
  double annulus = 0.0;  // III: alpha B_{Q hat} \ alpha B_Q via size
  double far = 0.0;      // IV: Hormander differences outside alpha B_{Q hat}
  double total = 0.0;
  double lhs = 0.0;      // || avg_Q |Tf - <Tf>_{Q hat}|^2 ||^(1/2)
  double ratio = 0.0;    // lhs / ||f||_A
};

/// The four proof terms of the endpoint estimate at one atom, as exact
/// discrete sums. Requires a non-root atom and a nonzero field.
TheoremDTerms theorem_d_terms(const PointMeasure& mu, const Lattice& lat,
                              const Filtration& fil, const MatrixKernel& k,
                              const MatrixField& f, uint32_t atom_id);

/// Largest ||k(x,y)|| |x-y|^n over support pairs.
double matrix_size_constant(const PointMeasure& mu, const MatrixKernel& k);

struct HormanderReport {
  double max_sum = 0.0;  // worst ball in the lattice family
  std::size_t balls = 0;
};

/// Operator Hormander sums over the lattice ball family (z-pairs inside
/// B_Q, integral outside alpha B_Q), finite by construction and recorded.
HormanderReport hormander_report(const PointMeasure& mu, const Lattice& lat,
                                 const MatrixKernel& k);

struct ModuleBoundsReport {
  double col_norm = 0.0;  // block matrix [sqrt(w_i w_j) K_ij]
  double row_norm = 0.0;  // same with adjoint blocks
};

/// Measured surrogates for the row/column L2-module boundedness of the
/// kernel, recorded as block-matrix spectral norms.
ModuleBoundsReport module_bounds(const PointMeasure& mu, const MatrixKernel& k);

}  // namespace ndcz
