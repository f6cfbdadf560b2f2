#pragma once

// Discretized Calderon-Zygmund operators over a point measure: kernel
// specifications with size/smoothness validation, dense operator assembly,
// maximal operators, the martingale CZ decomposition and the weak (1,1)
// level-set table.

#include <cstdint>
#include <string>
#include <vector>

#include "ndcz/filtration.hpp"
#include "ndcz/lattice.hpp"
#include "ndcz/measure.hpp"

namespace ndcz {

enum class KernelKind { cauchy, riesz, custom };

struct KernelSpec {
  KernelKind kind = KernelKind::cauchy;
  int riesz_component = 0;
  double degree = 1.0;   // n in the size condition |k| <= C / |x-y|^n
  double epsilon = 0.0;  // kernel set to 0 when |x-y| < epsilon
  double gamma = 1.0;    // Lipschitz exponent (metadata)
  std::vector<double> custom;  // dense row-major table for kind == custom

  /// "cauchy" | "riesz:<j>" | "custom:<path>". The Cauchy kernel is
  /// 1/(x-y) on the line; on planar measures it is the real component of
  /// the complex-plane kernel (the imaginary one is riesz:1).
  static KernelSpec parse(const std::string& text, const PointMeasure& mu);

  double eval(const PointMeasure& mu, std::size_t i, std::size_t j) const;
};

struct KernelValidation {
  double size_constant = 0.0;    // max |k(x,y)| |x-y|^n over support pairs
  double lipschitz_ratio = 0.0;  // max over sampled admissible triples
  bool size_ok = false;          // size_constant <= 1 for built-in kernels
};

KernelValidation validate_kernel(const PointMeasure& mu, const KernelSpec& k);

struct DiscreteOperator {
  std::size_t n = 0;
  KernelSpec spec;
  std::vector<double> matrix;  // row-major; entry (i,j) = k(x_i,x_j) w_j
};

DiscreteOperator build_operator(const PointMeasure& mu, const KernelSpec& k);

ScalarField apply(const DiscreteOperator& t, const ScalarField& f);

/// Operator norm on L2(mu) (power iteration on the weight-conjugated
/// matrix, dense fallback).
double l2_norm_estimate(const PointMeasure& mu, const DiscreteOperator& t);

/// Operator norm on L2(w dmu) for a positive density w.
double weighted_l2_norm(const PointMeasure& mu, const DiscreteOperator& t,
                        const std::vector<double>& w);

/// M^c f(x) = sup_r mu(B(x,5r))^{-1} \int_{B(x,r)} |f|, evaluated exactly:
/// radii below the closest neighbor contribute |f(x)| and larger radii only
/// matter at the center's own distance steps.
ScalarField maximal_centered(const PointMeasure& mu, const ScalarField& f);

/// Lattice maximal function: sup over the ancestor chain of
/// mu(alpha B_Q)^{-1} \int_{56 B_Q} |f|.
ScalarField maximal_lattice(const PointMeasure& mu, const Lattice& lat,
                            const ScalarField& f, double alpha);

struct CZDecomposition {
  ScalarField good;
  std::vector<int> phi_levels;
  std::vector<ScalarField> phis;  // one bad piece per occupied level
  std::vector<uint32_t> maximal_atoms;
  double lambda = 0.0;
  double bad_l1 = 0.0;        // sum_k ||phi_k||_1
  double good_l2_sq = 0.0;    // ||g||_2^2
  double mean_zero_defect = 0.0;  // max piece integral / lambda mass scale
};

/// Dyadic CZ decomposition at height lambda: f = g + sum_k phi_k with the
/// bad pieces mean-zero over the parents of the maximal atoms. Requires
/// 0 <= f and lambda > ||f||_1 / ||mu||.
CZDecomposition cz_decompose(const Filtration& f, const ScalarField& field,
                             double lambda);

struct Weak11Report {
  struct Row {
    std::size_t field = 0;
    double lambda = 0.0;
    double value = 0.0;  // lambda * mu(|Tf| > lambda) / ||f||_1
  };
  std::vector<Row> rows;
  double max_value = 0.0;
};

Weak11Report weak11_report(const PointMeasure& mu, const DiscreteOperator& t,
                           const std::vector<ScalarField>& fields,
                           const std::vector<double>& lambdas);

namespace kernels {
std::vector<double> assemble_kernel_matrix(const PointMeasure& mu,
                                           const KernelSpec& spec);
}

}  // namespace ndcz
