#pragma once

// Medians, local oscillations, the constructive sparse decomposition with
// its pointwise certificate, pointwise domination of CZ operators and the
// A2 weighted experiments.

#include <cstdint>
#include <vector>

#include "ndcz/filtration.hpp"
#include "ndcz/measure.hpp"
#include "ndcz/operators.hpp"

namespace ndcz {

/// Lower weighted median: the smallest value v of f on S with
/// max(mu(S ∩ {f < v}), mu(S ∩ {f > v})) <= mu(S)/2.
double weighted_median(const PointMeasure& mu, const std::vector<uint32_t>& s,
                       const ScalarField& f);

/// omega_lambda(f; S): minimal value spread over subsets of mass
/// >= lambda * mu(S). The optimum is a contiguous window in value order.
double lambda_oscillation(const PointMeasure& mu,
                          const std::vector<uint32_t>& s, const ScalarField& f,
                          double lambda);

struct SparseFamily {
  std::vector<uint32_t> atoms;                  // family members, Q0 first
  std::vector<int32_t> parent;                  // index into atoms, -1 for Q0
  std::vector<std::vector<uint32_t>> witness;   // E_Q, pairwise disjoint
  double eta = 0.0;                             // min mu(E_Q) / mu(Q)
};

struct SparseCertificate {
  ScalarField lhs;  // |f - m_{Q0}(f)| on Q0
  ScalarField rhs;  // sum over family cubes through x of osc + median jump
  double min_ratio = 0.0;  // over points with lhs > 0
  double max_ratio = 0.0;
  std::size_t defined_points = 0;
  std::vector<double> medians;       // per family entry
  std::vector<double> oscillations;  // per family entry
};

struct SparseDecomposition {
  SparseFamily family;
  SparseCertificate cert;
};

/// Stopping-time decomposition of f on the atom q0: children of a selected
/// cube are the maximal atoms where |f - m_Q(f)| exceeds omega_lambda(f;Q)
/// on more than half the mass. The certificate compares |f - m_{Q0}| with
/// the family right-hand side pointwise; median jumps are taken against the
/// family parent. Requires supp(f) inside q0 and lambda in (1/4, 1/2).
SparseDecomposition sparse_decompose(const PointMeasure& mu,
                                     const Filtration& fil,
                                     const ScalarField& f, uint32_t q0,
                                     double lambda);

struct DominationReport {
  SparseFamily family;
  ScalarField bound;      // sum over S of inf_Q M^c f
  double max_ratio = 0.0;  // sup |Tf| / bound over Q0
  bool failed = false;     // bound vanished where Tf != 0
  int64_t witness_point = -1;
};

/// Theorem-C style pointwise domination: sparse-decomposes Tf on q0 and
/// assembles the maximal-function bound over the family.
DominationReport dominate(const PointMeasure& mu, const Filtration& fil,
                          const DiscreteOperator& t, const ScalarField& f,
                          uint32_t q0, double lambda = 0.45);

struct Weight {
  std::vector<double> values;  // positive everywhere
};

struct A2Report {
  double value = 0.0;
  int64_t center = -1;
  double radius = 0.0;
};

/// [w]_{A2} over the canonical ball family restricted to (alpha_p, beta_p)-
/// doubling balls. Requires beta_p > alpha_p^d; throws when no family ball
/// is doubling.
A2Report a2_characteristic(const PointMeasure& mu, const Weight& w,
                           double alpha_p, double beta_p);

struct WeightedNormReport {
  double op_norm = 0.0;
  double a2 = 0.0;
  double ratio2 = 0.0;  // op_norm / a2^2
  double ratio1 = 0.0;  // op_norm / a2
};

WeightedNormReport weighted_norm_experiment(const PointMeasure& mu,
                                            const DiscreteOperator& t,
                                            const Weight& w, double alpha_p,
                                            double beta_p);

}  // namespace ndcz
