#pragma once

// Oscillation norms: the martingale RBMO_Sigma norm over filtration atoms,
// the two-part regularized BMO norm over the canonical doubling ball family,
// the square-function H1 norm, atomic-block validation and John-Nirenberg
// level-set diagnostics.

#include <cstdint>
#include <string>
#include <vector>

#include "ndcz/filtration.hpp"
#include "ndcz/measure.hpp"

namespace ndcz {

struct SigmaNormReport {
  double value = 0.0;
  double p = 1.0;
  int64_t witness_atom = -1;
  bool experimental_p = false;  // p outside {1, 2}
};

/// sup over atoms Q of (avg over Q of |f - <f>_{Q hat}|^p)^(1/p); the root
/// uses its own average as predecessor.
SigmaNormReport rbmo_sigma_norm(const Filtration& f, const ScalarField& field,
                                double p);

struct TolsaReport {
  double value = 0.0;  // max(star, dist)
  double star = 0.0;
  double dist = 0.0;
  // witnesses: (center index, radius) of the attaining ball / nested pair
  int64_t star_center = -1;
  double star_radius = 0.0;
  int64_t d_center1 = -1, d_center2 = -1;
  double d_radius1 = 0.0, d_radius2 = 0.0;
};

/// Two-part regularized BMO norm over the canonical ball family (support
/// centers x canonical grid), restricted to (2,beta)-doubling balls: the
/// oscillation part and the K-normalized nested-pair part. Batched over
/// fields so the field-independent pair scan runs once.
std::vector<TolsaReport> tolsa_norms(const PointMeasure& mu,
                                     const std::vector<ScalarField>& fields,
                                     double beta);

inline TolsaReport rbmo_tolsa_norm(const PointMeasure& mu,
                                   const ScalarField& field, double beta) {
  return tolsa_norms(mu, {field}, beta).front();
}

struct InclusionReport {
  double max_ratio = 0.0;  // sup over fields of sigma norm / tolsa norm
  std::size_t witness_field = 0;
  std::vector<double> ratios;
};

/// Empirical constant of the inclusion of the ball-family space into the
/// martingale space. Throws std::invalid_argument when every field is
/// constant.
InclusionReport inclusion_ratio(const PointMeasure& mu, const Filtration& f,
                                const std::vector<ScalarField>& fields,
                                double beta);

/// L1 norm of the martingale square function (levels k >= 1).
double h1_sigma_norm(const Filtration& f, const ScalarField& field);

struct AtomicBlock {
  int base_level = 0;  // k with E_k b = 0
  double p = 2.0;      // exponent in (1, inf); use infinity() for p = inf
  std::vector<double> coeffs;
  std::vector<uint32_t> supports;  // atom ids, level >= base_level
  std::vector<ScalarField> parts;  // a_j, one field per coefficient
};

ScalarField assemble_block(const AtomicBlock& b, std::size_t n);

struct BlockValidation {
  bool valid = false;
  std::string reason;     // empty when valid
  double value = 0.0;     // sum of |lambda_j|
};

BlockValidation validate_atomic_block(const Filtration& f,
                                      const AtomicBlock& b);

struct JNReport {
  std::vector<std::pair<double, double>> rows;  // (t, worst level-set ratio)
  double rate = 0.0;  // fitted exponential decay rate (least squares, log scale)
  bool degenerate = false;
  double norm = 0.0;
};

/// Level-set decay table sup_Q mu(Q ∩ {|f - <f>_{Q hat}| > t}) / mu(Q) on a
/// t-grid in units of the p=1 norm. Throws when the norm vanishes.
JNReport john_nirenberg_report(const Filtration& f, const ScalarField& field,
                               int points = 30);

}  // namespace ndcz
