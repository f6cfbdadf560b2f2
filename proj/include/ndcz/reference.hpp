#pragma once

// Serial reference implementations of the OpenMP kernels. Same algorithms,
// single thread; tests assert exact agreement and the bench tool compares
// wall times.

#include <vector>

#include "ndcz/measure.hpp"

namespace ndcz {

struct DiscreteOperator;
struct Weight;
struct A2Report;
struct TolsaReport;
struct KernelSpec;

namespace reference {

NeighborTable build_neighbor_table(const PointMeasure& mu);

double growth_constant(const PointMeasure& mu, const std::vector<double>& grid,
                       double degree);

std::vector<TolsaReport> tolsa_norms(const PointMeasure& mu,
                                     const std::vector<ScalarField>& fields,
                                     double beta);

A2Report a2_characteristic(const PointMeasure& mu, const Weight& w,
                           double alpha_p, double beta_p);

void matvec(const std::vector<double>& m, std::size_t n,
            const std::vector<double>& x, std::vector<double>& y);

std::vector<double> assemble_kernel_matrix(const PointMeasure& mu,
                                           const KernelSpec& spec);

}  // namespace reference
}  // namespace ndcz
