#pragma once

// Cyclic Jacobi eigensolvers for dense symmetric / Hermitian matrices and a
// power iteration for spectral norms. Jacobi is used for the small matrix
// algebra (m <= 8) and as the dense fallback when power iteration stalls;
// the cyclic sweep order makes results reproducible.

#include <complex>
#include <cstddef>
#include <vector>

namespace ndcz {

/// Eigenvalues of a real symmetric matrix (row-major), ascending.
std::vector<double> jacobi_symmetric(std::vector<double> a, std::size_t n);

/// Eigenvalues of a complex Hermitian matrix (row-major), ascending.
std::vector<double> jacobi_hermitian(std::vector<std::complex<double>> a,
                                     std::size_t m);

/// Largest singular value of a real square matrix via power iteration on
/// A^T A (relative tolerance 1e-8); falls back to the dense Jacobi
/// eigensolver when the iteration cap is reached.
double spectral_norm(const std::vector<double>& a, std::size_t n);

/// Largest singular value of a complex square matrix (same scheme).
double spectral_norm_complex(const std::vector<std::complex<double>>& a,
                             std::size_t n);

namespace kernels {
/// y = a x for a row-major n x n matrix; rows are summed serially in index
/// order so the result does not depend on the thread count.
void matvec(const std::vector<double>& a, std::size_t n,
            const std::vector<double>& x, std::vector<double>& y);
}  // namespace kernels

}  // namespace ndcz
