// Benchmark comparing the OpenMP kernels against their serial references:
// neighbor table construction, growth constant, the ball-family norm scan,
// kernel matrix assembly and repeated matvec.

#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ndcz/eigen.hpp"
#include "ndcz/measure.hpp"
#include "ndcz/operators.hpp"
#include "ndcz/reference.hpp"
#include "ndcz/rng.hpp"
#include "ndcz/spaces.hpp"
#include "ndcz/sparse.hpp"
#include "ndcz/testmeasures.hpp"

using namespace ndcz;

namespace {

double wtime() {
  timespec ts;
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * ts.tv_nsec;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e100;
  for (int r = 0; r < reps; ++r) {
    double t0 = wtime();
    fn();
    best = std::min(best, wtime() - t0);
  }
  return best;
}

void row(const char* name, std::size_t n, double serial, double parallel) {
  std::printf("%-28s n=%-6zu serial %8.4fs  openmp %8.4fs  speedup %.2fx\n",
              name, n, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> sizes = {256, 512, 1024};
  if (argc > 1) sizes = {static_cast<std::size_t>(std::stoul(argv[1]))};
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#endif

  for (std::size_t n : sizes) {
    PointMeasure mu = make_uniform(n);

    double s = time_best_of(3, [&] { reference::build_neighbor_table(mu); });
    double p = time_best_of(3, [&] { kernels::build_neighbor_table(mu); });
    row("neighbor_table", n, s, p);

    const auto& grid = mu.canonical_grid();
    s = time_best_of(3, [&] {
      reference::growth_constant(mu, grid, mu.growth_degree());
    });
    p = time_best_of(3, [&] {
      kernels::growth_constant(mu, grid, mu.growth_degree());
    });
    row("growth_constant", n, s, p);

    KernelSpec k = KernelSpec::parse("cauchy", mu);
    s = time_best_of(3, [&] { reference::assemble_kernel_matrix(mu, k); });
    p = time_best_of(3, [&] { kernels::assemble_kernel_matrix(mu, k); });
    row("kernel_matrix", n, s, p);

    DiscreteOperator t = build_operator(mu, k);
    ScalarField f = random_field(n, 7);
    ScalarField y;
    s = time_best_of(3, [&] {
      for (int r = 0; r < 50; ++r) reference::matvec(t.matrix, n, f, y);
    });
    p = time_best_of(3, [&] {
      for (int r = 0; r < 50; ++r) kernels::matvec(t.matrix, n, f, y);
    });
    row("matvec_x50", n, s, p);
  }

  // the ball-family scan is quartic-ish; bench it at small sizes only
  for (std::size_t n : {48, 96}) {
    PointMeasure mu = make_uniform(n);
    auto fields = random_fields(n, 8, 11);
    double beta = 16.0;
    double s =
        time_best_of(2, [&] { reference::tolsa_norms(mu, fields, beta); });
    double p = time_best_of(2, [&] { tolsa_norms(mu, fields, beta); });
    row("ball_family_norms", n, s, p);
  }
  return 0;
}
