// Serial reference vs OpenMP kernels on a synthetic 20-dimensional instance.
#include <benchmark/benchmark.h>

#include "harmform/kernels.hpp"
#include "harmform/rng.hpp"

using namespace harmform;

namespace {

struct Fixture {
  int m = 20;
  Combinadic c3{20, 3};
  Combinadic c4{20, 4};
  std::vector<Eigen::MatrixXd> rho;
  Eigen::MatrixXd pair_p;
  std::vector<int> pair_index;
  Eigen::MatrixXd forms;
  Eigen::VectorXd w;
  std::vector<int> rows;

  Fixture() {
    SplitMix64 rng(7);
    for (int a = 0; a < 3; ++a) {
      Eigen::MatrixXd r(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) r(i, j) = rng.uniform(-1, 1);
      rho.push_back(r - r.transpose());
    }
    pair_index.assign(m * m, -1);
    int np = m * (m - 1) / 2, at = 0;
    pair_p.resize(m, np);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j, ++at) {
        pair_index[i * m + j] = at;
        for (int k = 0; k < m; ++k) pair_p(k, at) = rng.uniform(-1, 1);
      }
    forms.resize(c3.count(), 8);
    for (int i = 0; i < forms.rows(); ++i)
      for (int j = 0; j < forms.cols(); ++j) forms(i, j) = rng.uniform(-1, 1);
    w.resize(m);
    for (int i = 0; i < m; ++i) w(i) = rng.uniform(0.5, 2.0);
    rows.resize(c3.count());
    for (int i = 0; i < c3.count(); ++i) rows[i] = i;
  }
};

Fixture& fx() {
  static Fixture f;
  return f;
}

void bm_lie_derivative_serial(benchmark::State& state) {
  auto& f = fx();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernels::serial::lie_derivative_stack(f.c3, f.rows, f.rho));
}

void bm_lie_derivative_omp(benchmark::State& state) {
  auto& f = fx();
  kernels::set_parallel(true);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::lie_derivative_stack(f.c3, f.rows, f.rho));
}

void bm_differential_serial(benchmark::State& state) {
  auto& f = fx();
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::serial::differential_batch(
        f.c3, f.c4, f.pair_p, f.pair_index, f.forms));
}

void bm_differential_omp(benchmark::State& state) {
  auto& f = fx();
  kernels::set_parallel(true);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::differential_batch(
        f.c3, f.c4, f.pair_p, f.pair_index, f.forms));
}

void bm_weights_serial(benchmark::State& state) {
  auto& f = fx();
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::serial::tuple_weights(f.c4, f.w));
}

void bm_weights_omp(benchmark::State& state) {
  auto& f = fx();
  kernels::set_parallel(true);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::tuple_weights(f.c4, f.w));
}

BENCHMARK(bm_lie_derivative_serial);
BENCHMARK(bm_lie_derivative_omp);
BENCHMARK(bm_differential_serial);
BENCHMARK(bm_differential_omp);
BENCHMARK(bm_weights_serial);
BENCHMARK(bm_weights_omp);

}  // namespace

BENCHMARK_MAIN();
