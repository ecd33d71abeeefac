// Parallel kernels against their serial references.
//   bench_kernels --benchmark_filter=residual
// Thread count for the parallel variants is the second argument where present.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <Eigen/Dense>

#include "sctx/inference.hpp"
#include "sctx/kernels.hpp"

namespace {

struct Data {
  Eigen::MatrixXd X;
  Eigen::VectorXd y, w, var;
};

Data make(Eigen::Index n, Eigen::Index d) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  Data out{Eigen::MatrixXd(n, d), Eigen::VectorXd(n), Eigen::VectorXd(d), Eigen::VectorXd(d)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out.X(i, j) = z(rng);
  for (Eigen::Index i = 0; i < n; ++i) out.y[i] = 4.0 + z(rng);
  for (Eigen::Index j = 0; j < d; ++j) {
    out.w[j] = z(rng);
    out.var[j] = 0.01;
  }
  return out;
}

void BM_residual_reference(benchmark::State& state) {
  const auto data = make(state.range(0), 16);
  Eigen::VectorXd grad;
  for (auto _ : state) {
    auto s = sctx::kernels::reference::residual_gradient(data.X, data.y, data.w, 0.1, grad);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_residual_parallel(benchmark::State& state) {
  const auto data = make(state.range(0), 16);
  sctx::kernels::set_threads(static_cast<int>(state.range(1)));
  Eigen::VectorXd grad;
  for (auto _ : state) {
    auto s = sctx::kernels::residual_gradient(data.X, data.y, data.w, 0.1, grad);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_expected_sqerr_reference(benchmark::State& state) {
  const auto data = make(state.range(0), 16);
  std::vector<double> sq(static_cast<std::size_t>(state.range(0))), pred(sq.size());
  for (auto _ : state) {
    sctx::kernels::reference::expected_sqerr(data.X, data.y, data.w, data.var, 0.1, 0.01, sq, pred);
    benchmark::DoNotOptimize(sq.data());
  }
}

void BM_expected_sqerr_parallel(benchmark::State& state) {
  const auto data = make(state.range(0), 16);
  sctx::kernels::set_threads(static_cast<int>(state.range(1)));
  std::vector<double> sq(static_cast<std::size_t>(state.range(0))), pred(sq.size());
  for (auto _ : state) {
    sctx::kernels::expected_sqerr(data.X, data.y, data.w, data.var, 0.1, 0.01, sq, pred);
    benchmark::DoNotOptimize(sq.data());
  }
}

void BM_rolling_reference(benchmark::State& state) {
  const auto data = make(state.range(0), 1);
  std::vector<double> v(data.y.data(), data.y.data() + data.y.size()), out(v.size());
  for (auto _ : state) {
    sctx::kernels::reference::rolling_mean(v, 7, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_rolling_parallel(benchmark::State& state) {
  const auto data = make(state.range(0), 1);
  sctx::kernels::set_threads(static_cast<int>(state.range(1)));
  std::vector<double> v(data.y.data(), data.y.data() + data.y.size()), out(v.size());
  for (auto _ : state) {
    sctx::kernels::rolling_mean(v, 7, out);
    benchmark::DoNotOptimize(out.data());
  }
}

std::vector<double> diffs(std::size_t docs) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0.0, 0.05);
  std::vector<double> d(docs);
  for (auto& x : d) x = z(rng);
  return d;
}

void BM_sign_flip_reference(benchmark::State& state) {
  const auto d = diffs(50);
  for (auto _ : state) {
    auto hits = sctx::kernels::reference::sign_flip_exceedances(
        d, static_cast<std::size_t>(state.range(0)), 3, 0.01);
    benchmark::DoNotOptimize(hits);
  }
}

void BM_sign_flip_parallel(benchmark::State& state) {
  const auto d = diffs(50);
  sctx::kernels::set_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto hits = sctx::kernels::sign_flip_exceedances(d, static_cast<std::size_t>(state.range(0)), 3, 0.01);
    benchmark::DoNotOptimize(hits);
  }
}

// End-to-end single fit at the default step budget.
void BM_fit_svi(benchmark::State& state) {
  const auto data = make(state.range(0), 16);
  sctx::kernels::set_threads(static_cast<int>(state.range(1)));
  sctx::FitConfig config;
  for (auto _ : state) {
    auto fit = sctx::fit_svi(data.X, data.y, config);
    benchmark::DoNotOptimize(fit.final_elbo);
  }
}

}  // namespace

BENCHMARK(BM_residual_reference)->Arg(4096)->Arg(65536);
BENCHMARK(BM_residual_parallel)->Args({4096, 1})->Args({65536, 1})->Args({65536, 4});
BENCHMARK(BM_expected_sqerr_reference)->Arg(65536);
BENCHMARK(BM_expected_sqerr_parallel)->Args({65536, 1})->Args({65536, 4});
BENCHMARK(BM_rolling_reference)->Arg(65536);
BENCHMARK(BM_rolling_parallel)->Args({65536, 1})->Args({65536, 4});
BENCHMARK(BM_sign_flip_reference)->Arg(10000);
BENCHMARK(BM_sign_flip_parallel)->Args({10000, 1})->Args({10000, 4});
BENCHMARK(BM_fit_svi)->Args({4000, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
