#include <doctest.h>

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sctx/kernels.hpp"

using namespace sctx;

namespace {

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y, w, var;
};

Problem problem(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Problem p{Eigen::MatrixXd(n, d), Eigen::VectorXd(n), Eigen::VectorXd(d), Eigen::VectorXd(d)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) p.X(i, j) = z(rng);
  for (Eigen::Index i = 0; i < n; ++i) p.y[i] = 3.0 + z(rng);
  for (Eigen::Index j = 0; j < d; ++j) {
    p.w[j] = z(rng);
    p.var[j] = 0.01 * std::abs(z(rng));
  }
  return p;
}

// Restores the thread count when a test case ends.
struct ThreadGuard {
  int saved = kernels::max_threads();
  ~ThreadGuard() { kernels::set_threads(saved); }
};

}  // namespace

TEST_CASE("residual_gradient: parallel matches serial reference") {
  ThreadGuard guard;
  for (Eigen::Index n : {1, 7, 1023, 1024, 1025, 5000}) {
    const auto p = problem(n, 6, static_cast<std::uint64_t>(n));
    Eigen::VectorXd g_ref, g1, g4;
    const auto ref = kernels::reference::residual_gradient(p.X, p.y, p.w, 0.4, g_ref);
    kernels::set_threads(1);
    const auto one = kernels::residual_gradient(p.X, p.y, p.w, 0.4, g1);
    kernels::set_threads(4);
    const auto four = kernels::residual_gradient(p.X, p.y, p.w, 0.4, g4);

    CHECK(one.sum == doctest::Approx(ref.sum).epsilon(1e-12));
    CHECK(one.sum_sq == doctest::Approx(ref.sum_sq).epsilon(1e-12));
    for (Eigen::Index j = 0; j < g_ref.size(); ++j)
      CHECK(g1[j] == doctest::Approx(g_ref[j]).epsilon(1e-10));
    // Fixed block order: thread count never changes the bits.
    CHECK(one.sum == four.sum);
    CHECK(one.sum_sq == four.sum_sq);
    CHECK(g1 == g4);
  }
}

TEST_CASE("expected_sqerr: parallel matches serial reference") {
  ThreadGuard guard;
  const auto p = problem(3000, 5, 9);
  std::vector<double> s_ref(3000), p_ref(3000), s_par(3000), p_par(3000);
  kernels::reference::expected_sqerr(p.X, p.y, p.w, p.var, 1.5, 0.02, s_ref, p_ref);
  kernels::set_threads(3);
  kernels::expected_sqerr(p.X, p.y, p.w, p.var, 1.5, 0.02, s_par, p_par);
  for (std::size_t i = 0; i < s_ref.size(); ++i) {
    CHECK(s_par[i] == doctest::Approx(s_ref[i]).epsilon(1e-12));
    CHECK(p_par[i] == doctest::Approx(p_ref[i]).epsilon(1e-12));
    CHECK(s_par[i] >= (p.y[static_cast<Eigen::Index>(i)] - p_par[i]) *
                          (p.y[static_cast<Eigen::Index>(i)] - p_par[i]));
  }
}

TEST_CASE("rolling_mean: parallel matches serial reference") {
  ThreadGuard guard;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (std::size_t n : {1u, 2u, 6u, 100u, 5000u}) {
    std::vector<double> v(n), a(n), b(n);
    for (auto& x : v) x = u(rng);
    for (int w : {1, 3, 5, 7, 11}) {
      kernels::reference::rolling_mean(v, w, a);
      kernels::set_threads(2);
      kernels::rolling_mean(v, w, b);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
    }
  }
}

TEST_CASE("sign_flip_exceedances: parallel equals serial exactly") {
  ThreadGuard guard;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> diffs(37);
  for (auto& d : diffs) d = z(rng);
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean = std::abs(mean / 37.0);
  const auto ref = kernels::reference::sign_flip_exceedances(diffs, 5000, 99, mean);
  for (int threads : {1, 2, 5}) {
    kernels::set_threads(threads);
    CHECK(kernels::sign_flip_exceedances(diffs, 5000, 99, mean) == ref);
  }
}

TEST_CASE("SignStream is balanced and reproducible") {
  kernels::SignStream a(1, 2), b(1, 2), c(1, 3);
  int plus = 0;
  bool differs = false;
  for (int i = 0; i < 20000; ++i) {
    const double s = a.next();
    CHECK((s == 1.0 || s == -1.0));
    CHECK(s == b.next());
    if (s != c.next()) differs = true;
    plus += s > 0;
  }
  CHECK(differs);
  CHECK(std::abs(plus - 10000) < 400);
}
