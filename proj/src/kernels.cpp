#include "sctx/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sctx::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double flipped_mean(std::span<const double> diffs, std::uint64_t seed, std::uint64_t k) {
  SignStream signs(seed, k);
  double total = 0.0;
  for (double d : diffs) total += signs.next() * d;
  return total / static_cast<double>(diffs.size());
}

}  // namespace

SignStream::SignStream(std::uint64_t seed, std::uint64_t stream) : state_(seed) {
  std::uint64_t mix = stream;
  state_ ^= splitmix64(mix);
}

double SignStream::next() {
  if (left_ == 0) {
    bits_ = splitmix64(state_);
    left_ = 64;
  }
  const double s = (bits_ & 1U) ? 1.0 : -1.0;
  bits_ >>= 1;
  --left_;
  return s;
}

ResidualSums residual_gradient(const Eigen::Ref<const Eigen::MatrixXd>& X,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const Eigen::Ref<const Eigen::VectorXd>& w, double b,
                               Eigen::VectorXd& grad) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const Eigen::Index blocks = (n + kRowBlock - 1) / kRowBlock;
  Eigen::MatrixXd partial_grad(d, blocks);
  std::vector<ResidualSums> partial(static_cast<std::size_t>(blocks));

#pragma omp parallel for schedule(static)
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    const Eigen::Index lo = blk * kRowBlock;
    const Eigen::Index len = std::min(kRowBlock, n - lo);
    const Eigen::VectorXd r =
        (y.segment(lo, len) - X.middleRows(lo, len) * w).array() - b;
    partial_grad.col(blk).noalias() = X.middleRows(lo, len).transpose() * r;
    partial[static_cast<std::size_t>(blk)] = {r.sum(), r.squaredNorm()};
  }

  grad.setZero(d);
  ResidualSums total;
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    grad += partial_grad.col(blk);
    total.sum += partial[static_cast<std::size_t>(blk)].sum;
    total.sum_sq += partial[static_cast<std::size_t>(blk)].sum_sq;
  }
  return total;
}

void expected_sqerr(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& w_mean,
                    const Eigen::Ref<const Eigen::VectorXd>& w_var, double b_mean, double b_var,
                    std::span<double> sqerr, std::span<double> prediction) {
  const Eigen::Index n = X.rows();
  assert(static_cast<Eigen::Index>(sqerr.size()) == n);
  assert(static_cast<Eigen::Index>(prediction.size()) == n);
  const Eigen::Index blocks = (n + kRowBlock - 1) / kRowBlock;

#pragma omp parallel for schedule(static)
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    const Eigen::Index lo = blk * kRowBlock;
    const Eigen::Index len = std::min(kRowBlock, n - lo);
    const auto rows = X.middleRows(lo, len);
    const Eigen::VectorXd mean = (rows * w_mean).array() + b_mean;
    const Eigen::VectorXd var = (rows.array().square().matrix() * w_var).array() + b_var;
    for (Eigen::Index i = 0; i < len; ++i) {
      const double resid = y[lo + i] - mean[i];
      sqerr[static_cast<std::size_t>(lo + i)] = resid * resid + var[i];
      prediction[static_cast<std::size_t>(lo + i)] = mean[i];
    }
  }
}

void rolling_mean(std::span<const double> values, int window, std::span<double> out) {
  assert(window >= 1 && window % 2 == 1);
  assert(out.size() == values.size());
  const long n = static_cast<long>(values.size());
  const long half = window / 2;

#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - half);
    const long hi = std::min(n - 1, i + half);
    double total = 0.0;
    for (long j = lo; j <= hi; ++j) total += values[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = total / static_cast<double>(hi - lo + 1);
  }
}

std::size_t sign_flip_exceedances(std::span<const double> diffs, std::size_t permutations,
                                  std::uint64_t seed, double threshold) {
  if (diffs.empty()) return 0;
  long hits = 0;
  const long total = static_cast<long>(permutations);

#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (long k = 0; k < total; ++k) {
    if (std::abs(flipped_mean(diffs, seed, static_cast<std::uint64_t>(k))) >= threshold) ++hits;
  }
  return static_cast<std::size_t>(hits);
}

namespace reference {

ResidualSums residual_gradient(const Eigen::Ref<const Eigen::MatrixXd>& X,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const Eigen::Ref<const Eigen::VectorXd>& w, double b,
                               Eigen::VectorXd& grad) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  grad.setZero(d);
  ResidualSums total;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = y[i] - b;
    for (Eigen::Index j = 0; j < d; ++j) r -= X(i, j) * w[j];
    for (Eigen::Index j = 0; j < d; ++j) grad[j] += X(i, j) * r;
    total.sum += r;
    total.sum_sq += r * r;
  }
  return total;
}

void expected_sqerr(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& w_mean,
                    const Eigen::Ref<const Eigen::VectorXd>& w_var, double b_mean, double b_var,
                    std::span<double> sqerr, std::span<double> prediction) {
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double mean = b_mean;
    double var = b_var;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      mean += X(i, j) * w_mean[j];
      var += X(i, j) * X(i, j) * w_var[j];
    }
    const double resid = y[i] - mean;
    sqerr[static_cast<std::size_t>(i)] = resid * resid + var;
    prediction[static_cast<std::size_t>(i)] = mean;
  }
}

void rolling_mean(std::span<const double> values, int window, std::span<double> out) {
  const std::size_t n = values.size();
  const std::size_t half = static_cast<std::size_t>(window / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double total = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) total += values[j];
    out[i] = total / static_cast<double>(hi - lo + 1);
  }
}

std::size_t sign_flip_exceedances(std::span<const double> diffs, std::size_t permutations,
                                  std::uint64_t seed, double threshold) {
  if (diffs.empty()) return 0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < permutations; ++k) {
    if (std::abs(flipped_mean(diffs, seed, k)) >= threshold) ++hits;
  }
  return hits;
}

}  // namespace reference

}  // namespace sctx::kernels
