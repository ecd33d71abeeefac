#ifndef SCTX_KERNELS_HPP
#define SCTX_KERNELS_HPP

// Data-parallel inner loops. Each kernel has an OpenMP version (namespace
// sctx::kernels) and a plain serial version (sctx::kernels::reference) kept
// for tests and benchmarks. Parallel reductions use a fixed row blocking, so
// their results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace sctx::kernels {

inline constexpr Eigen::Index kRowBlock = 1024;

struct ResidualSums {
  double sum = 0.0;     // sum_i r_i
  double sum_sq = 0.0;  // sum_i r_i^2
};

// r = y - X w - b; writes X^T r into grad (resized to X.cols()).
ResidualSums residual_gradient(const Eigen::Ref<const Eigen::MatrixXd>& X,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const Eigen::Ref<const Eigen::VectorXd>& w, double b,
                               Eigen::VectorXd& grad);

// Per-row E[(y - x.w - b)^2] under independent Gaussians on w and b, plus
// the posterior-mean prediction.
void expected_sqerr(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& w_mean,
                    const Eigen::Ref<const Eigen::VectorXd>& w_var, double b_mean, double b_var,
                    std::span<double> sqerr, std::span<double> prediction);

// Centered window mean with edge clipping; window must be odd.
void rolling_mean(std::span<const double> values, int window, std::span<double> out);

// Number of random sign flips whose |mean(s_i d_i)| reaches `threshold`.
// Flip k draws its signs from a stream keyed on (seed, k).
std::size_t sign_flip_exceedances(std::span<const double> diffs, std::size_t permutations,
                                  std::uint64_t seed, double threshold);

// Sign stream used by sign_flip_exceedances; exposed for tests.
class SignStream {
public:
  SignStream(std::uint64_t seed, std::uint64_t stream);
  // +1.0 or -1.0
  double next();

private:
  std::uint64_t state_;
  std::uint64_t bits_ = 0;
  int left_ = 0;
};

int max_threads();
void set_threads(int n);

namespace reference {

ResidualSums residual_gradient(const Eigen::Ref<const Eigen::MatrixXd>& X,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const Eigen::Ref<const Eigen::VectorXd>& w, double b,
                               Eigen::VectorXd& grad);

void expected_sqerr(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& w_mean,
                    const Eigen::Ref<const Eigen::VectorXd>& w_var, double b_mean, double b_var,
                    std::span<double> sqerr, std::span<double> prediction);

void rolling_mean(std::span<const double> values, int window, std::span<double> out);

std::size_t sign_flip_exceedances(std::span<const double> diffs, std::size_t permutations,
                                  std::uint64_t seed, double threshold);

}  // namespace reference

}  // namespace sctx::kernels

#endif  // SCTX_KERNELS_HPP
