#ifndef SCTX_INFERENCE_HPP
#define SCTX_INFERENCE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sctx/contours.hpp"
#include "sctx/features.hpp"

namespace sctx {

struct FitConfig {
  double learning_rate = 0.03;
  int steps = 2000;
  double prior_scale = 1.0;
  std::uint64_t seed = 0;
  int folds = 5;
  int permutations = 10000;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

// Prior on the log observation-noise scale: Normal(0, kNoiseLogScalePriorSd^2).
inline constexpr double kNoiseLogScalePriorSd = 2.0;
// Initial standard deviation of every variational factor.
inline constexpr double kInitScale = 0.1;

// Fully factorized Gaussian over regression weights, bias and the log of the
// observation-noise scale.
struct GaussianPosterior {
  Eigen::VectorXd weight_means;
  Eigen::VectorXd weight_log_sds;
  double bias_mean = 0.0;
  double bias_log_sd = 0.0;
  double noise_log_scale_mean = 0.0;
  double noise_log_scale_sd = 0.0;
};

struct SviResult {
  GaussianPosterior posterior;
  bool converged = true;
  // Mean single-sample ELBO over the final window of steps.
  double final_elbo = 0.0;
};

// Maximizes the ELBO of y = Xw + b + noise, w_j, b ~ Normal(0, prior_scale^2),
// with reparameterized single-sample gradients and Adam. Deterministic for a
// given seed. Throws FitError on a non-finite objective.
SviResult fit_svi(const Eigen::Ref<const Eigen::MatrixXd>& X,
                  const Eigen::Ref<const Eigen::VectorXd>& y, const FitConfig& config);

// Exact posterior of Bayesian ridge regression with known noise scale.
// Coefficients are ordered [w_1..w_d, b].
struct ExactPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

ExactPosterior fit_conjugate_oracle(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    const Eigen::Ref<const Eigen::VectorXd>& y, double prior_scale,
                                    double noise_scale);

// Per-row E_q[(y - x.w - b)^2] (observation noise excluded) and the
// posterior-mean prediction.
void expected_sqerr_rows(const GaussianPosterior& posterior,
                         const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y, std::span<double> sqerr,
                         std::span<double> prediction);

double expected_mse(const GaussianPosterior& posterior, const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y);

// Two-sided sign-flip test on paired per-document differences;
// p = (1 + #{|flipped mean| >= |observed mean|}) / (permutations + 1).
double paired_permutation_test(std::span<const double> target, std::span<const double> baseline,
                               int permutations, std::uint64_t seed);

// Held-out results of one model under document-level cross-validation.
struct FoldPredictions {
  std::vector<double> sqerr;       // per row, from the fold where the row was held out
  std::vector<double> prediction;  // per row
  std::vector<double> fold_mse;    // per fold
  std::vector<bool> converged;     // per fold
  std::vector<std::string> columns;
  std::vector<std::string> dropped;
};

// Seed of the fit that holds out `fold`; shared by every predictor group.
std::uint64_t fold_seed(std::uint64_t seed, int fold);
// Seed of the sign-flip stream used when comparing two models.
std::uint64_t permutation_seed(std::uint64_t seed);

FoldPredictions cv_predictions(const FeatureTable& table, Group group, DependentKind dependent,
                               const FitConfig& config);

struct EvalReport {
  DependentKind dependent = DependentKind::doc_surprisal;
  Group group = Group::baseline;
  std::vector<double> per_fold_expected_mse_target;
  std::vector<double> per_fold_expected_mse_baseline;
  std::vector<double> per_doc_target;    // mean expected squared error per document
  std::vector<double> per_doc_baseline;
  double delta_mse = 0.0;  // target - baseline; negative means the group helps
  double p_value = 1.0;
  std::size_t n_tokens = 0;
  int folds = 0;
  std::uint64_t seed = 0;
  int permutations = 0;
  bool converged = true;
};

std::vector<double> per_document_means(const FeatureTable& table, std::span<const double> rows);

EvalReport compare_predictions(const FeatureTable& table, const FoldPredictions& target,
                               const FoldPredictions& baseline, Group group,
                               DependentKind dependent, const FitConfig& config);

// Fits baseline and baseline+group on each training split and compares their
// pooled held-out expected MSE.
EvalReport cross_validate(const FeatureTable& table, Group group, DependentKind dependent,
                          const FitConfig& config);

}  // namespace sctx

#endif  // SCTX_INFERENCE_HPP
