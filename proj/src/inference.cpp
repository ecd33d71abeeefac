#include "sctx/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sctx/error.hpp"
#include "sctx/kernels.hpp"

namespace sctx {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// Adam over a flat parameter vector, ascending the objective.
class Adam {
public:
  Adam(Eigen::Index size, double lr) : lr_(lr), m_(Eigen::VectorXd::Zero(size)), v_(m_) {}

  void ascend(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
    v_ = kBeta2 * v_ + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    params.array() += lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + kEps);
  }

private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  double lr_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  int t_ = 0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kPermutationSalt = 0x7065726DULL;

}  // namespace

void FitConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(prior_scale > 0.0) || !std::isfinite(prior_scale))
    throw std::invalid_argument("prior_scale must be positive and finite");
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (permutations < 1000) throw std::invalid_argument("permutations must be >= 1000");
}

SviResult fit_svi(const Eigen::Ref<const Eigen::MatrixXd>& X,
                  const Eigen::Ref<const Eigen::VectorXd>& y, const FitConfig& config) {
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (X.rows() != y.size()) throw std::invalid_argument("X and y disagree on the row count");
  if (X.rows() < X.cols() || X.rows() == 0)
    throw std::invalid_argument("need at least as many rows as columns");

  const Eigen::Index d = X.cols();
  const double n = static_cast<double>(X.rows());
  const double prior_var = config.prior_scale * config.prior_scale;
  const double noise_prior_var = kNoiseLogScalePriorSd * kNoiseLogScalePriorSd;

  // Layout: [w means (d) | w log sds (d) | b mean | b log sd | log-noise mean | log-noise log sd]
  const Eigen::Index ib = 2 * d;
  const Eigen::Index is = 2 * d + 2;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(2 * d + 4);
  theta.segment(d, d).setConstant(std::log(kInitScale));
  theta[ib + 1] = std::log(kInitScale);
  theta[is + 1] = std::log(kInitScale);

  Adam adam(theta.size(), config.learning_rate);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd eps_w(d);
  Eigen::VectorXd w(d);
  Eigen::VectorXd xtr(d);
  Eigen::VectorXd grad(theta.size());

  const int window = std::max(50, config.steps / 10);
  std::vector<double> elbo_trace;
  elbo_trace.reserve(static_cast<std::size_t>(config.steps));

  for (int step = 0; step < config.steps; ++step) {
    for (Eigen::Index j = 0; j < d; ++j) eps_w[j] = normal(rng);
    const double eps_b = normal(rng);
    const double eps_s = normal(rng);

    const Eigen::VectorXd sd_w = theta.segment(d, d).array().exp();
    w = theta.head(d) + sd_w.cwiseProduct(eps_w);
    const double sd_b = std::exp(theta[ib + 1]);
    const double b = theta[ib] + sd_b * eps_b;
    const double sd_s = std::exp(theta[is + 1]);
    const double log_noise = theta[is] + sd_s * eps_s;

    const auto sums = kernels::residual_gradient(X, y, w, b, xtr);
    const double inv_var = std::exp(-2.0 * log_noise);

    const double log_lik = -n * log_noise - 0.5 * inv_var * sums.sum_sq - 0.5 * n * kLog2Pi;
    const double log_prior = -0.5 * (w.squaredNorm() + b * b) / prior_var -
                             0.5 * log_noise * log_noise / noise_prior_var;
    // Gaussian entropy up to a constant.
    const double entropy = theta.segment(d, d).sum() + theta[ib + 1] + theta[is + 1];
    const double elbo = log_lik + log_prior + entropy;

    // d(log joint)/d(sample)
    const Eigen::VectorXd g_w = inv_var * xtr - w / prior_var;
    const double g_b = inv_var * sums.sum - b / prior_var;
    const double g_s = -n + inv_var * sums.sum_sq - log_noise / noise_prior_var;

    grad.head(d) = g_w;
    grad.segment(d, d) = (g_w.cwiseProduct(eps_w).cwiseProduct(sd_w)).array() + 1.0;
    grad[ib] = g_b;
    grad[ib + 1] = g_b * eps_b * sd_b + 1.0;
    grad[is] = g_s;
    grad[is + 1] = g_s * eps_s * sd_s + 1.0;

    if (!std::isfinite(elbo) || !grad.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite ELBO at step " << step << " (elbo=" << elbo << ", log_noise=" << log_noise
          << ", residual_ss=" << sums.sum_sq << ", |grad|=" << grad.norm() << ")";
      throw FitError(msg.str());
    }
    elbo_trace.push_back(elbo);
    adam.ascend(theta, grad);
  }

  SviResult result;
  auto& post = result.posterior;
  post.weight_means = theta.head(d);
  post.weight_log_sds = theta.segment(d, d);
  post.bias_mean = theta[ib];
  post.bias_log_sd = theta[ib + 1];
  post.noise_log_scale_mean = theta[is];
  post.noise_log_scale_sd = std::exp(theta[is + 1]);

  // Moving-average check: is the ELBO still climbing over the last window?
  const auto span = static_cast<std::size_t>(std::min(window, config.steps / 2));
  const std::size_t total = elbo_trace.size();
  if (span >= 2) {
    auto mean_var = [&](std::size_t lo, std::size_t hi) {
      double mean = 0.0;
      for (std::size_t i = lo; i < hi; ++i) mean += elbo_trace[i];
      mean /= static_cast<double>(hi - lo);
      double var = 0.0;
      for (std::size_t i = lo; i < hi; ++i) var += (elbo_trace[i] - mean) * (elbo_trace[i] - mean);
      return std::pair{mean, var / static_cast<double>(hi - lo - 1)};
    };
    const auto [last, last_var] = mean_var(total - span, total);
    const auto [prev, prev_var] = mean_var(total - 2 * span, total - span);
    const double se = std::sqrt((last_var + prev_var) / static_cast<double>(span));
    result.final_elbo = last;
    result.converged = (last - prev) <= 3.0 * se + 1e-6 * std::abs(last);
  } else {
    result.final_elbo = elbo_trace.back();
    result.converged = false;
  }
  return result;
}

ExactPosterior fit_conjugate_oracle(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    const Eigen::Ref<const Eigen::VectorXd>& y, double prior_scale,
                                    double noise_scale) {
  if (X.rows() != y.size()) throw std::invalid_argument("X and y disagree on the row count");
  if (!(prior_scale > 0.0) || !(noise_scale > 0.0))
    throw std::invalid_argument("prior and noise scales must be positive");
  Eigen::MatrixXd A(X.rows(), X.cols() + 1);
  A << X, Eigen::VectorXd::Ones(X.rows());
  const double noise_var = noise_scale * noise_scale;
  Eigen::MatrixXd precision = A.transpose() * A / noise_var;
  precision.diagonal().array() += 1.0 / (prior_scale * prior_scale);
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw FitError("posterior precision is not positive definite");
  ExactPosterior out;
  out.mean = llt.solve(A.transpose() * y / noise_var);
  out.covariance = llt.solve(Eigen::MatrixXd::Identity(A.cols(), A.cols()));
  return out;
}

void expected_sqerr_rows(const GaussianPosterior& posterior,
                         const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y, std::span<double> sqerr,
                         std::span<double> prediction) {
  if (X.cols() != posterior.weight_means.size() || X.rows() != y.size())
    throw std::invalid_argument("design matrix does not match the posterior");
  const Eigen::VectorXd w_var = (2.0 * posterior.weight_log_sds.array()).exp();
  const double b_var = std::exp(2.0 * posterior.bias_log_sd);
  kernels::expected_sqerr(X, y, posterior.weight_means, w_var, posterior.bias_mean, b_var, sqerr,
                          prediction);
}

double expected_mse(const GaussianPosterior& posterior, const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (X.rows() == 0) throw std::invalid_argument("expected_mse of zero rows");
  std::vector<double> sqerr(static_cast<std::size_t>(X.rows()));
  std::vector<double> prediction(sqerr.size());
  expected_sqerr_rows(posterior, X, y, sqerr, prediction);
  return std::accumulate(sqerr.begin(), sqerr.end(), 0.0) / static_cast<double>(sqerr.size());
}

double paired_permutation_test(std::span<const double> target, std::span<const double> baseline,
                               int permutations, std::uint64_t seed) {
  if (target.size() != baseline.size())
    throw std::invalid_argument("paired lists differ in length");
  if (target.size() < 2) throw std::invalid_argument("permutation test needs >= 2 documents");
  if (permutations < 1) throw std::invalid_argument("permutations must be >= 1");
  std::vector<double> diffs(target.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = target[i] - baseline[i];
  const double observed =
      std::abs(std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(diffs.size()));
  // Flipped sums are accumulated in a different order; a relative slack keeps
  // exact ties counted as ties.
  const double threshold = observed * (1.0 - 1e-12);
  const auto hits = kernels::sign_flip_exceedances(diffs, static_cast<std::size_t>(permutations),
                                                   seed, threshold);
  return (1.0 + static_cast<double>(hits)) / (static_cast<double>(permutations) + 1.0);
}

std::uint64_t fold_seed(std::uint64_t seed, int fold) {
  return mix_seed(seed, static_cast<std::uint64_t>(fold));
}

std::uint64_t permutation_seed(std::uint64_t seed) { return mix_seed(seed, kPermutationSalt); }

FoldPredictions cv_predictions(const FeatureTable& table, Group group, DependentKind dependent,
                               const FitConfig& config) {
  config.validate();
  if (table.folds != config.folds)
    throw std::invalid_argument("table was split into " + std::to_string(table.folds) +
                                " folds but the config asks for " + std::to_string(config.folds));
  if (table.documents() < static_cast<std::size_t>(config.folds))
    throw std::invalid_argument("fewer documents than folds");

  const auto row_folds = table.row_folds();
  FoldPredictions out;
  out.sqerr.assign(table.rows(), 0.0);
  out.prediction.assign(table.rows(), 0.0);
  out.fold_mse.assign(static_cast<std::size_t>(config.folds), 0.0);
  out.converged.assign(static_cast<std::size_t>(config.folds), true);
  std::vector<DesignMatrix> designs(static_cast<std::size_t>(config.folds));
  std::vector<std::exception_ptr> failure(static_cast<std::size_t>(config.folds));

#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f < config.folds; ++f) {
    try {
      auto& dm = designs[static_cast<std::size_t>(f)];
      dm = build_design_matrix(table, group, dependent, f);
      std::vector<Eigen::Index> train;
      std::vector<Eigen::Index> test;
      for (std::size_t r = 0; r < row_folds.size(); ++r)
        (row_folds[r] == f ? test : train).push_back(static_cast<Eigen::Index>(r));
      const Eigen::MatrixXd X_train = dm.X(train, Eigen::all);
      const Eigen::VectorXd y_train = dm.y(train);
      FitConfig fit = config;
      fit.seed = fold_seed(config.seed, f);
      const SviResult result = fit_svi(X_train, y_train, fit);

      const Eigen::MatrixXd X_test = dm.X(test, Eigen::all);
      const Eigen::VectorXd y_test = dm.y(test);
      std::vector<double> sq(test.size());
      std::vector<double> pred(test.size());
      expected_sqerr_rows(result.posterior, X_test, y_test, sq, pred);
      double total = 0.0;
      for (std::size_t k = 0; k < test.size(); ++k) {
        out.sqerr[static_cast<std::size_t>(test[k])] = sq[k];
        out.prediction[static_cast<std::size_t>(test[k])] = pred[k];
        total += sq[k];
      }
      out.fold_mse[static_cast<std::size_t>(f)] = total / static_cast<double>(test.size());
      out.converged[static_cast<std::size_t>(f)] = result.converged;
    } catch (...) {
      failure[static_cast<std::size_t>(f)] = std::current_exception();
    }
  }
  for (const auto& e : failure) {
    if (e) std::rethrow_exception(e);
  }

  out.columns = designs.front().names;
  for (const auto& dm : designs) {
    for (const auto& name : dm.dropped) {
      if (std::find(out.dropped.begin(), out.dropped.end(), name) == out.dropped.end())
        out.dropped.push_back(name);
    }
  }
  return out;
}

std::vector<double> per_document_means(const FeatureTable& table, std::span<const double> rows) {
  std::vector<double> out(table.documents(), 0.0);
  for (std::size_t d = 0; d < table.documents(); ++d) {
    const auto lo = table.doc_offsets[d];
    const auto hi = table.doc_offsets[d + 1];
    double total = 0.0;
    for (auto r = lo; r < hi; ++r) total += rows[r];
    out[d] = total / static_cast<double>(hi - lo);
  }
  return out;
}

EvalReport compare_predictions(const FeatureTable& table, const FoldPredictions& target,
                               const FoldPredictions& baseline, Group group,
                               DependentKind dependent, const FitConfig& config) {
  EvalReport report;
  report.dependent = dependent;
  report.group = group;
  report.per_fold_expected_mse_target = target.fold_mse;
  report.per_fold_expected_mse_baseline = baseline.fold_mse;
  report.n_tokens = table.rows();
  report.folds = config.folds;
  report.seed = config.seed;
  report.permutations = config.permutations;

  double diff = 0.0;
  for (std::size_t r = 0; r < table.rows(); ++r) diff += target.sqerr[r] - baseline.sqerr[r];
  report.delta_mse = diff / static_cast<double>(table.rows());

  report.per_doc_target = per_document_means(table, target.sqerr);
  report.per_doc_baseline = per_document_means(table, baseline.sqerr);
  report.p_value = paired_permutation_test(report.per_doc_target, report.per_doc_baseline,
                                           config.permutations,
                                           permutation_seed(config.seed));
  const auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  report.converged = all(target.converged) && all(baseline.converged);
  return report;
}

EvalReport cross_validate(const FeatureTable& table, Group group, DependentKind dependent,
                          const FitConfig& config) {
  const auto baseline = cv_predictions(table, Group::baseline, dependent, config);
  const auto target = cv_predictions(table, group, dependent, config);
  return compare_predictions(table, target, baseline, group, dependent, config);
}

}  // namespace sctx
