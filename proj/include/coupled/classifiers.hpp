#pragma once

// Class-conditional Gaussian fusion models:
//   * naive Bayes: per-feature normal likelihoods multiplied together
//   * multivariate: one full-covariance normal per class
//   * coupled fusion: the naive Bayes marginals fused by the coupled product
//
// All likelihood arithmetic is in natural-log domain. Models are immutable
// after fitting and prediction is safe to call concurrently.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "coupled/algebra.hpp"
#include "coupled/dataset.hpp"
#include "coupled/posterior.hpp"

namespace coupled {

using Vector = Eigen::VectorXd;

inline constexpr double kDefaultVarianceFloor = 1e-6;
inline constexpr double kDefaultShrinkage = 0.1;

class GaussianNBModel {
public:
    // means, variances: classes x features. Variances below the floor are
    // raised to it. Priors must be positive and sum to 1.
    GaussianNBModel(Matrix means, Matrix variances, Vector priors, double variance_floor);

    const Matrix& means() const noexcept { return means_; }
    const Matrix& variances() const noexcept { return variances_; }
    const Vector& priors() const noexcept { return priors_; }
    double variance_floor() const noexcept { return variance_floor_; }
    std::size_t num_classes() const noexcept { return static_cast<std::size_t>(means_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(means_.cols()); }

    // log N(x_j; mu_cj, var_cj) for every class c (row) and feature j (column).
    Matrix feature_log_densities(std::span<const double> x) const;

private:
    Matrix means_;
    Matrix variances_;
    Vector priors_;
    double variance_floor_;
    Matrix log_norm_;  // -0.5 log(2 pi var)
};

enum class CovarianceMode { per_class, pooled };

class MultivariateGaussianModel {
public:
    // covariances are taken as final (already regularized); precision and
    // log-determinant are derived from them. Throws FitError if one is not
    // positive definite.
    MultivariateGaussianModel(Matrix means, std::vector<Matrix> covariances, Vector priors, double shrinkage,
                              CovarianceMode mode);

    const Matrix& means() const noexcept { return means_; }
    const std::vector<Matrix>& covariances() const noexcept { return covariances_; }
    const std::vector<Matrix>& precisions() const noexcept { return precisions_; }
    const std::vector<double>& log_determinants() const noexcept { return log_dets_; }
    const Vector& priors() const noexcept { return priors_; }
    double shrinkage() const noexcept { return shrinkage_; }
    CovarianceMode mode() const noexcept { return mode_; }
    std::size_t num_classes() const noexcept { return static_cast<std::size_t>(means_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(means_.cols()); }

    // Covariance used for class c (the shared one in pooled mode).
    const Matrix& covariance(std::size_t c) const { return covariances_[mode_ == CovarianceMode::pooled ? 0 : c]; }
    const Matrix& precision(std::size_t c) const { return precisions_[mode_ == CovarianceMode::pooled ? 0 : c]; }
    double log_determinant(std::size_t c) const { return log_dets_[mode_ == CovarianceMode::pooled ? 0 : c]; }

private:
    Matrix means_;
    std::vector<Matrix> covariances_;
    std::vector<Matrix> precisions_;
    std::vector<double> log_dets_;
    Vector priors_;
    double shrinkage_;
    CovarianceMode mode_;
};

struct CoupledFusionModel {
    GaussianNBModel base;
    Coupling kappa;
};

GaussianNBModel fit_naive_bayes(const LabeledDataset& train, double variance_floor = kDefaultVarianceFloor);

// Sample covariance S per class (or pooled within-class), regularized as
// (1 - lambda) S + lambda (tr(S)/d) I.
MultivariateGaussianModel fit_multivariate(const LabeledDataset& train, double shrinkage = kDefaultShrinkage,
                                           CovarianceMode mode = CovarianceMode::per_class);

Posterior predict_naive_bayes(const GaussianNBModel& m, std::span<const double> x);
Posterior predict_multivariate(const MultivariateGaussianModel& m, std::span<const double> x);
Posterior predict_coupled(const CoupledFusionModel& m, std::span<const double> x);

// Posteriors for every row of `features`.
std::vector<Posterior> predict_all(const GaussianNBModel& m, const Matrix& features);
std::vector<Posterior> predict_all(const MultivariateGaussianModel& m, const Matrix& features);
std::vector<Posterior> predict_all(const CoupledFusionModel& m, const Matrix& features);

struct CouplingSelection {
    Coupling kappa{0.0};
    double score = 0.0;              // geometric mean of true-class posteriors
    std::vector<double> grid;        // in the order given
    std::vector<double> scores;      // score at each grid point
};

// {0, -0.05, ..., -2}
std::vector<double> default_kappa_grid();

// Grid coupling maximizing the geometric mean of the true-class posteriors on
// `data`; ties go to the coupling closest to zero. Grid points are evaluated on
// up to `threads` threads; the result does not depend on the thread count.
CouplingSelection select_coupling(const GaussianNBModel& base, const LabeledDataset& data,
                                  std::span<const double> grid, double probability_floor = 1e-12,
                                  unsigned threads = 1);

enum class ModelKind { naive_bayes, coupled, multivariate };

const char* model_kind_name(ModelKind kind);

// Parameter count per class-model template: 2d, 2d + 1, d + d^2.
long long parameter_count(ModelKind kind, std::size_t d);

}  // namespace coupled
