#include "coupled/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "coupled/error.hpp"
#include "coupled/metrics.hpp"
#include "coupled/parallel.hpp"

namespace coupled {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2 pi)

void validate_priors(const Vector& priors, std::size_t classes) {
    if (static_cast<std::size_t>(priors.size()) != classes) throw DomainError("model: one prior per class required");
    double total = 0.0;
    for (double p : priors) {
        if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("model: priors must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("model: priors must sum to 1");
}

void require_dim(std::size_t got, std::size_t want) {
    if (got != want)
        throw DomainError("feature vector has " + std::to_string(got) + " entries, model expects " +
                          std::to_string(want));
}

std::vector<double> log_priors(const Vector& priors) {
    std::vector<double> out(static_cast<std::size_t>(priors.size()));
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::log(priors[static_cast<Eigen::Index>(c)]);
    return out;
}

struct ClassStats {
    std::vector<std::vector<std::size_t>> rows;  // sample rows per class
    Matrix means;
    Vector priors;
};

ClassStats class_stats(const LabeledDataset& train) {
    const std::size_t classes = train.num_classes();
    const std::size_t d = train.dim();
    if (classes == 0 || d == 0) throw FitError("training set is empty");
    ClassStats s;
    s.rows.resize(classes);
    for (std::size_t i = 0; i < train.size(); ++i) s.rows[static_cast<std::size_t>(train.labels()[i])].push_back(i);
    s.means = Matrix::Zero(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(d));
    s.priors.resize(static_cast<Eigen::Index>(classes));
    for (std::size_t c = 0; c < classes; ++c) {
        if (s.rows[c].size() < 2)
            throw FitError("class " + std::to_string(c) + " has " + std::to_string(s.rows[c].size()) +
                           " training samples; at least 2 are required");
        auto mean = s.means.row(static_cast<Eigen::Index>(c));
        for (std::size_t i : s.rows[c]) mean += train.features().row(static_cast<Eigen::Index>(i));
        mean /= static_cast<double>(s.rows[c].size());
        s.priors[static_cast<Eigen::Index>(c)] =
            static_cast<double>(s.rows[c].size()) / static_cast<double>(train.size());
    }
    return s;
}

Matrix shrink(const Matrix& s, double lambda) {
    const auto d = s.rows();
    const double target = s.trace() / static_cast<double>(d);
    Matrix out = (1.0 - lambda) * s;
    out.diagonal().array() += lambda * target;
    return out;
}

// Eigenvalues at or below this are treated as zero.
double definiteness_threshold(const Eigen::VectorXd& eigenvalues) {
    const double top = std::max(eigenvalues.maxCoeff(), std::numeric_limits<double>::min());
    return static_cast<double>(eigenvalues.size()) * std::numeric_limits<double>::epsilon() * top;
}

}  // namespace

GaussianNBModel::GaussianNBModel(Matrix means, Matrix variances, Vector priors, double variance_floor)
    : means_(std::move(means)), variances_(std::move(variances)), priors_(std::move(priors)),
      variance_floor_(variance_floor) {
    if (!(variance_floor_ > 0.0) || !std::isfinite(variance_floor_))
        throw DomainError("naive Bayes: variance floor must be positive");
    if (means_.rows() != variances_.rows() || means_.cols() != variances_.cols() || means_.size() == 0)
        throw DomainError("naive Bayes: means and variances must have the same nonzero shape");
    validate_priors(priors_, num_classes());
    if (!means_.allFinite() || !variances_.allFinite()) throw DomainError("naive Bayes: non-finite parameter");
    variances_ = variances_.cwiseMax(variance_floor_);
    log_norm_ = -0.5 * (variances_.array().log() + kLog2Pi);
}

Matrix GaussianNBModel::feature_log_densities(std::span<const double> x) const {
    require_dim(x.size(), dim());
    Matrix out(means_.rows(), means_.cols());
    for (Eigen::Index c = 0; c < means_.rows(); ++c) {
        for (Eigen::Index j = 0; j < means_.cols(); ++j) {
            const double diff = x[static_cast<std::size_t>(j)] - means_(c, j);
            out(c, j) = log_norm_(c, j) - diff * diff / (2.0 * variances_(c, j));
        }
    }
    return out;
}

MultivariateGaussianModel::MultivariateGaussianModel(Matrix means, std::vector<Matrix> covariances, Vector priors,
                                                     double shrinkage, CovarianceMode mode)
    : means_(std::move(means)), covariances_(std::move(covariances)), priors_(std::move(priors)),
      shrinkage_(shrinkage), mode_(mode) {
    const std::size_t d = dim();
    if (means_.size() == 0) throw DomainError("multivariate: empty model");
    validate_priors(priors_, num_classes());
    const std::size_t expected = mode_ == CovarianceMode::pooled ? 1 : num_classes();
    if (covariances_.size() != expected)
        throw DomainError("multivariate: expected " + std::to_string(expected) + " covariance matrices");
    for (std::size_t c = 0; c < covariances_.size(); ++c) {
        const Matrix& cov = covariances_[c];
        if (static_cast<std::size_t>(cov.rows()) != d || static_cast<std::size_t>(cov.cols()) != d)
            throw DomainError("multivariate: covariance has the wrong shape");
        Eigen::LLT<Matrix> llt(cov);
        if (llt.info() != Eigen::Success)
            throw FitError("covariance " + std::to_string(c) + " is not positive definite");
        Matrix precision = llt.solve(Matrix::Identity(cov.rows(), cov.cols()));
        precision = 0.5 * (precision + precision.transpose()).eval();
        double log_det = 0.0;
        const Matrix& l = llt.matrixLLT();
        for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += std::log(l(i, i));
        precisions_.push_back(std::move(precision));
        log_dets_.push_back(2.0 * log_det);
    }
}

GaussianNBModel fit_naive_bayes(const LabeledDataset& train, double variance_floor) {
    ClassStats s = class_stats(train);
    Matrix variances = Matrix::Zero(s.means.rows(), s.means.cols());
    for (std::size_t c = 0; c < s.rows.size(); ++c) {
        auto var = variances.row(static_cast<Eigen::Index>(c));
        const auto mean = s.means.row(static_cast<Eigen::Index>(c));
        for (std::size_t i : s.rows[c])
            var += (train.features().row(static_cast<Eigen::Index>(i)) - mean).array().square().matrix();
        var /= static_cast<double>(s.rows[c].size() - 1);
    }
    return GaussianNBModel(std::move(s.means), std::move(variances), std::move(s.priors), variance_floor);
}

MultivariateGaussianModel fit_multivariate(const LabeledDataset& train, double shrinkage, CovarianceMode mode) {
    if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) throw DomainError("shrinkage must lie in [0, 1]");
    ClassStats s = class_stats(train);
    const auto d = static_cast<Eigen::Index>(train.dim());

    auto scatter = [&](std::size_t c) {
        Matrix centered(static_cast<Eigen::Index>(s.rows[c].size()), d);
        for (std::size_t k = 0; k < s.rows[c].size(); ++k)
            centered.row(static_cast<Eigen::Index>(k)) =
                train.features().row(static_cast<Eigen::Index>(s.rows[c][k])) - s.means.row(static_cast<Eigen::Index>(c));
        return Matrix(centered.transpose() * centered);
    };

    std::vector<Matrix> raw;
    if (mode == CovarianceMode::per_class) {
        for (std::size_t c = 0; c < s.rows.size(); ++c)
            raw.push_back(scatter(c) / static_cast<double>(s.rows[c].size() - 1));
    } else {
        Matrix pooled = Matrix::Zero(d, d);
        for (std::size_t c = 0; c < s.rows.size(); ++c) pooled += scatter(c);
        raw.push_back(pooled / static_cast<double>(train.size() - s.rows.size()));
    }

    std::vector<Matrix> covariances;
    for (std::size_t c = 0; c < raw.size(); ++c) {
        Matrix cov = shrink(raw[c], shrinkage);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
        const double threshold = definiteness_threshold(eig.eigenvalues());
        const double smallest = eig.eigenvalues().minCoeff();
        if (!(smallest > threshold)) {
            // Eigenvalues of the shrunk matrix are (1 - l) s_i + l t with t = tr(S)/d.
            Eigen::SelfAdjointEigenSolver<Matrix> raw_eig(raw[c], Eigen::EigenvaluesOnly);
            const double s_min = raw_eig.eigenvalues().minCoeff();
            const double t = raw[c].trace() / static_cast<double>(d);
            std::ostringstream msg;
            msg << "covariance of class " << c << " is not positive definite with shrinkage " << shrinkage;
            if (t > s_min)
                msg << "; shrinkage must exceed " << std::max(0.0, (threshold - s_min) / (t - s_min));
            throw FitError(msg.str());
        }
        covariances.push_back(std::move(cov));
    }
    return MultivariateGaussianModel(std::move(s.means), std::move(covariances), std::move(s.priors), shrinkage, mode);
}

Posterior predict_naive_bayes(const GaussianNBModel& m, std::span<const double> x) {
    const Matrix l = m.feature_log_densities(x);
    std::vector<double> ll(m.num_classes());
    for (std::size_t c = 0; c < ll.size(); ++c) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < l.cols(); ++j) sum += l(static_cast<Eigen::Index>(c), j);
        ll[c] = sum;
    }
    return posterior_from_log_scores(ll, log_priors(m.priors()));
}

Posterior predict_multivariate(const MultivariateGaussianModel& m, std::span<const double> x) {
    require_dim(x.size(), m.dim());
    const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    std::vector<double> ll(m.num_classes());
    const double d = static_cast<double>(m.dim());
    for (std::size_t c = 0; c < ll.size(); ++c) {
        const Vector diff = xv - m.means().row(static_cast<Eigen::Index>(c)).transpose();
        const double quad = diff.dot(m.precision(c) * diff);
        ll[c] = -0.5 * (quad + m.log_determinant(c) + d * kLog2Pi);
    }
    return posterior_from_log_scores(ll, log_priors(m.priors()));
}

namespace {

Posterior coupled_from_log_densities(const Matrix& l, Coupling kappa, const std::vector<double>& log_prior) {
    std::vector<double> ll(static_cast<std::size_t>(l.rows()));
    std::vector<double> row(static_cast<std::size_t>(l.cols()));
    for (Eigen::Index c = 0; c < l.rows(); ++c) {
        for (Eigen::Index j = 0; j < l.cols(); ++j) row[static_cast<std::size_t>(j)] = l(c, j);
        ll[static_cast<std::size_t>(c)] = log_coupled_product(row, kappa);
    }
    return posterior_from_log_scores(ll, log_prior);
}

}  // namespace

Posterior predict_coupled(const CoupledFusionModel& m, std::span<const double> x) {
    return coupled_from_log_densities(m.base.feature_log_densities(x), m.kappa, log_priors(m.base.priors()));
}

namespace {
template <typename Model, typename Predict>
std::vector<Posterior> predict_rows(const Model& m, const Matrix& features, Predict predict) {
    std::vector<Posterior> out;
    out.reserve(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const double* row = features.data() + i * features.cols();
        out.push_back(predict(m, std::span<const double>(row, static_cast<std::size_t>(features.cols()))));
    }
    return out;
}
}  // namespace

std::vector<Posterior> predict_all(const GaussianNBModel& m, const Matrix& features) {
    return predict_rows(m, features, predict_naive_bayes);
}
std::vector<Posterior> predict_all(const MultivariateGaussianModel& m, const Matrix& features) {
    return predict_rows(m, features, predict_multivariate);
}
std::vector<Posterior> predict_all(const CoupledFusionModel& m, const Matrix& features) {
    return predict_rows(m, features, predict_coupled);
}

std::vector<double> default_kappa_grid() { return make_grid(0.0, -2.0, -0.05); }

CouplingSelection select_coupling(const GaussianNBModel& base, const LabeledDataset& data,
                                  std::span<const double> grid, double probability_floor, unsigned threads) {
    if (grid.empty()) throw DomainError("select_coupling: empty coupling grid");
    for (double k : grid) Coupling{k};  // validates

    std::vector<Matrix> log_densities;
    log_densities.reserve(data.size());
    const Matrix& x = data.features();
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        log_densities.push_back(base.feature_log_densities(
            std::span<const double>(x.data() + i * x.cols(), static_cast<std::size_t>(x.cols()))));
    const std::vector<double> log_prior = log_priors(base.priors());

    CouplingSelection sel;
    sel.grid.assign(grid.begin(), grid.end());
    sel.scores.assign(grid.size(), 0.0);
    parallel_for(grid.size(), threads, [&](std::size_t g) {
        const Coupling k(grid[g]);
        std::vector<double> truth(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const Posterior p = coupled_from_log_densities(log_densities[i], k, log_prior);
            truth[i] = std::min(1.0, p[static_cast<std::size_t>(data.labels()[i])]);
        }
        sel.scores[g] = generalized_mean(TrueClassProbabilities(std::move(truth)), 0.0, probability_floor);
    });

    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(grid[a]) < std::abs(grid[b]); });
    std::size_t best = order.front();
    for (std::size_t g : order)
        if (sel.scores[g] > sel.scores[best]) best = g;
    sel.kappa = Coupling(grid[best]);
    sel.score = sel.scores[best];
    return sel;
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::naive_bayes: return "naive_bayes";
        case ModelKind::coupled: return "coupled";
        case ModelKind::multivariate: return "multivariate";
    }
    return "unknown";
}

long long parameter_count(ModelKind kind, std::size_t d) {
    if (d == 0) throw DomainError("parameter_count: feature count must be positive");
    const auto n = static_cast<long long>(d);
    switch (kind) {
        case ModelKind::naive_bayes: return 2 * n;
        case ModelKind::coupled: return 2 * n + 1;
        case ModelKind::multivariate: return n + n * n;
    }
    return 0;
}

}  // namespace coupled
