#pragma once

// Shared helpers for the unit and acceptance suites: seeded generators,
// tolerance predicates and extended-precision oracles. The oracles evaluate
// the defining formulas directly in 50-digit arithmetic and never call into
// the library's numerical paths.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace testsupport {

using Big = boost::multiprecision::cpp_bin_float_50;

inline bool rel_close(double a, double b, double tol) {
    if (a == b) return true;
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= tol * scale;
}

// Relative agreement with a floor on the scale, for results that may cross zero.
inline bool rel_close_scaled(double a, double b, double tol, double floor_scale) {
    const double scale = std::max({std::abs(a), std::abs(b), floor_scale});
    return std::abs(a - b) <= tol * scale;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    double normal(double mean = 0.0, double sd = 1.0) {
        return std::normal_distribution<double>(mean, sd)(engine_);
    }
    int integer(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }
    // Random probability vector of length n (Dirichlet(1) draw).
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> p(n);
        double total = 0.0;
        for (auto& v : p) {
            v = std::exponential_distribution<double>(1.0)(engine_);
            total += v;
        }
        for (auto& v : p) v /= total;
        return p;
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// ln of (sum_j exp(k L_j) - (n - 1))^(1/k), straight from the definition.
inline Big oracle_log_coupled_product(std::span<const double> logs, double kappa) {
    const Big k(kappa);
    if (kappa == 0.0) {
        Big s = 0;
        for (double l : logs) s += Big(l);
        return s;
    }
    Big s = 0;
    for (double l : logs) s += boost::multiprecision::exp(k * Big(l));
    s -= Big(logs.size() - 1);
    return boost::multiprecision::log(s) / k;
}

inline Big oracle_normal_density(double x, double mean, double variance) {
    const Big d = Big(x) - Big(mean);
    const Big v(variance);
    return boost::multiprecision::exp(-d * d / (2 * v)) /
           boost::multiprecision::sqrt(2 * boost::math::constants::pi<Big>() * v);
}

// Posterior from the n-ary coupled Bayes rule evaluated on explicit densities:
// P(c | x) proportional to (sum_j p_cj^k - (n - 1))^(1/k) * prior_c.
// means/variances are row-major [class][feature].
inline std::vector<double> oracle_coupled_posterior(const std::vector<std::vector<double>>& means,
                                                    const std::vector<std::vector<double>>& variances,
                                                    const std::vector<double>& priors,
                                                    std::span<const double> x, double kappa) {
    const std::size_t classes = priors.size();
    std::vector<Big> unnorm(classes);
    Big total = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        Big fused;
        if (kappa == 0.0) {
            fused = 1;
            for (std::size_t j = 0; j < x.size(); ++j)
                fused *= oracle_normal_density(x[j], means[c][j], variances[c][j]);
        } else {
            const Big k(kappa);
            Big s = 0;
            for (std::size_t j = 0; j < x.size(); ++j)
                s += boost::multiprecision::pow(oracle_normal_density(x[j], means[c][j], variances[c][j]), k);
            s -= Big(x.size() - 1);
            fused = s > 0 ? Big(boost::multiprecision::pow(s, 1 / k)) : Big(0);
        }
        unnorm[c] = fused * Big(priors[c]);
        total += unnorm[c];
    }
    std::vector<double> out(classes);
    for (std::size_t c = 0; c < classes; ++c) out[c] = static_cast<double>(unnorm[c] / total);
    return out;
}

}  // namespace testsupport

#include "coupled/classifiers.hpp"
#include "coupled/dataset.hpp"

namespace testsupport {

// Gaussian classes with independent features: class c, feature j has mean
// means[c][j] and standard deviation sds[c][j].
inline coupled::LabeledDataset gaussian_dataset(Rng& rng, const std::vector<std::vector<double>>& means,
                                                const std::vector<std::vector<double>>& sds, std::size_t per_class) {
    const std::size_t classes = means.size(), d = means[0].size();
    coupled::Matrix x(static_cast<Eigen::Index>(classes * per_class), static_cast<Eigen::Index>(d));
    std::vector<int> labels;
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            const auto row = static_cast<Eigen::Index>(c * per_class + i);
            for (std::size_t j = 0; j < d; ++j) x(row, static_cast<Eigen::Index>(j)) = rng.normal(means[c][j], sds[c][j]);
            labels.push_back(static_cast<int>(c));
        }
    }
    return coupled::LabeledDataset(std::move(x), std::move(labels));
}

// Random naive Bayes model: means N(0, 1), variances in [0.5, 2], equal priors unless given.
inline coupled::GaussianNBModel random_nb_model(Rng& rng, std::size_t classes, std::size_t d,
                                                bool random_priors = false) {
    coupled::Matrix means(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(d));
    coupled::Matrix vars(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(d));
    for (Eigen::Index c = 0; c < means.rows(); ++c)
        for (Eigen::Index j = 0; j < means.cols(); ++j) {
            means(c, j) = rng.normal();
            vars(c, j) = rng.uniform(0.5, 2.0);
        }
    Eigen::VectorXd priors = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(classes), 1.0 / static_cast<double>(classes));
    if (random_priors) {
        const auto p = rng.simplex(classes);
        for (std::size_t c = 0; c < classes; ++c) priors[static_cast<Eigen::Index>(c)] = 0.5 / classes + 0.5 * p[c];
    }
    return coupled::GaussianNBModel(std::move(means), std::move(vars), std::move(priors), 1e-9);
}

inline std::vector<std::vector<double>> rows_of(const coupled::Matrix& m) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
    return out;
}

inline std::vector<double> priors_of(const Eigen::VectorXd& p) { return {p.data(), p.data() + p.size()}; }

}  // namespace testsupport
