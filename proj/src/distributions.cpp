#include "coupled/distributions.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "coupled/error.hpp"

namespace coupled {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// p^(1-k) for every state; zero states get weight 0 when the exponent is >= 0.
std::vector<double> escort_weights(const DiscreteDistribution& d, Coupling k) {
    const double exponent = 1.0 - k.value();
    std::vector<double> log_w(d.size(), -kInf);
    double max_log = -kInf;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0) {
            if (exponent < 0.0)
                throw DomainError("coupled_probability: zero probability with exponent 1 - kappa < 0");
            continue;
        }
        log_w[i] = exponent * std::log(d[i]);
        max_log = std::max(max_log, log_w[i]);
    }
    std::vector<double> w(d.size(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (log_w[i] != -kInf) w[i] = std::exp(log_w[i] - max_log);
    return w;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DomainError("distribution must have at least one state");
    double total = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0) throw DomainError("probabilities must be finite and nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw DomainError("probabilities must sum to 1 (got " + std::to_string(total) + ")");
}

DiscreteDistribution coupled_probability(const DiscreteDistribution& d, Coupling k) {
    std::vector<double> w = escort_weights(d, k);
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
    return DiscreteDistribution(std::move(w));
}

double coupled_entropy(const DiscreteDistribution& d, Coupling k) {
    const DiscreteDistribution escort = coupled_probability(d, k);
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0) continue;
        s -= escort[i] * coupled_log(d[i], k);
    }
    return s;
}

CoupledMoments coupled_moments(std::span<const double> xs, const DiscreteDistribution& d, Coupling k) {
    if (xs.size() != d.size())
        throw DomainError("coupled_moments: " + std::to_string(xs.size()) + " values for " +
                          std::to_string(d.size()) + " states");
    const double exponent = 1.0 - k.value();
    CoupledMoments m{0.0, 0.0};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double w = 0.0;
        if (d[i] > 0.0) {
            w = std::pow(d[i], exponent);
        } else if (exponent < 0.0) {
            throw DomainError("coupled_moments: zero probability with exponent 1 - kappa < 0");
        }
        m.mean += xs[i] * w;
        m.second += xs[i] * xs[i] * w;
    }
    return m;
}

double coupled_gaussian_normalizer(double sigma, Coupling kappa) {
    const double k = kappa.value();
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("coupled Gaussian: sigma must be positive");
    if (!(k > -2.0)) throw DomainError("coupled Gaussian: kappa must exceed -2 for a normalizable density");
    if (k == 0.0) return 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    if (k < 0.0) {
        const double nu = -(2.0 + k) / k;
        const double log_a = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                             0.5 * std::log(nu * std::numbers::pi) - std::log(sigma);
        return std::exp(log_a);
    }
    // Compact support: integrate the unnormalized kernel over |t| <= sigma sqrt((2+k)/k).
    const double radius = sigma * std::sqrt((2.0 + k) / k);
    const double c = k / ((2.0 + k) * sigma * sigma);
    auto kernel = [k, c](double t) {
        const double base = 1.0 - c * t * t;
        return base > 0.0 ? std::pow(base, 1.0 / k) : 0.0;
    };
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double area = integrator.integrate(kernel, -radius, radius, 1e-13);
    return 1.0 / area;
}

double coupled_gaussian_normalizer(const CoupledGaussian1D& g) {
    return coupled_gaussian_normalizer(g.sigma(), g.kappa());
}

CoupledGaussian1D::CoupledGaussian1D(double mu, double sigma, Coupling kappa)
    : mu_(mu), sigma_(sigma), kappa_(kappa), normalizer_(0.0) {
    if (!std::isfinite(mu)) throw DomainError("coupled Gaussian: mu must be finite");
    normalizer_ = coupled_gaussian_normalizer(sigma, kappa);
}

double CoupledGaussian1D::support_radius() const noexcept {
    const double k = kappa_.value();
    if (k <= 0.0) return kInf;
    return sigma_ * std::sqrt((2.0 + k) / k);
}

double CoupledGaussian1D::pdf(double x) const {
    const double k = kappa_.value();
    const double z = (x - mu_) / sigma_;
    const double arg = -z * z / (2.0 + k);
    if (!std::isfinite(arg)) return 0.0;
    return normalizer_ * coupled_exp(arg, kappa_);
}

double coupled_gaussian_pdf(const CoupledGaussian1D& g, double x) { return g.pdf(x); }

}  // namespace coupled
