#pragma once

#include <span>
#include <utility>
#include <vector>

#include "coupled/algebra.hpp"

namespace coupled {

// Probability vector: entries >= 0 summing to 1 within 1e-9.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<double> probs);

    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
};

// Escort distribution P_i = p_i^(1-k) / sum_j p_j^(1-k). Zero-probability
// states keep weight 0; they are a DomainError when 1 - k < 0.
DiscreteDistribution coupled_probability(const DiscreteDistribution& d, Coupling k);

// Normalized Tsallis entropy S_k = -sum_i P_i ln_k p_i, with P the escort
// distribution. Zero-probability states are excluded from the sum.
double coupled_entropy(const DiscreteDistribution& d, Coupling k);

struct CoupledMoments {
    double mean;    // sum_i x_i p_i^(1-k)
    double second;  // sum_i x_i^2 p_i^(1-k)
};

// Unnormalized escort moments. No mean subtraction, no renormalization.
CoupledMoments coupled_moments(std::span<const double> xs, const DiscreteDistribution& d, Coupling k);

// Coupled Gaussian density
//   p(x) = A_k exp_k(-(x - mu)^2 / ((2 + k) sigma^2)),   k > -2.
// For k < 0 this is a Student-t shape with nu = -(2 + k)/k degrees of freedom
// and scale sigma; for k > 0 the support is |x - mu| <= sigma sqrt((2 + k)/k).
class CoupledGaussian1D {
public:
    CoupledGaussian1D(double mu, double sigma, Coupling kappa);

    double mu() const noexcept { return mu_; }
    double sigma() const noexcept { return sigma_; }
    Coupling kappa() const noexcept { return kappa_; }
    double normalizer() const noexcept { return normalizer_; }

    double pdf(double x) const;

    // Half-width of the support; +inf for k <= 0.
    double support_radius() const noexcept;

private:
    double mu_;
    double sigma_;
    Coupling kappa_;
    double normalizer_;
};

// A_k making the density integrate to one. Closed forms for k <= 0, adaptive
// quadrature over the compact support for k > 0.
double coupled_gaussian_normalizer(double sigma, Coupling kappa);
double coupled_gaussian_normalizer(const CoupledGaussian1D& g);

double coupled_gaussian_pdf(const CoupledGaussian1D& g, double x);

}  // namespace coupled
