#pragma once

#include <span>
#include <vector>

namespace coupled {

// Normalized class-probability vector for one sample.
class Posterior {
public:
    // Throws DomainError unless entries are >= 0 and sum to 1 within 1e-9.
    explicit Posterior(std::vector<double> probs);

    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t c) const { return probs_[c]; }

    // Most probable class; ties go to the lowest index.
    std::size_t argmax() const noexcept;

private:
    std::vector<double> probs_;
};

// Normalizes per-class log scores (log-likelihood plus log-prior) with a max
// shift. Classes at +inf (saturated evidence) share all mass in proportion to
// their priors; if every class sits at the same infinity the result is uniform.
Posterior posterior_from_log_scores(std::span<const double> log_likelihoods, std::span<const double> log_priors);

}  // namespace coupled
