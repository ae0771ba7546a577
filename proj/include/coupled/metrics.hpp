#pragma once

#include <span>
#include <vector>

#include "coupled/posterior.hpp"

namespace coupled {

inline constexpr double kDefaultProbabilityFloor = 1e-12;

// Reported probability of the true class, one entry per test sample, each in [0, 1].
class TrueClassProbabilities {
public:
    explicit TrueClassProbabilities(std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

// Collects posterior[label] for every sample.
TrueClassProbabilities true_class_probabilities(std::span<const Posterior> posteriors, std::span<const int> labels);

// Power mean ((1/N) sum p_i^r)^(1/r) after flooring each p at `floor`; the
// geometric mean at r = 0. Zero when a zero probability meets r <= 0.
double generalized_mean(const TrueClassProbabilities& p, double r, double floor = kDefaultProbabilityFloor);

struct RiskProfile {
    std::vector<double> grid;
    std::vector<double> accuracy;
};

// Risk-bias grid lo, lo + step, ..., hi built from integer multiples of step.
std::vector<double> make_grid(double lo, double hi, double step);

// r in [-2, 2] with step 0.1.
std::vector<double> default_risk_grid();

// generalized_mean at every grid point; grid must be ascending.
RiskProfile risk_profile(const TrueClassProbabilities& p, std::span<const double> grid,
                         double floor = kDefaultProbabilityFloor);

// Fraction of samples whose argmax class equals the label.
double percent_correct(std::span<const Posterior> posteriors, std::span<const int> labels);

}  // namespace coupled
