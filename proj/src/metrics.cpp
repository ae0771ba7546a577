#include "coupled/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coupled/error.hpp"

namespace coupled {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_length(std::size_t a, std::size_t b, const char* op) {
    if (a != b)
        throw DomainError(std::string(op) + ": " + std::to_string(a) + " posteriors for " + std::to_string(b) +
                          " labels");
}
}  // namespace

Posterior::Posterior(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DomainError("posterior must cover at least one class");
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("posterior entries must be finite and nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("posterior must sum to 1 (got " + std::to_string(total) + ")");
}

std::size_t Posterior::argmax() const noexcept {
    std::size_t best = 0;
    for (std::size_t c = 1; c < probs_.size(); ++c)
        if (probs_[c] > probs_[best]) best = c;
    return best;
}

Posterior posterior_from_log_scores(std::span<const double> log_likelihoods, std::span<const double> log_priors) {
    const std::size_t n = log_likelihoods.size();
    if (n == 0 || log_priors.size() != n) throw DomainError("posterior: class count mismatch");

    std::size_t saturated = 0, annihilated = 0;
    for (double l : log_likelihoods) {
        if (std::isnan(l)) throw DomainError("posterior: NaN log-likelihood");
        if (l == kInf) ++saturated;
        if (l == -kInf) ++annihilated;
    }
    std::vector<double> probs(n, 0.0);
    if (saturated == n || annihilated == n) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(n));
        return Posterior(std::move(probs));
    }

    std::vector<double> scores(n);
    if (saturated > 0) {
        for (std::size_t c = 0; c < n; ++c) scores[c] = log_likelihoods[c] == kInf ? log_priors[c] : -kInf;
    } else {
        for (std::size_t c = 0; c < n; ++c) scores[c] = log_likelihoods[c] + log_priors[c];
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    if (top == -kInf) {
        // every class with evidence has zero prior
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(n));
        return Posterior(std::move(probs));
    }
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        probs[c] = std::exp(scores[c] - top);
        total += probs[c];
    }
    for (double& p : probs) p /= total;
    return Posterior(std::move(probs));
}

TrueClassProbabilities::TrueClassProbabilities(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("true-class probabilities must lie in [0, 1]");
}

TrueClassProbabilities true_class_probabilities(std::span<const Posterior> posteriors, std::span<const int> labels) {
    require_same_length(posteriors.size(), labels.size(), "true_class_probabilities");
    std::vector<double> out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto label = static_cast<std::size_t>(labels[i]);
        if (labels[i] < 0 || label >= posteriors[i].size())
            throw DomainError("label " + std::to_string(labels[i]) + " outside the posterior's class range");
        out.push_back(std::min(1.0, posteriors[i][label]));
    }
    return TrueClassProbabilities(std::move(out));
}

double generalized_mean(const TrueClassProbabilities& p, double r, double floor) {
    if (p.size() == 0) throw DomainError("generalized_mean: no samples");
    if (!(floor >= 0.0) || !std::isfinite(r)) throw DomainError("generalized_mean: invalid floor or risk bias");

    std::vector<double> logs;
    logs.reserve(p.size());
    double lo = kInf, hi = 0.0;
    bool has_zero = false;
    for (double v : p.values()) {
        const double q = std::max(v, floor);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
        if (q == 0.0) {
            has_zero = true;
            continue;
        }
        logs.push_back(std::log(q));
    }
    if (has_zero && r <= 0.0) return 0.0;
    if (logs.empty()) return 0.0;

    const double log_n = std::log(static_cast<double>(p.size()));
    double value;
    if (r == 0.0) {
        double s = 0.0;
        for (double l : logs) s += l;
        value = std::exp(s / static_cast<double>(p.size()));
    } else {
        // ((1/N) sum exp(r ln p))^(1/r) via a shifted log-sum-exp
        double m = -kInf;
        for (double l : logs) m = std::max(m, r * l);
        double s = 0.0;
        for (double l : logs) s += std::exp(r * l - m);
        value = std::exp((m + std::log(s) - log_n) / r);
    }
    return std::clamp(value, lo, hi);
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step != 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step))
        throw DomainError("grid: invalid bounds or step");
    if ((hi - lo) / step < -1e-9) throw DomainError("grid: step points away from the end point");
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count + 1));
    for (long i = 0; i <= count; ++i) {
        double v = lo + static_cast<double>(i) * step;
        if (std::abs(v) < 1e-12 * std::abs(step)) v = 0.0;
        grid.push_back(v);
    }
    return grid;
}

std::vector<double> default_risk_grid() { return make_grid(-2.0, 2.0, 0.1); }

RiskProfile risk_profile(const TrueClassProbabilities& p, std::span<const double> grid, double floor) {
    if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("risk_profile: grid must be ascending");
    RiskProfile out;
    out.grid.assign(grid.begin(), grid.end());
    out.accuracy.reserve(grid.size());
    for (double r : grid) out.accuracy.push_back(generalized_mean(p, r, floor));
    return out;
}

double percent_correct(std::span<const Posterior> posteriors, std::span<const int> labels) {
    require_same_length(posteriors.size(), labels.size(), "percent_correct");
    if (labels.empty()) throw DomainError("percent_correct: no samples");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0 && posteriors[i].argmax() == static_cast<std::size_t>(labels[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace coupled
