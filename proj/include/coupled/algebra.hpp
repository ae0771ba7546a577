#pragma once

// Deformed algebra of nonlinear statistical coupling.
//
// Every operation takes a Coupling (kappa). kappa == 0 dispatches to the
// classical operation exactly; no operation divides by kappa on that branch.
//
// Where a deformed result has the form (base)^(1/kappa) and base <= 0, the
// result is truncated to 0 for kappa > 0 and saturates to +infinity for
// kappa < 0, the limit of base^(1/kappa) as base -> 0+.

#include <span>

namespace coupled {

class Coupling {
public:
    // Throws DomainError when kappa is NaN or infinite.
    explicit Coupling(double kappa);

    double value() const noexcept { return kappa_; }
    bool is_zero() const noexcept { return kappa_ == 0.0; }

    friend bool operator==(Coupling, Coupling) = default;

private:
    double kappa_;
};

// ln_k(x) = (x^k - 1) / k; natural log at k = 0. Requires finite x > 0.
double coupled_log(double x, Coupling k);

// exp_k(x) = (1 + k x)^(1/k); e^x at k = 0. Inverse of coupled_log.
double coupled_exp(double x, Coupling k);

// n-ary coupled product (sum_j x_j^k - (n - 1))^(1/k); plain product at k = 0.
// Zero factors are allowed only for k > 0.
double coupled_product(std::span<const double> xs, Coupling k);
double coupled_product(double x, double y, Coupling k);

// x (+)_k y = x + y + k x y, so ln_k(x y) = ln_k x (+)_k ln_k y.
double coupled_sum(double x, double y, Coupling k);

// Inverse of coupled_sum: (x - y) / (1 + k y). Throws DomainError at 1 + k y == 0.
double coupled_subtract(double x, double y, Coupling k);

// x^(a (x)_k) = (a x^k - (a - 1))^(1/k); x^a at k = 0.
double coupled_power(double x, double a, Coupling k);

// Inverse of coupled_product: (x^k - y^k + 1)^(1/k); x / y at k = 0. Requires y > 0.
double coupled_divide(double x, double y, Coupling k);

// Natural log of coupled_product(exp(logs), k), evaluated without forming the
// factors. Returns -inf when the product truncates (k > 0) and +inf when it
// saturates (k < 0). -inf entries denote zero factors.
double log_coupled_product(std::span<const double> logs, Coupling k);

}  // namespace coupled
