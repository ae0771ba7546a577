#include "coupled/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coupled/error.hpp"

namespace coupled {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exp(k ln x) - 1, the deviation of x^k from the identity element.
double power_deviation(double x, double k) {
    if (x == 0.0) return -1.0;  // k > 0 guaranteed by the caller
    return std::expm1(k * std::log(x));
}

// (1 + s)^(1/k) with truncation / saturation when 1 + s <= 0.
double deformed_root(double s, double k) {
    if (!(s > -1.0)) return k > 0.0 ? 0.0 : kInf;
    return std::exp(std::log1p(s) / k);
}

void require_finite(double x, const char* op) {
    if (!std::isfinite(x)) throw DomainError(std::string(op) + ": argument must be finite");
}

// Factors of product-like operations must be finite and nonnegative; a zero
// factor has x^k = +inf for k < 0.
void require_factor(double x, Coupling k, const char* op) {
    require_finite(x, op);
    if (x < 0.0) throw DomainError(std::string(op) + ": argument must be nonnegative");
    if (x == 0.0 && k.value() < 0.0)
        throw DomainError(std::string(op) + ": zero argument requires kappa >= 0");
}

}  // namespace

Coupling::Coupling(double kappa) : kappa_(kappa) {
    if (!std::isfinite(kappa)) throw DomainError("coupling must be finite");
}

double coupled_log(double x, Coupling k) {
    require_finite(x, "coupled_log");
    if (!(x > 0.0)) throw DomainError("coupled_log: argument must be positive");
    if (k.is_zero()) return std::log(x);
    return std::expm1(k.value() * std::log(x)) / k.value();
}

double coupled_exp(double x, Coupling k) {
    require_finite(x, "coupled_exp");
    if (k.is_zero()) return std::exp(x);
    return deformed_root(k.value() * x, k.value());
}

double coupled_product(std::span<const double> xs, Coupling k) {
    if (xs.empty()) throw DomainError("coupled_product: at least one factor required");
    for (double x : xs) require_factor(x, k, "coupled_product");
    if (k.is_zero()) {
        double product = 1.0;
        for (double x : xs) product *= x;
        return product;
    }
    // sum_j x_j^k - (n - 1) = 1 + sum_j (x_j^k - 1)
    double s = 0.0;
    for (double x : xs) s += power_deviation(x, k.value());
    return deformed_root(s, k.value());
}

double coupled_product(double x, double y, Coupling k) {
    const double xs[] = {x, y};
    return coupled_product(xs, k);
}

double coupled_sum(double x, double y, Coupling k) {
    require_finite(x, "coupled_sum");
    require_finite(y, "coupled_sum");
    return x + y + k.value() * x * y;
}

double coupled_subtract(double x, double y, Coupling k) {
    require_finite(x, "coupled_subtract");
    require_finite(y, "coupled_subtract");
    const double denom = 1.0 + k.value() * y;
    if (denom == 0.0) throw DomainError("coupled_subtract: singular at 1 + kappa*y == 0");
    return (x - y) / denom;
}

double coupled_power(double x, double a, Coupling k) {
    require_factor(x, k, "coupled_power");
    require_finite(a, "coupled_power");
    if (k.is_zero()) return std::pow(x, a);
    // a x^k - (a - 1) = 1 + a (x^k - 1)
    return deformed_root(a * power_deviation(x, k.value()), k.value());
}

double coupled_divide(double x, double y, Coupling k) {
    require_factor(x, k, "coupled_divide");
    require_finite(y, "coupled_divide");
    if (!(y > 0.0)) throw DomainError("coupled_divide: divisor must be positive");
    if (k.is_zero()) return x / y;
    // x^k - y^k + 1 = 1 + (x^k - 1) - (y^k - 1)
    const double s = power_deviation(x, k.value()) - power_deviation(y, k.value());
    return deformed_root(s, k.value());
}

double log_coupled_product(std::span<const double> logs, Coupling k) {
    if (logs.empty()) throw DomainError("log_coupled_product: at least one factor required");
    for (double l : logs) {
        if (std::isnan(l) || l == kInf)
            throw DomainError("log_coupled_product: log-factors must be finite or -inf");
    }
    if (k.is_zero()) {
        double sum = 0.0;
        for (double l : logs) sum += l;
        return sum;
    }
    const double kappa = k.value();
    if (logs.size() == 1) return logs.front();

    double m = -kInf;
    for (double l : logs) m = std::max(m, kappa * l);
    if (m == kInf) return -kInf;  // a zero factor with kappa < 0 annihilates the product

    const double n_minus_1 = static_cast<double>(logs.size() - 1);
    if (m < 700.0) {
        // No overflow possible: 1 + sum_j expm1(k L_j) keeps full precision for small k.
        double s = 0.0;
        for (double l : logs) s += std::expm1(kappa * l);
        if (!(s > -1.0)) return kappa > 0.0 ? -kInf : kInf;
        return std::log1p(s) / kappa;
    }
    // Shift by M = max_j k L_j: s = sum_j exp(k L_j - M) - (n - 1) exp(-M).
    double s = 0.0;
    for (double l : logs) s += std::exp(kappa * l - m);
    s -= n_minus_1 * std::exp(-m);
    if (!(s > 0.0)) return kappa > 0.0 ? -kInf : kInf;
    return (m + std::log(s)) / kappa;
}

}  // namespace coupled
