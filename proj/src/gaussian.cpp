#include "gaussvol/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gaussvol/errors.hpp"

namespace gaussvol {

std::uint64_t StepBudgetPolicy::steps(int n, double log_inv_nu, std::uint64_t k,
                                      std::uint64_t m) const {
    if (!(constant_scale > 0.0) || !std::isfinite(constant_scale)) {
        throw InputError("step budget scale must be positive and finite");
    }
    const double nn = static_cast<double>(n);
    const double raw = constant_scale * nn * nn * log_inv_nu *
                       std::log(40.0 * static_cast<double>(k) * static_cast<double>(m));
    const double budget = std::ceil(raw);
    if (!(budget < 0x1.0p64)) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return budget < 1.0 ? 1 : static_cast<std::uint64_t>(budget);
}

double CoolingSchedule::nu() const { return std::exp(-log_inv_nu); }

double CoolingSchedule::sigma(int phase) const { return std::sqrt(sigma_sq.at(phase)); }

double CoolingSchedule::radius_cap(int phase) const {
    return 4.0 * sigma(phase) * std::sqrt(static_cast<double>(n));
}

double CoolingSchedule::delta(int phase, double multiplier) const {
    return multiplier * sigma(phase) / (4096.0 * std::sqrt(static_cast<double>(n)));
}

std::uint64_t CoolingSchedule::steps(const StepBudgetPolicy& policy) const {
    return policy.steps(n, log_inv_nu, k, static_cast<std::uint64_t>(m));
}

CoolingSchedule schedule_params(int n, double eps) {
    if (n < 2) {
        throw InputError("schedule: dimension must be at least 2, got " + std::to_string(n));
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InputError("schedule: eps must lie in (0, 1)");
    }
    const double nn = static_cast<double>(n);

    CoolingSchedule sched;
    sched.n = n;
    sched.eps = eps;

    const double sigma0_sq = 2.0 / (nn + std::sqrt(8.0 * nn * std::log(2.0 / eps)));
    const double shrink = 1.0 - 1.0 / nn;

    // Grow by 1/(1−1/n) until the next value would reach 1, then clamp.
    sched.sigma_sq.push_back(sigma0_sq);
    double current = sigma0_sq;
    while (true) {
        const double next = current / shrink;
        if (next >= 1.0) {
            sched.sigma_sq.push_back(1.0);
            break;
        }
        sched.sigma_sq.push_back(next);
        current = next;
    }
    sched.s = static_cast<int>(sched.sigma_sq.size()) - 1;

    sched.stride = static_cast<int>(std::floor(std::sqrt(nn)));
    while (static_cast<long long>(sched.stride + 1) * (sched.stride + 1) <= n) {
        ++sched.stride;
    }
    while (static_cast<long long>(sched.stride) * sched.stride > n) {
        --sched.stride;
    }
    sched.m = (sched.s + sched.stride - 1) / sched.stride;
    for (int alpha = 1; alpha <= sched.m; ++alpha) {
        sched.checkpoints.push_back(alpha == sched.m ? sched.s : alpha * sched.stride);
    }

    sched.k = static_cast<std::uint64_t>(
        std::ceil(512.0 / (eps * eps) * std::sqrt(nn) * std::log(nn / eps)));
    sched.log_inv_nu = 15.0 * std::log(8.0 * nn / eps);
    return sched;
}

double log_unnormalized_density(const Vector& x, double sigma_sq) {
    return -x.squaredNorm() / (2.0 * sigma_sq);
}

double metropolis_acceptance_from_norms(double x_norm_sq, double y_norm_sq, double sigma_sq) {
    const double log_ratio = (x_norm_sq - y_norm_sq) / (2.0 * sigma_sq);
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double metropolis_acceptance(const Vector& x, const Vector& y, double sigma_sq) {
    if (x.size() != y.size()) {
        throw InputError("metropolis_acceptance: dimension mismatch");
    }
    const double log_ratio =
        log_unnormalized_density(y, sigma_sq) - log_unnormalized_density(x, sigma_sq);
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

namespace {

// Upper tail 1 − Φ(t) without cancellation.
double std_normal_sf(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

double gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int i = 1; i < 10000; ++i) {
        term *= x / (a + i);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the modified Lentz method.
double gamma_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double box_factor(double lo, double hi) {
    // Φ(hi) − Φ(lo) computed on the side of zero that avoids cancellation.
    if (lo >= 0.0) {
        return std_normal_sf(lo) - std_normal_sf(hi);
    }
    if (hi <= 0.0) {
        return std_normal_cdf(hi) - std_normal_cdf(lo);
    }
    return 1.0 - std_normal_cdf(lo) - std_normal_sf(hi);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) {
        throw InputError("regularized_gamma_p: a must be positive");
    }
    if (!(x >= 0.0)) {
        throw InputError("regularized_gamma_p: x must be nonnegative");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return std::min(1.0, gamma_series(a, x));
    }
    return std::max(0.0, 1.0 - gamma_continued_fraction(a, x));
}

bool has_analytic_oracle(const BodySpec& body) {
    if (std::holds_alternative<Halfspace>(body.shape()) ||
        std::holds_alternative<AxisBox>(body.shape())) {
        return true;
    }
    if (const auto* b = std::get_if<Ball>(&body.shape())) {
        return b->center.squaredNorm() == 0.0;
    }
    return false;
}

double log_exact_gaussian_measure(const BodySpec& body) {
    if (const auto* h = std::get_if<Halfspace>(&body.shape())) {
        return std::log(std_normal_cdf(h->offset / h->normal.norm()));
    }
    if (const auto* b = std::get_if<AxisBox>(&body.shape())) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < b->lower.size(); ++i) {
            total += std::log(box_factor(b->lower[i], b->upper[i]));
        }
        return total;
    }
    if (const auto* b = std::get_if<Ball>(&body.shape()); b && b->center.squaredNorm() == 0.0) {
        return std::log(
            regularized_gamma_p(0.5 * body.dim(), 0.5 * b->radius * b->radius));
    }
    throw InputError("no analytic oracle for this body (supported: halfspace, box, "
                     "origin-centered ball)");
}

double exact_gaussian_measure(const BodySpec& body) {
    if (const auto* b = std::get_if<AxisBox>(&body.shape())) {
        double product = 1.0;
        for (Eigen::Index i = 0; i < b->lower.size(); ++i) {
            product *= box_factor(b->lower[i], b->upper[i]);
        }
        return product;
    }
    if (const auto* h = std::get_if<Halfspace>(&body.shape())) {
        return std_normal_cdf(h->offset / h->normal.norm());
    }
    if (const auto* b = std::get_if<Ball>(&body.shape()); b && b->center.squaredNorm() == 0.0) {
        return regularized_gamma_p(0.5 * body.dim(), 0.5 * b->radius * b->radius);
    }
    return std::exp(log_exact_gaussian_measure(body));
}

}  // namespace gaussvol
