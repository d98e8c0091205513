#include "gaussvol/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "gaussvol/anneal.hpp"
#include "gaussvol/errors.hpp"
#include "gaussvol/walk.hpp"

namespace gaussvol {

ConductanceReport local_conductance(const RestrictedBody& body, const Vector& x, double delta,
                                    std::uint64_t trials, RngStream& rng) {
    if (trials < 1) {
        throw InputError("local_conductance: trials must be at least 1");
    }
    if (!(delta > 0.0)) {
        throw InputError("local_conductance: delta must be positive");
    }
    if (!body.contains(x)) {
        throw InputError("local_conductance: point is not in the body");
    }
    ConductanceReport r;
    r.point = x;
    r.delta = delta;
    r.trials = trials;
    Vector y(x.size());
    for (std::uint64_t t = 0; t < trials; ++t) {
        fill_uniform_in_ball(y, delta, rng);
        y += x;
        if (body.contains_unchecked(y, y.squaredNorm())) {
            ++r.hits;
        }
    }
    r.ell_hat = static_cast<double>(r.hits) / static_cast<double>(trials);
    r.standard_error = std::sqrt(r.ell_hat * (1.0 - r.ell_hat) / static_cast<double>(trials));
    return r;
}

AverageConductanceReport average_local_conductance(const RestrictedBody& body, double sigma_sq,
                                                   double delta, std::uint64_t points,
                                                   std::uint64_t trials_per_point, RngStream& rng) {
    if (points < 1) {
        throw InputError("average_local_conductance: need at least one point");
    }
    AverageConductanceReport r;
    r.sigma_sq = sigma_sq;
    r.delta = delta;
    r.points = points;
    r.trials_per_point = trials_per_point;

    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t p = 0; p < points; ++p) {
        Vector x;
        do {
            x = exact_restricted_sample(body.inner(), sigma_sq, kDefaultRejectionTrials, rng);
        } while (x.squaredNorm() > body.radius_cap() * body.radius_cap());
        const double ell = local_conductance(body, x, delta, trials_per_point, rng).ell_hat;
        sum += ell;
        sum_sq += ell * ell;
        r.min_ell = std::min(r.min_ell, ell);
    }
    const double np = static_cast<double>(points);
    r.lambda_hat = sum / np;
    r.standard_error = std::sqrt(std::max(0.0, sum_sq / np - r.lambda_hat * r.lambda_hat) / np);
    return r;
}

double consecutive_warmness_factor(int n) {
    if (n < 2) {
        throw InputError("warmness factor: dimension must be at least 2");
    }
    const double nn = static_cast<double>(n);
    return std::exp(-0.5 * nn * std::log1p(-1.0 / nn));
}

namespace {

double second_moment_base(double sigma_d_sq, double sigma_i_sq) {
    const double a_source = 0.5 / sigma_d_sq;
    const double a_target = 0.5 / sigma_i_sq;
    if (!(2.0 * a_target > a_source)) {
        throw InputError("second moment diverges: need sigma_i^2 < 2 sigma_d^2");
    }
    return a_target * a_target / (a_source * (2.0 * a_target - a_source));
}

}  // namespace

double whole_space_second_moment(int n, double sigma_d_sq, double sigma_i_sq) {
    return std::pow(second_moment_base(sigma_d_sq, sigma_i_sq), 0.5 * n);
}

double second_moment_bound(int n, double sigma_d_sq, double sigma_i_sq) {
    return std::pow(second_moment_base(sigma_d_sq, sigma_i_sq), n + 1.0);
}

SecondMomentReport ratio_second_moment(const BodySpec& body, double sigma_d_sq, double sigma_i_sq,
                                       std::uint64_t samples, RngStream& rng) {
    if (samples < 1) {
        throw InputError("ratio_second_moment: need at least one sample");
    }
    if (!(sigma_d_sq > 0.0) || sigma_i_sq < sigma_d_sq) {
        throw InputError("ratio_second_moment: need 0 < sigma_d^2 <= sigma_i^2");
    }
    SecondMomentReport r;
    r.sigma_d_sq = sigma_d_sq;
    r.sigma_i_sq = sigma_i_sq;
    r.samples = samples;
    r.whole_space = whole_space_second_moment(body.dim(), sigma_d_sq, sigma_i_sq);
    r.bound = second_moment_bound(body.dim(), sigma_d_sq, sigma_i_sq);

    RatioAccumulator acc(sigma_d_sq, sigma_i_sq);
    for (std::uint64_t j = 0; j < samples; ++j) {
        acc.add(exact_restricted_sample(body, sigma_d_sq, kDefaultRejectionTrials, rng).squaredNorm());
    }
    r.ratio = static_cast<double>(samples) * acc.sum_y_sq() / (acc.sum_y() * acc.sum_y());
    return r;
}

MonteCarloMeasure monte_carlo_gaussian_measure(const BodySpec& body, std::uint64_t draws,
                                               RngStream& rng) {
    if (draws < 1) {
        throw InputError("monte carlo measure: need at least one draw");
    }
    MonteCarloMeasure r;
    r.draws = draws;
    Vector x(body.dim());
    for (std::uint64_t j = 0; j < draws; ++j) {
        fill_gaussian(x, 1.0, rng);
        if (body.contains_unchecked(x)) {
            ++r.hits;
        }
    }
    const double n = static_cast<double>(draws);
    r.estimate = static_cast<double>(r.hits) / n;
    r.standard_error = std::sqrt(r.estimate * (1.0 - r.estimate) / n);
    return r;
}

}  // namespace gaussvol
