#include "gaussvol/walk.hpp"

#include <cmath>
#include <string>

#include "gaussvol/errors.hpp"
#include "gaussvol/gaussian.hpp"

namespace gaussvol {

WalkCounters& WalkCounters::operator+=(const WalkCounters& o) {
    proposals += o.proposals;
    accepted += o.accepted;
    out_of_body += o.out_of_body;
    filter_rejections += o.filter_rejections;
    lazy_holds += o.lazy_holds;
    return *this;
}

WalkState::WalkState(Vector start, double sigma_sq_, double delta_)
    : x(std::move(start)), x_norm_sq(x.squaredNorm()), sigma_sq(sigma_sq_), delta(delta_),
      scratch(x.size()) {
    if (!(sigma_sq > 0.0)) {
        throw InputError("walk: sigma^2 must be positive");
    }
    if (!(delta > 0.0)) {
        throw InputError("walk: step radius must be positive");
    }
}

void WalkState::retarget(double new_sigma_sq, double new_delta) {
    if (!(new_sigma_sq > 0.0) || !(new_delta > 0.0)) {
        throw InputError("walk: sigma^2 and step radius must be positive");
    }
    sigma_sq = new_sigma_sq;
    delta = new_delta;
}

void fill_gaussian(Vector& out, double sigma, RngStream& rng) {
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] = sigma * rng.normal();
    }
}

Vector gaussian_vector(int n, double sigma, RngStream& rng) {
    if (!(sigma > 0.0)) {
        throw InputError("gaussian_vector: sigma must be positive");
    }
    Vector v(n);
    fill_gaussian(v, sigma, rng);
    return v;
}

void fill_uniform_in_ball(Vector& out, double delta, RngStream& rng) {
    double norm_sq = 0.0;
    do {
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            out[i] = rng.normal();
        }
        norm_sq = out.squaredNorm();
    } while (norm_sq == 0.0);
    const double n = static_cast<double>(out.size());
    const double radius = delta * std::pow(rng.uniform_open_closed(), 1.0 / n);
    out *= radius / std::sqrt(norm_sq);
}

Vector uniform_in_ball(int n, double delta, RngStream& rng) {
    if (!(delta > 0.0)) {
        throw InputError("uniform_in_ball: delta must be positive");
    }
    Vector v(n);
    fill_uniform_in_ball(v, delta, rng);
    return v;
}

void ball_walk_step(WalkState& state, const RestrictedBody& body, bool lazy, RngStream& rng) {
    auto& c = state.counters;
    ++c.proposals;
    if (lazy && rng.coin()) {
        ++c.lazy_holds;
        return;
    }
    Vector& y = state.scratch;
    fill_uniform_in_ball(y, state.delta, rng);
    y += state.x;
    const double y_norm_sq = y.squaredNorm();
    if (!body.contains_unchecked(y, y_norm_sq)) {
        ++c.out_of_body;
        return;
    }
    const double accept = metropolis_acceptance_from_norms(state.x_norm_sq, y_norm_sq, state.sigma_sq);
    if (accept >= 1.0 || rng.uniform() < accept) {
        ++c.accepted;
        state.x.swap(y);
        state.x_norm_sq = y_norm_sq;
    } else {
        ++c.filter_rejections;
    }
}

void advance(WalkState& state, const RestrictedBody& body, std::uint64_t steps, bool lazy,
             RngStream& rng) {
    if (state.x.size() != body.dim()) {
        throw InputError("walk: state dimension does not match body");
    }
    for (std::uint64_t t = 0; t < steps; ++t) {
        ball_walk_step(state, body, lazy, rng);
    }
}

SamplerResult run_sampler(const RestrictedBody& body, double sigma_sq, const Vector& x0,
                          std::uint64_t steps, double delta, bool lazy, RngStream& rng) {
    if (!body.contains(x0)) {
        throw InputError("run_sampler: start point is not in the body");
    }
    WalkState state(x0, sigma_sq, delta);
    advance(state, body, steps, lazy, rng);
    return {std::move(state.x), state.counters};
}

RejectionSample initial_rejection_sample(const BodySpec& body, double sigma_sq,
                                         std::uint64_t max_trials, RngStream& rng) {
    if (!(sigma_sq > 0.0)) {
        throw InputError("rejection sampler: sigma^2 must be positive");
    }
    const double sigma = std::sqrt(sigma_sq);
    RejectionSample out{Vector(body.dim()), 0};
    while (out.trials < max_trials) {
        ++out.trials;
        fill_gaussian(out.x, sigma, rng);
        if (body.contains_unchecked(out.x)) {
            return out;
        }
    }
    throw SamplingError("rejection sampler: no point of N(0, " + std::to_string(sigma_sq) +
                        " I) landed in the body after " + std::to_string(max_trials) +
                        " trials; the body probably does not contain the unit ball");
}

std::uint64_t speedy_step(WalkState& state, const RestrictedBody& body, RngStream& rng,
                          std::uint64_t max_retries) {
    Vector& y = state.scratch;
    for (std::uint64_t draws = 1; draws <= max_retries; ++draws) {
        fill_uniform_in_ball(y, state.delta, rng);
        y += state.x;
        const double y_norm_sq = y.squaredNorm();
        if (!body.contains_unchecked(y, y_norm_sq)) {
            continue;
        }
        ++state.counters.proposals;
        const double accept =
            metropolis_acceptance_from_norms(state.x_norm_sq, y_norm_sq, state.sigma_sq);
        if (accept >= 1.0 || rng.uniform() < accept) {
            ++state.counters.accepted;
            state.x.swap(y);
            state.x_norm_sq = y_norm_sq;
        } else {
            ++state.counters.filter_rejections;
        }
        return draws;
    }
    throw SamplingError("speedy walk: no proposal landed in the body after " +
                        std::to_string(max_retries) +
                        " draws; local conductance at the current point is vanishing");
}

}  // namespace gaussvol
