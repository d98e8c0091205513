#pragma once

#include <cstdint>

#include "gaussvol/geometry.hpp"
#include "gaussvol/rng.hpp"

namespace gaussvol {

/// Step accounting. proposals = accepted + out_of_body + filter_rejections + lazy_holds.
struct WalkCounters {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    std::uint64_t out_of_body = 0;
    std::uint64_t filter_rejections = 0;
    std::uint64_t lazy_holds = 0;

    /// Membership queries issued; lazy holds never consult the body.
    std::uint64_t oracle_calls() const { return proposals - lazy_holds; }
    bool balanced() const {
        return proposals == accepted + out_of_body + filter_rejections + lazy_holds;
    }

    WalkCounters& operator+=(const WalkCounters& o);
};

/// One chain of the Metropolis ball walk targeting exp(−‖x‖²/(2σ²)) on a body.
struct WalkState {
    Vector x;
    double x_norm_sq = 0.0;
    double sigma_sq = 1.0;
    double delta = 0.0;
    WalkCounters counters;

    WalkState(Vector start, double sigma_sq, double delta);

    /// Moves the chain to a new target without touching the position or counters.
    void retarget(double new_sigma_sq, double new_delta);

    Vector scratch;  // proposal buffer, reused across steps
};

Vector gaussian_vector(int n, double sigma, RngStream& rng);
void fill_gaussian(Vector& out, double sigma, RngStream& rng);

/// Uniform point in the closed ball of radius delta about the origin.
Vector uniform_in_ball(int n, double delta, RngStream& rng);
void fill_uniform_in_ball(Vector& out, double delta, RngStream& rng);

/// One step of the (optionally lazy) Metropolis ball walk.
void ball_walk_step(WalkState& state, const RestrictedBody& body, bool lazy, RngStream& rng);

/// Runs `steps` ball-walk steps in place.
void advance(WalkState& state, const RestrictedBody& body, std::uint64_t steps, bool lazy,
             RngStream& rng);

struct SamplerResult {
    Vector x;
    WalkCounters counters;
};

/// Throws InputError if x0 is not in the body.
SamplerResult run_sampler(const RestrictedBody& body, double sigma_sq, const Vector& x0,
                          std::uint64_t steps, double delta, bool lazy, RngStream& rng);

struct RejectionSample {
    Vector x;
    std::uint64_t trials = 0;
};

inline constexpr std::uint64_t kDefaultRejectionTrials = 1'000'000;

/// Exact draw from N(0, σ²I) conditioned on the body, by rejection.
/// Throws SamplingError after max_trials misses.
RejectionSample initial_rejection_sample(const BodySpec& body, double sigma_sq,
                                         std::uint64_t max_trials, RngStream& rng);

inline constexpr std::uint64_t kSpeedyRetryLimit = 1'000'000;

/// Speedy-walk step: proposals are redrawn until one lands in the body, then
/// filtered. Returns the number of draws used. Diagnostic only.
std::uint64_t speedy_step(WalkState& state, const RestrictedBody& body, RngStream& rng,
                          std::uint64_t max_retries = kSpeedyRetryLimit);

}  // namespace gaussvol
