#pragma once

#include <cstdint>

#include "gaussvol/geometry.hpp"
#include "gaussvol/rng.hpp"

namespace gaussvol {

/// Monte Carlo estimate of ℓ(x) = vol(K ∩ (x + δB)) / vol(δB).
struct ConductanceReport {
    Vector point;
    double delta = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double ell_hat = 0.0;
    double standard_error = 0.0;
};

ConductanceReport local_conductance(const RestrictedBody& body, const Vector& x, double delta,
                                    std::uint64_t trials, RngStream& rng);

struct AverageConductanceReport {
    double sigma_sq = 0.0;
    double delta = 0.0;
    std::uint64_t points = 0;
    std::uint64_t trials_per_point = 0;
    double lambda_hat = 0.0;
    double standard_error = 0.0;  // across points
    double min_ell = 1.0;
};

/// Mean of ℓ over exact i.i.d. draws from N(0, σ²I) restricted to the body.
AverageConductanceReport average_local_conductance(const RestrictedBody& body, double sigma_sq,
                                                   double delta, std::uint64_t points,
                                                   std::uint64_t trials_per_point, RngStream& rng);

/// (1−1/n)^{−n/2}. Decreases to √e as n grows; equals 2 at n = 2.
double consecutive_warmness_factor(int n);

struct SecondMomentReport {
    double sigma_d_sq = 0.0;
    double sigma_i_sq = 0.0;
    std::uint64_t samples = 0;
    double ratio = 0.0;          // empirical E(Y²)/E(Y)²
    double whole_space = 0.0;    // exact value on ℝⁿ
    double bound = 0.0;          // logconcavity bound with exponent n+1
};

/// Empirical E(Y²)/E(Y)² for Y = exp(‖X‖²/2·(1/σ_d² − 1/σ_i²)), X exact
/// i.i.d. from N(0, σ_d²I) on the body.
SecondMomentReport ratio_second_moment(const BodySpec& body, double sigma_d_sq, double sigma_i_sq,
                                       std::uint64_t samples, RngStream& rng);

/// Exact E(Y²)/E(Y)² when K = ℝⁿ: (a_t²/(a_s(2a_t − a_s)))^{n/2} with
/// a = 1/(2σ²), s the sampled phase and t the target phase.
double whole_space_second_moment(int n, double sigma_d_sq, double sigma_i_sq);

/// Same base raised to n+1; bounds the ratio on any convex K.
double second_moment_bound(int n, double sigma_d_sq, double sigma_i_sq);

struct MonteCarloMeasure {
    std::uint64_t draws = 0;
    std::uint64_t hits = 0;
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Fraction of standard Gaussian draws that land in the body.
MonteCarloMeasure monte_carlo_gaussian_measure(const BodySpec& body, std::uint64_t draws,
                                               RngStream& rng);

}  // namespace gaussvol
