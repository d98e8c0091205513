#pragma once

#include <cstdint>
#include <vector>

#include "gaussvol/geometry.hpp"

namespace gaussvol {

/// Constant in front of the per-sample step count that the mixing proof needs.
inline constexpr double kProofStepScale = 1e17;

/// Per-sample step budget: ⌈scale · n² · ln(1/ν) · ln(40·k·m)⌉.
///
/// The proof constant makes runs infeasible; callers pick a practical scale
/// (see practical_step_scale()) and the chosen value is echoed in all output.
struct StepBudgetPolicy {
    double constant_scale = kProofStepScale;

    /// Saturates at UINT64_MAX. Never returns 0.
    std::uint64_t steps(int n, double log_inv_nu, std::uint64_t k, std::uint64_t m) const;
};

/// The annealing plan for one run.
///
/// Phase i targets f_i(x) = exp(−‖x‖²/(2σ_i²)) restricted to K ∩ 4σ_i√n·Bₙ.
/// Variances grow by 1/(1−1/n) per phase; the last phase is clamped to σ² = 1.
/// Every `stride`-th phase (and the last one) is a checkpoint where a ratio
/// of consecutive integrals is estimated.
struct CoolingSchedule {
    int n = 0;
    double eps = 0.0;
    std::vector<double> sigma_sq;  // σ_0² … σ_s², size s+1
    int s = 0;
    int stride = 0;                // ⌊√n⌋
    int m = 0;                     // number of checkpoints
    std::uint64_t k = 0;           // samples per checkpoint
    double log_inv_nu = 0.0;       // ln(1/ν), ν = (eps/(8n))^15
    std::vector<int> checkpoints;  // phase index of checkpoint α = 1..m

    double nu() const;
    double sigma(int phase) const;
    /// Radius of the ball the phase-i target is restricted to: 4σ_i√n.
    double radius_cap(int phase) const;
    /// Ball-walk step radius σ_i/(4096√n), times `multiplier`.
    double delta(int phase, double multiplier = 1.0) const;
    std::uint64_t steps(const StepBudgetPolicy& policy) const;

    /// Phase whose samples feed checkpoint α (1-based): (α−1)·stride.
    int source_phase(int alpha) const { return (alpha - 1) * stride; }
};

/// Throws InputError unless n ≥ 2 and 0 < eps < 1.
CoolingSchedule schedule_params(int n, double eps);

/// ln f(x) = −‖x‖²/(2σ²).
double log_unnormalized_density(const Vector& x, double sigma_sq);

/// min{1, f(y)/f(x)} evaluated from log densities.
double metropolis_acceptance(const Vector& x, const Vector& y, double sigma_sq);
double metropolis_acceptance_from_norms(double x_norm_sq, double y_norm_sq, double sigma_sq);

double std_normal_cdf(double t);

/// Regularized lower incomplete gamma P(a, x); series below a+1, Lentz
/// continued fraction above.
double regularized_gamma_p(double a, double x);

/// Standard Gaussian measure γ(K) for Halfspace, AxisBox, and origin-centered
/// Ball. Throws InputError("no analytic oracle ...") for anything else.
double exact_gaussian_measure(const BodySpec& body);

/// ln γ(K); avoids underflow for high-dimensional boxes.
double log_exact_gaussian_measure(const BodySpec& body);

bool has_analytic_oracle(const BodySpec& body);

}  // namespace gaussvol
