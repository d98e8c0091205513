#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gaussvol/gaussian.hpp"
#include "gaussvol/geometry.hpp"
#include "gaussvol/rng.hpp"
#include "gaussvol/walk.hpp"

namespace gaussvol {

/// Step-budget scale used by the CLI and acceptance suite: one step per sample
/// up to n = 8, two at n = 10 (eps = 0.2). Calibrated against the analytic
/// box and halfspace measures.
inline constexpr double kPracticalStepScale = 1e-5;

/// Multiplier on the σ/(4096√n) proposal radius used by the CLI and acceptance
/// suite, giving δ = 2σ/√n. At the unscaled radius the walk moves ~1e-4σ per
/// step and cannot decorrelate within any desk-scale budget.
inline constexpr double kPracticalDeltaMultiplier = 8192.0;

inline constexpr double kDefaultMedianConstant = 2.0;

struct AnnealConfig {
    StepBudgetPolicy budget{kProofStepScale};
    double delta_multiplier = 1.0;
    bool lazy = false;
    /// Draw each checkpoint sample from its own chain started at p_d instead of
    /// one continued chain.
    bool independent_checkpoint_chains = false;
    double median_constant = kDefaultMedianConstant;
    /// Skip the unit-ball containment requirement.
    bool assume_contains_unit_ball = false;
    std::uint64_t max_rejection_trials = kDefaultRejectionTrials;
    unsigned workers = 1;

    /// Desk-scale settings: practical step scale and proposal radius.
    static AnnealConfig practical();
};

/// Streaming accumulator for Y_j = exp(‖X_j‖²/2 · (1/σ_d² − 1/σ_i²)).
class RatioAccumulator {
public:
    RatioAccumulator(double sigma_d_sq, double sigma_i_sq);

    void add(double norm_sq);

    std::uint64_t count() const { return count_; }
    double sum_y() const { return sum_y_; }
    double sum_y_sq() const { return sum_y_sq_; }

private:
    double exponent_scale_;
    std::uint64_t count_ = 0;
    double sum_y_ = 0.0;
    double sum_y_sq_ = 0.0;
};

/// One checkpoint ratio W_α = mean(Y_j).
struct RatioEstimate {
    int alpha = 0;
    int source_phase = 0;  // d: the samples target f_d
    int target_phase = 0;  // i: numerator density f_i
    std::uint64_t k = 0;
    double sum_y = 0.0;
    double sum_y_sq = 0.0;

    double w() const { return sum_y / static_cast<double>(k); }
    /// k·Σy²/(Σy)², the empirical E(Y²)/E(Y)².
    double second_moment_ratio() const;
    /// Standard error of W assuming independent samples.
    double standard_error() const;
};

/// Throws InputError on an empty sample list or σ_i² ≤ σ_d² (unless
/// allow_equal and they are equal).
RatioEstimate estimate_phase_ratio(std::span<const Vector> samples, double sigma_d_sq,
                                   double sigma_i_sq, bool allow_equal = false);

struct VolumeEstimate {
    /// ln γ(K) = (n/2)·ln σ₀² + Σ ln W_α. Authoritative.
    double log_measure = 0.0;
    /// exp(log_measure); may underflow to 0 in high dimension.
    double measure = 0.0;
    /// ln ∫_K exp(−‖x‖²/2) dx = log_measure + (n/2)·ln 2π.
    double log_integral = 0.0;
    std::vector<RatioEstimate> per_phase;
    CoolingSchedule schedule;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t steps_per_sample = 0;
    double delta_multiplier = 1.0;
    double step_scale = 0.0;
    WalkCounters counters;
    std::uint64_t rejection_trials = 0;
    std::uint64_t total_oracle_calls = 0;

    /// Filled by median_boost: the log-measure of every run, in run order.
    std::vector<double> run_log_measures;
    int selected_run = 0;
};

/// One unboosted pass of the annealing volume algorithm.
VolumeEstimate gaussian_volume_single(const BodySpec& body, double eps, const AnnealConfig& config,
                                      RngStream rng);

/// max(1, ⌈C·ln(1/fail_prob)⌉).
int median_run_count(double fail_prob, double median_constant = kDefaultMedianConstant);

using VolumeRun = std::function<VolumeEstimate(int run_index, RngStream rng)>;

/// Runs independent passes on streams rng.split(run_index) and returns the
/// one with the (lower) median log-measure. Streams are fixed per run index,
/// so the result does not depend on `workers`.
VolumeEstimate median_boost(const VolumeRun& run, double fail_prob, const RngStream& rng,
                            double median_constant = kDefaultMedianConstant,
                            unsigned workers = 1);

/// Median-boosted annealing estimate of the standard Gaussian measure of K.
VolumeEstimate gaussian_volume(const BodySpec& body, double eps, double fail_prob,
                               const AnnealConfig& config, const RngStream& rng);

/// Approximately independent draws from N(0, I) restricted to K: anneals up to
/// σ = 1, then emits one point every per-sample step budget.
std::vector<Vector> sample_gaussian_restricted(const BodySpec& body, double eps, int count,
                                               const AnnealConfig& config, RngStream rng);

/// Exact i.i.d. draw from N(0, σ²I) conditioned on K. Boxes are sampled one
/// coordinate at a time; other bodies by whole-vector rejection.
Vector exact_restricted_sample(const BodySpec& body, double sigma_sq, std::uint64_t max_trials,
                               RngStream& rng);

/// Checkpoint ratios computed from exact i.i.d. samples of f_d on K in place
/// of chain samples. Used to validate the telescoping product.
std::vector<RatioEstimate> oracle_mode_ratios(const BodySpec& body, const CoolingSchedule& schedule,
                                              std::uint64_t samples_per_checkpoint, RngStream rng,
                                              std::uint64_t max_trials = kDefaultRejectionTrials);

/// Throws InputError unless containment is verified or overridden.
void require_unit_ball_containment(const BodySpec& body, bool override_check);

}  // namespace gaussvol
