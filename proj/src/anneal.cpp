#include "gaussvol/anneal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <numeric>
#include <string>
#include <thread>

#include "gaussvol/errors.hpp"

namespace gaussvol {

AnnealConfig AnnealConfig::practical() {
    AnnealConfig config;
    config.budget.constant_scale = kPracticalStepScale;
    config.delta_multiplier = kPracticalDeltaMultiplier;
    return config;
}

RatioAccumulator::RatioAccumulator(double sigma_d_sq, double sigma_i_sq)
    : exponent_scale_(0.5 * (1.0 / sigma_d_sq - 1.0 / sigma_i_sq)) {}

void RatioAccumulator::add(double norm_sq) {
    const double y = std::exp(norm_sq * exponent_scale_);
    ++count_;
    sum_y_ += y;
    sum_y_sq_ += y * y;
}

double RatioEstimate::second_moment_ratio() const {
    return static_cast<double>(k) * sum_y_sq / (sum_y * sum_y);
}

double RatioEstimate::standard_error() const {
    const double kk = static_cast<double>(k);
    const double mean = sum_y / kk;
    const double var = std::max(0.0, sum_y_sq / kk - mean * mean);
    return std::sqrt(var / kk);
}

RatioEstimate estimate_phase_ratio(std::span<const Vector> samples, double sigma_d_sq,
                                   double sigma_i_sq, bool allow_equal) {
    if (samples.empty()) {
        throw InputError("estimate_phase_ratio: empty sample list");
    }
    if (!(sigma_d_sq > 0.0)) {
        throw InputError("estimate_phase_ratio: sigma_d^2 must be positive");
    }
    if (!(sigma_i_sq > sigma_d_sq) && !(allow_equal && sigma_i_sq == sigma_d_sq)) {
        throw InputError("estimate_phase_ratio: need sigma_i^2 > sigma_d^2");
    }
    RatioAccumulator acc(sigma_d_sq, sigma_i_sq);
    for (const auto& x : samples) {
        acc.add(x.squaredNorm());
    }
    RatioEstimate est;
    est.k = acc.count();
    est.sum_y = acc.sum_y();
    est.sum_y_sq = acc.sum_y_sq();
    return est;
}

void require_unit_ball_containment(const BodySpec& body, bool override_check) {
    if (override_check) {
        return;
    }
    const auto c = verify_unit_ball_containment(body);
    if (c == Containment::violated) {
        throw InputError(
            "body does not contain the unit ball centered at the origin (some facet has "
            "b/|a| < 1, a box side is inside [-1, 1], or a ball misses radius 1 + |center|); "
            "pass the containment override to run anyway");
    }
    if (c == Containment::unknown) {
        throw InputError("unit-ball containment could not be verified for this body; "
                         "pass the containment override to run anyway");
    }
}

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InputError("eps must lie in (0, 1)");
    }
}

double phase_delta(const CoolingSchedule& sched, int phase, const AnnealConfig& config) {
    if (!(config.delta_multiplier > 0.0)) {
        throw InputError("delta multiplier must be positive");
    }
    return sched.delta(phase, config.delta_multiplier);
}

// Runs the annealing chain through phases 1..s. `on_phase(i, chain)` fires
// after each phase's sampling call.
template <class OnPhase>
WalkState anneal_chain(const std::shared_ptr<const BodySpec>& body, const CoolingSchedule& sched,
                       std::uint64_t steps, const AnnealConfig& config, const Vector& start,
                       RngStream& rng, OnPhase&& on_phase) {
    WalkState chain(start, sched.sigma_sq[0], phase_delta(sched, 0, config));
    for (int i = 1; i <= sched.s; ++i) {
        const RestrictedBody restricted(body, sched.radius_cap(i));
        chain.retarget(sched.sigma_sq[i], phase_delta(sched, i, config));
        advance(chain, restricted, steps, config.lazy, rng);
        on_phase(i, chain);
    }
    return chain;
}

}  // namespace

VolumeEstimate gaussian_volume_single(const BodySpec& body, double eps, const AnnealConfig& config,
                                      RngStream rng) {
    check_eps(eps);
    require_unit_ball_containment(body, config.assume_contains_unit_ball);

    VolumeEstimate out;
    out.schedule = schedule_params(body.dim(), eps);
    const CoolingSchedule& sched = out.schedule;
    out.seed = rng.seed();
    out.stream_id = rng.stream_id();
    out.steps_per_sample = sched.steps(config.budget);
    out.delta_multiplier = config.delta_multiplier;
    out.step_scale = config.budget.constant_scale;

    const auto shared = std::make_shared<const BodySpec>(body);
    const auto start =
        initial_rejection_sample(body, sched.sigma_sq[0], config.max_rejection_trials, rng);
    out.rejection_trials = start.trials;

    Vector source_point = start.x;  // p_d for the next checkpoint
    std::size_t next_checkpoint = 0;
    double log_product = 0.0;

    auto on_phase = [&](int i, const WalkState& chain) {
        if (next_checkpoint >= sched.checkpoints.size() || sched.checkpoints[next_checkpoint] != i) {
            return;
        }
        const int alpha = static_cast<int>(next_checkpoint) + 1;
        const int d = sched.source_phase(alpha);
        const RestrictedBody source_body(shared, sched.radius_cap(d));
        const double source_delta = phase_delta(sched, d, config);

        RatioAccumulator acc(sched.sigma_sq[d], sched.sigma_sq[i]);
        WalkCounters used;
        if (config.independent_checkpoint_chains) {
            for (std::uint64_t j = 0; j < sched.k; ++j) {
                WalkState sampler(source_point, sched.sigma_sq[d], source_delta);
                advance(sampler, source_body, out.steps_per_sample, config.lazy, rng);
                acc.add(sampler.x_norm_sq);
                used += sampler.counters;
            }
        } else {
            WalkState sampler(source_point, sched.sigma_sq[d], source_delta);
            for (std::uint64_t j = 0; j < sched.k; ++j) {
                advance(sampler, source_body, out.steps_per_sample, config.lazy, rng);
                acc.add(sampler.x_norm_sq);
            }
            used = sampler.counters;
        }
        out.counters += used;

        RatioEstimate est;
        est.alpha = alpha;
        est.source_phase = d;
        est.target_phase = i;
        est.k = acc.count();
        est.sum_y = acc.sum_y();
        est.sum_y_sq = acc.sum_y_sq();
        const double log_w = std::log(est.w());
        if (!std::isfinite(log_w) || !std::isfinite(est.sum_y_sq)) {
            throw SamplingError("nonfinite ratio accumulation at checkpoint " +
                                std::to_string(alpha) + " (phases " + std::to_string(d) +
                                " -> " + std::to_string(i) + ")");
        }
        log_product += log_w;
        out.per_phase.push_back(est);

        source_point = chain.x;
        ++next_checkpoint;
    };

    const WalkState chain =
        anneal_chain(shared, sched, out.steps_per_sample, config, start.x, rng, on_phase);
    out.counters += chain.counters;

    const double half_n = 0.5 * sched.n;
    out.log_measure = half_n * std::log(sched.sigma_sq[0]) + log_product;
    out.log_integral = out.log_measure + half_n * std::log(2.0 * M_PI);
    out.measure = std::exp(out.log_measure);
    if (!std::isfinite(out.log_measure)) {
        throw SamplingError("nonfinite log-measure after the final phase");
    }
    out.total_oracle_calls = out.counters.oracle_calls() + out.rejection_trials;
    return out;
}

int median_run_count(double fail_prob, double median_constant) {
    if (!(fail_prob > 0.0 && fail_prob < 1.0)) {
        throw InputError("fail_prob must lie in (0, 1)");
    }
    if (!(median_constant > 0.0)) {
        throw InputError("median constant must be positive");
    }
    const double r = std::ceil(median_constant * std::log(1.0 / fail_prob));
    return std::max(1, static_cast<int>(r));
}

VolumeEstimate median_boost(const VolumeRun& run, double fail_prob, const RngStream& rng,
                            double median_constant, unsigned workers) {
    const int runs = median_run_count(fail_prob, median_constant);
    std::vector<VolumeEstimate> results(runs);
    std::vector<std::exception_ptr> errors(runs);

    auto execute = [&](int j) {
        try {
            results[j] = run(j, rng.split(static_cast<std::uint64_t>(j)));
        } catch (...) {
            errors[j] = std::current_exception();
        }
    };

    const unsigned pool = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(runs)));
    if (pool == 1) {
        for (int j = 0; j < runs; ++j) {
            execute(j);
            if (errors[j]) {
                break;
            }
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> threads;
        for (unsigned t = 0; t < pool; ++t) {
            threads.emplace_back([&] {
                for (int j = next++; j < runs; j = next++) {
                    execute(j);
                }
            });
        }
        for (auto& t : threads) {
            t.join();
        }
    }

    for (int j = 0; j < runs; ++j) {
        if (!errors[j]) {
            continue;
        }
        const std::string prefix = "run " + std::to_string(j) + ": ";
        try {
            std::rethrow_exception(errors[j]);
        } catch (const InputError& e) {
            throw InputError(prefix + e.what());
        } catch (const std::exception& e) {
            throw SamplingError(prefix + e.what());
        }
    }

    std::vector<int> order(runs);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return results[a].log_measure < results[b].log_measure;
    });
    const int chosen = order[(runs - 1) / 2];

    VolumeEstimate out = std::move(results[chosen]);
    out.selected_run = chosen;
    out.run_log_measures.clear();
    for (int j = 0; j < runs; ++j) {
        out.run_log_measures.push_back(j == chosen ? out.log_measure : results[j].log_measure);
    }
    return out;
}

VolumeEstimate gaussian_volume(const BodySpec& body, double eps, double fail_prob,
                               const AnnealConfig& config, const RngStream& rng) {
    check_eps(eps);
    median_run_count(fail_prob, config.median_constant);
    require_unit_ball_containment(body, config.assume_contains_unit_ball);
    const VolumeRun run = [&](int, RngStream stream) {
        return gaussian_volume_single(body, eps, config, std::move(stream));
    };
    return median_boost(run, fail_prob, rng, config.median_constant, config.workers);
}

std::vector<Vector> sample_gaussian_restricted(const BodySpec& body, double eps, int count,
                                               const AnnealConfig& config, RngStream rng) {
    check_eps(eps);
    if (count < 1) {
        throw InputError("sample count must be at least 1");
    }
    require_unit_ball_containment(body, config.assume_contains_unit_ball);

    const CoolingSchedule sched = schedule_params(body.dim(), eps);
    const std::uint64_t steps = sched.steps(config.budget);
    const auto shared = std::make_shared<const BodySpec>(body);
    const auto start =
        initial_rejection_sample(body, sched.sigma_sq[0], config.max_rejection_trials, rng);

    WalkState chain = anneal_chain(shared, sched, steps, config, start.x, rng, [](int, const WalkState&) {});
    const RestrictedBody final_body(shared, sched.radius_cap(sched.s));

    std::vector<Vector> points;
    points.reserve(static_cast<std::size_t>(count));
    points.push_back(chain.x);
    for (int c = 1; c < count; ++c) {
        advance(chain, final_body, steps, config.lazy, rng);
        points.push_back(chain.x);
    }
    return points;
}

Vector exact_restricted_sample(const BodySpec& body, double sigma_sq, std::uint64_t max_trials,
                               RngStream& rng) {
    if (!(sigma_sq > 0.0)) {
        throw InputError("exact sampler: sigma^2 must be positive");
    }
    if (const auto* box = std::get_if<AxisBox>(&body.shape())) {
        // Coordinates of a Gaussian conditioned on a box are independent.
        const double sigma = std::sqrt(sigma_sq);
        Vector x(body.dim());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            std::uint64_t trials = 0;
            do {
                if (++trials > max_trials) {
                    throw SamplingError("exact sampler: coordinate " + std::to_string(i) +
                                        " exhausted " + std::to_string(max_trials) + " trials");
                }
                x[i] = sigma * rng.normal();
            } while (x[i] < box->lower[i] || x[i] > box->upper[i]);
        }
        return x;
    }
    return initial_rejection_sample(body, sigma_sq, max_trials, rng).x;
}

std::vector<RatioEstimate> oracle_mode_ratios(const BodySpec& body, const CoolingSchedule& schedule,
                                              std::uint64_t samples_per_checkpoint, RngStream rng,
                                              std::uint64_t max_trials) {
    if (samples_per_checkpoint == 0) {
        throw InputError("oracle mode: need at least one sample per checkpoint");
    }
    if (body.dim() != schedule.n) {
        throw InputError("oracle mode: schedule dimension does not match body");
    }
    std::vector<RatioEstimate> out;
    for (int alpha = 1; alpha <= schedule.m; ++alpha) {
        const int d = schedule.source_phase(alpha);
        const int i = schedule.checkpoints[alpha - 1];
        RatioAccumulator acc(schedule.sigma_sq[d], schedule.sigma_sq[i]);
        for (std::uint64_t j = 0; j < samples_per_checkpoint; ++j) {
            acc.add(exact_restricted_sample(body, schedule.sigma_sq[d], max_trials, rng).squaredNorm());
        }
        RatioEstimate est;
        est.alpha = alpha;
        est.source_phase = d;
        est.target_phase = i;
        est.k = acc.count();
        est.sum_y = acc.sum_y();
        est.sum_y_sq = acc.sum_y_sq();
        out.push_back(est);
    }
    return out;
}

}  // namespace gaussvol
