#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gaussvol/errors.hpp"
#include "gaussvol/gaussian.hpp"
#include "gaussvol/walk.hpp"

using namespace gaussvol;

namespace {

// Mean and batch-means standard error of a correlated series.
struct BatchMean {
    double mean;
    double stderr_;
};

BatchMean batch_mean(const std::vector<double>& xs, std::size_t batches = 50) {
    const std::size_t per = xs.size() / batches;
    std::vector<double> means;
    double total = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t j = 0; j < per; ++j) s += xs[b * per + j];
        means.push_back(s / per);
        total += s / per;
    }
    const double mean = total / batches;
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= (batches - 1);
    return {mean, std::sqrt(var / batches)};
}

}  // namespace

TEST_CASE("uniform_in_ball: support and radial law") {
    RngStream rng(1, 0);
    const int draws = 100'000;
    int inside_half = 0;
    for (int t = 0; t < draws; ++t) {
        const Vector v = uniform_in_ball(3, 0.7, rng);
        CHECK(v.norm() <= 0.7 * (1.0 + 1e-15));
        if (v.norm() <= 0.35) ++inside_half;
    }
    // P(‖v‖ ≤ δ/2) = 2^{-3}
    const double p = 0.125;
    const double se = std::sqrt(p * (1.0 - p) / draws);
    CHECK(std::abs(static_cast<double>(inside_half) / draws - p) <= 3.0 * se);
    CHECK_THROWS_AS(uniform_in_ball(3, 0.0, rng), InputError);
}

TEST_CASE("uniform_in_ball: reproducible per stream") {
    RngStream a(99, 4);
    RngStream b(99, 4);
    RngStream c(99, 5);
    for (int t = 0; t < 10; ++t) {
        const Vector va = uniform_in_ball(5, 1.0, a);
        const Vector vb = uniform_in_ball(5, 1.0, b);
        const Vector vc = uniform_in_ball(5, 1.0, c);
        CHECK(va == vb);
        CHECK(va != vc);
    }
}

TEST_CASE("gaussian_vector: moments and determinism") {
    RngStream rng(2, 0);
    const int draws = 1'000'000;
    const double sigma = 1.7;
    double sum0 = 0.0;
    double sum_norm = 0.0;
    double sum_norm_sq = 0.0;
    for (int t = 0; t < draws; ++t) {
        const Vector x = gaussian_vector(3, sigma, rng);
        sum0 += x[0];
        sum_norm += x.squaredNorm();
        sum_norm_sq += x.squaredNorm() * x.squaredNorm();
    }
    CHECK(std::abs(sum0 / draws) <= 4.0 * sigma / 1000.0);
    const double mean = sum_norm / draws;
    const double var = sum_norm_sq / draws - mean * mean;
    CHECK(std::abs(mean - 3.0 * sigma * sigma) <= 3.0 * std::sqrt(var / draws));

    RngStream a(8, 1), b(8, 1);
    CHECK(gaussian_vector(4, 1.0, a) == gaussian_vector(4, 1.0, b));
    CHECK_THROWS_AS(gaussian_vector(4, 0.0, a), InputError);
}

TEST_CASE("ball_walk_step: out-of-body proposal leaves the chain in place") {
    RngStream rng(3, 0);
    const auto body = restrict_to_ball(BodySpec::ball(2, 10.0), 1e-12);
    WalkState state(Vector::Zero(2), 1.0, 1.0);
    ball_walk_step(state, body, false, rng);
    CHECK(state.x == Vector::Zero(2));
    CHECK(state.counters.out_of_body == 1);
    CHECK(state.counters.proposals == 1);
}

TEST_CASE("ball_walk_step: filter only rejects moves away from the origin") {
    RngStream rng(4, 0);
    const auto body = restrict_to_ball(BodySpec::cube(3, 1.0), 10.0);
    WalkState state(Vector::Zero(3), 0.2, 0.5);
    for (int t = 0; t < 20000; ++t) {
        const double before = state.x_norm_sq;
        const auto rejected = state.counters.filter_rejections;
        ball_walk_step(state, body, false, rng);
        if (state.counters.filter_rejections != rejected) {
            CHECK(state.scratch.squaredNorm() > before);
        }
        CHECK(state.counters.balanced());
        CHECK(body.contains(state.x));
        CHECK(state.x_norm_sq == doctest::Approx(state.x.squaredNorm()));
    }
    CHECK(state.counters.filter_rejections > 0);
    CHECK(state.counters.out_of_body > 0);
}

TEST_CASE("ball_walk_step: lazy flag holds about half the time") {
    RngStream rng(5, 0);
    const auto body = restrict_to_ball(BodySpec::cube(2, 1.0), 10.0);
    WalkState state(Vector::Zero(2), 1.0, 0.3);
    const int steps = 100'000;
    for (int t = 0; t < steps; ++t) ball_walk_step(state, body, true, rng);
    CHECK(state.counters.balanced());
    CHECK(std::abs(static_cast<double>(state.counters.lazy_holds) / steps - 0.5) <=
          3.0 * std::sqrt(0.25 / steps));
}

TEST_CASE("ball walk: unconstrained stationary second moment is n sigma^2") {
    RngStream rng(6, 0);
    const int n = 4;
    const double s2 = 0.8;
    const auto body = restrict_to_ball(BodySpec::ball(n, 1e6), 1e6);
    WalkState state(Vector::Zero(n), s2, 1.5);
    advance(state, body, 5000, false, rng);
    std::vector<double> norms;
    for (int t = 0; t < 2'000'000; ++t) {
        ball_walk_step(state, body, false, rng);
        norms.push_back(state.x_norm_sq);
    }
    const auto bm = batch_mean(norms);
    CHECK(std::abs(bm.mean - n * s2) <= 3.0 * bm.stderr_);
}

TEST_CASE("run_sampler") {
    RngStream rng(7, 0);
    const auto body = restrict_to_ball(BodySpec::cube(2, 1.0), 8.0);
    const Vector x0 = Vector::Constant(2, 0.25);

    const auto idle = run_sampler(body, 1.0, x0, 0, 0.1, false, rng);
    CHECK(idle.x == x0);
    CHECK(idle.counters.proposals == 0);

    const auto moved = run_sampler(body, 1.0, x0, 1234, 0.1, true, rng);
    CHECK(moved.counters.proposals == 1234);
    CHECK(moved.counters.balanced());
    CHECK(body.contains(moved.x));

    CHECK_THROWS_AS(run_sampler(body, 1.0, Vector::Constant(2, 2.0), 10, 0.1, false, rng),
                    InputError);
}

TEST_CASE("run_sampler: symmetric body and target give P(x1 > 0) = 1/2") {
    RngStream rng(8, 0);
    const auto body = restrict_to_ball(BodySpec::cube(2, 1.0), 8.0);
    WalkState state(Vector::Zero(2), 1.0, 0.8);
    std::vector<double> positive;
    for (int t = 0; t < 100'000; ++t) {
        ball_walk_step(state, body, false, rng);
        positive.push_back(state.x[0] > 0.0 ? 1.0 : 0.0);
    }
    const auto bm = batch_mean(positive);
    CHECK(std::abs(bm.mean - 0.5) <= 3.0 * bm.stderr_);
}

TEST_CASE("property: reproducible trajectories") {
    const auto body = restrict_to_ball(BodySpec::cube(3, 1.0), 8.0);
    RngStream a(42, 3), b(42, 3);
    const auto ra = run_sampler(body, 0.5, Vector::Zero(3), 5000, 0.2, true, a);
    const auto rb = run_sampler(body, 0.5, Vector::Zero(3), 5000, 0.2, true, b);
    CHECK(ra.x == rb.x);
    CHECK(ra.counters.accepted == rb.counters.accepted);
}

TEST_CASE("initial_rejection_sample") {
    RngStream rng(9, 0);
    const auto huge = BodySpec::ball(6, 1e6);
    CHECK(initial_rejection_sample(huge, 0.3, 10, rng).trials == 1);

    const auto unit = BodySpec::ball(6, 1.0);
    for (int t = 0; t < 200; ++t) {
        CHECK(unit.contains(initial_rejection_sample(unit, 0.1, 1000, rng).x));
    }
    CHECK_THROWS_AS(initial_rejection_sample(BodySpec::ball(Vector::Constant(2, 50.0), 1.0), 1.0, 1000, rng),
                    SamplingError);
}

TEST_CASE("initial_rejection_sample: starting-distribution acceptance") {
    const int n = 10;
    const double eps = 0.2;
    const int trials = 10'000;
    const auto unit = BodySpec::ball(n, 1.0);

    // Variance 1/(n + √(8n ln(1/ε))) keeps all but an ε-fraction inside Bₙ.
    {
        RngStream rng(10, 0);
        const double s2 = 1.0 / (n + std::sqrt(8.0 * n * std::log(1.0 / eps)));
        std::uint64_t used = 0;
        for (int t = 0; t < 1000; ++t) used += initial_rejection_sample(unit, s2, 1000, rng).trials;
        CHECK(1000.0 / used >= 1.0 - eps);
    }
    // The schedule's σ₀² is twice that variance; its acceptance is the
    // chi-square CDF at 1/σ₀².
    {
        RngStream rng(11, 0);
        const double s2 = schedule_params(n, eps).sigma_sq[0];
        const double p = boost::math::cdf(boost::math::chi_squared(n), 1.0 / s2);
        std::uint64_t used = 0;
        for (int t = 0; t < trials; ++t) used += initial_rejection_sample(unit, s2, 1000, rng).trials;
        const double rate = static_cast<double>(trials) / used;
        CHECK(std::abs(rate - p) <= 4.0 * std::sqrt(p * (1.0 - p) / used));
    }
}

TEST_CASE("speedy_step") {
    RngStream rng(12, 0);
    const auto body = restrict_to_ball(BodySpec::cube(2, 1.0), 8.0);

    // Deep inside: every draw lands.
    WalkState deep(Vector::Zero(2), 1.0, 0.01);
    for (int t = 0; t < 100; ++t) {
        deep.x.setZero();
        deep.x_norm_sq = 0.0;
        CHECK(speedy_step(deep, body, rng) == 1);
    }
    CHECK(deep.counters.balanced());

    WalkState stuck(Vector::Zero(2), 1.0, 1.0);
    const auto needle = restrict_to_ball(BodySpec::cube(2, 1.0), 1e-9);
    CHECK_THROWS_AS(speedy_step(stuck, needle, rng, 1000), SamplingError);
}

TEST_CASE("speedy walk: filter acceptance is at least 1/e near the origin") {
    // ‖x‖ ≤ 4σ√n and δ ≤ σ/(8√n) bound the filter rejection rate by 1 − 1/e.
    RngStream rng(13, 0);
    const int n = 5;
    const double sigma = 0.6;
    const double cap = 4.0 * sigma * std::sqrt(static_cast<double>(n));
    const auto body = restrict_to_ball(BodySpec::cube(n, 100.0), cap);
    Vector x = Vector::Zero(n);
    x[0] = cap * 0.999;
    WalkState state(x, sigma * sigma, sigma / (8.0 * std::sqrt(static_cast<double>(n))));
    const int steps = 20000;
    for (int t = 0; t < steps; ++t) {
        state.x = x;
        state.x_norm_sq = x.squaredNorm();
        speedy_step(state, body, rng);
    }
    const double reject = static_cast<double>(state.counters.filter_rejections) / steps;
    CHECK(reject <= 1.0 - std::exp(-1.0));
}

TEST_CASE("speedy walk: stationary density is proportional to l(x) f(x)") {
    // 2-D half-disc {x1 ≤ 0} ∩ ball(2) with a large step: ℓ dips near the
    // boundary, so the speedy chain under-weights the strip next to the flat face.
    RngStream rng(14, 0);
    const auto inner = BodySpec::intersection(
        {BodySpec::halfspace((Vector(2) << 1.0, 0.0).finished(), 0.0), BodySpec::ball(2, 2.0)});
    const auto body = restrict_to_ball(inner, 2.0);
    const double delta = 0.8;
    const double s2 = 1.0;

    // Oracle: midpoint-grid integration of ℓ(x)f(x), ℓ by Monte Carlo per node.
    auto lens = [&](const Vector& p) {
        RngStream local(1000, static_cast<std::uint64_t>(std::llround(1e6 * (p[0] + 3) + 1e3 * (p[1] + 3))));
        int hit = 0;
        const int trials = 4000;
        Vector y(2);
        for (int t = 0; t < trials; ++t) {
            fill_uniform_in_ball(y, delta, local);
            y += p;
            if (body.contains(y)) ++hit;
        }
        return static_cast<double>(hit) / trials;
    };
    const double h = 0.05;
    double num = 0.0, den = 0.0, num_f = 0.0, den_f = 0.0;
    for (double a = -2.0 + h / 2; a < 0.0; a += h) {
        for (double b = -2.0 + h / 2; b < 2.0; b += h) {
            Vector p(2);
            p << a, b;
            if (!body.contains(p)) continue;
            const double f = std::exp(-p.squaredNorm() / (2.0 * s2));
            const double w = lens(p) * f;
            den += w;
            den_f += f;
            if (a > -0.3) {
                num += w;
                num_f += f;
            }
        }
    }
    const double expected = num / den;
    const double f_only = num_f / den_f;

    WalkState state(Vector::Constant(2, -0.5), s2, delta);
    std::vector<double> in_strip;
    for (int t = 0; t < 400'000; ++t) {
        speedy_step(state, body, rng);
        in_strip.push_back(state.x[0] > -0.3 ? 1.0 : 0.0);
    }
    const auto bm = batch_mean(in_strip);
    CHECK(std::abs(bm.mean - expected) <= 3.0 * bm.stderr_);
    // ℓ matters: the plain-f value is far outside the error band.
    CHECK(std::abs(f_only - expected) > 10.0 * bm.stderr_);
}
