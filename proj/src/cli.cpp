#include "gaussvol/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaussvol/anneal.hpp"
#include "gaussvol/body_io.hpp"
#include "gaussvol/diagnostics.hpp"
#include "gaussvol/errors.hpp"
#include "gaussvol/gaussian.hpp"

namespace gaussvol {
namespace {

using nlohmann::json;

enum class Format { json, csv };

struct RunConfig {
    std::string subcommand;
    std::string body_path;
    double eps = 0.2;
    double fail_prob = 0.1;
    std::optional<std::uint64_t> seed;
    double step_scale = kPracticalStepScale;
    double delta_scale = kPracticalDeltaMultiplier;
    int count = 1;
    std::optional<bool> lazy;
    unsigned workers = 1;
    Format format = Format::json;
    bool assume_contains = false;
    std::uint64_t draws = 1'000'000;
    std::uint64_t points = 200;
    std::uint64_t trials = 1000;
    std::uint64_t samples = 10'000;
};

std::uint64_t resolve_seed(const RunConfig& cfg) {
    if (cfg.seed) {
        return *cfg.seed;
    }
    if (const char* env = std::getenv("GAUSSVOL_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) {
                return v;
            }
        } catch (const std::exception&) {
        }
        throw InputError(std::string("GAUSSVOL_SEED is not an unsigned integer: ") + env);
    }
    return 1;
}

void validate(const RunConfig& cfg) {
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw InputError("--eps must lie in (0, 1)");
    if (!(cfg.fail_prob > 0.0 && cfg.fail_prob < 1.0)) throw InputError("--fail-prob must lie in (0, 1)");
    if (!(cfg.step_scale > 0.0) || !std::isfinite(cfg.step_scale)) throw InputError("--step-scale must be positive");
    if (!(cfg.delta_scale > 0.0) || !std::isfinite(cfg.delta_scale)) throw InputError("--delta-scale must be positive");
    if (cfg.workers < 1) throw InputError("--workers must be at least 1");
    if (cfg.count < 1) throw InputError("--count must be at least 1");
}

AnnealConfig anneal_config(const RunConfig& cfg, bool default_lazy) {
    AnnealConfig config;
    config.budget.constant_scale = cfg.step_scale;
    config.delta_multiplier = cfg.delta_scale;
    config.lazy = cfg.lazy.value_or(default_lazy);
    config.workers = cfg.workers;
    config.assume_contains_unit_ball = cfg.assume_contains;
    return config;
}

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return s.str();
}

json counters_json(const WalkCounters& c) {
    return {{"proposals", c.proposals},
            {"accepted", c.accepted},
            {"out_of_body", c.out_of_body},
            {"filter_rejections", c.filter_rejections},
            {"lazy_holds", c.lazy_holds}};
}

int cmd_volume(const RunConfig& cfg, const BodySpec& body, std::ostream& out) {
    const auto config = anneal_config(cfg, false);
    const std::uint64_t seed = resolve_seed(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const VolumeEstimate est = gaussian_volume(body, cfg.eps, cfg.fail_prob, config, RngStream(seed, 0));
    const auto wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    json phases = json::array();
    for (const auto& p : est.per_phase) {
        phases.push_back({{"alpha", p.alpha},
                          {"source_phase", p.source_phase},
                          {"target_phase", p.target_phase},
                          {"k", p.k},
                          {"W", p.w()},
                          {"second_moment_ratio", p.second_moment_ratio()}});
    }
    if (cfg.format == Format::json) {
        json doc{{"log_measure", est.log_measure},
                 {"measure", est.measure},
                 {"log_integral", est.log_integral},
                 {"eps", cfg.eps},
                 {"fail_prob", cfg.fail_prob},
                 {"seed", seed},
                 {"dim", body.dim()},
                 {"phases", est.schedule.s},
                 {"checkpoints", est.schedule.m},
                 {"samples_per_checkpoint", est.schedule.k},
                 {"steps_per_sample", est.steps_per_sample},
                 {"step_scale", est.step_scale},
                 {"delta_multiplier", est.delta_multiplier},
                 {"lazy", config.lazy},
                 {"runs", est.run_log_measures},
                 {"selected_run", est.selected_run},
                 {"per_phase_summary", phases},
                 {"oracle_calls", est.total_oracle_calls},
                 {"walk", counters_json(est.counters)},
                 {"wall_ms", wall_ms}};
        out << doc.dump() << '\n';
    } else {
        out << "log_measure,measure,log_integral,eps,fail_prob,seed,dim,phases,checkpoints,"
               "samples_per_checkpoint,steps_per_sample,step_scale,delta_multiplier,runs,"
               "selected_run,oracle_calls,wall_ms\n";
        out << num(est.log_measure) << ',' << num(est.measure) << ',' << num(est.log_integral)
            << ',' << num(cfg.eps) << ',' << num(cfg.fail_prob) << ',' << seed << ','
            << body.dim() << ',' << est.schedule.s << ',' << est.schedule.m << ','
            << est.schedule.k << ',' << est.steps_per_sample << ',' << num(est.step_scale) << ','
            << num(est.delta_multiplier) << ',' << est.run_log_measures.size() << ','
            << est.selected_run << ',' << est.total_oracle_calls << ',' << num(wall_ms) << '\n';
    }
    return kExitOk;
}

int cmd_sample(const RunConfig& cfg, const BodySpec& body, std::ostream& out) {
    const auto config = anneal_config(cfg, false);
    const auto points =
        sample_gaussian_restricted(body, cfg.eps, cfg.count, config, RngStream(resolve_seed(cfg), 0));
    for (const auto& p : points) {
        if (cfg.format == Format::json) {
            json row = json::array();
            for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(p[i]);
            out << row.dump() << '\n';
        } else {
            for (Eigen::Index i = 0; i < p.size(); ++i) {
                out << (i ? "," : "") << num(p[i]);
            }
            out << '\n';
        }
    }
    return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, const BodySpec& body, std::ostream& out) {
    RngStream rng(resolve_seed(cfg), 0);
    const auto mc = monte_carlo_gaussian_measure(body, cfg.draws, rng);
    json doc{{"dim", body.dim()},
             {"monte_carlo", {{"estimate", mc.estimate}, {"stderr", mc.standard_error}, {"draws", mc.draws}}}};
    if (has_analytic_oracle(body)) {
        doc["analytic"] = true;
        doc["measure"] = exact_gaussian_measure(body);
        doc["log_measure"] = log_exact_gaussian_measure(body);
    } else {
        doc["analytic"] = false;
        doc["notice"] = "no analytic oracle for this body; reporting the Monte Carlo estimate only";
    }
    if (cfg.format == Format::json) {
        out << doc.dump() << '\n';
    } else {
        out << "analytic,measure,mc_estimate,mc_stderr,draws\n";
        out << (doc["analytic"].get<bool>() ? "true" : "false") << ','
            << (doc.contains("measure") ? num(doc["measure"].get<double>()) : std::string()) << ','
            << num(mc.estimate) << ',' << num(mc.standard_error) << ',' << mc.draws << '\n';
    }
    return kExitOk;
}

int cmd_diagnose(const RunConfig& cfg, const BodySpec& body, std::ostream& out) {
    const int n = body.dim();
    RngStream rng(resolve_seed(cfg), 0);
    const auto containment = verify_unit_ball_containment(body);
    json reports = json::array();
    reports.push_back({{"report", "containment"}, {"result", to_string(containment)}});
    if (n >= 2) {
        reports.push_back({{"report", "warmness_factor"},
                           {"dim", n},
                           {"factor", consecutive_warmness_factor(n)},
                           {"limit", std::sqrt(std::exp(1.0))}});
    }
    if (containment != Containment::verified && !cfg.assume_contains) {
        out << json{{"reports", reports}}.dump() << '\n';
        throw InputError("diagnose: the walk diagnostics need a body containing the unit ball");
    }
    if (n < 2) {
        throw InputError("diagnose: dimension must be at least 2");
    }

    const double root_n = std::sqrt(static_cast<double>(n));
    const auto shared = std::make_shared<const BodySpec>(body);
    const RestrictedBody capped(shared, 4.0 * root_n);
    const double delta = 1.0 / (4096.0 * root_n);

    const auto lc = local_conductance(capped, Vector::Zero(n), delta, cfg.trials, rng);
    reports.push_back({{"report", "local_conductance"},
                       {"point", "origin"},
                       {"delta", lc.delta},
                       {"trials", lc.trials},
                       {"ell_hat", lc.ell_hat},
                       {"stderr", lc.standard_error}});

    const auto avg = average_local_conductance(capped, 1.0, delta, cfg.points, cfg.trials, rng);
    reports.push_back({{"report", "average_local_conductance"},
                       {"sigma_sq", 1.0},
                       {"delta", avg.delta},
                       {"points", avg.points},
                       {"trials_per_point", avg.trials_per_point},
                       {"lambda_hat", avg.lambda_hat},
                       {"stderr", avg.standard_error},
                       {"min_ell", avg.min_ell},
                       {"at_least_half", avg.lambda_hat >= 0.5}});

    const auto sched = schedule_params(n, cfg.eps);
    json pairs = json::array();
    for (int alpha = 1; alpha <= sched.m; ++alpha) {
        const int d = sched.source_phase(alpha);
        const int i = sched.checkpoints[alpha - 1];
        const auto sm = ratio_second_moment(body, sched.sigma_sq[d], sched.sigma_sq[i], cfg.samples, rng);
        pairs.push_back({{"alpha", alpha},
                         {"source_phase", d},
                         {"target_phase", i},
                         {"ratio", sm.ratio},
                         {"whole_space", sm.whole_space},
                         {"bound", sm.bound}});
    }
    reports.push_back({{"report", "ratio_second_moment"}, {"samples", cfg.samples}, {"pairs", pairs}});

    // Mixing probe: lazy by default, as in the mixing-time analysis.
    const auto config = anneal_config(cfg, true);
    WalkState walk(Vector::Zero(n), 1.0, config.delta_multiplier * delta);
    const std::uint64_t steps = sched.steps(config.budget) * 100;
    advance(walk, capped, steps, config.lazy, rng);
    const auto& c = walk.counters;
    const double moves = static_cast<double>(c.proposals - c.lazy_holds);
    reports.push_back({{"report", "walk"},
                       {"lazy", config.lazy},
                       {"delta", walk.delta},
                       {"steps", steps},
                       {"counters", counters_json(c)},
                       {"acceptance_rate", moves > 0 ? c.accepted / moves : 0.0},
                       {"wasted_rate", moves > 0 ? c.out_of_body / moves : 0.0}});

    out << json{{"reports", reports}}.dump() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian measure of convex bodies by annealed ball walks", "gaussvol"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string format = "json";
    std::string lazy_text;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--body", cfg.body_path, "Body JSON file")->required();
        sub->add_option("--seed", cfg.seed, "Random seed (falls back to GAUSSVOL_SEED)");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--assume-contains-unit-ball", cfg.assume_contains,
                      "Skip the unit-ball containment check");
    };
    auto add_walk = [&](CLI::App* sub) {
        sub->add_option("--eps", cfg.eps, "Target relative error");
        sub->add_option("--step-scale", cfg.step_scale, "Constant in the per-sample step budget");
        sub->add_option("--delta-scale", cfg.delta_scale,
                        "Multiplier on the sigma/(4096 sqrt n) proposal radius");
        sub->add_option("--lazy", lazy_text, "Lazy walk (true/false)")
            ->check(CLI::IsMember({"true", "false", "1", "0"}));
        sub->add_option("--workers", cfg.workers, "Concurrent median-boost runs");
    };

    auto* volume = app.add_subcommand("volume", "Estimate the standard Gaussian measure of the body");
    add_common(volume);
    add_walk(volume);
    volume->add_option("--fail-prob", cfg.fail_prob, "Overall failure probability");

    auto* sample = app.add_subcommand("sample", "Sample N(0, I) restricted to the body");
    add_common(sample);
    add_walk(sample);
    sample->add_option("--count", cfg.count, "Number of points");

    auto* oracle = app.add_subcommand("oracle", "Analytic and brute-force Monte Carlo measure");
    add_common(oracle);
    oracle->add_option("--draws", cfg.draws, "Monte Carlo draws");

    auto* diagnose = app.add_subcommand("diagnose", "Conductance, warmness, and variance diagnostics");
    add_common(diagnose);
    add_walk(diagnose);
    diagnose->add_option("--points", cfg.points, "Sample points for average local conductance");
    diagnose->add_option("--trials", cfg.trials, "Proposal trials per point");
    diagnose->add_option("--samples", cfg.samples, "Samples per checkpoint pair");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    try {
        cfg.format = format == "csv" ? Format::csv : Format::json;
        if (!lazy_text.empty()) {
            cfg.lazy = lazy_text == "true" || lazy_text == "1";
        }
        validate(cfg);
        const BodySpec body = load_body(cfg.body_path);
        if (volume->parsed()) return cmd_volume(cfg, body, out);
        if (sample->parsed()) return cmd_sample(cfg, body, out);
        if (oracle->parsed()) return cmd_oracle(cfg, body, out);
        return cmd_diagnose(cfg, body, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace gaussvol
