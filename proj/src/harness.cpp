#include "keymem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "keymem/rng.hpp"
#include "keymem/threadpool.hpp"

namespace keymem {

namespace {

std::size_t points_per_sigma(double sigma, double span = 1.0) {
    // >= 10 z-steps per correlation length, and never fewer than 201 points.
    const double needed = 10.0 * span / sigma;
    return std::max<std::size_t>(201, static_cast<std::size_t>(std::ceil(needed)) + 1);
}

struct MeanStderr {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double v = 0.0;
    for (double x : xs) v += (x - r.mean) * (x - r.mean);
    v /= static_cast<double>(xs.size() - 1);
    r.se = std::sqrt(v / static_cast<double>(xs.size()));
    return r;
}

}  // namespace

void LambdaScenario::resolve() {
    if (t_p <= 0.0) t_p = std::max(6.0 * kappa, 0.03);
    if (z_points == 0) z_points = points_per_sigma(sigma);
    if (t_end <= 0.0) t_end = 2.0 * t_i - t_p + 10.0 * kappa + 0.02;
    if (dt_out <= 0.0) dt_out = kappa / 32.0;
    if (!(t_p < t_i))
        throw std::invalid_argument("lambda scenario: probe must enter before t_i");
    if (kappa >= 1.0)
        throw std::invalid_argument(
            "lambda scenario: broadband echo memory needs kappa < 1/Gamma");
}

void EitScenario::resolve() {
    if (t_p <= 0.0)
        t_p = t_off - 0.45 * xi / (control_rabi * control_rabi);
    if (z_points == 0) z_points = points_per_sigma(sigma);
    if (t_end <= 0.0)
        t_end = t_on + 1.5 * xi / (control_rabi * control_rabi) + 4.0 * kappa;
    if (dt_out <= 0.0) dt_out = std::min(0.25, kappa / 40.0);
    if (kappa <= 1.0)
        throw std::invalid_argument(
            "eit scenario: narrowband storage needs kappa > 1/Gamma");
    if (!(t_p > 0.0) || !(t_p < t_off))
        throw std::invalid_argument(
            "eit scenario: probe peak must lie between 0 and t_off");
}

void ExperimentPlan::validate() const {
    if (realizations < 1)
        throw std::invalid_argument("plan: realizations must be >= 1");
    if (attack == AttackMode::shift_sweep) {
        const LambdaScenario& sc = lambda;
        double max_delta = 0.0;
        for (double d : delta_values) max_delta = std::max(max_delta, d);
        const double need = sc.section_offset + max_delta + 1.0;
        if (scheme == Scheme::lambda && sc.master_length < need)
            throw std::invalid_argument(
                "plan: master key too short for the requested shifts "
                "(need alpha >= offset + max delta + L)");
    }
}

namespace {

struct LambdaKeys {
    KeyProfile encrypt;
    KeyProfile decrypt;
};

LambdaKeys make_lambda_keys(const LambdaScenario& sc, std::uint64_t seed,
                            DecryptKind decrypt, double delta,
                            std::uint64_t attack_seed, const ZGrid& medium) {
    CorrelationSpec spec{sc.d_c, sc.sigma};
    LambdaKeys keys;
    if (decrypt == DecryptKind::shifted) {
        const std::size_t master_points = static_cast<std::size_t>(std::ceil(
                                              sc.master_length / medium.dz)) +
                                          1;
        const ZGrid master_grid = ZGrid::over(0.0, sc.master_length, master_points);
        const KeyProfile master = generate_key(master_grid, spec, seed);
        keys.encrypt = section_key(master, sc.section_offset, medium);
        keys.decrypt = shift_key(keys.encrypt, delta);
        return keys;
    }
    keys.encrypt = generate_key(medium, spec, seed);
    switch (decrypt) {
        case DecryptKind::matched:
            keys.decrypt = keys.encrypt;
            break;
        case DecryptKind::independent:
            keys.decrypt = generate_key(medium, spec, attack_seed);
            break;
        case DecryptKind::gradient:
            // Zero-mean linear profile with the same spatial variance D^2.
            keys.decrypt = gradient_key(medium, sc.d_c * std::sqrt(12.0));
            break;
        case DecryptKind::shifted:
            break;
    }
    return keys;
}

}  // namespace

TrialResult run_lambda_trial(const LambdaScenario& scenario, std::uint64_t seed,
                             DecryptKind decrypt, double delta,
                             std::uint64_t attack_seed, bool with_snapshots) {
    LambdaScenario sc = scenario;
    sc.resolve();

    LambdaConfig config;
    config.optical_depth = sc.xi;
    config.probe = ProbeSpec{sc.t_p, sc.kappa, sc.probe_amp};
    config.grid = SpaceTimeGrid{sc.z_points, sc.t_end, sc.dt_out, sc.phase_step};

    const ZGrid medium = config.grid.medium();
    const LambdaKeys keys =
        make_lambda_keys(sc, seed, decrypt, delta, attack_seed, medium);

    const bool same_key = decrypt == DecryptKind::matched ||
                          (decrypt == DecryptKind::shifted && delta == 0.0);
    if (same_key)
        config.control = {build_dem_schedule(keys.encrypt, sc.t_i, sc.t_end)};
    else
        config.control = build_dem_attack_schedules(keys.encrypt, keys.decrypt,
                                                    sc.t_i, sc.t_end);

    if (with_snapshots) {
        const double t_early = sc.t_p + 6.0 * sc.kappa;
        config.snapshot_times = {t_early, 2.0 * sc.t_i - t_early};
    }

    TrialResult trial;
    trial.sim = simulate_dem(config);
    const auto fr =
        fidelity(trial.sim.input, trial.sim.output, trial.sim.dt_out, sc.t_i);
    trial.metrics.fidelity = fr.f;
    trial.metrics.best_delay = fr.t_d;
    trial.metrics.zero_output = fr.zero_output;
    trial.metrics.storage_efficiency =
        storage_efficiency(trial.sim.input, trial.sim.output, trial.sim.dt_out, sc.t_i);
    trial.metrics.chi = confidentiality(
        decrypt == DecryptKind::shifted ? sc.master_length : 1.0, sc.sigma, 1.0);
    return trial;
}

TrialResult run_eit_trial(const EitScenario& scenario, std::uint64_t seed,
                          const EitTrialKind& kind, bool with_snapshots) {
    EitScenario sc = scenario;
    sc.resolve();

    NConfig config;
    config.optical_depth = sc.xi;
    config.probe = ProbeSpec{sc.t_p, sc.kappa, sc.probe_amp};
    config.gamma4 = sc.gamma4;
    config.grid = SpaceTimeGrid{sc.z_points, sc.t_end, sc.dt_out, sc.phase_step};

    const ZGrid medium = config.grid.medium();
    CorrelationSpec spec{sc.d_s, sc.sigma};

    KeyProfile encrypt_key;
    KeyProfile decrypt_base;
    if (kind.decrypt == DecryptKind::shifted) {
        const std::size_t master_points = static_cast<std::size_t>(std::ceil(
                                              sc.master_length / medium.dz)) +
                                          1;
        const ZGrid master_grid = ZGrid::over(0.0, sc.master_length, master_points);
        const KeyProfile master = generate_key(master_grid, spec, seed);
        encrypt_key = section_key(master, sc.section_offset, medium);
        decrypt_base = shift_key(encrypt_key, kind.delta);
    } else {
        encrypt_key = generate_key(medium, spec, seed);
        switch (kind.decrypt) {
            case DecryptKind::matched:
                decrypt_base = encrypt_key;
                break;
            case DecryptKind::independent:
                decrypt_base = generate_key(medium, spec, kind.attack_seed);
                break;
            case DecryptKind::gradient:
                decrypt_base = gradient_key(medium, sc.d_s * std::sqrt(12.0));
                break;
            case DecryptKind::shifted:
                break;
        }
    }
    // Decryption applies the inverted key so the paired gate areas cancel.
    KeyProfile decrypt_key = decrypt_base;
    for (double& v : decrypt_key.samples) v = -v;

    EitWindows windows = sc.windows;
    windows.encrypt_on = kind.encrypt_on;
    windows.decrypt_on = kind.decrypt_on;
    auto schedules = build_eit_schedules(sc.control_rabi, sc.t_off, sc.t_on,
                                         encrypt_key, decrypt_key, windows, sc.ramp);
    config.control = {schedules.front()};
    config.switches.assign(schedules.begin() + 1, schedules.end());

    if (with_snapshots) {
        std::vector<double> times;
        times.push_back(sc.windows.encrypt_start - 5.0);  // settled spin wave
        const auto spread = [&](double a, double b) {
            for (int m = 1; m <= 4; ++m)
                times.push_back(a + (b - a) * static_cast<double>(m) / 5.0);
        };
        spread(sc.windows.encrypt_start, sc.windows.encrypt_end);
        times.push_back(0.5 * (sc.windows.encrypt_end + sc.windows.decrypt_start));
        spread(sc.windows.decrypt_start, sc.windows.decrypt_end);
        times.push_back(sc.windows.decrypt_end + 3.0);
        times.push_back(sc.t_on - 2.0);
        config.snapshot_times = times;
    }

    TrialResult trial;
    trial.sim = simulate_eit_encrypted(config);
    const auto fr =
        fidelity(trial.sim.input, trial.sim.output, trial.sim.dt_out, sc.t_on);
    trial.metrics.fidelity = fr.f;
    trial.metrics.best_delay = fr.t_d;
    trial.metrics.zero_output = fr.zero_output;
    trial.metrics.storage_efficiency = storage_efficiency(
        trial.sim.input, trial.sim.output, trial.sim.dt_out, sc.t_on);
    trial.metrics.chi = confidentiality(
        kind.decrypt == DecryptKind::shifted ? sc.master_length : 1.0, sc.sigma,
        1.0);
    return trial;
}

HeatmapResult run_heatmap(const ExperimentPlan& plan) {
    plan.validate();
    if (plan.scheme != Scheme::lambda)
        throw std::invalid_argument("run_heatmap: lambda scheme only");
    if (plan.xi_values.empty() || plan.strength_values.empty())
        throw std::invalid_argument("run_heatmap: empty parameter grid");

    const std::size_t n_xi = plan.xi_values.size();
    const std::size_t n_dc = plan.strength_values.size();
    const std::size_t n_cells = n_xi * n_dc;
    const std::size_t n_jobs = n_cells * plan.realizations;

    struct Slot {
        double f = 0.0;
        double se = 0.0;
        bool ok = false;
    };
    std::vector<Slot> slots(n_jobs);

    parallel_for(n_jobs, plan.threads, [&](std::size_t job) {
        const std::size_t cell = job / plan.realizations;
        const std::size_t r = job % plan.realizations;
        LambdaScenario sc = plan.lambda;
        sc.xi = plan.xi_values[cell / n_dc];
        sc.d_c = plan.strength_values[cell % n_dc];
        const std::uint64_t seed = derive_seed(plan.master_seed, cell, r);
        try {
            const auto trial = run_lambda_trial(sc, seed, DecryptKind::matched);
            slots[job] = {trial.metrics.fidelity,
                          trial.metrics.storage_efficiency, true};
        } catch (const std::exception&) {
            // Cell failures are recorded (n < realizations), not fatal.
        }
    });

    HeatmapResult result;
    result.n_xi = n_xi;
    result.n_dc = n_dc;
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        std::vector<double> fs, ses;
        for (std::size_t r = 0; r < plan.realizations; ++r) {
            const Slot& s = slots[cell * plan.realizations + r];
            if (!s.ok) continue;
            fs.push_back(s.f);
            ses.push_back(s.se);
        }
        HeatmapCell out;
        out.xi = plan.xi_values[cell / n_dc];
        out.d_c = plan.strength_values[cell % n_dc];
        out.coverage = out.d_c * plan.lambda.kappa;
        const auto f = mean_stderr(fs);
        const auto se = mean_stderr(ses);
        out.mean_f = f.mean;
        out.stderr_f = f.se;
        out.mean_se = se.mean;
        out.stderr_se = se.se;
        out.n = f.n;
        result.cells.push_back(out);
    }
    return result;
}

ShiftSweepResult run_shift_sweep(const ExperimentPlan& plan) {
    plan.validate();
    std::vector<double> deltas = plan.delta_values;
    if (deltas.empty() || deltas.front() != 0.0)
        deltas.insert(deltas.begin(), 0.0);
    const std::vector<double> sigmas =
        plan.sigma_values.empty() ? std::vector<double>{plan.lambda.sigma}
                                  : plan.sigma_values;

    const std::size_t n_jobs = sigmas.size() * deltas.size() * plan.realizations;
    std::vector<double> se_slot(n_jobs, 0.0);

    parallel_for(n_jobs, plan.threads, [&](std::size_t job) {
        const std::size_t per_sigma = deltas.size() * plan.realizations;
        const std::size_t is = job / per_sigma;
        const std::size_t id = (job % per_sigma) / plan.realizations;
        const std::size_t r = job % plan.realizations;
        // The master key is shared across deltas of one (sigma, realization).
        const std::uint64_t seed = derive_seed(plan.master_seed, is, r);
        if (plan.scheme == Scheme::lambda) {
            LambdaScenario sc = plan.lambda;
            sc.sigma = sigmas[is];
            const auto trial =
                run_lambda_trial(sc, seed, DecryptKind::shifted, deltas[id]);
            se_slot[job] = trial.metrics.storage_efficiency;
        } else {
            EitScenario sc = plan.eit;
            sc.sigma = sigmas[is];
            EitTrialKind kind;
            kind.decrypt = DecryptKind::shifted;
            kind.delta = deltas[id];
            const auto trial = run_eit_trial(sc, seed, kind);
            se_slot[job] = trial.metrics.storage_efficiency;
        }
    });

    ShiftSweepResult result;
    for (std::size_t is = 0; is < sigmas.size(); ++is) {
        SweepCurve curve;
        curve.sigma = sigmas[is];
        std::vector<MeanStderr> stats(deltas.size());
        for (std::size_t id = 0; id < deltas.size(); ++id) {
            std::vector<double> ses;
            for (std::size_t r = 0; r < plan.realizations; ++r) {
                const std::size_t job =
                    (is * deltas.size() + id) * plan.realizations + r;
                ses.push_back(se_slot[job]);
            }
            stats[id] = mean_stderr(ses);
        }
        curve.reference_se = stats[0].mean;
        if (!(curve.reference_se > 0.0))
            throw std::runtime_error("run_shift_sweep: zero reference SE");
        for (std::size_t id = 0; id < deltas.size(); ++id) {
            SweepPoint p;
            p.delta = deltas[id];
            p.mean_norm_se = stats[id].mean / curve.reference_se;
            p.stderr_norm_se = stats[id].se / curve.reference_se;
            curve.points.push_back(p);
        }
        // Half width: first crossing of the mean curve below 1/2.
        curve.half_width = deltas.back();
        for (std::size_t id = 1; id < curve.points.size(); ++id) {
            const auto& a = curve.points[id - 1];
            const auto& b = curve.points[id];
            if (b.mean_norm_se < 0.5) {
                const double f =
                    (0.5 - a.mean_norm_se) / (b.mean_norm_se - a.mean_norm_se);
                curve.half_width = a.delta + f * (b.delta - a.delta);
                break;
            }
        }
        curve.tail_norm_se = curve.points.back().mean_norm_se;
        result.curves.push_back(std::move(curve));
    }
    return result;
}

BruteForceReport run_brute_force(const ExperimentPlan& plan) {
    plan.validate();
    if (plan.scheme != Scheme::lambda)
        throw std::invalid_argument("run_brute_force: lambda scheme only");

    const std::uint64_t enc_seed = derive_seed(plan.master_seed, 0, 0);
    const auto correct =
        run_lambda_trial(plan.lambda, enc_seed, DecryptKind::matched);

    BruteForceReport report;
    report.n_keys = plan.n_attack_keys;
    report.correct_se = correct.metrics.storage_efficiency;
    report.threshold = plan.success_threshold * report.correct_se;
    report.norm_se.assign(plan.n_attack_keys, 0.0);

    parallel_for(plan.n_attack_keys, plan.threads, [&](std::size_t i) {
        const std::uint64_t attack_seed = derive_seed(plan.master_seed, 1, i);
        const auto trial = run_lambda_trial(plan.lambda, enc_seed,
                                            DecryptKind::independent, 0.0,
                                            attack_seed);
        report.norm_se[i] =
            trial.metrics.storage_efficiency / report.correct_se;
    });

    for (double v : report.norm_se) {
        report.max_norm_se = std::max(report.max_norm_se, v);
        report.mean_norm_se += v;
        if (v >= plan.success_threshold) ++report.n_success;
    }
    if (!report.norm_se.empty())
        report.mean_norm_se /= static_cast<double>(report.norm_se.size());
    return report;
}

KeytestResult run_keytest_suite(const ExperimentPlan& plan) {
    plan.validate();
    KeytestResult result;
    const std::uint64_t enc_seed = derive_seed(plan.master_seed, 0, 0);
    const std::uint64_t wrong_seed = derive_seed(plan.master_seed, 1, 0);

    if (plan.scheme == Scheme::lambda) {
        auto key1 = run_lambda_trial(plan.lambda, enc_seed, DecryptKind::matched);
        auto key2 = run_lambda_trial(plan.lambda, enc_seed,
                                     DecryptKind::independent, 0.0, wrong_seed);
        auto key3 = run_lambda_trial(plan.lambda, enc_seed, DecryptKind::gradient);
        const double ref = key1.metrics.storage_efficiency;
        auto push = [&](const char* name, TrialResult&& t) {
            t.metrics.normalized_se =
                ref > 0.0 ? t.metrics.storage_efficiency / ref : 0.0;
            KeytestTrace trace;
            trace.name = name;
            trace.sim = std::move(t.sim);
            trace.metrics = t.metrics;
            result.traces.push_back(std::move(trace));
        };
        push("key1", std::move(key1));
        push("key2", std::move(key2));
        push("key3", std::move(key3));
        return result;
    }

    auto baseline = run_eit_trial(plan.eit, enc_seed,
                                  EitTrialKind{false, false, DecryptKind::matched});
    auto key1 = run_eit_trial(plan.eit, enc_seed,
                              EitTrialKind{true, true, DecryptKind::matched});
    auto key2 = run_eit_trial(
        plan.eit, enc_seed,
        EitTrialKind{true, true, DecryptKind::independent, 0.0, wrong_seed});
    auto key3 = run_eit_trial(plan.eit, enc_seed,
                              EitTrialKind{true, true, DecryptKind::gradient});
    auto enc_only = run_eit_trial(plan.eit, enc_seed,
                                  EitTrialKind{true, false, DecryptKind::matched});
    auto dec_only = run_eit_trial(plan.eit, enc_seed,
                                  EitTrialKind{false, true, DecryptKind::matched});

    EitScenario sc = plan.eit;
    sc.resolve();
    const double ref = baseline.metrics.storage_efficiency;
    auto push = [&](const char* name, TrialResult&& t) {
        t.metrics.normalized_se =
            ref > 0.0 ? t.metrics.storage_efficiency / ref : 0.0;
        KeytestTrace trace;
        trace.name = name;
        trace.l2_vs_baseline = envelope_l2_diff(
            t.sim.output, result.traces.front().sim.output, t.sim.dt_out, sc.t_on);
        trace.sim = std::move(t.sim);
        trace.metrics = t.metrics;
        result.traces.push_back(std::move(trace));
    };
    {
        KeytestTrace trace;
        trace.name = "baseline";
        baseline.metrics.normalized_se = 1.0;
        trace.sim = std::move(baseline.sim);
        trace.metrics = baseline.metrics;
        result.traces.push_back(std::move(trace));
    }
    push("key1", std::move(key1));
    push("key2", std::move(key2));
    push("key3", std::move(key3));
    push("encrypt_only", std::move(enc_only));
    push("decrypt_only", std::move(dec_only));
    return result;
}

double envelope_l2_diff(const std::vector<std::complex<double>>& a,
                        const std::vector<std::complex<double>>& b, double dt,
                        double t_start) {
    if (a.size() != b.size())
        throw std::invalid_argument("envelope_l2_diff: size mismatch");
    const auto k0 = static_cast<std::size_t>(std::llround(t_start / dt));
    if (k0 >= a.size())
        throw std::invalid_argument("envelope_l2_diff: t_start outside window");
    double num = 0.0, den = 0.0;
    for (std::size_t k = k0; k < a.size(); ++k) {
        num += std::norm(a[k] - b[k]);
        den += std::norm(b[k]);
    }
    if (den <= 0.0) return num > 0.0 ? 1e300 : 0.0;
    return std::sqrt(num / den);
}

}  // namespace keymem
