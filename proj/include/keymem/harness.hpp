#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "keymem/lambda_solver.hpp"
#include "keymem/metrics.hpp"
#include "keymem/n_solver.hpp"

namespace keymem {

enum class Scheme { lambda, n };
enum class AttackMode { none, wrong_key, gradient_key, shift_sweep, brute_force };

/// Scalar description of one Lambda-type echo trial; grids and schedules
/// are derived from it. Fields left at 0 are auto-resolved.
struct LambdaScenario {
    double xi = 600.0;
    double d_c = 1000.0;   // disorder strength, Gamma
    double sigma = 0.01;   // correlation length, L
    double kappa = 5e-3;   // probe duration, tau
    double t_i = 0.22;     // inversion instant, tau
    double t_p = 0.0;      // probe peak; 0 -> max(6 kappa, 0.03)
    double probe_amp = 0.01;
    std::size_t z_points = 0;  // 0 -> 10 points per sigma across the medium
    double t_end = 0.0;        // 0 -> 2 t_i - t_p + 10 kappa + 0.02
    double dt_out = 0.0;       // 0 -> kappa / 32
    double phase_step = 0.08;
    double master_length = 1.5;    // alpha, for sectioned/shifted keys
    double section_offset = 0.25;  // encryption section position in the master

    void resolve();  // fill the auto fields; validates afterwards
};

/// Scalar description of one EIT storage trial on the N-type scheme.
struct EitScenario {
    double xi = 600.0;
    double control_rabi = 5.0;  // Omega_c0, Gamma
    double d_s = 30.0;          // switch disorder strength, Gamma
    double sigma = 0.01;
    double kappa = 10.0;
    double t_p = 0.0;  // 0 -> t_off - 0.45 * xi / control_rabi^2
    double probe_amp = 0.01;
    double t_off = 50.0;
    double t_on = 120.0;
    EitWindows windows;
    double ramp = 1.0;
    double gamma4 = 0.0;
    std::size_t z_points = 0;
    double t_end = 0.0;  // 0 -> t_on + 1.5 * xi / control_rabi^2 + 4 kappa
    double dt_out = 0.0;  // 0 -> 0.25
    double phase_step = 0.02;
    double master_length = 1.5;
    double section_offset = 0.25;

    void resolve();
};

/// Plan for an ensemble experiment; which axes are used depends on the
/// operation it is fed to.
struct ExperimentPlan {
    Scheme scheme = Scheme::lambda;
    AttackMode attack = AttackMode::none;
    LambdaScenario lambda;
    EitScenario eit;
    std::vector<double> xi_values;        // heatmap
    std::vector<double> strength_values;  // heatmap, D_c
    std::vector<double> sigma_values;     // shift sweep
    std::vector<double> delta_values;     // shift sweep
    std::size_t realizations = 20;
    std::size_t n_attack_keys = 100;
    double success_threshold = 0.5;  // fraction of the correct-key SE
    std::uint64_t master_seed = 1;
    unsigned threads = 1;
    std::string output_dir;

    void validate() const;
};

/// How the retrieval key is chosen relative to the encryption key.
enum class DecryptKind { matched, independent, gradient, shifted };

/// One complete Lambda trial: generate the encryption key from `seed`,
/// build the control schedule with the requested retrieval key, run the
/// solver and attach metrics. `delta` applies to DecryptKind::shifted;
/// `attack_seed` to DecryptKind::independent.
struct TrialResult {
    SimResult sim;
    MetricsBundle metrics;
};

TrialResult run_lambda_trial(const LambdaScenario& scenario, std::uint64_t seed,
                             DecryptKind decrypt, double delta = 0.0,
                             std::uint64_t attack_seed = 0,
                             bool with_snapshots = false);

/// One EIT trial. Baseline = both switch windows disabled.
struct EitTrialKind {
    bool encrypt_on = true;
    bool decrypt_on = true;
    DecryptKind decrypt = DecryptKind::matched;
    double delta = 0.0;
    std::uint64_t attack_seed = 0;
};

TrialResult run_eit_trial(const EitScenario& scenario, std::uint64_t seed,
                          const EitTrialKind& kind, bool with_snapshots = false);

/// Mean fidelity over the (xi, D_c) grid.
struct HeatmapCell {
    double xi = 0.0;
    double d_c = 0.0;
    double coverage = 0.0;  // D_c * kappa
    double mean_f = 0.0;
    double stderr_f = 0.0;
    double mean_se = 0.0;
    double stderr_se = 0.0;
    std::size_t n = 0;
};

struct HeatmapResult {
    std::vector<HeatmapCell> cells;  // row-major over (xi, D_c)
    std::size_t n_xi = 0;
    std::size_t n_dc = 0;
};

HeatmapResult run_heatmap(const ExperimentPlan& plan);

/// Normalized storage efficiency against the key shift delta, per sigma.
struct SweepPoint {
    double delta = 0.0;
    double mean_norm_se = 0.0;
    double stderr_norm_se = 0.0;
};

struct SweepCurve {
    double sigma = 0.0;
    double reference_se = 0.0;  // ensemble-mean SE at delta = 0
    std::vector<SweepPoint> points;
    double half_width = 0.0;  // delta at half maximum of the mean curve
    double tail_norm_se = 0.0;  // mean normalized SE at the largest delta
};

struct ShiftSweepResult {
    std::vector<SweepCurve> curves;
};

ShiftSweepResult run_shift_sweep(const ExperimentPlan& plan);

/// Brute-force attack: n fresh random keys against one fixed encryption.
struct BruteForceReport {
    std::size_t n_keys = 0;
    double correct_se = 0.0;
    double threshold = 0.0;  // absolute SE threshold used
    std::size_t n_success = 0;
    double max_norm_se = 0.0;
    double mean_norm_se = 0.0;
    std::vector<double> norm_se;  // per attack key
};

BruteForceReport run_brute_force(const ExperimentPlan& plan);

/// Correct-key / wrong-key / gradient-key traces for one scenario,
/// and for the N scheme additionally baseline / encrypt-only / decrypt-only.
struct KeytestTrace {
    std::string name;
    SimResult sim;
    MetricsBundle metrics;
    double l2_vs_baseline = 0.0;  // N scheme: retrieval-window L2 distance
};

struct KeytestResult {
    std::vector<KeytestTrace> traces;
};

KeytestResult run_keytest_suite(const ExperimentPlan& plan);

/// Relative L2 distance ||a - b|| / ||b|| over t >= t_start.
double envelope_l2_diff(const std::vector<std::complex<double>>& a,
                        const std::vector<std::complex<double>>& b, double dt,
                        double t_start);

}  // namespace keymem
