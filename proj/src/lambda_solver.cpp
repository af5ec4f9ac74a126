#include "keymem/lambda_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "bloch_engine.hpp"

namespace keymem {

void LambdaConfig::validate() const {
    if (optical_depth < 0.0)
        throw std::invalid_argument("lambda: optical depth must be >= 0");
    probe.validate();
    grid.validate();
    if (probe.amplitude > max_weak_probe)
        throw std::invalid_argument(
            "lambda: probe amplitude outside the weak-probe regime");
    if (std::abs(branch_to_g1 + branch_to_g2 - 1.0) > 1e-12)
        throw std::invalid_argument("lambda: decay branching must sum to 1");
    const double dz = 1.0 / static_cast<double>(grid.z_points - 1);
    for (const auto& sched : control) {
        if (sched.key.samples.size() != grid.z_points)
            throw std::invalid_argument(
                "lambda: control key not sampled on the medium grid");
        if (sched.key.spec) {
            const double sigma = sched.key.spec->correlation_length;
            if (dz > sigma / 10.0 + 1e-15)
                throw std::invalid_argument(
                    "lambda: medium grid too coarse for the key correlation "
                    "length; need z_points >= " +
                    std::to_string(static_cast<int>(std::ceil(10.0 / sigma)) + 1));
        }
    }
}

SimResult simulate_dem(const LambdaConfig& config) {
    config.validate();
    detail::EngineSetup<3> setup;
    setup.eta = 0.5 * config.optical_depth;  // Gamma = 1, L = 1
    setup.gamma = {0.0, 0.0, 1.0};
    setup.branches = {{2, 0, config.branch_to_g1}, {2, 1, config.branch_to_g2}};
    setup.probe = config.probe;
    setup.control = &config.control;
    setup.grid = config.grid;
    setup.snapshot_times = config.snapshot_times;
    detail::MaxwellBlochEngine<3> engine(setup);
    return engine.run();
}

const Snapshot& snapshot_coherences(const SimResult& result, double t) {
    if (result.snapshots.empty())
        throw std::invalid_argument("snapshot_coherences: no snapshots recorded");
    const Snapshot* best = &result.snapshots.front();
    for (const auto& s : result.snapshots)
        if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
    return *best;
}

}  // namespace keymem
