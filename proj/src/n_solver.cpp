#include "keymem/n_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "bloch_engine.hpp"
#include "keymem/lambda_solver.hpp"

namespace keymem {

void NConfig::validate() const {
    if (optical_depth < 0.0)
        throw std::invalid_argument("n_solver: optical depth must be >= 0");
    probe.validate();
    grid.validate();
    if (probe.amplitude > max_weak_probe)
        throw std::invalid_argument(
            "n_solver: probe amplitude outside the weak-probe regime");
    if (probe.duration <= 1.0)
        throw std::invalid_argument(
            "n_solver: EIT storage needs a narrowband probe (kappa > 1/Gamma)");
    if (gamma4 < 0.0)
        throw std::invalid_argument("n_solver: gamma4 must be >= 0");
    if (std::abs(branch_to_g1 + branch_to_g2 - 1.0) > 1e-12)
        throw std::invalid_argument("n_solver: decay branching must sum to 1");
    const double dz = 1.0 / static_cast<double>(grid.z_points - 1);
    auto check_keys = [&](const std::vector<FieldSchedule>& list, const char* what) {
        for (const auto& sched : list) {
            if (sched.key.samples.size() != grid.z_points)
                throw std::invalid_argument(std::string("n_solver: ") + what +
                                            " key not sampled on the medium grid");
            if (sched.key.spec &&
                dz > sched.key.spec->correlation_length / 10.0 + 1e-15)
                throw std::invalid_argument(
                    "n_solver: medium grid too coarse for the key correlation "
                    "length");
        }
    };
    check_keys(control, "control");
    check_keys(switches, "switch");
}

SimResult simulate_eit_encrypted(const NConfig& config) {
    config.validate();
    detail::EngineSetup<4> setup;
    setup.eta = 0.5 * config.optical_depth;
    setup.gamma = {0.0, 0.0, 1.0, config.gamma4};
    setup.branches = {{2, 0, config.branch_to_g1}, {2, 1, config.branch_to_g2}};
    if (config.gamma4 > 0.0) setup.branches.push_back({3, 1, 1.0});
    setup.probe = config.probe;
    setup.control = &config.control;
    setup.switches = &config.switches;
    setup.grid = config.grid;
    setup.snapshot_times = config.snapshot_times;
    detail::MaxwellBlochEngine<4> engine(setup);
    return engine.run();
}

double spinwave_rotation_check(const SimResult& result, double t_ref, double t) {
    const Snapshot& ref = snapshot_coherences(result, t_ref);
    const Snapshot& cur = snapshot_coherences(result, t);
    if (cur.rho41.empty() || ref.rho21.size() != cur.rho21.size())
        throw std::invalid_argument(
            "spinwave_rotation_check: need four-level snapshots on one grid");
    double residual = 0.0;
    for (std::size_t j = 0; j < cur.rho21.size(); ++j) {
        const double now = std::norm(cur.rho21[j]) + std::norm(cur.rho41[j]);
        const double then = std::norm(ref.rho21[j]) +
                            (ref.rho41.empty() ? 0.0 : std::norm(ref.rho41[j]));
        residual = std::max(residual, std::abs(now - then));
    }
    return residual;
}

}  // namespace keymem
