#pragma once

#include <vector>

#include "keymem/grid.hpp"
#include "keymem/protocol.hpp"
#include "keymem/sim_result.hpp"

namespace keymem {

/// Three-level Lambda-type disordered echo memory.
struct LambdaConfig {
    double optical_depth = 600.0;  // xi
    ProbeSpec probe;
    std::vector<FieldSchedule> control;  // Omega_c(t,z) = sum of s(t) K(z)
    SpaceTimeGrid grid;
    // |3> decay branching into |1> and |2>; fractions sum to 1.
    double branch_to_g1 = 0.5;
    double branch_to_g2 = 0.5;
    std::vector<double> snapshot_times;
    double max_weak_probe = 0.1;  // pre-condition on the weak-probe regime

    void validate() const;
};

/// Integrate the Lambda-type Maxwell-Bloch system over the configured
/// window and return the output envelope at z = L plus any snapshots.
SimResult simulate_dem(const LambdaConfig& config);

/// Coherence profiles (rho21, rho31) from the snapshot taken nearest to t.
const Snapshot& snapshot_coherences(const SimResult& result, double t);

}  // namespace keymem
