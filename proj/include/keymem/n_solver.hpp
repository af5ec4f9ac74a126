#pragma once

#include <vector>

#include "keymem/grid.hpp"
#include "keymem/protocol.hpp"
#include "keymem/sim_result.hpp"

namespace keymem {

/// Four-level N-type EIT memory with disordered switching-field encryption.
struct NConfig {
    double optical_depth = 600.0;  // xi
    ProbeSpec probe;                        // narrowband: kappa > 1/Gamma
    std::vector<FieldSchedule> control;     // uniform EIT control, |2><3|
    std::vector<FieldSchedule> switches;    // disordered switch pulses, |2><4|
    double gamma4 = 0.0;                    // |4> decay rate, default long-lived
    SpaceTimeGrid grid;
    double branch_to_g1 = 0.5;
    double branch_to_g2 = 0.5;
    std::vector<double> snapshot_times;
    double max_weak_probe = 0.1;

    void validate() const;
};

SimResult simulate_eit_encrypted(const NConfig& config);

/// Norm defect of the stored excitation rotation: compares
/// |rho21|^2 + |rho41|^2 at time t against |rho21|^2 at the reference time
/// (the snapshot nearest t_ref, normally t_off). Requires snapshots at both
/// times. With gamma4 = 0 the switch pulses rotate the excitation between
/// the two coherences and the residual stays at integrator accuracy.
double spinwave_rotation_check(const SimResult& result, double t_ref, double t);

}  // namespace keymem
