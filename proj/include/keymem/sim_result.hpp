#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace keymem {

/// Coherence profiles captured at one instant. rho41 stays empty for the
/// three-level scheme.
struct Snapshot {
    double t = 0.0;
    std::vector<std::complex<double>> rho21;
    std::vector<std::complex<double>> rho31;
    std::vector<std::complex<double>> rho41;
};

struct SolverDiagnostics {
    double max_trace_defect = 0.0;  // max_z |Tr rho - 1| over the run
    double max_herm_defect = 0.0;   // max_z max_ij |rho_ij - conj(rho_ji)|
    std::size_t total_substeps = 0;
    double wall_seconds = 0.0;
};

/// Probe envelopes on the uniform output grid t_k = k * dt_out, plus any
/// requested coherence snapshots and run diagnostics.
struct SimResult {
    double dt_out = 0.0;
    std::vector<std::complex<double>> input;   // Omega_p(t, 0)
    std::vector<std::complex<double>> output;  // Omega_p(t, L)
    std::vector<Snapshot> snapshots;
    SolverDiagnostics diagnostics;

    double t(std::size_t k) const { return dt_out * static_cast<double>(k); }
    std::size_t samples() const { return output.size(); }
};

}  // namespace keymem
