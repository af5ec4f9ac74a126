#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace keymem {

// Dimensionless unit convention used throughout: time in tau = 1/Gamma,
// rates and Rabi frequencies in Gamma, length in the medium length L.
// Every file header written by the io module carries this string.
inline constexpr const char* kUnitConvention =
    "time:tau rate:Gamma length:L rabi:Gamma";

/// Uniform spatial grid z in [z0, z0 + span].
struct ZGrid {
    double z0 = 0.0;
    double dz = 0.0;
    std::size_t n = 0;  // number of points (n >= 2)

    double span() const { return dz * static_cast<double>(n - 1); }
    double z(std::size_t j) const { return z0 + dz * static_cast<double>(j); }

    static ZGrid over(double z0, double z1, std::size_t points) {
        if (points < 2 || !(z1 > z0))
            throw std::invalid_argument("ZGrid: need at least 2 points and z1 > z0");
        return ZGrid{z0, (z1 - z0) / static_cast<double>(points - 1), points};
    }

    bool same_as(const ZGrid& o, double tol = 1e-12) const {
        return n == o.n && std::abs(z0 - o.z0) <= tol && std::abs(dz - o.dz) <= tol;
    }
};

/// Discretisation of the simulation window: output samples on a uniform
/// t-grid over [0, t_end], medium resolved by z_points over [0, 1].
struct SpaceTimeGrid {
    std::size_t z_points = 1001;  // points across the medium, z in [0, L]
    double t_end = 1.0;           // window length in tau
    double dt_out = 1e-3;         // output/diagnostic sample spacing
    double phase_step = 0.08;     // max radians of local rotation per RK4 substep

    std::size_t t_samples() const {
        return static_cast<std::size_t>(std::llround(t_end / dt_out)) + 1;
    }

    ZGrid medium() const { return ZGrid::over(0.0, 1.0, z_points); }

    void validate() const {
        if (z_points < 2) throw std::invalid_argument("grid: z_points < 2");
        if (!(t_end > 0.0)) throw std::invalid_argument("grid: t_end must be > 0");
        if (!(dt_out > 0.0) || dt_out > t_end)
            throw std::invalid_argument("grid: dt_out must lie in (0, t_end]");
        if (!(phase_step > 0.0) || phase_step > 0.2)
            throw std::invalid_argument(
                "grid: phase_step must lie in (0, 0.2] for RK4 accuracy");
    }
};

}  // namespace keymem
