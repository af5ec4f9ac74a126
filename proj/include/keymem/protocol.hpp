#pragma once

#include <string>
#include <vector>

#include "keymem/disorder.hpp"
#include "keymem/grid.hpp"

namespace keymem {

/// Temporal gate s(t) of a control/switching schedule, |s| <= 1.
/// Kinds:
///   dem_step      +1 for t < t_i, -1 for t >= t_i (abrupt inversion)
///   constant      fixed level on [t0, t1), 0 outside
///   tanh_pulse    flat-top 0.5*[tanh((t-t0)/w) - tanh((t-t1)/w)]
///   onoff         1 - tanh_pulse(t0, t1, w)  (control off/on gating)
///   zero          identically 0
struct Gate {
    enum class Kind { dem_step, constant, tanh_pulse, onoff, zero };
    Kind kind = Kind::zero;
    double t0 = 0.0;
    double t1 = 0.0;
    double level = 1.0;  // constant gates only
    double ramp = 1.0;   // tanh width, in tau

    double operator()(double t) const;

    /// Times where the gate is non-smooth; the integrator and the
    /// quadrature both align segment boundaries with these.
    std::vector<double> breakpoints() const;

    /// Exact-within-segment trapezoidal cumulative integral of s on the
    /// given uniform t-grid: returns I(t_k) = integral_0^{t_k} s(t') dt'.
    /// Discontinuities contribute their two one-sided values, so a dem_step
    /// integrates to exactly zero over [0, 2 t_i].
    std::vector<double> cumulative(double dt, std::size_t samples) const;

    static Gate dem_step(double t_i);
    static Gate constant(double level, double t0, double t1);
    static Gate tanh_pulse(double t0, double t1, double ramp);
    static Gate onoff(double t_off, double t_on, double ramp);
    static Gate zero();
};

enum class ScheduleLabel {
    dem_control,
    eit_control_uniform,
    eit_switch_encrypt,
    eit_switch_decrypt,
};

std::string to_string(ScheduleLabel label);

/// One separable field component Omega(t, z) = s(t) * K(z).
struct FieldSchedule {
    Gate gate;
    KeyProfile key;
    ScheduleLabel label = ScheduleLabel::dem_control;

    double omega(double t, std::size_t j) const {
        return gate(t) * key.samples[j];
    }
};

/// Incident probe pulse Omega_p(t, 0) = amplitude * exp(-((t-peak)/duration)^2).
struct ProbeSpec {
    double peak_time = 0.05;  // t_p, in tau
    double duration = 5e-3;   // kappa, in tau
    double amplitude = 0.01;  // peak Rabi frequency, in Gamma

    double operator()(double t) const {
        const double u = (t - peak_time) / duration;
        return amplitude * std::exp(-u * u);
    }
    void validate() const {
        if (!(duration > 0.0)) throw std::invalid_argument("probe: kappa must be > 0");
        if (!(amplitude > 0.0)) throw std::invalid_argument("probe: amplitude must be > 0");
    }
};

/// Echo-memory control: s = +1 before t_i, -1 at and after.
FieldSchedule build_dem_schedule(const KeyProfile& key, double t_i, double t_end);

/// Echo-memory control split into storage and retrieval pieces so the
/// retrieval key can be substituted (wrong-key / shifted-key trials).
std::vector<FieldSchedule> build_dem_attack_schedules(const KeyProfile& encrypt_key,
                                                      const KeyProfile& decrypt_key,
                                                      double t_i, double t_end);

struct EitWindows {
    double encrypt_start = 60.0;
    double encrypt_end = 80.0;
    double decrypt_start = 90.0;
    double decrypt_end = 110.0;
    bool encrypt_on = true;
    bool decrypt_on = true;
};

/// EIT storage control plus the disordered switching pulses. Returns
/// [uniform control, encrypt switch?, decrypt switch?]. Decryption uses the
/// inverted encrypt key by default; pass a custom decrypt key for attacks.
std::vector<FieldSchedule> build_eit_schedules(double control_rabi, double t_off,
                                               double t_on,
                                               const KeyProfile& encrypt_key,
                                               const KeyProfile& decrypt_key,
                                               const EitWindows& windows,
                                               double ramp = 1.0);

/// Same-shape schedule with the key negated (involution).
FieldSchedule invert_key(const FieldSchedule& schedule);

/// theta(t, z) = 0.5 * integral_0^t Omega_c(t', z) dt' evaluated on the
/// uniform t-grid at index t_index, for every z of the key grid.
std::vector<double> phase_theta(const std::vector<FieldSchedule>& control,
                                double dt, std::size_t samples,
                                std::size_t t_index);

/// phi(t, z) = 0.5 * integral_{t_off}^t Omega_s(t', z) dt'.
std::vector<double> phase_phi(const std::vector<FieldSchedule>& switches,
                              double t_off, double dt, std::size_t samples,
                              std::size_t t_index);

}  // namespace keymem
