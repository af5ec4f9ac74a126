#include "keymem/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace keymem {

namespace {

// One-sided gate value: side < 0 evaluates the limit from below, side > 0
// from above. Only discontinuous kinds distinguish the two.
double eval_sided(const Gate& g, double t, int side) {
    switch (g.kind) {
        case Gate::Kind::dem_step: {
            const bool after = side < 0 ? (t > g.t0) : (t >= g.t0);
            return after ? -1.0 : 1.0;
        }
        case Gate::Kind::constant: {
            const bool in = side < 0 ? (t > g.t0 && t <= g.t1)
                                     : (t >= g.t0 && t < g.t1);
            return in ? g.level : 0.0;
        }
        case Gate::Kind::tanh_pulse:
            return 0.5 * (std::tanh((t - g.t0) / g.ramp) -
                          std::tanh((t - g.t1) / g.ramp));
        case Gate::Kind::onoff:
            return 1.0 - 0.5 * (std::tanh((t - g.t0) / g.ramp) -
                                std::tanh((t - g.t1) / g.ramp));
        case Gate::Kind::zero:
            return 0.0;
    }
    return 0.0;
}

}  // namespace

double Gate::operator()(double t) const { return eval_sided(*this, t, +1); }

std::vector<double> Gate::breakpoints() const {
    switch (kind) {
        case Kind::dem_step:
            return {t0};
        case Kind::constant:
            return {t0, t1};
        case Kind::tanh_pulse:
        case Kind::onoff:
            // Smooth, but the integrator refines its step near the ramps.
            return {t0, t1};
        case Kind::zero:
            return {};
    }
    return {};
}

std::vector<double> Gate::cumulative(double dt, std::size_t samples) const {
    std::vector<double> bps;
    if (kind == Kind::dem_step || kind == Kind::constant) bps = breakpoints();
    std::sort(bps.begin(), bps.end());

    std::vector<double> out(samples, 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < samples; ++k) {
        const double a = dt * static_cast<double>(k);
        const double b = dt * static_cast<double>(k + 1);
        double x = a;
        double left = eval_sided(*this, a, +1);
        for (double bp : bps) {
            if (bp <= x || bp >= b) continue;
            acc += 0.5 * (left + eval_sided(*this, bp, -1)) * (bp - x);
            x = bp;
            left = eval_sided(*this, bp, +1);
        }
        acc += 0.5 * (left + eval_sided(*this, b, -1)) * (b - x);
        out[k + 1] = acc;
    }
    return out;
}

Gate Gate::dem_step(double t_i) {
    Gate g;
    g.kind = Kind::dem_step;
    g.t0 = t_i;
    return g;
}

Gate Gate::constant(double level, double t0, double t1) {
    Gate g;
    g.kind = Kind::constant;
    g.level = level;
    g.t0 = t0;
    g.t1 = t1;
    return g;
}

Gate Gate::tanh_pulse(double t0, double t1, double ramp) {
    Gate g;
    g.kind = Kind::tanh_pulse;
    g.t0 = t0;
    g.t1 = t1;
    g.ramp = ramp;
    return g;
}

Gate Gate::onoff(double t_off, double t_on, double ramp) {
    Gate g;
    g.kind = Kind::onoff;
    g.t0 = t_off;
    g.t1 = t_on;
    g.ramp = ramp;
    return g;
}

Gate Gate::zero() { return Gate{}; }

std::string to_string(ScheduleLabel label) {
    switch (label) {
        case ScheduleLabel::dem_control: return "dem_control";
        case ScheduleLabel::eit_control_uniform: return "eit_control_uniform";
        case ScheduleLabel::eit_switch_encrypt: return "eit_switch_encrypt";
        case ScheduleLabel::eit_switch_decrypt: return "eit_switch_decrypt";
    }
    return "?";
}

FieldSchedule build_dem_schedule(const KeyProfile& key, double t_i, double t_end) {
    if (!(t_i > 0.0) || t_i > t_end)
        throw std::invalid_argument(
            "build_dem_schedule: t_i must lie inside the simulation window");
    FieldSchedule s;
    s.gate = Gate::dem_step(t_i);
    s.key = key;
    s.label = ScheduleLabel::dem_control;
    return s;
}

std::vector<FieldSchedule> build_dem_attack_schedules(const KeyProfile& encrypt_key,
                                                      const KeyProfile& decrypt_key,
                                                      double t_i, double t_end) {
    if (!(t_i > 0.0) || t_i > t_end)
        throw std::invalid_argument(
            "build_dem_attack_schedules: t_i must lie inside the window");
    if (encrypt_key.samples.size() != decrypt_key.samples.size())
        throw std::invalid_argument(
            "build_dem_attack_schedules: keys on mismatched grids");
    FieldSchedule store;
    store.gate = Gate::constant(1.0, 0.0, t_i);
    store.key = encrypt_key;
    store.label = ScheduleLabel::dem_control;
    FieldSchedule retrieve;
    retrieve.gate = Gate::constant(-1.0, t_i, t_end + 1.0);
    retrieve.key = decrypt_key;
    retrieve.label = ScheduleLabel::dem_control;
    return {store, retrieve};
}

std::vector<FieldSchedule> build_eit_schedules(double control_rabi, double t_off,
                                               double t_on,
                                               const KeyProfile& encrypt_key,
                                               const KeyProfile& decrypt_key,
                                               const EitWindows& w, double ramp) {
    if (!(control_rabi > 0.0))
        throw std::invalid_argument("build_eit_schedules: control Rabi must be > 0");
    const double margin = 3.0 * ramp;
    auto ordered = [&](double a, double b) { return a + margin <= b; };
    if (w.encrypt_on || w.decrypt_on) {
        if (w.encrypt_on && !(ordered(t_off, w.encrypt_start) &&
                              w.encrypt_start < w.encrypt_end))
            throw std::invalid_argument(
                "build_eit_schedules: encrypt window must follow t_off");
        if (w.decrypt_on && !(w.decrypt_start < w.decrypt_end &&
                              ordered(w.decrypt_end, t_on)))
            throw std::invalid_argument(
                "build_eit_schedules: decrypt window must precede t_on");
        if (w.encrypt_on && w.decrypt_on && !ordered(w.encrypt_end, w.decrypt_start))
            throw std::invalid_argument(
                "build_eit_schedules: encrypt and decrypt windows overlap");
    }
    std::vector<FieldSchedule> out;
    FieldSchedule control;
    control.gate = Gate::onoff(t_off, t_on, ramp);
    control.key = uniform_key(encrypt_key.grid, control_rabi);
    control.label = ScheduleLabel::eit_control_uniform;
    out.push_back(std::move(control));
    if (w.encrypt_on) {
        FieldSchedule enc;
        enc.gate = Gate::tanh_pulse(w.encrypt_start, w.encrypt_end, ramp);
        enc.key = encrypt_key;
        enc.label = ScheduleLabel::eit_switch_encrypt;
        out.push_back(std::move(enc));
    }
    if (w.decrypt_on) {
        FieldSchedule dec;
        dec.gate = Gate::tanh_pulse(w.decrypt_start, w.decrypt_end, ramp);
        dec.key = decrypt_key;
        dec.label = ScheduleLabel::eit_switch_decrypt;
        out.push_back(std::move(dec));
    }
    return out;
}

FieldSchedule invert_key(const FieldSchedule& schedule) {
    FieldSchedule out = schedule;
    for (double& v : out.key.samples) v = -v;
    return out;
}

namespace {

std::vector<double> phase_common(const std::vector<FieldSchedule>& schedules,
                                 double dt, std::size_t samples,
                                 std::size_t t_index, std::size_t ref_index) {
    if (t_index >= samples)
        throw std::invalid_argument("phase: t index outside the grid");
    std::size_t nz = schedules.empty() ? 0 : schedules.front().key.samples.size();
    std::vector<double> theta(nz, 0.0);
    for (const auto& s : schedules) {
        if (s.key.samples.size() != nz)
            throw std::invalid_argument("phase: schedules on mismatched key grids");
        const auto integral = s.gate.cumulative(dt, samples);
        const double area = integral[t_index] - integral[ref_index];
        for (std::size_t j = 0; j < nz; ++j)
            theta[j] += 0.5 * area * s.key.samples[j];
    }
    return theta;
}

}  // namespace

std::vector<double> phase_theta(const std::vector<FieldSchedule>& control,
                                double dt, std::size_t samples,
                                std::size_t t_index) {
    return phase_common(control, dt, samples, t_index, 0);
}

std::vector<double> phase_phi(const std::vector<FieldSchedule>& switches,
                              double t_off, double dt, std::size_t samples,
                              std::size_t t_index) {
    const auto ref = static_cast<std::size_t>(std::llround(t_off / dt));
    if (ref >= samples)
        throw std::invalid_argument("phase_phi: t_off outside the grid");
    if (t_index < ref)
        throw std::invalid_argument("phase_phi: t must be >= t_off");
    return phase_common(switches, dt, samples, t_index, ref);
}

}  // namespace keymem
