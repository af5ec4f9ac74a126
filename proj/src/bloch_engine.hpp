#pragma once

// Shared Maxwell-Bloch integration kernel for the three- and four-level
// schemes. The atomic master equation is solved per z-slice with RK4 while
// the probe envelope is marched across the medium in the retarded frame,
//   d(rho)/dt = -i [H, rho] + decay,    dOmega_p/dz = i eta rho31,
// with H = -(1/2) (Omega_p |3><1| + Omega_c |3><2| + Omega_s |4><2| + h.c.).
// The relative sign of the commutator and the propagation source term is
// fixed so that a resonant two-level medium absorbs (intensity e^{-xi}).

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "keymem/grid.hpp"
#include "keymem/protocol.hpp"
#include "keymem/sim_result.hpp"

namespace keymem::detail {

using Cplx = std::complex<double>;

template <int N>
struct EngineSetup {
    double eta = 0.0;                     // Gamma xi / 2L
    std::array<double, N> gamma{};        // level population decay rates
    // (from, to, fraction): level `from` decays at gamma[from], a fraction
    // of the population landing in `to`. Fractions per level sum to 1.
    std::vector<std::tuple<int, int, double>> branches;
    ProbeSpec probe;
    const std::vector<FieldSchedule>* control = nullptr;   // |2><3| coupling
    const std::vector<FieldSchedule>* switches = nullptr;  // |2><4| coupling
    SpaceTimeGrid grid;
    std::vector<double> snapshot_times;
};

template <int N>
class MaxwellBlochEngine {
public:
    static constexpr int NN = N * N;
    using State = Eigen::VectorXcd;

    explicit MaxwellBlochEngine(const EngineSetup<N>& setup) : s_(setup) {
        s_.grid.validate();
        nz_ = s_.grid.z_points;
        dz_ = 1.0 / static_cast<double>(nz_ - 1);
        gather_schedules();
        if (s_.probe.duration > 0.0 && s_.grid.dt_out > s_.probe.duration / 10.0)
            throw std::invalid_argument(
                "engine: dt_out must resolve the probe duration with >= 10 "
                "samples; reduce dt_out to <= kappa/10");
    }

    SimResult run() {
        const auto wall_start = std::chrono::steady_clock::now();
        const std::size_t samples = s_.grid.t_samples();
        const double dt = s_.grid.dt_out;

        State y = State::Zero(static_cast<Eigen::Index>(nz_) * NN);
        for (std::size_t j = 0; j < nz_; ++j)
            y[static_cast<Eigen::Index>(j) * NN] = 1.0;  // rho_11 = 1

        SimResult result;
        result.dt_out = dt;
        result.input.resize(samples);
        result.output.resize(samples);
        for (std::size_t k = 0; k < samples; ++k)
            result.input[k] = s_.probe(dt * static_cast<double>(k));

        std::vector<std::size_t> snap_idx;
        for (double ts : s_.snapshot_times) {
            auto k = static_cast<std::size_t>(std::llround(ts / dt));
            if (k >= samples)
                throw std::invalid_argument("engine: snapshot time outside window");
            snap_idx.push_back(k);
        }

        State k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
        std::vector<Cplx> field(nz_);

        record_output(0.0, y, field, result.output[0]);
        maybe_snapshot(0, snap_idx, y, result);
        update_diagnostics(y, result.diagnostics);

        for (std::size_t k = 0; k + 1 < samples; ++k) {
            const double t0 = dt * static_cast<double>(k);
            const unsigned nsub = substeps(t0, dt);
            const double h = dt / static_cast<double>(nsub);
            for (unsigned m = 0; m < nsub; ++m) {
                const double t = t0 + h * static_cast<double>(m);
                rhs(t, y, k1, field);
                tmp = y + (0.5 * h) * k1;
                rhs(t + 0.5 * h, tmp, k2, field);
                tmp = y + (0.5 * h) * k2;
                rhs(t + 0.5 * h, tmp, k3, field);
                tmp = y + h * k3;
                rhs(t + h, tmp, k4, field);
                y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            result.diagnostics.total_substeps += nsub;

            const double t1 = dt * static_cast<double>(k + 1);
            record_output(t1, y, field, result.output[k + 1]);
            if (!std::isfinite(result.output[k + 1].real()) ||
                !std::isfinite(result.output[k + 1].imag()))
                throw std::runtime_error(
                    "engine: non-finite field at t = " + std::to_string(t1) +
                    "; reduce phase_step or refine the grid");
            maybe_snapshot(k + 1, snap_idx, y, result);
            update_diagnostics(y, result.diagnostics);
        }

        result.diagnostics.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          wall_start)
                .count();
        return result;
    }

private:
    void gather_schedules() {
        auto check = [&](const std::vector<FieldSchedule>* list,
                         std::vector<const double*>& keys) {
            if (!list) return;
            if (list->size() > 8)
                throw std::invalid_argument("engine: at most 8 schedules per coupling");
            for (const auto& sched : *list) {
                if (sched.key.samples.size() != nz_)
                    throw std::invalid_argument(
                        "engine: schedule key not sampled on the medium grid");
                key_max_.push_back(sched.key.max_abs());
                keys.push_back(sched.key.samples.data());
            }
        };
        check(s_.control, control_keys_);
        check(s_.switches, switch_keys_);
    }

    // Local rotation/decay rate bound on [t, t+dt], used to pick the RK4
    // substep so each substep advances at most `phase_step` radians.
    unsigned substeps(double t, double dt) const {
        double rate = 1e-3;
        for (int i = 0; i < N; ++i) rate = std::max(rate, 0.5 * s_.gamma[i]);
        rate += 0.5 / s_.probe.duration;
        std::size_t idx = 0;
        auto add = [&](const std::vector<FieldSchedule>* list) {
            if (!list) return;
            for (const auto& sched : *list) {
                const double g =
                    std::max({std::abs(sched.gate(t)), std::abs(sched.gate(t + 0.5 * dt)),
                              std::abs(sched.gate(t + dt))});
                rate += 0.5 * g * key_max_[idx++];
            }
        };
        add(s_.control);
        add(s_.switches);
        const double n = std::ceil(dt * rate / s_.grid.phase_step);
        return static_cast<unsigned>(std::max(1.0, n));
    }

    // March the probe envelope across the medium on the instantaneous
    // coherence field: trapezoidal integration of dOmega/dz = i eta rho31.
    void march_field(double t, const State& y, std::vector<Cplx>& field) const {
        const Cplx i_eta_dz(0.0, s_.eta * dz_);
        field[0] = s_.probe(t);
        Cplx prev = rho31(y, 0);
        for (std::size_t j = 1; j < nz_; ++j) {
            const Cplx cur = rho31(y, j);
            field[j] = field[j - 1] + i_eta_dz * 0.5 * (prev + cur);
            prev = cur;
        }
    }

    static Cplx rho31(const State& y, std::size_t j) {
        return y[static_cast<Eigen::Index>(j) * NN + 2];  // column-major (2,0)
    }

    void rhs(double t, const State& y, State& dy, std::vector<Cplx>& field) const {
        march_field(t, y, field);

        double omega_c_gate[8];
        double omega_s_gate[8];
        std::size_t nc = 0, ns = 0;
        if (s_.control)
            for (const auto& sched : *s_.control) omega_c_gate[nc++] = sched.gate(t);
        if (s_.switches)
            for (const auto& sched : *s_.switches) omega_s_gate[ns++] = sched.gate(t);

        dy.setZero();
        for (std::size_t j = 0; j < nz_; ++j) {
            const Cplx* r = y.data() + static_cast<std::size_t>(j) * NN;
            Cplx* d = dy.data() + static_cast<std::size_t>(j) * NN;

            double oc = 0.0, os = 0.0;
            for (std::size_t m = 0; m < nc; ++m)
                oc += omega_c_gate[m] * control_keys_[m][j];
            for (std::size_t m = 0; m < ns; ++m)
                os += omega_s_gate[m] * switch_keys_[m][j];

            add_coupling(r, d, 2, 0, field[j]);       // probe on |1> <-> |3>
            add_coupling_real(r, d, 2, 1, oc);        // control on |2> <-> |3>
            if constexpr (N == 4) add_coupling_real(r, d, 3, 1, os);
            add_decay(r, d);
        }
    }

    // Contribution of H += -(omega/2) |a><b| + h.c. to  d(rho) = -i[H, rho]:
    //   d(a, k) += -i h rho(b, k),  d(b, k) += -i conj(h) rho(a, k)
    //   d(k, b) -= -i rho(k, a) h,  d(k, a) -= -i rho(k, b) conj(h)
    // with h = -omega/2. Storage is column-major: (row, col) -> col * N + row.
    static void add_coupling(const Cplx* r, Cplx* d, int a, int b, Cplx omega) {
        const Cplx mih(0.0, 0.5);  // -i * h / omega with h = -omega/2, i.e. i/2
        const Cplx f = mih * omega;
        const Cplx fc = mih * std::conj(omega);
        for (int k = 0; k < N; ++k) {
            d[k * N + a] += f * r[k * N + b];   // d(a,k) += i/2 omega rho(b,k)
            d[k * N + b] += fc * r[k * N + a];  // d(b,k) += i/2 omega* rho(a,k)
            d[b * N + k] -= f * r[a * N + k];   // d(k,b) -= i/2 omega rho(k,a)
            d[a * N + k] -= fc * r[b * N + k];  // d(k,a) -= i/2 omega* rho(k,b)
        }
    }

    static void add_coupling_real(const Cplx* r, Cplx* d, int a, int b, double omega) {
        if (omega == 0.0) return;
        add_coupling(r, d, a, b, Cplx(omega, 0.0));
    }

    void add_decay(const Cplx* r, Cplx* d) const {
        for (int i = 0; i < N; ++i) {
            const double gi = s_.gamma[i];
            if (gi == 0.0) continue;
            d[i * N + i] -= gi * r[i * N + i];
            for (int k = 0; k < N; ++k) {
                if (k == i) continue;
                d[k * N + i] -= 0.5 * gi * r[k * N + i];
                d[i * N + k] -= 0.5 * gi * r[i * N + k];
            }
        }
        for (const auto& [from, to, fraction] : s_.branches)
            d[to * N + to] += fraction * s_.gamma[from] * r[from * N + from];
    }

    void record_output(double t, const State& y, std::vector<Cplx>& field,
                       Cplx& out) const {
        march_field(t, y, field);
        out = field[nz_ - 1];
    }

    void maybe_snapshot(std::size_t k, const std::vector<std::size_t>& snap_idx,
                        const State& y, SimResult& result) const {
        for (std::size_t m = 0; m < snap_idx.size(); ++m) {
            if (snap_idx[m] != k) continue;
            Snapshot snap;
            snap.t = s_.grid.dt_out * static_cast<double>(k);
            snap.rho21.resize(nz_);
            snap.rho31.resize(nz_);
            if constexpr (N == 4) snap.rho41.resize(nz_);
            for (std::size_t j = 0; j < nz_; ++j) {
                const Cplx* r = y.data() + static_cast<std::size_t>(j) * NN;
                snap.rho21[j] = r[1];  // (1,0)
                snap.rho31[j] = r[2];  // (2,0)
                if constexpr (N == 4) snap.rho41[j] = r[3];
            }
            result.snapshots.push_back(std::move(snap));
        }
    }

    void update_diagnostics(const State& y, SolverDiagnostics& diag) const {
        for (std::size_t j = 0; j < nz_; ++j) {
            const Cplx* r = y.data() + static_cast<std::size_t>(j) * NN;
            Cplx tr = 0.0;
            for (int i = 0; i < N; ++i) tr += r[i * N + i];
            diag.max_trace_defect =
                std::max(diag.max_trace_defect, std::abs(tr - Cplx(1.0)));
            for (int a = 0; a < N; ++a)
                for (int b = a + 1; b < N; ++b)
                    diag.max_herm_defect =
                        std::max(diag.max_herm_defect,
                                 std::abs(r[b * N + a] - std::conj(r[a * N + b])));
        }
    }

    EngineSetup<N> s_;
    std::size_t nz_ = 0;
    double dz_ = 0.0;
    std::vector<double> key_max_;
    std::vector<const double*> control_keys_;
    std::vector<const double*> switch_keys_;
};

}  // namespace keymem::detail
