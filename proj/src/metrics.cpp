#include "keymem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace keymem {

namespace {

using Cvec = std::vector<std::complex<double>>;

// Trapezoidal |f|^2 energy over sample indices [k0, n).
double energy(const Cvec& f, double dt, std::size_t k0) {
    if (k0 >= f.size()) return 0.0;
    double e = 0.0;
    for (std::size_t k = k0; k < f.size(); ++k) {
        const double w = (k == k0 || k + 1 == f.size()) ? 0.5 : 1.0;
        e += w * std::norm(f[k]);
    }
    return e * dt;
}

// Overlap integral int_{t_i}^T in*(t - s dt) out(t) dt for an integer shift s.
std::complex<double> shifted_overlap(const Cvec& in, const Cvec& out, double dt,
                                     std::size_t k0, long shift) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = k0; k < out.size(); ++k) {
        const long src = static_cast<long>(k) - shift;
        if (src < 0 || src >= static_cast<long>(in.size())) continue;
        const double w = (k == k0 || k + 1 == out.size()) ? 0.5 : 1.0;
        acc += w * std::conj(in[static_cast<std::size_t>(src)]) * out[k];
    }
    return acc * dt;
}

}  // namespace

FidelityResult fidelity(const Cvec& input, const Cvec& output, double dt,
                        double t_i) {
    if (input.size() != output.size() || input.empty())
        throw std::invalid_argument("fidelity: envelopes must share one t-grid");
    if (!(dt > 0.0)) throw std::invalid_argument("fidelity: dt must be > 0");
    const auto k0 = static_cast<std::size_t>(std::llround(t_i / dt));
    if (k0 >= output.size())
        throw std::invalid_argument("fidelity: t_i outside the window");

    const double e_in = energy(input, dt, 0);
    if (e_in <= 0.0) throw std::invalid_argument("fidelity: zero input energy");
    const double e_out = energy(output, dt, k0);
    FidelityResult res;
    if (e_out <= 1e-300 * e_in) {
        res.zero_output = true;
        return res;
    }

    const long n = static_cast<long>(output.size());
    long best_shift = 0;
    double best = -1.0;
    std::vector<double> f_of_shift(static_cast<std::size_t>(n), 0.0);
    for (long s = 0; s < n; ++s) {
        const double f =
            std::norm(shifted_overlap(input, output, dt, k0, s)) / (e_in * e_out);
        f_of_shift[static_cast<std::size_t>(s)] = f;
        if (f > best) {
            best = f;
            best_shift = s;
        }
    }

    // Parabolic refinement of the peak over the shift grid.
    double f_star = best;
    double shift_star = static_cast<double>(best_shift);
    if (best_shift > 0 && best_shift + 1 < n) {
        const double fm = f_of_shift[static_cast<std::size_t>(best_shift - 1)];
        const double fp = f_of_shift[static_cast<std::size_t>(best_shift + 1)];
        const double denom = 2.0 * best - fm - fp;
        if (denom > 0.0) {
            const double delta = 0.5 * (fp - fm) / denom;
            if (std::abs(delta) <= 1.0) {
                f_star = best + 0.25 * (fp - fm) * delta;  // peak of the parabola
                shift_star += delta;
            }
        }
    }

    res.f = std::min(1.0, f_star);
    res.t_d = shift_star * dt;
    return res;
}

double storage_efficiency(const Cvec& input, const Cvec& output, double dt,
                          double t_i) {
    if (input.size() != output.size() || input.empty())
        throw std::invalid_argument(
            "storage_efficiency: envelopes must share one t-grid");
    const auto k0 = static_cast<std::size_t>(std::llround(t_i / dt));
    if (k0 >= output.size())
        throw std::invalid_argument("storage_efficiency: t_i outside the window");
    const double e_in = energy(input, dt, 0);
    if (e_in <= 0.0)
        throw std::invalid_argument("storage_efficiency: zero input energy");
    return energy(output, dt, k0) / e_in;
}

double confidentiality(double alpha, double sigma, double medium_length) {
    if (!(alpha > 0.0) || !(sigma > 0.0) || !(medium_length > 0.0))
        throw std::invalid_argument("confidentiality: arguments must be > 0");
    return alpha * alpha / (sigma * medium_length);
}

double tail_energy_fraction(const Cvec& output, double dt, double t_i) {
    const auto k0 = static_cast<std::size_t>(std::llround(t_i / dt));
    const double total = energy(output, dt, k0);
    if (total <= 0.0) return 0.0;
    const auto k_tail = static_cast<std::size_t>(
        std::llround(0.95 * static_cast<double>(output.size() - 1)));
    return energy(output, dt, std::max(k0, k_tail)) / total;
}

std::vector<double> echo_oracle(const std::vector<double>& key_samples,
                                double t_i, const std::vector<double>& times) {
    if (key_samples.empty())
        throw std::invalid_argument("echo_oracle: empty key sample set");
    std::vector<double> env(times.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(key_samples.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double u = 0.5 * (times[k] - t_i);
        double acc = 0.0;
        for (double v : key_samples) acc += std::cos(v * u);
        env[k] = acc * inv_n;
    }
    return env;
}

std::vector<double> echo_oracle_gaussian(double strength, double t_i,
                                         const std::vector<double>& times) {
    std::vector<double> env(times.size(), 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double u = times[k] - t_i;
        env[k] = std::exp(-strength * strength * u * u / 8.0);
    }
    return env;
}

MatchingReport matching_condition(double probe_duration, double strength) {
    MatchingReport r;
    r.ratio = strength * probe_duration;
    r.covered = r.ratio >= 1.0;
    return r;
}

double pearson_correlation(const std::vector<double>& a,
                           const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson_correlation: size mismatch");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace keymem
