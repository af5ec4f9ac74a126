#include "keymem/disorder.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "keymem/rng.hpp"

namespace keymem {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is.
std::mutex g_fftw_mutex;

// In-place inverse complex DFT (unnormalised), via FFTW.
void ifft(std::vector<std::complex<double>>& data) {
    const int n = static_cast<int>(data.size());
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(plan);
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

double KeyProfile::value_at(double z) const {
    const double x = (z - grid.z0) / grid.dz;
    if (x < -1e-9 || x > static_cast<double>(grid.n - 1) + 1e-9)
        throw std::out_of_range("KeyProfile::value_at: z outside the key grid");
    const double xc = std::clamp(x, 0.0, static_cast<double>(grid.n - 1));
    const std::size_t j = static_cast<std::size_t>(
        std::min(xc, static_cast<double>(grid.n - 2)));
    const double f = xc - static_cast<double>(j);
    return (1.0 - f) * samples[j] + f * samples[j + 1];
}

double KeyProfile::max_abs() const {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return m;
}

KeyProfile generate_key(const ZGrid& grid, const CorrelationSpec& spec,
                        std::uint64_t seed) {
    spec.validate(grid.span());
    const double sigma = spec.correlation_length;
    const double d = spec.strength;
    if (grid.dz > sigma / 10.0 + 1e-15)
        throw std::invalid_argument(
            "generate_key: grid spacing must satisfy dz <= sigma/10; "
            "increase the sample count to at least 10*span/sigma");

    // Periodic synthesis grid: requested span plus >= 3 sigma of margin on
    // each side, rounded up to a power of two. The margins absorb the
    // wrap-around correlation of the spectral method and are discarded.
    const std::size_t margin =
        static_cast<std::size_t>(std::ceil(3.0 * sigma / grid.dz)) + 1;
    const std::size_t n_big = next_pow2(grid.n + 2 * margin);
    const double period = static_cast<double>(n_big) * grid.dz;

    // Power spectrum of D^2 exp(-r^2/sigma^2):
    //   S(k) = D^2 sigma sqrt(pi) exp(-k^2 sigma^2 / 4).
    // With Fourier amplitudes c_m eps_m, <|c_m|^2> = S(k_m) / (N dz) makes
    // the lattice covariance the periodised target covariance.
    GaussianStream rng(seed ^ 0x6b65796d656d00ULL);
    std::vector<std::complex<double>> modes(n_big);
    const double norm = 1.0 / (static_cast<double>(n_big) * grid.dz);
    const double s_peak = std::sqrt(std::numbers::pi_v<double>) * d * d * sigma;
    auto spectrum = [&](std::size_t m) {
        const double k =
            2.0 * std::numbers::pi_v<double> * static_cast<double>(m) / period;
        return s_peak * std::exp(-k * k * sigma * sigma / 4.0);
    };
    // Hermitian spectrum built from independent real draws: fill m and N-m
    // together so the inverse transform is real.
    modes[0] = std::sqrt(spectrum(0) * norm) * rng.normal();
    for (std::size_t m = 1; m <= n_big / 2; ++m) {
        const double amp = std::sqrt(spectrum(m) * norm);
        if (m == n_big / 2) {
            modes[m] = amp * rng.normal();
        } else {
            const double re = rng.normal() / std::sqrt(2.0);
            const double im = rng.normal() / std::sqrt(2.0);
            modes[m] = amp * std::complex<double>(re, im);
            modes[n_big - m] = std::conj(modes[m]);
        }
    }
    ifft(modes);

    KeyProfile key;
    key.grid = grid;
    key.seed = seed;
    key.spec = spec;
    key.master_length = grid.span();
    key.section_offset = 0.0;
    key.samples.resize(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j)
        key.samples[j] = modes[margin + j].real();
    for (double v : key.samples)
        if (!std::isfinite(v))
            throw std::runtime_error("generate_key: non-finite sample produced");
    return key;
}

KeyProfile gradient_key(const ZGrid& grid, double slope) {
    if (!std::isfinite(slope))
        throw std::invalid_argument("gradient_key: slope must be finite");
    KeyProfile key;
    key.grid = grid;
    key.master_length = grid.span();
    key.samples.resize(grid.n);
    const double z_mid = grid.z0 + 0.5 * grid.span();
    for (std::size_t j = 0; j < grid.n; ++j)
        key.samples[j] = slope * (grid.z(j) - z_mid);
    return key;
}

KeyProfile uniform_key(const ZGrid& grid, double value) {
    KeyProfile key;
    key.grid = grid;
    key.master_length = grid.span();
    key.samples.assign(grid.n, value);
    return key;
}

KeyProfile section_key(const KeyProfile& master, double offset,
                       const ZGrid& medium_grid) {
    const double alpha = master.grid.span();
    const double len = medium_grid.span();
    if (offset < -1e-12 || offset > alpha - len + 1e-12)
        throw std::invalid_argument(
            "section_key: offset must satisfy 0 <= offset <= alpha - L");
    auto master_copy = master.master
                           ? master.master
                           : std::make_shared<const KeyProfile>(master);
    KeyProfile key;
    key.grid = medium_grid;
    key.seed = master.seed;
    key.spec = master.spec;
    key.master_length = alpha;
    key.section_offset = offset;
    key.master = master_copy;
    key.samples.resize(medium_grid.n);
    for (std::size_t j = 0; j < medium_grid.n; ++j)
        key.samples[j] = master_copy->value_at(master_copy->grid.z0 + offset +
                                               (medium_grid.z(j) - medium_grid.z0));
    return key;
}

KeyProfile shift_key(const KeyProfile& key, double delta) {
    const KeyProfile& master = key.master ? *key.master : key;
    return section_key(master, key.section_offset + delta, key.grid);
}

CorrelationCurve estimate_correlation(const std::vector<KeyProfile>& keys,
                                      const std::vector<double>& lags) {
    if (keys.size() < 2)
        throw std::invalid_argument("estimate_correlation: need >= 2 keys");
    const ZGrid& g = keys.front().grid;
    for (const auto& k : keys)
        if (!k.grid.same_as(g))
            throw std::invalid_argument("estimate_correlation: mismatched grids");

    CorrelationCurve curve;
    curve.n_keys = keys.size();
    for (double lag : lags) {
        const auto r = static_cast<std::size_t>(std::llround(lag / g.dz));
        if (r >= g.n)
            throw std::invalid_argument("estimate_correlation: lag beyond grid");
        // Per-key lag-r autocovariance; mean and stderr across keys.
        double sum = 0.0, sum2 = 0.0;
        for (const auto& k : keys) {
            double c = 0.0;
            for (std::size_t j = 0; j + r < g.n; ++j)
                c += k.samples[j] * k.samples[j + r];
            c /= static_cast<double>(g.n - r);
            sum += c;
            sum2 += c * c;
        }
        const double m = static_cast<double>(keys.size());
        const double mean = sum / m;
        const double var = std::max(0.0, (sum2 / m - mean * mean) * m / (m - 1.0));
        curve.lag.push_back(static_cast<double>(r) * g.dz);
        curve.mean.push_back(mean);
        curve.stderr_.push_back(std::sqrt(var / m));
    }
    return curve;
}

}  // namespace keymem
