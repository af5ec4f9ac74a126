#pragma once

#include <complex>
#include <vector>

#include "keymem/disorder.hpp"

namespace keymem {

/// Figures of merit of one storage/retrieval run.
struct MetricsBundle {
    double fidelity = 0.0;        // F in [0, 1]
    double best_delay = 0.0;      // t_d maximising F, in tau
    double storage_efficiency = 0.0;
    double normalized_se = 0.0;   // SE / reference SE, when a reference is set
    double chi = 0.0;             // confidentiality alpha^2 / (sigma L)
    bool zero_output = false;     // F reported as 0 because no signal retrieved
};

struct FidelityResult {
    double f = 0.0;
    double t_d = 0.0;
    bool zero_output = false;
};

/// Normalised envelope overlap at the optimal delay:
///   F(t_d) = |int_{t_i}^T in*(t - t_d) out(t) dt|^2
///            / (int |in|^2 dt * int_{t_i}^T |out|^2 dt),
/// maximised over t_d by a grid scan of the cross-correlation with
/// parabolic refinement of the peak. Envelopes share the uniform grid
/// t_k = k dt. Zero-energy output yields F = 0 with the flag set.
FidelityResult fidelity(const std::vector<std::complex<double>>& input,
                        const std::vector<std::complex<double>>& output,
                        double dt, double t_i);

/// SE = int_{t_i}^T |out|^2 dt / int |in|^2 dt. Throws on zero input energy.
double storage_efficiency(const std::vector<std::complex<double>>& input,
                          const std::vector<std::complex<double>>& output,
                          double dt, double t_i);

/// chi = alpha^2 / (sigma L).
double confidentiality(double alpha, double sigma, double medium_length);

/// Fraction of output energy in the trailing 5% of the window; certifies
/// that truncating the upper integration limit at T is harmless.
double tail_energy_fraction(const std::vector<std::complex<double>>& output,
                            double dt, double t_i);

/// Cosine-transform echo prediction: envelope(t) = mean_j cos(K_j (t - t_i)/2)
/// over the samples of a key (the empirical distribution of the disorder).
std::vector<double> echo_oracle(const std::vector<double>& key_samples,
                                double t_i, const std::vector<double>& times);

/// Closed form of the same transform for the Gaussian ensemble N(0, D^2):
/// envelope(t) = exp(-D^2 (t - t_i)^2 / 8).
std::vector<double> echo_oracle_gaussian(double strength, double t_i,
                                         const std::vector<double>& times);

/// Bandwidth coverage of the disordered absorption spectrum.
struct MatchingReport {
    bool covered = false;  // D >= 1/kappa
    double ratio = 0.0;    // D * kappa
};
MatchingReport matching_condition(double probe_duration, double strength);

/// Pearson correlation between two equally sampled curves.
double pearson_correlation(const std::vector<double>& a,
                           const std::vector<double>& b);

}  // namespace keymem
