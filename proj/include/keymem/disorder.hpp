#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "keymem/grid.hpp"

namespace keymem {

/// Target statistics of a disordered control-field profile: a stationary
/// zero-mean Gaussian random field K(z) with covariance
///   <K(z) K(z')> = D^2 exp(-(z - z')^2 / sigma^2).
struct CorrelationSpec {
    double strength = 1.0;            // D, in units of Gamma
    double correlation_length = 0.01; // sigma, in units of L
    enum class Kind { gaussian } kind = Kind::gaussian;

    void validate(double grid_span) const {
        if (!(strength > 0.0))
            throw std::invalid_argument("CorrelationSpec: strength D must be > 0");
        if (!(correlation_length > 0.0))
            throw std::invalid_argument("CorrelationSpec: sigma must be > 0");
        if (correlation_length > grid_span)
            throw std::invalid_argument(
                "CorrelationSpec: sigma exceeds the grid span; the field would "
                "not decorrelate inside the domain");
    }
};

/// A 1-D spatial Rabi-frequency profile K(z): the encryption/decryption
/// secret. Profiles generated on a long master grid can later be sectioned
/// onto the medium grid; sectioned keys keep a handle to their master so
/// they can be re-sampled at a shifted offset.
struct KeyProfile {
    std::vector<double> samples;  // Rabi frequency in Gamma, on `grid`
    ZGrid grid;
    std::uint64_t seed = 0;
    std::optional<CorrelationSpec> spec;
    double master_length = 0.0;   // alpha: span of the master this came from
    double section_offset = 0.0;  // position of samples[0] within the master
    std::shared_ptr<const KeyProfile> master;  // set on sectioned keys

    double value_at(double z) const;  // linear interpolation on the grid
    double max_abs() const;
};

/// Draw a Gaussian-correlated key on `grid`, deterministic per
/// (seed, spec, grid). White Gaussian noise is filtered in Fourier space by
/// the square root of the analytic power spectrum of the Gaussian
/// covariance; synthesis runs on an enlarged periodic grid and the
/// wrap-around margins are discarded.
KeyProfile generate_key(const ZGrid& grid, const CorrelationSpec& spec,
                        std::uint64_t seed);

/// Zero-mean linear profile K(z) = slope * (z - z_mid): the spatially
/// ordered reference key (a gradient-echo-style field).
KeyProfile gradient_key(const ZGrid& grid, double slope);

/// Spatially uniform profile (used for the EIT control field).
KeyProfile uniform_key(const ZGrid& grid, double value);

/// Re-sample the sub-profile on [offset, offset + length of medium_grid]
/// from a master key onto the medium grid. The result records its offset
/// and keeps a reference to the master.
KeyProfile section_key(const KeyProfile& master, double offset,
                       const ZGrid& medium_grid);

/// Section the key's master at (section_offset + delta). Requires the key to
/// have been produced by section_key (or to be its own master).
KeyProfile shift_key(const KeyProfile& key, double delta);

/// Unbiased sample autocovariance of an ensemble of keys, per lag, with the
/// standard error of the ensemble mean.
struct CorrelationCurve {
    std::vector<double> lag;     // physical lag (grid-aligned)
    std::vector<double> mean;    // ensemble-mean autocovariance
    std::vector<double> stderr_; // standard error of the mean
    std::size_t n_keys = 0;
};

CorrelationCurve estimate_correlation(const std::vector<KeyProfile>& keys,
                                      const std::vector<double>& lags);

}  // namespace keymem
