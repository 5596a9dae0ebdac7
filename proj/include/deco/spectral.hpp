// spectral.hpp — Environment correlation kernels: thermal reservoirs with
// Drude/exponential cutoffs, discrete oscillator baths, white noise, and the
// frequency <-> time bridges between them.
//
// Units: hbar = k_B = 1, so frequencies, temperatures and inverse times share
// one unit. Fourier convention (fixed so that Eq.-(11)-style thermal spectra
// place the vacuum weight at negative frequency and time-domain kernels carry
// the physical dissipation sign):
//
//     alpha~(w) = integral ds e^{-i w s} alpha(s)
//     alpha(s)  = (1/2pi) integral dw e^{+i w s} alpha~(w)

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "deco/grids.hpp"
#include "deco/linalg.hpp"

namespace deco::spectral {

enum class CutoffFamily { Drude, ExponentialCutoff };

struct ThermalReservoirSpec {
    CutoffFamily family{CutoffFamily::Drude};
    double gamma0{1.0};      // zero-frequency damping
    double cutoff{1.0};      // Lambda
    double temperature{0.0}; // T >= 0
    int channel{0};

    void validate() const;
};

struct BathMode {
    double omega{1.0};
    double g{0.0};
};

struct DiscreteBathSpec {
    std::vector<BathMode> modes;
    double temperature{0.0};
    int fock_truncation{2}; // Fock levels kept per mode
    int channel{0};

    void validate() const;
};

// kappa_T(w) = w coth(w / 2T); even, >= |w|, equals |w| at T = 0 and 2T at w = 0.
double fdr_kernel(double omega, double temperature);

// Drude: g0 L^2 / (w^2 + L^2); exponential: g0 exp(-|w|/L).
double damping_kernel(double omega, const ThermalReservoirSpec& spec);

// alpha~(w) = gamma~(w) [kappa_T(w) - w]; non-negative everywhere.
double correlation_freq(double omega, const ThermalReservoirSpec& spec);

// Exact alpha(s) = sum_k g_k^2 [coth(w_k/2T) cos(w_k s) - i sin(w_k s)].
Complex discrete_bath_correlation(const DiscreteBathSpec& spec, double s);

// Dirac line in a stationary spectrum: weight * delta(omega - position),
// with weight a Hermitian PSD channel matrix carrying the 2pi of the
// inverse-transform measure already folded out:
//   alpha(s) += (1/2pi) * weight * e^{+i position s} * 2pi.
struct SpectralLine {
    double omega{0.0};
    Matrix weight; // N x N
};

class CorrelationKernel {
public:
    enum class Representation { Stationary, Sampled, White };

    // -- factories ------------------------------------------------------
    static CorrelationKernel thermal(const ThermalReservoirSpec& spec, int channels = 1);
    // Spectral representation of a finite oscillator bath: lines at +-w_k
    // with weights 2pi g_k^2 nbar and 2pi g_k^2 (nbar + 1).
    static CorrelationKernel discrete_bath_spectrum(const DiscreteBathSpec& spec, int channels = 1);
    static CorrelationKernel white(Matrix strength);
    static CorrelationKernel white_scalar(double strength);
    static CorrelationKernel stationary(int channels, std::function<Matrix(double)> freq_eval,
                                        double freq_scale_hint, double min_feature_hint,
                                        std::vector<SpectralLine> lines = {});
    static CorrelationKernel sampled(const TimeGrid& grid, Matrix gram, int channels);

    Representation representation() const { return rep_; }
    int channels() const { return channels_; }

    // -- stationary / white accessors ------------------------------------
    // Smooth part of alpha~(omega); for White this is the constant strength.
    Matrix freq_matrix(double omega) const;
    // Whether a smooth spectral part exists (line-only kernels skip quadrature).
    bool has_smooth_part() const { return rep_ == Representation::White || bool(freq_eval_); }
    const std::vector<SpectralLine>& lines() const { return lines_; }
    double freq_scale_hint() const { return freq_scale_hint_; }
    double min_feature_hint() const { return min_feature_hint_; }
    const Matrix& strength() const;

    // -- sampled accessors ------------------------------------------------
    // Block Gram matrix M[(n,k),(m,l)] = alpha_nm(t_k, t_l), channel-major.
    const TimeGrid& time_grid() const;
    const Matrix& gram() const;
    Matrix gram_block(int k, int l) const; // alpha(t_k, t_l) as N x N matrix

    // Linear combinations (same representation, same grids/channels).
    CorrelationKernel scaled(double factor) const;
    static CorrelationKernel difference(const CorrelationKernel& a, const CorrelationKernel& b);

private:
    Representation rep_{Representation::White};
    int channels_{1};
    // stationary
    std::function<Matrix(double)> freq_eval_;
    std::vector<SpectralLine> lines_;
    double freq_scale_hint_{1.0};
    double min_feature_hint_{1.0};
    // sampled
    TimeGrid grid_;
    Matrix gram_;
    // white
    Matrix strength_;
};

// Channel-wise sum of independent reservoirs. channel_map[p][i] is the
// composite channel index of part p's local channel i.
CorrelationKernel composite_correlation(const std::vector<CorrelationKernel>& parts,
                                        const std::vector<std::vector<int>>& channel_map,
                                        int channels_out);

// Convenience overload: all parts keep their own channel indices, composite
// channel count inferred.
CorrelationKernel composite_correlation(const std::vector<CorrelationKernel>& parts);

struct TransformOptions {
    // Relative bound on the documented trapezoid error estimate before
    // GridTooCoarse is raised. The default matches the grid heuristic below.
    double tol_rel{0.02};
};

// Frequency-grid heuristic for inverse transforms:
// omega_max >= max(50 T, 20 Lambda, 20/s_min), spacing <= pi/(10 s_max),
// where the scale hints come from the kernel's constituents.
FrequencyGrid default_transform_grid(const CorrelationKernel& kernel, const TimeGrid& s_grid);

// alpha(s) at arbitrary offsets: analytic lines plus trapezoid quadrature of
// the smooth spectrum over freq_grid. One N x N matrix per requested s.
std::vector<Matrix> stationary_time_values(const CorrelationKernel& kernel,
                                           std::span<const double> s_values,
                                           const FrequencyGrid& freq_grid);

// Inverse transform of a stationary kernel onto a time grid; the result is a
// Sampled kernel with gram blocks alpha(t_k - t_l). Raises GridTooCoarse when
// the quadrature error estimate exceeds options.tol_rel relative to the
// kernel's s = 0 magnitude.
CorrelationKernel correlation_time_domain(const CorrelationKernel& kernel, const TimeGrid& s_grid,
                                          const FrequencyGrid& freq_grid,
                                          const TransformOptions& options = {});

// Stationary -> Sampled on `grid` using the heuristic frequency grid;
// Sampled inputs are passed through after a grid compatibility check.
CorrelationKernel sample_on(const CorrelationKernel& kernel, const TimeGrid& grid);

// alpha = nu + i mu with nu the (real, symmetric) noise kernel and mu the
// (real, antisymmetric) dissipation kernel, stored as Gram-layout blocks.
struct NoiseDissipationSplit {
    TimeGrid grid;
    int channels{1};
    RealMatrix noise;       // Re of the Gram matrix
    RealMatrix dissipation; // Im of the Gram matrix
};

NoiseDissipationSplit split_noise_dissipation(const CorrelationKernel& sampled_kernel,
                                              double herm_tol_rel = 1e-8);

} // namespace deco::spectral
