// ordering.hpp — Kernel positivity checks and the decoherence-strength
// partial order: pairwise comparison, the two-reservoir exchange inequality,
// and the effective-temperature (FDR) fit.

#pragma once

#include <functional>
#include <string>

#include "deco/spectral.hpp"

namespace deco::ordering {

using spectral::CorrelationKernel;
using spectral::CutoffFamily;

enum class Verdict { StrictlyGreater, StrictlyLess, Equivalent, Incomparable };

const char* to_string(Verdict v);

// Grid coordinate of the worst (most negative) eigenvalue witness.
struct WorstPoint {
    enum class Kind { None, Frequency, TimeBlock, Index } kind{Kind::None};
    double omega{0.0}; // Frequency
    int channel{0};    // TimeBlock: channel block of the dominant eigenvector entry
    int index{0};      // TimeBlock: time index; Index: flat matrix index
};

struct Tolerances {
    double psd_rel{1e-9};    // PSD floor: min_eig >= -psd_rel * max(|max_eig|, floor)
    double equiv_rel{1e-12}; // both difference extremes below equiv_rel * scale
    double strict_rel{1e-6}; // strict dominance needs max_eig > strict_rel * scale
    double floor_abs{1e-12};
};

struct PositivityReport {
    bool is_psd{false};
    double min_eigenvalue{0.0};
    double max_eigenvalue{0.0};
    WorstPoint worst_point;
};

// Stationary kernels are tested per-omega on `grid` (Bochner equivalence for
// stationary kernels); sampled kernels use their own Gram matrix and ignore
// `grid`. Throws NonHermitianInput when Hermitization would change an entry
// by more than 1e-8 relative.
PositivityReport check_kernel_positive(const CorrelationKernel& kernel, const FrequencyGrid& grid,
                                       double tol_rel = 1e-9, double floor_abs = 1e-12);

struct OrderResult {
    Verdict verdict{Verdict::Incomparable};
    double min_eig_forward{0.0};  // most negative eigenvalue of (a - b)
    double min_eig_backward{0.0}; // most negative eigenvalue of (b - a) = -max_eig(a - b)
    WorstPoint worst_point;       // location of min_eig_forward
    Tolerances tolerances;
    double scale{0.0}; // input magnitude anchoring the relative thresholds
};

OrderResult compare_environments(const CorrelationKernel& a, const CorrelationKernel& b,
                                 const FrequencyGrid& grid, const Tolerances& tol = {});

// Verdict from precomputed difference extremes; shared with dissipator_order.
OrderResult order_from_extremes(double fwd_min, double fwd_max, const WorstPoint& min_point,
                                double scale, const Tolerances& tol);

// Composite exchange comparison: (high cutoff, hot) + (low cutoff, cold)
// versus (low cutoff, hot) + (high cutoff, cold), same gamma0 and family.
// StrictlyGreater for lambda_high > lambda_low and t_hot > t_cold; Equivalent
// when either pair is degenerate.
OrderResult lutz_compare(double gamma0, double lambda_high, double lambda_low, double t_hot,
                         double t_cold, CutoffFamily family, const FrequencyGrid& grid,
                         const Tolerances& tol = {});

struct FdrFitResult {
    double t_star{0.0};
    double residual{0.0}; // max-norm misfit relative to max |kappa_eff|
};

// Fits kappa_eff(w) = alpha~(w)/gamma_total(w) + w against w coth(w/2T) by
// golden-section search over T. Near-zero residual certifies a thermal
// composite; a large residual certifies that no effective temperature exists.
FdrFitResult fdr_fit(const CorrelationKernel& kernel,
                     const std::function<double(double)>& total_damping, const FrequencyGrid& grid,
                     double damping_floor = 1e-12);

} // namespace deco::ordering
