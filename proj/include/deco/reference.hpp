// reference.hpp — Straight-line serial implementations of the hot kernels.
// These are the readable second assembly path: tests pin the optimized
// OpenMP versions against them, and the benchmark compares their timings.

#pragma once

#include <span>

#include "deco/dissipator.hpp"
#include "deco/spectral.hpp"

namespace deco::ref {

// Literal double-quadrature sum of the dissipator coefficients from a
// sampled kernel: quadruple loop over (I, J) and both time axes.
Matrix dissipator_direct(const dissipator::SystemModel& system,
                         const spectral::CorrelationKernel& sampled_kernel);

// White-noise dissipator by the collapsed single-axis sum.
Matrix dissipator_direct_white(const dissipator::SystemModel& system, const Matrix& strength,
                               double t, int n_tau);

// Serial inverse transform of a stationary kernel (no OpenMP).
std::vector<Matrix> stationary_time_values_serial(const spectral::CorrelationKernel& kernel,
                                                  std::span<const double> s_values,
                                                  const FrequencyGrid& freq_grid);

// Serial second-order generator assembly: plain lexicographic accumulation
// over ordered node pairs.
Matrix magnus_generator_serial(const dissipator::SystemModel& system,
                               const spectral::CorrelationKernel& kernel, double t, int n_tau);

} // namespace deco::ref
