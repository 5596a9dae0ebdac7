// evolution.hpp — Reduced-state propagation: second-order master equation
// with memory integral, single-exponential (Magnus) propagator, Choi/CP
// checks, trace distance, and the exact system+bath unitary oracle.

#pragma once

#include <vector>

#include "deco/dissipator.hpp"
#include "deco/spectral.hpp"

namespace deco::evolution {

using dissipator::SystemModel;
using spectral::CorrelationKernel;
using spectral::DiscreteBathSpec;

struct Trajectory {
    enum class Method { Master, Magnus, Exact };
    Method method{Method::Master};
    std::vector<double> times;
    std::vector<Matrix> states;
};

// Second-order generator Phi_2(t): ordered double integral of the traced
// double commutator over 0 <= tau' <= tau <= t. Trace-annihilating.
SuperOperator magnus_generator(const SystemModel& system, const CorrelationKernel& kernel, double t,
                               int n_tau);

// Full map G(t) = G_0(t) e^{Phi_2(t)} as a superoperator.
SuperOperator magnus_map(const SystemModel& system, const CorrelationKernel& kernel, double t,
                         int n_tau);

// Free conjugation rho -> e^{-iHt} rho e^{+iHt}.
SuperOperator free_propagator_superop(const SystemModel& system, double t);

Matrix magnus_propagate(const SystemModel& system, const CorrelationKernel& kernel, double t,
                        int n_tau, const Matrix& rho0);

struct MasterOptions {
    double step_tol{1e-5}; // embedded full-vs-half step comparison threshold
};

// Classic one-step 4th-order integrator; the memory integral is recomputed by
// trapezoid quadrature on the accumulated history at every stage, with the
// kernel history interpolated linearly between full-step samples. Hermiticity
// is enforced by symmetrization each step.
Trajectory master_equation_evolve(const SystemModel& system, const CorrelationKernel& kernel,
                                  double t_span, double dt, const Matrix& rho0,
                                  const MasterOptions& options = {});

// Choi matrix C[(i,k),(j,l)] = <i| map(E_kl) |j>; C >= 0 iff the map is CP.
Matrix choi_matrix(const SuperOperator& map);

// Half the sum of singular values of rho1 - rho2.
double trace_distance(const Matrix& rho1, const Matrix& rho2);

// Exact unitary evolution of system (x) truncated oscillator bath(s), bath
// initially Gibbs at the spec temperature, followed by a bath partial trace.
// Checkpoints every dt verify that top Fock levels stay unpopulated.
Matrix exact_bath_evolve(const SystemModel& system, const DiscreteBathSpec& bath, double t,
                         double dt, const Matrix& rho0);
Matrix exact_bath_evolve(const SystemModel& system, const std::vector<DiscreteBathSpec>& baths,
                         double t, double dt, const Matrix& rho0);

} // namespace deco::evolution
