// dissipator.hpp — System models, interaction-picture couplings, and the
// second-order algebraic Lindblad dissipator: assembly from a correlation
// kernel, canonical-form decomposition of generators, and dissipator ordering.

#pragma once

#include <optional>
#include <vector>

#include "deco/ordering.hpp"
#include "deco/spectral.hpp"

namespace deco::dissipator {

using spectral::CorrelationKernel;

struct Coupling {
    Matrix matrix; // Hermitian d x d
    int channel{0};
};

// Hamiltonian plus coupling operators, one per environment channel. The
// eigendecomposition of H is cached so interaction-picture operators reduce
// to phase conjugation in the eigenbasis.
class SystemModel {
public:
    SystemModel(Matrix hamiltonian, std::vector<Coupling> couplings);

    int dim() const { return static_cast<int>(hamiltonian_.rows()); }
    const Matrix& hamiltonian() const { return hamiltonian_; }
    const std::vector<Coupling>& couplings() const { return couplings_; }
    int channel_count() const { return channel_count_; }
    const Matrix& coupling_for_channel(int channel) const;

    const Eigen::VectorXd& energies() const { return energies_; }
    const Matrix& eigenbasis() const { return eigenbasis_; }

private:
    Matrix hamiltonian_;
    std::vector<Coupling> couplings_;
    int channel_count_{0};
    std::vector<int> channel_to_coupling_;
    Eigen::VectorXd energies_;
    Matrix eigenbasis_;
};

// L_n(tau) = e^{+iH tau} L_n e^{-iH tau}; Hermitian, same spectrum as L_n.
Matrix interaction_picture_op(const SystemModel& system, int channel, double tau);

// Pair-basis vectorization: v[i*d + i'] = M(i, i'), matching e_I = |i><i'|
// with I = i*d + i'.
Vector pair_vector(const Matrix& m);

struct DissipatorMatrix {
    double time{0.0};
    Matrix matrix; // d^2 x d^2 Hermitian, PSD for PSD kernels
};

struct KernelPsdWarning {
    double min_eigenvalue{0.0};
    double max_eigenvalue{0.0};
};

struct DissipatorOptions {
    bool check_kernel_psd{true};
    double kernel_psd_tol{1e-9};
};

struct AssembledDissipator {
    DissipatorMatrix delta;
    // Present when the sampled kernel Gram matrix failed its PSD check.
    std::optional<KernelPsdWarning> kernel_warning;
};

// Double-quadrature assembly of the algebraic dissipator over [0,t]^2 with
// n_tau trapezoid nodes per axis; white-noise kernels collapse one integral
// analytically (a boundary delta carries weight 1/2).
AssembledDissipator algebraic_dissipator(const SystemModel& system, const CorrelationKernel& kernel,
                                         double t, int n_tau, const DissipatorOptions& options = {});

struct GeneratorDecomposition {
    Matrix theta; // traceless Hermitian d x d
    DissipatorMatrix delta;
    double residual{0.0}; // || Phi - rebuild ||_F
};

// D[Delta] rho = sum_IJ Delta_IJ (e_I rho e_J^dagger - 1/2 {e_J^dagger e_I, rho})
Matrix dissipator_superop_matrix(const DissipatorMatrix& delta, int dim);

// Splits Phi = -i[Theta, .] + D[delta] for the supplied delta, extracting the
// traceless Hermitian Theta. Throws DecompositionResidualTooLarge when the
// rebuild misses Phi by more than residual_tol_rel * ||Phi||_F, which signals
// that (phi, delta) came from inconsistent inputs.
GeneratorDecomposition lindblad_decompose(const SuperOperator& phi, const DissipatorMatrix& delta,
                                          double residual_tol_rel = 1e-8);

// Dissipator coefficients read back from a generator by reshuffling, with the
// identity-pair direction projected out (the gauge shared by the quadrature
// assembly when all couplings are traceless).
DissipatorMatrix dissipator_from_generator(const SuperOperator& phi, double t);

// Orders two environments by their assembled dissipators at time t, with the
// same verdict rules as compare_environments.
ordering::OrderResult dissipator_order(const SystemModel& system, const CorrelationKernel& kernel_a,
                                       const CorrelationKernel& kernel_b, double t, int n_tau,
                                       const ordering::Tolerances& tol = {});

// Finite-difference rate diagnostic: Delta on an n_steps subgrid of [0, t]
// and the smallest eigenvalue of each step increment. Positive entries mean
// instantaneously decoherent evolution over that step.
struct RateDefiniteness {
    std::vector<double> times;        // steps run times[i] -> times[i+1]
    std::vector<double> min_rate_eig; // one per step
};

RateDefiniteness dissipator_rate_report(const SystemModel& system, const CorrelationKernel& kernel,
                                        double t, int n_tau, int n_steps);

} // namespace deco::dissipator
