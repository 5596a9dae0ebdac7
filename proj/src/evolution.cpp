#include "deco/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace deco::evolution {

namespace {

constexpr int kMaxTotalDim = 4096;

std::vector<std::vector<Matrix>> interaction_ops_on_grid(const SystemModel& system,
                                                         const TimeGrid& grid) {
    const int nc = system.channel_count();
    std::vector<std::vector<Matrix>> ops(nc, std::vector<Matrix>(grid.count));
    for (int n = 0; n < nc; ++n) {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < grid.count; ++k)
            ops[n][k] = dissipator::interaction_picture_op(system, n, grid.point(k));
    }
    return ops;
}

Matrix pair_superop_term(Complex alpha, const Matrix& ln, const Matrix& lm, const Matrix& id) {
    return Matrix(alpha * (sandwich_super(lm, ln) - kron(id, ln * lm)) +
                  std::conj(alpha) * (sandwich_super(ln, lm) - kron((lm * ln).transpose(), id)));
}

} // namespace

SuperOperator magnus_generator(const SystemModel& system, const CorrelationKernel& kernel, double t,
                               int n_tau) {
    if (!(t >= 0.0)) throw InvalidParameters("magnus_generator: t must be >= 0");
    if (n_tau < 2) throw InvalidParameters("magnus_generator: n_tau must be >= 2");
    if (kernel.channels() != system.channel_count())
        throw KernelSystemMismatch("magnus_generator: kernel and system channel counts differ");

    const int d = system.dim();
    const int d2 = d * d;
    if (t == 0.0) return SuperOperator::zero(d);

    const TimeGrid grid = TimeGrid::from_zero(t, n_tau);
    const auto lint = interaction_ops_on_grid(system, grid);
    const int nc = system.channel_count();
    const Matrix id = Matrix::Identity(d, d);

    if (kernel.representation() == CorrelationKernel::Representation::White) {
        // The delta sits on the ordered-domain boundary: weight 1/2.
        const Matrix& c = kernel.strength();
        Matrix acc = Matrix::Zero(d2, d2);
        for (int a = 0; a < n_tau; ++a)
            for (int n = 0; n < nc; ++n)
                for (int m = 0; m < nc; ++m)
                    acc += 0.5 * grid.weight(a) * pair_superop_term(c(n, m), lint[n][a], lint[m][a], id);
        return SuperOperator(d, std::move(acc));
    }

    const CorrelationKernel sk = spectral::sample_on(kernel, grid);
    const Matrix& gram = sk.gram();

    // Per-outer-node partial sums, reduced in fixed order afterwards so the
    // result is identical for any thread count.
    std::vector<Matrix> partial(n_tau);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < n_tau; ++a) {
        Matrix acc = Matrix::Zero(d2, d2);
        for (int b = 0; b <= a; ++b) {
            const double w = (a == b) ? 0.5 * grid.weight(a) * grid.weight(a)
                                      : grid.weight(a) * grid.weight(b);
            for (int n = 0; n < nc; ++n)
                for (int m = 0; m < nc; ++m)
                    acc += w * pair_superop_term(gram(static_cast<Eigen::Index>(n) * n_tau + a,
                                                      static_cast<Eigen::Index>(m) * n_tau + b),
                                                 lint[n][a], lint[m][b], id);
        }
        partial[a] = std::move(acc);
    }
    Matrix acc = Matrix::Zero(d2, d2);
    for (int a = 0; a < n_tau; ++a) acc += partial[a];
    return SuperOperator(d, std::move(acc));
}

SuperOperator free_propagator_superop(const SystemModel& system, double t) {
    const Matrix u = hermitian_exp(system.hamiltonian(), Complex(0.0, -t));
    return SuperOperator(system.dim(), sandwich_super(u, u.adjoint()));
}

SuperOperator magnus_map(const SystemModel& system, const CorrelationKernel& kernel, double t,
                         int n_tau) {
    const SuperOperator phi = magnus_generator(system, kernel, t, n_tau);
    const SuperOperator g0 = free_propagator_superop(system, t);
    return SuperOperator(system.dim(), Matrix(g0.matrix * matrix_exp(phi.matrix)));
}

Matrix magnus_propagate(const SystemModel& system, const CorrelationKernel& kernel, double t,
                        int n_tau, const Matrix& rho0) {
    validate_density(rho0);
    const SuperOperator phi = magnus_generator(system, kernel, t, n_tau);
    const Matrix rho_int = unvectorize(matrix_exp(phi.matrix) * vectorize(rho0), system.dim());
    const Matrix u = hermitian_exp(system.hamiltonian(), Complex(0.0, -t));
    return u * rho_int * u.adjoint();
}

// ---------------------------------------------------------------------------
// Master equation

namespace {

// alpha_nm evaluated along the trajectory: white kernels stay analytic,
// stationary kernels are tabulated on the full-step grid and interpolated
// linearly in between, sampled kernels interpolate their own grid bilinearly.
class KernelHistory {
public:
    KernelHistory(const SystemModel& system, const CorrelationKernel& kernel, double t_span,
                  double dt)
        : channels_(kernel.channels()), dt_(dt) {
        using Rep = CorrelationKernel::Representation;
        switch (kernel.representation()) {
            case Rep::White:
                white_ = true;
                strength_ = kernel.strength();
                break;
            case Rep::Stationary: {
                count_ = static_cast<int>(std::ceil(t_span / dt - 1e-9)) + 1;
                std::vector<double> s(count_);
                for (int j = 0; j < count_; ++j) s[j] = j * dt;
                const TimeGrid span_grid = TimeGrid::from_zero(std::max(t_span, dt), std::max(count_, 2));
                vals_ = spectral::stationary_time_values(
                    kernel, s, spectral::default_transform_grid(kernel, span_grid));
                break;
            }
            case Rep::Sampled: {
                sampled_ = kernel;
                const TimeGrid& g = kernel.time_grid();
                if (g.min != 0.0 || g.max + 1e-9 * g.max < t_span)
                    throw IncompatibleGrids("master_equation_evolve: sampled kernel does not cover [0, t_span]");
                break;
            }
        }
        (void)system;
    }

    bool white() const { return white_; }
    const Matrix& strength() const { return strength_; }

    // alpha(t, tau) as an N x N channel matrix
    Matrix eval(double t, double tau) const {
        if (white_) throw NumericalError("KernelHistory: white kernels are handled analytically");
        if (sampled_) {
            const TimeGrid& g = sampled_->time_grid();
            return bilinear(g, t, tau);
        }
        // stationary: alpha(t - tau), linear interpolation on the dt grid
        const double s = t - tau;
        const double pos = std::clamp(s / dt_, 0.0, static_cast<double>(count_ - 1));
        const int j = std::min(static_cast<int>(pos), count_ - 2);
        const double f = pos - j;
        return Matrix((1.0 - f) * vals_[j] + f * vals_[j + 1]);
    }

private:
    Matrix bilinear(const TimeGrid& g, double t, double tau) const {
        auto locate = [&](double x, int& idx, double& frac) {
            const double pos = std::clamp((x - g.min) / g.spacing(), 0.0, double(g.count - 1));
            idx = std::min(static_cast<int>(pos), g.count - 2);
            frac = pos - idx;
        };
        int kt, ks;
        double ft, fs;
        locate(t, kt, ft);
        locate(tau, ks, fs);
        Matrix out = Matrix::Zero(channels_, channels_);
        for (int dtt = 0; dtt <= 1; ++dtt)
            for (int dss = 0; dss <= 1; ++dss) {
                const double w = (dtt ? ft : 1.0 - ft) * (dss ? fs : 1.0 - fs);
                if (w == 0.0) continue;
                Matrix block(channels_, channels_);
                const int nt = g.count;
                for (int n = 0; n < channels_; ++n)
                    for (int m = 0; m < channels_; ++m)
                        block(n, m) = sampled_->gram()(static_cast<Eigen::Index>(n) * nt + kt + dtt,
                                                       static_cast<Eigen::Index>(m) * nt + ks + dss);
                out += w * block;
            }
        return out;
    }

    int channels_{1};
    double dt_{1.0};
    bool white_{false};
    Matrix strength_;
    int count_{0};
    std::vector<Matrix> vals_;
    std::optional<CorrelationKernel> sampled_;
};

class MasterIntegrator {
public:
    MasterIntegrator(const SystemModel& system, const CorrelationKernel& kernel, double t_span,
                     double dt)
        : system_(system), history_(system, kernel, t_span, dt), dt_(dt) {
        const int nc = system.channel_count();
        const int quarters = static_cast<int>(std::llround(t_span / (dt / 4.0))) + 2;
        // e^{-iHs} L_m e^{+iHs} on the quarter-step grid; stage offsets land here.
        lrot_.assign(nc, std::vector<Matrix>(quarters));
        for (int m = 0; m < nc; ++m) {
#pragma omp parallel for schedule(static)
            for (int q = 0; q < quarters; ++q)
                lrot_[m][q] = dissipator::interaction_picture_op(system_, m, -q * dt_ / 4.0);
        }
    }

    Matrix rhs(double t, const Matrix& rho) const {
        const Complex iu(0.0, 1.0);
        const Matrix& h = system_.hamiltonian();
        Matrix out = -iu * (h * rho - rho * h);
        const int nc = system_.channel_count();
        for (int n = 0; n < nc; ++n) {
            const Matrix& ln = system_.coupling_for_channel(n);
            for (int m = 0; m < nc; ++m) {
                const Matrix a = diamond(n, m, t);
                const Matrix x = rho * a.adjoint() - a * rho;
                out += ln * x - x * ln;
            }
        }
        return out;
    }

private:
    // (A_nm <> L_m)(t) = integral_0^t alpha_nm(t, tau) e^{-iH(t-tau)} L_m e^{+iH(t-tau)} dtau
    Matrix diamond(int n, int m, double t) const {
        const int d = system_.dim();
        if (history_.white())
            return Matrix(0.5 * history_.strength()(n, m) * system_.coupling_for_channel(m));
        Matrix acc = Matrix::Zero(d, d);
        if (t <= 0.0) return acc;
        const int full = static_cast<int>(t / dt_ + 1e-9);
        // trapezoid over tau nodes {0, dt, ..., full*dt} plus the endpoint t
        std::vector<double> nodes(full + 1);
        for (int j = 0; j <= full; ++j) nodes[j] = j * dt_;
        if (t - nodes.back() > 1e-12 * dt_) nodes.push_back(t);
        const int nn = static_cast<int>(nodes.size());
        for (int j = 0; j < nn; ++j) {
            double w = 0.0;
            if (j > 0) w += 0.5 * (nodes[j] - nodes[j - 1]);
            if (j + 1 < nn) w += 0.5 * (nodes[j + 1] - nodes[j]);
            if (w == 0.0) continue;
            acc += w * history_.eval(t, nodes[j]) (n, m) * rotated_coupling(m, t - nodes[j]);
        }
        return acc;
    }

    Matrix rotated_coupling(int m, double s) const {
        const double q = s / (dt_ / 4.0);
        const int qi = static_cast<int>(std::llround(q));
        if (qi >= 0 && qi < static_cast<int>(lrot_[m].size()) && std::abs(q - qi) < 1e-6)
            return lrot_[m][qi];
        return dissipator::interaction_picture_op(system_, m, -s);
    }

    const SystemModel& system_;
    KernelHistory history_;
    double dt_;
    std::vector<std::vector<Matrix>> lrot_;
};

Matrix rk4_step(const MasterIntegrator& f, double t, const Matrix& rho, double h) {
    const Matrix k1 = f.rhs(t, rho);
    const Matrix k2 = f.rhs(t + 0.5 * h, rho + 0.5 * h * k1);
    const Matrix k3 = f.rhs(t + 0.5 * h, rho + 0.5 * h * k2);
    const Matrix k4 = f.rhs(t + h, rho + h * k3);
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

Trajectory master_equation_evolve(const SystemModel& system, const CorrelationKernel& kernel,
                                  double t_span, double dt, const Matrix& rho0,
                                  const MasterOptions& options) {
    if (!(t_span > 0.0) || !(dt > 0.0))
        throw InvalidParameters("master_equation_evolve: t_span and dt must be > 0");
    const long steps = std::lround(t_span / dt);
    if (steps < 1 || std::abs(steps * dt - t_span) > 1e-9 * t_span)
        throw InvalidParameters("master_equation_evolve: dt must divide t_span");
    if (kernel.channels() != system.channel_count())
        throw KernelSystemMismatch("master_equation_evolve: kernel and system channel counts differ");
    validate_density(rho0);

    MasterIntegrator f(system, kernel, t_span, dt);
    Trajectory traj;
    traj.method = Trajectory::Method::Master;
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);

    Matrix rho = rho0;
    for (long j = 0; j < steps; ++j) {
        const double t = j * dt;
        const Matrix full = rk4_step(f, t, rho, dt);
        const Matrix half = rk4_step(f, t + 0.5 * dt, rk4_step(f, t, rho, 0.5 * dt), 0.5 * dt);
        const double err = (full - half).cwiseAbs().maxCoeff();
        if (err > options.step_tol)
            throw StepSizeTooLarge("master_equation_evolve: embedded half-step error " +
                                   std::to_string(err) + " at t = " + std::to_string(t));
        rho = hermitize(half);
        traj.times.push_back((j + 1) * dt);
        traj.states.push_back(rho);
    }
    return traj;
}

// ---------------------------------------------------------------------------

Matrix choi_matrix(const SuperOperator& map) {
    return hermitize(choi_reshuffle(map.matrix, map.dim));
}

double trace_distance(const Matrix& rho1, const Matrix& rho2) {
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
        throw ValidationError("trace_distance: dimension mismatch");
    const Eigen::VectorXd w = hermitian_eigenvalues(rho1 - rho2);
    return 0.5 * w.cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Exact system+bath oracle

namespace {

Matrix fock_annihilator(int levels) {
    Matrix a = Matrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Matrix truncated_gibbs(double omega, double temperature, int levels) {
    Eigen::VectorXd p(levels);
    if (temperature <= 0.0) {
        p.setZero();
        p(0) = 1.0;
    } else {
        for (int n = 0; n < levels; ++n) p(n) = std::exp(-omega * n / temperature);
        p /= p.sum();
    }
    Matrix rho = Matrix::Zero(levels, levels);
    for (int n = 0; n < levels; ++n) rho(n, n) = p(n);
    return rho;
}

} // namespace

Matrix exact_bath_evolve(const SystemModel& system, const DiscreteBathSpec& bath, double t,
                         double dt, const Matrix& rho0) {
    return exact_bath_evolve(system, std::vector<DiscreteBathSpec>{bath}, t, dt, rho0);
}

Matrix exact_bath_evolve(const SystemModel& system, const std::vector<DiscreteBathSpec>& baths,
                         double t, double dt, const Matrix& rho0) {
    if (baths.empty()) throw ValidationError("exact_bath_evolve: no baths");
    if (!(t >= 0.0) || !(dt > 0.0))
        throw InvalidParameters("exact_bath_evolve: t >= 0 and dt > 0 required");
    validate_density(rho0);

    struct ModeRef {
        double omega, g;
        int levels;
        int bath_channel;
        double temperature;
    };
    std::vector<ModeRef> modes;
    for (const auto& b : baths) {
        b.validate();
        if (b.channel >= system.channel_count())
            throw KernelSystemMismatch("exact_bath_evolve: bath channel outside system channels");
        for (const auto& m : b.modes)
            modes.push_back({m.omega, m.g, b.fock_truncation, b.channel, b.temperature});
    }

    const int d = system.dim();
    long total = d;
    for (const auto& m : modes) total *= m.levels;
    if (total > kMaxTotalDim)
        throw DimensionTooLarge("exact_bath_evolve: total dimension " + std::to_string(total) +
                                " exceeds " + std::to_string(kMaxTotalDim));
    const int dim = static_cast<int>(total);
    const int n_modes = static_cast<int>(modes.size());

    // Embed per-mode operators: system (x) mode_0 (x) mode_1 (x) ...
    auto embed_mode = [&](int mode_idx, const Matrix& op) {
        Matrix out = Matrix::Identity(1, 1);
        out = kron(out, Matrix::Identity(d, d));
        for (int k = 0; k < n_modes; ++k)
            out = kron(out, k == mode_idx ? op : Matrix::Identity(modes[k].levels, modes[k].levels));
        return out;
    };
    auto embed_system = [&](const Matrix& op) {
        Matrix out = op;
        for (int k = 0; k < n_modes; ++k) out = kron(out, Matrix::Identity(modes[k].levels, modes[k].levels));
        return out;
    };

    Matrix h_tot = embed_system(system.hamiltonian());
    for (int k = 0; k < n_modes; ++k) {
        const Matrix a = fock_annihilator(modes[k].levels);
        h_tot += modes[k].omega * embed_mode(k, Matrix(a.adjoint() * a));
        const Matrix x = a + a.adjoint();
        // L acts on the system slot, x on mode k; the joint operator is the
        // product of the two embeddings.
        h_tot += modes[k].g * Matrix(embed_system(system.coupling_for_channel(modes[k].bath_channel)) *
                                     embed_mode(k, x));
    }

    // Initial state: rho0 (x) Gibbs per mode
    Matrix rho_tot = rho0;
    for (int k = 0; k < n_modes; ++k)
        rho_tot = kron(rho_tot, truncated_gibbs(modes[k].omega, modes[k].temperature, modes[k].levels));

    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h_tot));
    const Eigen::VectorXd& e = es.eigenvalues();
    const Matrix& v = es.eigenvectors();
    const Matrix rho_eig = v.adjoint() * rho_tot * v;

    auto state_at = [&](double tt) {
        Vector phase(dim);
        for (int i = 0; i < dim; ++i) phase(i) = std::exp(Complex(0.0, -e(i) * tt));
        return Matrix(v * (phase.asDiagonal() * rho_eig * phase.conjugate().asDiagonal()) * v.adjoint());
    };

    // Top-level projectors for the truncation check
    std::vector<Matrix> top_projectors;
    for (int k = 0; k < n_modes; ++k) {
        Matrix p = Matrix::Zero(modes[k].levels, modes[k].levels);
        p(modes[k].levels - 1, modes[k].levels - 1) = 1.0;
        top_projectors.push_back(embed_mode(k, p));
    }

    const int checkpoints = std::max(1, static_cast<int>(std::ceil(t / dt - 1e-9)));
    Matrix rho_t = rho_tot;
    for (int j = 1; j <= checkpoints; ++j) {
        const double tj = std::min(j * dt, t);
        rho_t = state_at(tj);
        for (int k = 0; k < n_modes; ++k) {
            const double pop = (rho_t * top_projectors[k]).trace().real();
            if (pop > 1e-6)
                throw TruncationError("exact_bath_evolve: top Fock level of mode " +
                                      std::to_string(k) + " reached population " +
                                      std::to_string(pop) + " at t = " + std::to_string(tj));
        }
    }

    // Partial trace over the bath
    const int bath_dim = dim / d;
    Matrix rho_s = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Complex acc(0.0, 0.0);
            for (int b = 0; b < bath_dim; ++b)
                acc += rho_t(static_cast<Eigen::Index>(i) * bath_dim + b,
                             static_cast<Eigen::Index>(j) * bath_dim + b);
            rho_s(i, j) = acc;
        }
    return hermitize(rho_s);
}

} // namespace deco::evolution
