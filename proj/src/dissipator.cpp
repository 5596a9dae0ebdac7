#include "deco/dissipator.hpp"

#include <algorithm>
#include <cmath>

namespace deco::dissipator {

namespace {

constexpr double kHermTol = 1e-12;

std::vector<std::vector<Matrix>> interaction_ops_on_grid(const SystemModel& system,
                                                         const TimeGrid& grid) {
    const int nc = system.channel_count();
    const int nt = grid.count;
    std::vector<std::vector<Matrix>> ops(nc, std::vector<Matrix>(nt));
    for (int n = 0; n < nc; ++n) {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < nt; ++k) ops[n][k] = interaction_picture_op(system, n, grid.point(k));
    }
    return ops;
}

} // namespace

SystemModel::SystemModel(Matrix hamiltonian, std::vector<Coupling> couplings)
    : hamiltonian_(std::move(hamiltonian)), couplings_(std::move(couplings)) {
    if (hamiltonian_.rows() != hamiltonian_.cols() || hamiltonian_.rows() < 2)
        throw ValidationError("SystemModel: hamiltonian must be square with dim >= 2");
    if (!approx_hermitian(hamiltonian_, kHermTol))
        throw ValidationError("SystemModel: hamiltonian not Hermitian");
    if (couplings_.empty()) throw ValidationError("SystemModel: at least one coupling required");

    channel_count_ = 0;
    for (const auto& c : couplings_) {
        if (c.matrix.rows() != hamiltonian_.rows() || c.matrix.cols() != hamiltonian_.cols())
            throw ValidationError("SystemModel: coupling dimension mismatch");
        if (!approx_hermitian(c.matrix, kHermTol))
            throw ValidationError("SystemModel: coupling operator not Hermitian");
        if (c.channel < 0) throw ValidationError("SystemModel: coupling channel must be >= 0");
        channel_count_ = std::max(channel_count_, c.channel + 1);
    }
    channel_to_coupling_.assign(channel_count_, -1);
    for (std::size_t i = 0; i < couplings_.size(); ++i) {
        const int ch = couplings_[i].channel;
        if (channel_to_coupling_[ch] != -1)
            throw ValidationError("SystemModel: two couplings share one channel");
        channel_to_coupling_[ch] = static_cast<int>(i);
    }
    for (int ch = 0; ch < channel_count_; ++ch)
        if (channel_to_coupling_[ch] == -1)
            throw ValidationError("SystemModel: coupling channels must form a contiguous range");

    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(hamiltonian_));
    energies_ = es.eigenvalues();
    eigenbasis_ = es.eigenvectors();
}

const Matrix& SystemModel::coupling_for_channel(int channel) const {
    if (channel < 0 || channel >= channel_count_)
        throw ValidationError("SystemModel: channel index out of range");
    return couplings_[channel_to_coupling_[channel]].matrix;
}

Matrix interaction_picture_op(const SystemModel& system, int channel, double tau) {
    const Matrix& v = system.eigenbasis();
    const Eigen::VectorXd& e = system.energies();
    const Matrix l_eig = v.adjoint() * system.coupling_for_channel(channel) * v;
    const int d = system.dim();
    Matrix x(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            x(a, b) = l_eig(a, b) * std::exp(Complex(0.0, (e(a) - e(b)) * tau));
    return v * x * v.adjoint();
}

Vector pair_vector(const Matrix& m) {
    const int d = static_cast<int>(m.rows());
    Vector v(d * d);
    for (int i = 0; i < d; ++i)
        for (int ip = 0; ip < d; ++ip) v(i * d + ip) = m(i, ip);
    return v;
}

AssembledDissipator algebraic_dissipator(const SystemModel& system, const CorrelationKernel& kernel,
                                         double t, int n_tau, const DissipatorOptions& options) {
    if (!(t >= 0.0)) throw InvalidParameters("algebraic_dissipator: t must be >= 0");
    if (n_tau < 2) throw InvalidParameters("algebraic_dissipator: n_tau must be >= 2");
    if (kernel.channels() != system.channel_count())
        throw KernelSystemMismatch("algebraic_dissipator: kernel and system channel counts differ");

    const int d = system.dim();
    const int d2 = d * d;
    AssembledDissipator out;
    out.delta.time = t;
    if (t == 0.0) {
        out.delta.matrix = Matrix::Zero(d2, d2);
        return out;
    }

    const TimeGrid grid = TimeGrid::from_zero(t, n_tau);
    const auto lint = interaction_ops_on_grid(system, grid);
    const int nc = system.channel_count();

    if (kernel.representation() == CorrelationKernel::Representation::White) {
        const Matrix& c = kernel.strength();
        if (options.check_kernel_psd) {
            const auto e = hermitian_eig_extremes(c);
            if (e.min_eig < -options.kernel_psd_tol * std::max(std::abs(e.max_eig), 1e-300))
                out.kernel_warning = KernelPsdWarning{e.min_eig, e.max_eig};
        }
        // delta collapses one integral: Delta = sum_k w_k M_k C^T M_k^dagger
        Matrix delta = Matrix::Zero(d2, d2);
        Matrix mk(d2, nc);
        for (int k = 0; k < n_tau; ++k) {
            for (int m = 0; m < nc; ++m) mk.col(m) = pair_vector(lint[m][k]);
            delta += grid.weight(k) * (mk * c.transpose() * mk.adjoint());
        }
        out.delta.matrix = hermitize(delta);
        return out;
    }

    const CorrelationKernel sk = spectral::sample_on(kernel, grid);
    const Matrix& a = sk.gram();
    if (options.check_kernel_psd) {
        const auto e = hermitian_eig_extremes(a);
        if (e.min_eig < -options.kernel_psd_tol * std::max(std::abs(e.max_eig), 1e-300))
            out.kernel_warning = KernelPsdWarning{e.min_eig, e.max_eig};
    }

    // B[(m,k), I] = w_k <i| L_m(tau_k) |i'>, rows channel-major
    Matrix b(static_cast<Eigen::Index>(nc) * n_tau, d2);
    for (int m = 0; m < nc; ++m)
        for (int k = 0; k < n_tau; ++k)
            b.row(static_cast<Eigen::Index>(m) * n_tau + k) =
                grid.weight(k) * pair_vector(lint[m][k]).transpose();

    // Delta = (B^dagger A B)^T; A*B column by column keeps the reduction
    // order independent of the thread count.
    Matrix ab(b.rows(), d2);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < d2; ++j) ab.col(j) = a * b.col(j);
    const Matrix g = b.adjoint() * ab;
    out.delta.matrix = hermitize(g.transpose());
    return out;
}

Matrix dissipator_superop_matrix(const DissipatorMatrix& delta, int dim) {
    const int d2 = dim * dim;
    if (delta.matrix.rows() != d2 || delta.matrix.cols() != d2)
        throw ValidationError("dissipator_superop_matrix: dimension mismatch");
    Matrix super = Matrix::Zero(d2, d2);
    Matrix e_i = Matrix::Zero(dim, dim);
    Matrix e_j = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int ip = 0; ip < dim; ++ip) {
            const int idx_i = i * dim + ip;
            e_i.setZero();
            e_i(i, ip) = 1.0;
            for (int j = 0; j < dim; ++j)
                for (int jp = 0; jp < dim; ++jp) {
                    const int idx_j = j * dim + jp;
                    const Complex w = delta.matrix(idx_i, idx_j);
                    if (w == Complex(0.0, 0.0)) continue;
                    e_j.setZero();
                    e_j(j, jp) = 1.0;
                    const Matrix ejd_ei = e_j.adjoint() * e_i; // delta_{ji} E_{j', i'}
                    super += w * (sandwich_super(e_i, e_j.adjoint()) -
                                  0.5 * (left_mul_super(ejd_ei) + right_mul_super(ejd_ei)));
                }
        }
    return super;
}

GeneratorDecomposition lindblad_decompose(const SuperOperator& phi, const DissipatorMatrix& delta,
                                          double residual_tol_rel) {
    const int d = phi.dim;
    const Matrix dsup = dissipator_superop_matrix(delta, d);
    const Matrix r = phi.matrix - dsup;

    // K = sum_ab E_ba R(E_ab); for R = -i[Theta, .] with traceless Theta,
    // K = i d Theta.
    Matrix k = Matrix::Zero(d, d);
    Matrix basis = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            basis.setZero();
            basis(a, b) = 1.0;
            const Matrix image = unvectorize(r * vectorize(basis), d);
            Matrix e_ba = Matrix::Zero(d, d);
            e_ba(b, a) = 1.0;
            k += e_ba * image;
        }
    Matrix theta = hermitize(k / Complex(0.0, static_cast<double>(d)));
    theta -= (theta.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);

    const Matrix rebuild =
        Complex(0.0, -1.0) * (left_mul_super(theta) - right_mul_super(theta)) + dsup;
    const double residual = (phi.matrix - rebuild).norm();
    const double scale = phi.matrix.norm();
    if (scale > 0.0 && residual > residual_tol_rel * scale)
        throw DecompositionResidualTooLarge(
            "lindblad_decompose: residual " + std::to_string(residual / scale) +
            " of ||Phi||; generator and dissipator disagree");
    return GeneratorDecomposition{std::move(theta), delta, residual};
}

DissipatorMatrix dissipator_from_generator(const SuperOperator& phi, double t) {
    const int d = phi.dim;
    const Matrix c = choi_reshuffle(phi.matrix, d);
    Vector v = pair_vector(Matrix::Identity(d, d));
    const Matrix p = Matrix::Identity(d * d, d * d) - (v * v.adjoint()) / static_cast<double>(d);
    return DissipatorMatrix{t, hermitize(p * c * p)};
}

ordering::OrderResult dissipator_order(const SystemModel& system, const CorrelationKernel& kernel_a,
                                       const CorrelationKernel& kernel_b, double t, int n_tau,
                                       const ordering::Tolerances& tol) {
    const auto da = algebraic_dissipator(system, kernel_a, t, n_tau);
    const auto db = algebraic_dissipator(system, kernel_b, t, n_tau);
    const Matrix diff = da.delta.matrix - db.delta.matrix;

    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(diff));
    const Eigen::VectorXd& w = es.eigenvalues();
    Eigen::Index imax = 0;
    es.eigenvectors().col(0).cwiseAbs().maxCoeff(&imax);
    ordering::WorstPoint point{ordering::WorstPoint::Kind::Index, 0.0, 0, static_cast<int>(imax)};

    const auto ea = hermitian_eig_extremes(da.delta.matrix);
    const auto eb = hermitian_eig_extremes(db.delta.matrix);
    const double scale = std::max({std::abs(ea.min_eig), std::abs(ea.max_eig),
                                   std::abs(eb.min_eig), std::abs(eb.max_eig)});
    return ordering::order_from_extremes(w(0), w(w.size() - 1), point, scale, tol);
}

RateDefiniteness dissipator_rate_report(const SystemModel& system, const CorrelationKernel& kernel,
                                        double t, int n_tau, int n_steps) {
    if (n_steps < 1) throw InvalidParameters("dissipator_rate_report: n_steps must be >= 1");
    RateDefiniteness report;
    const int d2 = system.dim() * system.dim();
    Matrix prev = Matrix::Zero(d2, d2);
    report.times.push_back(0.0);
    for (int i = 1; i <= n_steps; ++i) {
        const double ti = t * i / n_steps;
        const Matrix cur = algebraic_dissipator(system, kernel, ti, n_tau).delta.matrix;
        const double dt = t / n_steps;
        report.min_rate_eig.push_back(hermitian_eig_extremes((cur - prev) / dt).min_eig);
        report.times.push_back(ti);
        prev = cur;
    }
    return report;
}

} // namespace deco::dissipator
