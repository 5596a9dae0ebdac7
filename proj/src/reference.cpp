#include "deco/reference.hpp"

#include <cmath>
#include <numbers>

namespace deco::ref {

using dissipator::SystemModel;
using spectral::CorrelationKernel;

Matrix dissipator_direct(const SystemModel& system, const CorrelationKernel& sampled_kernel) {
    if (sampled_kernel.representation() != CorrelationKernel::Representation::Sampled)
        throw ValidationError("dissipator_direct: kernel must be sampled");
    if (sampled_kernel.channels() != system.channel_count())
        throw KernelSystemMismatch("dissipator_direct: channel counts differ");

    const TimeGrid& grid = sampled_kernel.time_grid();
    const int nt = grid.count;
    const int nc = system.channel_count();
    const int d = system.dim();
    const Matrix& gram = sampled_kernel.gram();

    std::vector<std::vector<Matrix>> lint(nc, std::vector<Matrix>(nt));
    for (int n = 0; n < nc; ++n)
        for (int k = 0; k < nt; ++k)
            lint[n][k] = dissipator::interaction_picture_op(system, n, grid.point(k));

    Matrix delta = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int ip = 0; ip < d; ++ip)
            for (int j = 0; j < d; ++j)
                for (int jp = 0; jp < d; ++jp) {
                    Complex acc(0.0, 0.0);
                    for (int m = 0; m < nc; ++m)
                        for (int k = 0; k < nt; ++k)
                            for (int n = 0; n < nc; ++n)
                                for (int kp = 0; kp < nt; ++kp)
                                    acc += grid.weight(k) * grid.weight(kp) * lint[m][k](i, ip) *
                                           gram(n * nt + kp, m * nt + k) *
                                           std::conj(lint[n][kp](j, jp));
                    delta(i * d + ip, j * d + jp) = acc;
                }
    return delta;
}

Matrix dissipator_direct_white(const SystemModel& system, const Matrix& strength, double t,
                               int n_tau) {
    const TimeGrid grid = TimeGrid::from_zero(t, n_tau);
    const int nc = system.channel_count();
    const int d = system.dim();

    std::vector<std::vector<Matrix>> lint(nc, std::vector<Matrix>(n_tau));
    for (int n = 0; n < nc; ++n)
        for (int k = 0; k < n_tau; ++k)
            lint[n][k] = dissipator::interaction_picture_op(system, n, grid.point(k));

    Matrix delta = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int ip = 0; ip < d; ++ip)
            for (int j = 0; j < d; ++j)
                for (int jp = 0; jp < d; ++jp) {
                    Complex acc(0.0, 0.0);
                    for (int m = 0; m < nc; ++m)
                        for (int n = 0; n < nc; ++n)
                            for (int k = 0; k < n_tau; ++k)
                                acc += grid.weight(k) * strength(n, m) * lint[m][k](i, ip) *
                                       std::conj(lint[n][k](j, jp));
                    delta(i * d + ip, j * d + jp) = acc;
                }
    return delta;
}

std::vector<Matrix> stationary_time_values_serial(const CorrelationKernel& kernel,
                                                  std::span<const double> s_values,
                                                  const FrequencyGrid& freq_grid) {
    if (kernel.representation() != CorrelationKernel::Representation::Stationary)
        throw ValidationError("stationary_time_values_serial: kernel must be stationary");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const int nc = kernel.channels();
    std::vector<Matrix> out(s_values.size(), Matrix::Zero(nc, nc));

    std::vector<Matrix> spec_vals;
    if (kernel.has_smooth_part()) {
        spec_vals.resize(freq_grid.count);
        for (int j = 0; j < freq_grid.count; ++j)
            spec_vals[j] = kernel.freq_matrix(freq_grid.point(j));
    }
    for (std::size_t idx = 0; idx < s_values.size(); ++idx) {
        const double s = s_values[idx];
        Matrix acc = Matrix::Zero(nc, nc);
        for (int j = 0; j < static_cast<int>(spec_vals.size()); ++j) {
            const double w = freq_grid.point(j);
            acc += std::exp(Complex(0.0, w * s)) * (freq_grid.weight(j) / two_pi) * spec_vals[j];
        }
        for (const auto& line : kernel.lines())
            acc += (std::exp(Complex(0.0, line.omega * s)) / two_pi) * line.weight;
        out[idx] = std::move(acc);
    }
    return out;
}

Matrix magnus_generator_serial(const SystemModel& system, const CorrelationKernel& kernel,
                               double t, int n_tau) {
    const int d = system.dim();
    const int d2 = d * d;
    if (t == 0.0) return Matrix::Zero(d2, d2);
    const TimeGrid grid = TimeGrid::from_zero(t, n_tau);
    const int nc = system.channel_count();
    const Matrix id = Matrix::Identity(d, d);

    std::vector<std::vector<Matrix>> lint(nc, std::vector<Matrix>(n_tau));
    for (int n = 0; n < nc; ++n)
        for (int k = 0; k < n_tau; ++k)
            lint[n][k] = dissipator::interaction_picture_op(system, n, grid.point(k));

    auto pair_term = [&](Complex al, const Matrix& ln, const Matrix& lm) {
        return Matrix(al * (sandwich_super(lm, ln) - kron(id, ln * lm)) +
                      std::conj(al) * (sandwich_super(ln, lm) - kron((lm * ln).transpose(), id)));
    };

    Matrix acc = Matrix::Zero(d2, d2);
    if (kernel.representation() == CorrelationKernel::Representation::White) {
        // The delta sits on the ordered-domain boundary and carries weight 1/2.
        const Matrix& c = kernel.strength();
        for (int a = 0; a < n_tau; ++a)
            for (int n = 0; n < nc; ++n)
                for (int m = 0; m < nc; ++m)
                    acc += 0.5 * grid.weight(a) * pair_term(c(n, m), lint[n][a], lint[m][a]);
        return acc;
    }

    const CorrelationKernel sk = spectral::sample_on(kernel, grid);
    const Matrix& gram = sk.gram();
    for (int a = 0; a < n_tau; ++a)
        for (int b = 0; b <= a; ++b) {
            const double w = (a == b) ? 0.5 * grid.weight(a) * grid.weight(a)
                                      : grid.weight(a) * grid.weight(b);
            for (int n = 0; n < nc; ++n)
                for (int m = 0; m < nc; ++m)
                    acc += w * pair_term(gram(n * n_tau + a, m * n_tau + b), lint[n][a], lint[m][b]);
        }
    return acc;
}

} // namespace deco::ref
