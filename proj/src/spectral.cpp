#include "deco/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace deco::spectral {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Caps the auto-chosen inverse-transform grid; past this the UV range is
// trimmed (the log tail of ohmic spectra is regulated by omega_max anyway).
constexpr int kMaxTransformPoints = 400001;

double bose_occupation(double omega, double temperature) {
    if (temperature <= 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

} // namespace

void ThermalReservoirSpec::validate() const {
    if (!(gamma0 > 0.0)) throw ValidationError("ThermalReservoirSpec.gamma0 must be > 0");
    if (!(cutoff > 0.0)) throw ValidationError("ThermalReservoirSpec.cutoff must be > 0");
    if (!(temperature >= 0.0)) throw ValidationError("ThermalReservoirSpec.temperature must be >= 0");
    if (channel < 0) throw ValidationError("ThermalReservoirSpec.channel must be >= 0");
}

void DiscreteBathSpec::validate() const {
    if (modes.empty()) throw ValidationError("DiscreteBathSpec.modes must be non-empty");
    for (const auto& m : modes)
        if (!(m.omega > 0.0)) throw ValidationError("DiscreteBathSpec.modes: omega must be > 0");
    if (!(temperature >= 0.0)) throw ValidationError("DiscreteBathSpec.temperature must be >= 0");
    if (fock_truncation < 2) throw ValidationError("DiscreteBathSpec.fock_truncation must be >= 2");
    if (channel < 0) throw ValidationError("DiscreteBathSpec.channel must be >= 0");
    // The neglected thermal tail per mode, x^n with x = exp(-omega/T), must be
    // below 1e-8 for the truncated Gibbs state to be faithful.
    if (temperature > 0.0) {
        for (const auto& m : modes) {
            const double tail = std::exp(-m.omega / temperature * fock_truncation);
            if (tail >= 1e-8)
                throw ValidationError("DiscreteBathSpec.fock_truncation too small for thermal tail < 1e-8");
        }
    }
}

double fdr_kernel(double omega, double temperature) {
    if (!(temperature >= 0.0)) throw InvalidParameters("fdr_kernel: temperature must be >= 0");
    if (temperature == 0.0) return std::abs(omega);
    const double x = omega / (2.0 * temperature);
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        // x coth x = 1 + x^2/3 - x^4/45 + O(x^6)
        const double x2 = x * x;
        return 2.0 * temperature * (1.0 + x2 / 3.0 - x2 * x2 / 45.0);
    }
    return 2.0 * temperature * (x / std::tanh(x));
}

double damping_kernel(double omega, const ThermalReservoirSpec& spec) {
    switch (spec.family) {
        case CutoffFamily::Drude: {
            const double l2 = spec.cutoff * spec.cutoff;
            return spec.gamma0 * l2 / (omega * omega + l2);
        }
        case CutoffFamily::ExponentialCutoff:
            return spec.gamma0 * std::exp(-std::abs(omega) / spec.cutoff);
    }
    return 0.0; // unreachable
}

double correlation_freq(double omega, const ThermalReservoirSpec& spec) {
    return damping_kernel(omega, spec) * (fdr_kernel(omega, spec.temperature) - omega);
}

Complex discrete_bath_correlation(const DiscreteBathSpec& spec, double s) {
    Complex sum(0.0, 0.0);
    for (const auto& m : spec.modes) {
        const double coth = 1.0 + 2.0 * bose_occupation(m.omega, spec.temperature);
        const double g2 = m.g * m.g;
        sum += Complex(g2 * coth * std::cos(m.omega * s), -g2 * std::sin(m.omega * s));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// CorrelationKernel

CorrelationKernel CorrelationKernel::thermal(const ThermalReservoirSpec& spec, int channels) {
    spec.validate();
    if (spec.channel >= channels)
        throw ValidationError("CorrelationKernel::thermal: channel index outside channel space");
    const int ch = spec.channel;
    auto eval = [spec, channels, ch](double omega) {
        Matrix m = Matrix::Zero(channels, channels);
        m(ch, ch) = correlation_freq(omega, spec);
        return m;
    };
    const double scale = std::max({50.0 * spec.temperature, 20.0 * spec.cutoff, 1.0});
    const double feature =
        spec.temperature > 0.0 ? std::min(spec.cutoff, spec.temperature) : spec.cutoff;
    return stationary(channels, std::move(eval), scale, feature);
}

CorrelationKernel CorrelationKernel::discrete_bath_spectrum(const DiscreteBathSpec& spec,
                                                            int channels) {
    spec.validate();
    if (spec.channel >= channels)
        throw ValidationError("CorrelationKernel::discrete_bath_spectrum: channel index outside channel space");
    std::vector<SpectralLine> lines;
    double omega_top = 1.0;
    for (const auto& m : spec.modes) {
        const double nbar = bose_occupation(m.omega, spec.temperature);
        const double g2 = m.g * m.g;
        omega_top = std::max(omega_top, 2.0 * m.omega);
        Matrix minus = Matrix::Zero(channels, channels);
        minus(spec.channel, spec.channel) = kTwoPi * g2 * (nbar + 1.0);
        lines.push_back({-m.omega, std::move(minus)});
        if (nbar > 0.0) {
            Matrix plus = Matrix::Zero(channels, channels);
            plus(spec.channel, spec.channel) = kTwoPi * g2 * nbar;
            lines.push_back({m.omega, std::move(plus)});
        }
    }
    const double scale = std::max(omega_top, 50.0 * spec.temperature);
    return stationary(channels, nullptr, scale, omega_top, std::move(lines));
}

CorrelationKernel CorrelationKernel::white(Matrix strength) {
    if (strength.rows() != strength.cols())
        throw ValidationError("CorrelationKernel::white: strength must be square");
    CorrelationKernel k;
    k.rep_ = Representation::White;
    k.channels_ = static_cast<int>(strength.rows());
    k.strength_ = std::move(strength);
    return k;
}

CorrelationKernel CorrelationKernel::white_scalar(double strength) {
    Matrix c(1, 1);
    c(0, 0) = strength;
    return white(std::move(c));
}

CorrelationKernel CorrelationKernel::stationary(int channels, std::function<Matrix(double)> freq_eval,
                                                double freq_scale_hint, double min_feature_hint,
                                                std::vector<SpectralLine> lines) {
    if (channels < 1) throw ValidationError("CorrelationKernel: channels must be >= 1");
    for (const auto& line : lines)
        if (line.weight.rows() != channels || line.weight.cols() != channels)
            throw ValidationError("CorrelationKernel: line weight dimension mismatch");
    CorrelationKernel k;
    k.rep_ = Representation::Stationary;
    k.channels_ = channels;
    k.freq_eval_ = std::move(freq_eval);
    k.lines_ = std::move(lines);
    k.freq_scale_hint_ = std::max(freq_scale_hint, 1e-12);
    k.min_feature_hint_ = std::max(min_feature_hint, 1e-12);
    return k;
}

CorrelationKernel CorrelationKernel::sampled(const TimeGrid& grid, Matrix gram, int channels) {
    if (channels < 1) throw ValidationError("CorrelationKernel: channels must be >= 1");
    const Eigen::Index n = static_cast<Eigen::Index>(channels) * grid.count;
    if (gram.rows() != n || gram.cols() != n)
        throw ValidationError("CorrelationKernel::sampled: gram must be (channels*count)^2");
    CorrelationKernel k;
    k.rep_ = Representation::Sampled;
    k.channels_ = channels;
    k.grid_ = grid;
    k.gram_ = std::move(gram);
    return k;
}

Matrix CorrelationKernel::freq_matrix(double omega) const {
    switch (rep_) {
        case Representation::White:
            return strength_;
        case Representation::Stationary:
            return freq_eval_ ? freq_eval_(omega) : Matrix::Zero(channels_, channels_);
        case Representation::Sampled:
            throw ValidationError("freq_matrix: sampled kernels have no frequency evaluator");
    }
    return {};
}

const Matrix& CorrelationKernel::strength() const {
    if (rep_ != Representation::White)
        throw ValidationError("strength: kernel is not white noise");
    return strength_;
}

const TimeGrid& CorrelationKernel::time_grid() const {
    if (rep_ != Representation::Sampled)
        throw ValidationError("time_grid: kernel is not sampled");
    return grid_;
}

const Matrix& CorrelationKernel::gram() const {
    if (rep_ != Representation::Sampled)
        throw ValidationError("gram: kernel is not sampled");
    return gram_;
}

Matrix CorrelationKernel::gram_block(int k, int l) const {
    const Matrix& g = gram();
    const int nt = grid_.count;
    Matrix block(channels_, channels_);
    for (int n = 0; n < channels_; ++n)
        for (int m = 0; m < channels_; ++m) block(n, m) = g(n * nt + k, m * nt + l);
    return block;
}

CorrelationKernel CorrelationKernel::scaled(double factor) const {
    CorrelationKernel out = *this;
    switch (rep_) {
        case Representation::White:
            out.strength_ *= factor;
            break;
        case Representation::Sampled:
            out.gram_ *= factor;
            break;
        case Representation::Stationary: {
            if (freq_eval_) {
                auto base = freq_eval_;
                out.freq_eval_ = [base, factor](double w) { return Matrix(factor * base(w)); };
            }
            for (auto& line : out.lines_) line.weight *= factor;
            break;
        }
    }
    return out;
}

CorrelationKernel CorrelationKernel::difference(const CorrelationKernel& a,
                                                const CorrelationKernel& b) {
    if (a.representation() != b.representation())
        throw IncompatibleGrids("kernel difference: representations differ");
    if (a.channels() != b.channels())
        throw IncompatibleGrids("kernel difference: channel counts differ");
    switch (a.representation()) {
        case Representation::White:
            return white(Matrix(a.strength_ - b.strength_));
        case Representation::Sampled: {
            if (!a.grid_.same_as(b.grid_))
                throw IncompatibleGrids("kernel difference: time grids differ");
            return sampled(a.grid_, Matrix(a.gram_ - b.gram_), a.channels_);
        }
        case Representation::Stationary: {
            auto ea = a.freq_eval_;
            auto eb = b.freq_eval_;
            const int n = a.channels_;
            std::function<Matrix(double)> eval;
            if (ea || eb) {
                eval = [ea, eb, n](double w) {
                    Matrix m = ea ? ea(w) : Matrix(Matrix::Zero(n, n));
                    if (eb) m -= eb(w);
                    return m;
                };
            }
            std::vector<SpectralLine> lines = a.lines_;
            for (const auto& line : b.lines_) lines.push_back({line.omega, Matrix(-line.weight)});
            return stationary(n, std::move(eval), std::max(a.freq_scale_hint_, b.freq_scale_hint_),
                              std::min(a.min_feature_hint_, b.min_feature_hint_), std::move(lines));
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Composition

CorrelationKernel composite_correlation(const std::vector<CorrelationKernel>& parts,
                                        const std::vector<std::vector<int>>& channel_map,
                                        int channels_out) {
    if (parts.empty()) throw ValidationError("composite_correlation: no parts");
    if (channel_map.size() != parts.size())
        throw ValidationError("composite_correlation: channel_map size mismatch");
    if (channels_out < 1) throw ValidationError("composite_correlation: channels_out must be >= 1");

    const auto rep = parts.front().representation();
    for (const auto& p : parts)
        if (p.representation() != rep)
            throw IncompatibleGrids("composite_correlation: parts must share representation");

    for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto& map = channel_map[p];
        if (static_cast<int>(map.size()) != parts[p].channels())
            throw ValidationError("composite_correlation: channel_map entry does not cover part channels");
        std::vector<int> seen;
        for (int target : map) {
            if (target < 0 || target >= channels_out)
                throw ValidationError("composite_correlation: channel_map index outside composite space");
            if (std::find(seen.begin(), seen.end(), target) != seen.end())
                throw ChannelCollision("composite_correlation: one part maps two channels onto the same slot");
            seen.push_back(target);
        }
    }

    using Rep = CorrelationKernel::Representation;
    switch (rep) {
        case Rep::White: {
            Matrix c = Matrix::Zero(channels_out, channels_out);
            for (std::size_t p = 0; p < parts.size(); ++p) {
                const Matrix& s = parts[p].strength();
                const auto& map = channel_map[p];
                for (int i = 0; i < parts[p].channels(); ++i)
                    for (int j = 0; j < parts[p].channels(); ++j) c(map[i], map[j]) += s(i, j);
            }
            return CorrelationKernel::white(std::move(c));
        }
        case Rep::Sampled: {
            const TimeGrid& grid = parts.front().time_grid();
            for (const auto& p : parts)
                if (!p.time_grid().same_as(grid))
                    throw IncompatibleGrids("composite_correlation: sampled parts on different grids");
            const int nt = grid.count;
            Matrix g = Matrix::Zero(static_cast<Eigen::Index>(channels_out) * nt,
                                    static_cast<Eigen::Index>(channels_out) * nt);
            for (std::size_t p = 0; p < parts.size(); ++p) {
                const Matrix& gp = parts[p].gram();
                const auto& map = channel_map[p];
                for (int i = 0; i < parts[p].channels(); ++i)
                    for (int j = 0; j < parts[p].channels(); ++j)
                        g.block(static_cast<Eigen::Index>(map[i]) * nt,
                                static_cast<Eigen::Index>(map[j]) * nt, nt, nt) +=
                            gp.block(static_cast<Eigen::Index>(i) * nt,
                                     static_cast<Eigen::Index>(j) * nt, nt, nt);
            }
            return CorrelationKernel::sampled(grid, std::move(g), channels_out);
        }
        case Rep::Stationary: {
            auto parts_copy = parts;
            auto map_copy = channel_map;
            const int n = channels_out;
            bool any_eval = false;
            for (const auto& p : parts) any_eval = any_eval || p.has_smooth_part();
            std::function<Matrix(double)> eval;
            if (any_eval) eval = [parts_copy, map_copy, n](double w) {
                Matrix m = Matrix::Zero(n, n);
                for (std::size_t p = 0; p < parts_copy.size(); ++p) {
                    Matrix a = parts_copy[p].freq_matrix(w);
                    const auto& map = map_copy[p];
                    for (int i = 0; i < parts_copy[p].channels(); ++i)
                        for (int j = 0; j < parts_copy[p].channels(); ++j) m(map[i], map[j]) += a(i, j);
                }
                return m;
            };
            std::vector<SpectralLine> lines;
            double scale = 1e-12, feature = 1e300;
            for (std::size_t p = 0; p < parts.size(); ++p) {
                scale = std::max(scale, parts[p].freq_scale_hint());
                feature = std::min(feature, parts[p].min_feature_hint());
                for (const auto& line : parts[p].lines()) {
                    Matrix w = Matrix::Zero(n, n);
                    const auto& map = channel_map[p];
                    for (int i = 0; i < parts[p].channels(); ++i)
                        for (int j = 0; j < parts[p].channels(); ++j)
                            w(map[i], map[j]) += line.weight(i, j);
                    lines.push_back({line.omega, std::move(w)});
                }
            }
            return CorrelationKernel::stationary(n, std::move(eval), scale, feature, std::move(lines));
        }
    }
    return {};
}

CorrelationKernel composite_correlation(const std::vector<CorrelationKernel>& parts) {
    int channels_out = 1;
    for (const auto& p : parts) channels_out = std::max(channels_out, p.channels());
    std::vector<std::vector<int>> map;
    for (const auto& p : parts) {
        std::vector<int> ids(p.channels());
        for (int i = 0; i < p.channels(); ++i) ids[i] = i;
        map.push_back(std::move(ids));
    }
    return composite_correlation(parts, map, channels_out);
}

// ---------------------------------------------------------------------------
// Inverse transform

FrequencyGrid default_transform_grid(const CorrelationKernel& kernel, const TimeGrid& s_grid) {
    const double s_max = std::max(std::abs(s_grid.max), std::abs(s_grid.min));
    const double s_min = s_grid.spacing();
    double omega_hi = std::max(kernel.freq_scale_hint(), 20.0 / s_min);
    double dw = std::min(std::numbers::pi / (10.0 * std::max(s_max, s_min)),
                         kernel.min_feature_hint() / 4.0);
    auto points = [&] { return static_cast<long>(std::ceil(2.0 * omega_hi / dw)) + 1; };
    if (points() > kMaxTransformPoints) {
        // Trim the UV range first; the spacing rule controls aliasing.
        omega_hi = std::max(kernel.freq_scale_hint(), 0.5 * (kMaxTransformPoints - 1) * dw);
        if (points() > kMaxTransformPoints) dw = 2.0 * omega_hi / (kMaxTransformPoints - 1);
    }
    long n = points();
    if (n % 2 == 0) ++n; // include omega = 0
    return FrequencyGrid::symmetric(omega_hi, static_cast<int>(n));
}

std::vector<Matrix> stationary_time_values(const CorrelationKernel& kernel,
                                           std::span<const double> s_values,
                                           const FrequencyGrid& freq_grid) {
    if (kernel.representation() != CorrelationKernel::Representation::Stationary)
        throw ValidationError("stationary_time_values: kernel must be stationary");
    const int nc = kernel.channels();
    const auto n_s = static_cast<Eigen::Index>(s_values.size());
    std::vector<Matrix> out(s_values.size(), Matrix::Zero(nc, nc));

    const bool has_smooth = kernel.has_smooth_part();
    // Tabulate the smooth spectrum once.
    std::vector<Matrix> spec_vals;
    if (has_smooth) {
        spec_vals.assign(freq_grid.count, Matrix());
#pragma omp parallel for schedule(static)
        for (int j = 0; j < freq_grid.count; ++j) spec_vals[j] = kernel.freq_matrix(freq_grid.point(j));
    }

#pragma omp parallel for schedule(static)
    for (Eigen::Index idx = 0; idx < n_s; ++idx) {
        const double s = s_values[idx];
        Matrix acc = Matrix::Zero(nc, nc);
        if (has_smooth) {
            for (int j = 0; j < freq_grid.count; ++j) {
                const double w = freq_grid.point(j);
                const Complex phase = std::exp(Complex(0.0, w * s)) * (freq_grid.weight(j) / kTwoPi);
                acc += phase * spec_vals[j];
            }
        }
        for (const auto& line : kernel.lines())
            acc += (std::exp(Complex(0.0, line.omega * s)) / kTwoPi) * line.weight;
        out[idx] = std::move(acc);
    }
    return out;
}

namespace {

// Trapezoid curvature bound for the oscillatory inverse transform:
// |error| <= (dw^2/12) * integral |d^2/dw^2 (A(w) e^{iws})|, expanded via
// |A''| + 2 s |A'| + s^2 |A| with finite-difference derivative estimates.
// UV truncation is excluded deliberately: ohmic spectra have log tails that
// omega_max regulates by design.
double transform_error_estimate(const std::vector<Matrix>& spec_vals, const FrequencyGrid& grid,
                                double s_max) {
    const double dw = grid.spacing();
    double sum_a = 0.0, sum_d1 = 0.0, sum_d2 = 0.0;
    const int n = grid.count;
    for (int j = 0; j < n; ++j) {
        sum_a += spec_vals[j].cwiseAbs().maxCoeff() * dw;
        if (j >= 1 && j + 1 < n) {
            sum_d1 += (spec_vals[j + 1] - spec_vals[j - 1]).cwiseAbs().maxCoeff() / (2.0 * dw) * dw;
            sum_d2 += (spec_vals[j + 1] - 2.0 * spec_vals[j] + spec_vals[j - 1]).cwiseAbs().maxCoeff() /
                      (dw * dw) * dw;
        }
    }
    return dw * dw / 12.0 * (sum_d2 + 2.0 * s_max * sum_d1 + s_max * s_max * sum_a) / kTwoPi;
}

// alpha(s) for s = m*h, m = 0..count-1, then gram blocks via the exact mirror
// alpha(-s) = alpha(s)^dagger (channel conj-transpose).
CorrelationKernel sampled_from_stationary(const CorrelationKernel& kernel, const TimeGrid& grid,
                                          const FrequencyGrid& freq_grid) {
    const int nt = grid.count;
    const int nc = kernel.channels();
    std::vector<double> offsets(nt);
    for (int m = 0; m < nt; ++m) offsets[m] = m * grid.spacing();
    const auto vals = stationary_time_values(kernel, offsets, freq_grid);

    Matrix gram(static_cast<Eigen::Index>(nc) * nt, static_cast<Eigen::Index>(nc) * nt);
    for (int k = 0; k < nt; ++k) {
        for (int l = 0; l < nt; ++l) {
            const Matrix block = k >= l ? vals[k - l] : Matrix(vals[l - k].adjoint());
            for (int n = 0; n < nc; ++n)
                for (int m = 0; m < nc; ++m)
                    gram(static_cast<Eigen::Index>(n) * nt + k,
                         static_cast<Eigen::Index>(m) * nt + l) = block(n, m);
        }
    }
    return CorrelationKernel::sampled(grid, std::move(gram), nc);
}

} // namespace

CorrelationKernel correlation_time_domain(const CorrelationKernel& kernel, const TimeGrid& s_grid,
                                          const FrequencyGrid& freq_grid,
                                          const TransformOptions& options) {
    if (kernel.representation() != CorrelationKernel::Representation::Stationary)
        throw ValidationError("correlation_time_domain: kernel must be stationary");
    if (!freq_grid.is_symmetric())
        throw ValidationError("correlation_time_domain: frequency grid must be symmetric about 0");

    if (kernel.has_smooth_part()) {
        std::vector<Matrix> spec_vals(freq_grid.count);
#pragma omp parallel for schedule(static)
        for (int j = 0; j < freq_grid.count; ++j)
            spec_vals[j] = kernel.freq_matrix(freq_grid.point(j));

        const double s_max = std::max(std::abs(s_grid.max), std::abs(s_grid.min));
        const double est = transform_error_estimate(spec_vals, freq_grid, s_max);
        double scale = 0.0;
        for (int j = 0; j < freq_grid.count; ++j)
            scale += spec_vals[j].cwiseAbs().maxCoeff() * freq_grid.weight(j) / kTwoPi;
        for (const auto& line : kernel.lines()) scale += line.weight.cwiseAbs().maxCoeff() / kTwoPi;
        if (scale > 0.0 && est > options.tol_rel * scale)
            throw GridTooCoarse("correlation_time_domain: quadrature error estimate " +
                                std::to_string(est / scale) + " exceeds tolerance");
    }
    return sampled_from_stationary(kernel, s_grid, freq_grid);
}

CorrelationKernel sample_on(const CorrelationKernel& kernel, const TimeGrid& grid) {
    switch (kernel.representation()) {
        case CorrelationKernel::Representation::Sampled:
            if (!kernel.time_grid().same_as(grid))
                throw IncompatibleGrids("sample_on: sampled kernel grid does not match requested grid");
            return kernel;
        case CorrelationKernel::Representation::White:
            throw ValidationError("sample_on: white-noise kernels are handled analytically, not sampled");
        case CorrelationKernel::Representation::Stationary:
            return sampled_from_stationary(kernel, grid, default_transform_grid(kernel, grid));
    }
    return {};
}

NoiseDissipationSplit split_noise_dissipation(const CorrelationKernel& kernel, double herm_tol_rel) {
    if (kernel.representation() != CorrelationKernel::Representation::Sampled)
        throw ValidationError("split_noise_dissipation: kernel must be sampled");
    const Matrix& g = kernel.gram();
    const double scale = g.cwiseAbs().maxCoeff();
    if (scale > 0.0 && hermiticity_defect(g) > herm_tol_rel * scale)
        throw HermiticityViolation("split_noise_dissipation: kernel violates alpha(t,tau) = alpha^dagger(tau,t)");
    NoiseDissipationSplit split;
    split.grid = kernel.time_grid();
    split.channels = kernel.channels();
    split.noise = g.real();
    split.dissipation = g.imag();
    return split;
}

} // namespace deco::spectral
