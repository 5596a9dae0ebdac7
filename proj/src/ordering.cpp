#include "deco/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace deco::ordering {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::StrictlyGreater: return "StrictlyGreater";
        case Verdict::StrictlyLess: return "StrictlyLess";
        case Verdict::Equivalent: return "Equivalent";
        case Verdict::Incomparable: return "Incomparable";
    }
    return "?";
}

namespace {

using Rep = CorrelationKernel::Representation;

struct ScanResult {
    double min_eig{0.0};
    double max_eig{0.0};
    WorstPoint min_point;
};

// Eigenvalue extremes of a Hermitian block, with the 1x1 fast path kept exact
// so scalar comparisons are antisymmetric to the last bit.
EigExtremes block_extremes(const Matrix& m) {
    if (m.rows() == 1) {
        const double v = m(0, 0).real();
        return EigExtremes{v, v};
    }
    return hermitian_eig_extremes(m);
}

bool hermitian_within(const Matrix& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    return scale == 0.0 || hermiticity_defect(m) <= 1e-8 * scale;
}

void check_hermitian_input(const Matrix& m, const char* what) {
    if (!hermitian_within(m))
        throw NonHermitianInput(std::string(what) + ": Hermitization would change entries beyond 1e-8 relative");
}

// Per-omega eigenvalue scan of a stationary kernel. Spectral lines enter
// sign-wise with their delta weights. Ties break toward the lowest grid
// index; the reduction order is fixed so results do not depend on the worker
// count.
ScanResult scan_stationary(const CorrelationKernel& kernel, const FrequencyGrid& grid) {
    const int n = grid.count;
    std::vector<EigExtremes> ext(n);
    std::vector<char> ok(n, 1);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        Matrix m = kernel.freq_matrix(grid.point(j));
        ok[j] = hermitian_within(m) ? 1 : 0;
        ext[j] = block_extremes(m);
    }
    for (int j = 0; j < n; ++j)
        if (!ok[j])
            throw NonHermitianInput("check_kernel_positive: non-Hermitian spectrum at omega = " +
                                    std::to_string(grid.point(j)));
    ScanResult r;
    r.min_eig = ext[0].min_eig;
    r.max_eig = ext[0].max_eig;
    r.min_point = WorstPoint{WorstPoint::Kind::Frequency, grid.point(0), 0, 0};
    for (int j = 1; j < n; ++j) {
        if (ext[j].min_eig < r.min_eig) {
            r.min_eig = ext[j].min_eig;
            r.min_point = WorstPoint{WorstPoint::Kind::Frequency, grid.point(j), 0, 0};
        }
        r.max_eig = std::max(r.max_eig, ext[j].max_eig);
    }
    for (const auto& line : kernel.lines()) {
        check_hermitian_input(line.weight, "check_kernel_positive (line)");
        const auto e = block_extremes(line.weight);
        if (e.min_eig < r.min_eig) {
            r.min_eig = e.min_eig;
            r.min_point = WorstPoint{WorstPoint::Kind::Frequency, line.omega, 0, 0};
        }
        r.max_eig = std::max(r.max_eig, e.max_eig);
    }
    return r;
}

ScanResult scan_sampled(const CorrelationKernel& kernel) {
    const Matrix& g = kernel.gram();
    check_hermitian_input(g, "check_kernel_positive");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(g));
    const Eigen::VectorXd& w = es.eigenvalues();
    ScanResult r;
    r.min_eig = w(0);
    r.max_eig = w(w.size() - 1);
    // Dominant entry of the worst eigenvector locates the witness block.
    Eigen::Index imax = 0;
    es.eigenvectors().col(0).cwiseAbs().maxCoeff(&imax);
    const int nt = kernel.time_grid().count;
    r.min_point = WorstPoint{WorstPoint::Kind::TimeBlock, 0.0, static_cast<int>(imax) / nt,
                             static_cast<int>(imax) % nt};
    return r;
}

ScanResult scan_white(const CorrelationKernel& kernel) {
    check_hermitian_input(kernel.strength(), "check_kernel_positive");
    const auto e = block_extremes(kernel.strength());
    return ScanResult{e.min_eig, e.max_eig, WorstPoint{WorstPoint::Kind::Frequency, 0.0, 0, 0}};
}

ScanResult scan_kernel(const CorrelationKernel& kernel, const FrequencyGrid& grid) {
    switch (kernel.representation()) {
        case Rep::Stationary: return scan_stationary(kernel, grid);
        case Rep::Sampled: return scan_sampled(kernel);
        case Rep::White: return scan_white(kernel);
    }
    return {};
}

double kernel_scale(const CorrelationKernel& kernel, const FrequencyGrid& grid) {
    const auto s = scan_kernel(kernel, grid);
    return std::max(std::abs(s.min_eig), std::abs(s.max_eig));
}

} // namespace

PositivityReport check_kernel_positive(const CorrelationKernel& kernel, const FrequencyGrid& grid,
                                       double tol_rel, double floor_abs) {
    const auto s = scan_kernel(kernel, grid);
    PositivityReport report;
    report.min_eigenvalue = s.min_eig;
    report.max_eigenvalue = s.max_eig;
    report.worst_point = s.min_point;
    report.is_psd = s.min_eig >= -tol_rel * std::max(std::abs(s.max_eig), floor_abs);
    return report;
}

OrderResult order_from_extremes(double fwd_min, double fwd_max, const WorstPoint& min_point,
                                double scale, const Tolerances& tol) {
    OrderResult r;
    r.min_eig_forward = fwd_min;
    r.min_eig_backward = -fwd_max;
    r.worst_point = min_point;
    r.tolerances = tol;
    r.scale = scale;

    const double floor = std::max(tol.floor_abs, tol.equiv_rel * scale);
    const bool fwd_psd = fwd_min >= -tol.psd_rel * std::max(std::abs(fwd_max), floor);
    const bool bwd_psd = -fwd_max >= -tol.psd_rel * std::max(std::abs(fwd_min), floor);

    if (std::max(std::abs(fwd_min), std::abs(fwd_max)) <= tol.equiv_rel * scale)
        r.verdict = Verdict::Equivalent;
    else if (fwd_psd && bwd_psd)
        r.verdict = Verdict::Equivalent;
    else if (fwd_psd)
        r.verdict = fwd_max > tol.strict_rel * scale ? Verdict::StrictlyGreater : Verdict::Equivalent;
    else if (bwd_psd)
        r.verdict = -fwd_min > tol.strict_rel * scale ? Verdict::StrictlyLess : Verdict::Equivalent;
    else
        r.verdict = Verdict::Incomparable;
    return r;
}

OrderResult compare_environments(const CorrelationKernel& a, const CorrelationKernel& b,
                                 const FrequencyGrid& grid, const Tolerances& tol) {
    CorrelationKernel diff = CorrelationKernel::difference(a, b);
    const auto s = scan_kernel(diff, grid);
    const double scale = std::max(kernel_scale(a, grid), kernel_scale(b, grid));
    return order_from_extremes(s.min_eig, s.max_eig, s.min_point, scale, tol);
}

OrderResult lutz_compare(double gamma0, double lambda_high, double lambda_low, double t_hot,
                         double t_cold, CutoffFamily family, const FrequencyGrid& grid,
                         const Tolerances& tol) {
    if (!(gamma0 > 0.0)) throw InvalidParameters("lutz_compare: gamma0 must be > 0");
    if (!(lambda_low > 0.0)) throw InvalidParameters("lutz_compare: lambda_low must be > 0");
    if (!(lambda_high >= lambda_low)) throw InvalidParameters("lutz_compare: lambda_high must be >= lambda_low");
    if (!(t_cold >= 0.0)) throw InvalidParameters("lutz_compare: t_cold must be >= 0");
    if (!(t_hot >= t_cold)) throw InvalidParameters("lutz_compare: t_hot must be >= t_cold");

    using spectral::ThermalReservoirSpec;
    auto kernel_of = [&](double lambda, double temperature) {
        ThermalReservoirSpec spec{family, gamma0, lambda, temperature, 0};
        return CorrelationKernel::thermal(spec, 1);
    };
    auto side_a = spectral::composite_correlation(
        {kernel_of(lambda_high, t_hot), kernel_of(lambda_low, t_cold)});
    auto side_b = spectral::composite_correlation(
        {kernel_of(lambda_low, t_hot), kernel_of(lambda_high, t_cold)});
    return compare_environments(side_a, side_b, grid, tol);
}

FdrFitResult fdr_fit(const CorrelationKernel& kernel,
                     const std::function<double(double)>& total_damping, const FrequencyGrid& grid,
                     double damping_floor) {
    if (kernel.channels() != 1)
        throw ValidationError("fdr_fit: kernel must be a scalar channel");
    if (kernel.representation() != Rep::Stationary)
        throw ValidationError("fdr_fit: kernel must be stationary");

    const int n = grid.count;
    std::vector<double> keff(n);
    double omega_top = 0.0;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        const double w = grid.point(j);
        const double g = total_damping(w);
        if (!(g > damping_floor)) {
            keff[j] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        keff[j] = kernel.freq_matrix(w)(0, 0).real() / g + w;
    }
    for (int j = 0; j < n; ++j) {
        if (std::isnan(keff[j]))
            throw DampingVanishes("fdr_fit: total damping below floor at omega = " +
                                  std::to_string(grid.point(j)));
        omega_top = std::max(omega_top, std::abs(grid.point(j)));
    }

    auto resid = [&](double temperature) {
        double worst = 0.0;
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(keff[j] - spectral::fdr_kernel(grid.point(j), temperature)));
        return worst;
    };

    // Golden-section over T in (0, 100 * max grid frequency].
    const double t_max = 100.0 * std::max(omega_top, 1e-300);
    double lo = t_max * 1e-12, hi = t_max;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = resid(x1), f2 = resid(x2);
    while (hi - lo > 1e-10 * t_max) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = resid(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = resid(x2);
        }
    }
    const double t_star = f1 <= f2 ? x1 : x2;
    double keff_top = 0.0;
    for (int j = 0; j < n; ++j) keff_top = std::max(keff_top, std::abs(keff[j]));
    return FdrFitResult{t_star, resid(t_star) / std::max(keff_top, 1e-300)};
}

} // namespace deco::ordering
