// grids.hpp — Uniform frequency and time grids with trapezoid weights

#pragma once

#include <cmath>
#include <cstdlib>

#include "deco/errors.hpp"

namespace deco {

namespace detail {

struct UniformGrid {
    double min{0.0};
    double max{1.0};
    int count{2};

    double spacing() const { return (max - min) / (count - 1); }
    double point(int i) const { return min + i * spacing(); }

    // Trapezoid rule: half weight at both ends.
    double weight(int i) const {
        const double h = spacing();
        return (i == 0 || i == count - 1) ? 0.5 * h : h;
    }

    void validate(const char* what) const {
        if (count < 2) throw ValidationError(std::string(what) + ": grid count must be >= 2");
        if (!(max > min)) throw ValidationError(std::string(what) + ": grid max must exceed min");
    }

    bool same_as(const UniformGrid& other, double tol = 1e-12) const {
        return count == other.count && std::abs(min - other.min) <= tol &&
               std::abs(max - other.max) <= tol;
    }
};

} // namespace detail

struct FrequencyGrid : detail::UniformGrid {
    FrequencyGrid() = default;
    FrequencyGrid(double omega_min, double omega_max, int n) : detail::UniformGrid{omega_min, omega_max, n} {
        validate("FrequencyGrid");
    }

    static FrequencyGrid symmetric(double omega_max, int n) {
        return FrequencyGrid(-omega_max, omega_max, n);
    }

    // Inverse transforms require a grid symmetric about zero.
    bool is_symmetric(double tol = 1e-12) const { return std::abs(min + max) <= tol * std::abs(max); }
};

struct TimeGrid : detail::UniformGrid {
    TimeGrid() = default;
    TimeGrid(double t_min, double t_max, int n) : detail::UniformGrid{t_min, t_max, n} {
        validate("TimeGrid");
    }

    static TimeGrid from_zero(double t_max, int n) { return TimeGrid(0.0, t_max, n); }
};

} // namespace deco
