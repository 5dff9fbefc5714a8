#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <span>
#include <vector>

#include "henstock_ode/error.hpp"
#include "henstock_ode/problem_model.hpp"

namespace henstock_ode {

inline constexpr int kMaxLevel = 30;

/// Piecewise-linear interpolant of a primitive on the dyadic grid k/2^n of
/// [0,1]. Node values are sampled once at build time and never re-queried.
class DyadicInterpolant {
public:
    /// Samples f at k/2^level, k = 0..2^level.
    static DyadicInterpolant build(const CoefficientFn& f, int level) {
        check_level(level);
        const std::size_t cells = std::size_t{1} << level;
        std::vector<double> nodes(cells + 1);
        for (std::size_t k = 0; k <= cells; ++k) {
            const double x = std::ldexp(static_cast<double>(k), -level);
            nodes[k] = f(x);
            if (!std::isfinite(nodes[k])) {
                std::ostringstream os;
                os.precision(17);
                os << "DyadicInterpolant: non-finite sample at node k = " << k << " (x = " << x
                   << ", level " << level << ")";
                throw Error(os.str());
            }
        }
        return DyadicInterpolant(level, std::move(nodes));
    }

    /// Wraps precomputed node values; size must be 2^level + 1.
    static DyadicInterpolant from_nodes(int level, std::vector<double> nodes) {
        check_level(level);
        if (nodes.size() != (std::size_t{1} << level) + 1)
            throw Error("DyadicInterpolant: node count must be 2^level + 1");
        for (std::size_t k = 0; k < nodes.size(); ++k)
            if (!std::isfinite(nodes[k]))
                throw Error("DyadicInterpolant: non-finite node value at k = " + std::to_string(k));
        return DyadicInterpolant(level, std::move(nodes));
    }

    int level() const { return level_; }
    std::size_t cells() const { return nodes_.size() - 1; }
    std::span<const double> nodes() const { return nodes_; }
    double node(std::size_t k) const { return nodes_.at(k); }
    double cell_width() const { return std::ldexp(1.0, -level_); }
    double node_x(std::size_t k) const { return std::ldexp(static_cast<double>(k), -level_); }

    /// Cell containing x: floor(x 2^n), with x = 1 mapped to the last cell.
    std::size_t cell_of(double x) const {
        check_x(x);
        const double scaled = std::ldexp(x, level_);
        const auto k = static_cast<std::size_t>(std::floor(scaled));
        return std::min(k, cells() - 1);
    }

    double eval(double x) const {
        const std::size_t k = cell_of(x);
        const double offset = x - node_x(k);
        if (offset == 0.0) return nodes_[k];
        return nodes_[k] + offset * slope(k);
    }

    /// 2^n (f((k+1)/2^n) - f(k/2^n)): the constant derivative on cell k.
    double cell_slope(std::size_t k) const {
        if (k >= cells())
            throw Error("DyadicInterpolant: cell index " + std::to_string(k) + " out of range");
        return slope(k);
    }

private:
    DyadicInterpolant(int level, std::vector<double> nodes) : level_(level), nodes_(std::move(nodes)) {}

    double slope(std::size_t k) const { return std::ldexp(nodes_[k + 1] - nodes_[k], level_); }

    static void check_level(int level) {
        if (level < 0 || level > kMaxLevel)
            throw Error("DyadicInterpolant: level must lie in [0, " + std::to_string(kMaxLevel) + "]");
    }

    static void check_x(double x) {
        if (!(x >= 0.0 && x <= 1.0)) {
            std::ostringstream os;
            os.precision(17);
            os << "DyadicInterpolant: x = " << x << " outside [0,1]";
            throw Error(os.str());
        }
    }

    int level_;
    std::vector<double> nodes_;
};

}  // namespace henstock_ode
