#pragma once

/**
 * @file surrogate_solver.hpp
 * @brief Closed-form solution of the surrogate problem
 *        y~' + p~' y~ = q~',  y~(0) = y0
 *        where p~, q~ are the dyadic piecewise-linear interpolants of p, q.
 *
 * On every cell p~ is affine and q~' is constant, so
 *   y~(x) = y0 e^{p~(0) - p~(x)} + e^{-p~(x)} * integral_0^x q~'(t) e^{p~(t)} dt
 * reduces to a prefix sum of per-cell integrals of s * e^{v + b t}, each of
 * which is evaluated exactly through expm1.
 */

#include <cmath>
#include <cstddef>
#include <sstream>
#include <span>
#include <vector>

#include "henstock_ode/compensated_sum.hpp"
#include "henstock_ode/dyadic_interpolation.hpp"
#include "henstock_ode/error.hpp"
#include "henstock_ode/parallel.hpp"

namespace henstock_ode {

/// Below this |b * delta| the kernel (e^{b delta} - 1)/b switches to its
/// two-term series.
inline constexpr double kSeriesThreshold = 1e-8;

/// integral_0^delta s * e^{v + b t} dt, in closed form.
inline double cell_integral(double v, double b, double s, double delta) {
    if (!std::isfinite(v) || !std::isfinite(b) || !std::isfinite(s) || !std::isfinite(delta))
        throw Error("cell_integral: non-finite input");
    if (delta < 0.0) throw Error("cell_integral: delta must be nonnegative");
    if (delta == 0.0 || s == 0.0) return 0.0;

    const double anchor = std::exp(v);
    if (!std::isfinite(anchor)) {
        std::ostringstream os;
        os << "cell_integral: exp(" << v << ") overflows";
        throw OverflowError(os.str());
    }
    const double z = b * delta;
    double kernel;  // (e^{b delta} - 1) / b, or delta when b == 0
    if (b == 0.0)
        kernel = delta;
    else if (std::abs(z) < kSeriesThreshold)
        kernel = delta * (1.0 + 0.5 * z);
    else
        kernel = std::expm1(z) / b;

    const double result = s * anchor * kernel;
    if (!std::isfinite(result)) {
        std::ostringstream os;
        os << "cell_integral: result overflows (v = " << v << ", b*delta = " << z << ")";
        throw OverflowError(os.str());
    }
    return result;
}

class SurrogateSolution {
public:
    SurrogateSolution(DyadicInterpolant p_tilde, DyadicInterpolant q_tilde, double y0,
                      std::vector<double> prefix_integrals)
        : p_(std::move(p_tilde)), q_(std::move(q_tilde)), y0_(y0), prefix_(std::move(prefix_integrals)) {}

    const DyadicInterpolant& p_tilde() const { return p_; }
    const DyadicInterpolant& q_tilde() const { return q_; }
    double y0() const { return y0_; }
    int level() const { return p_.level(); }

    /// prefix_integrals()[k] = integral_0^{k/2^n} q~'(t) e^{p~(t)} dt
    std::span<const double> prefix_integrals() const { return prefix_; }

    /// Integral over the first `offset` of cell k.
    double partial_cell(std::size_t k, double offset) const {
        return cell_integral(p_.node(k), p_.cell_slope(k), q_.cell_slope(k), offset);
    }

    double eval(double x) const {
        const std::size_t k = p_.cell_of(x);
        const double offset = x - p_.node_x(k);
        const double p_x = p_.eval(x);
        const double integral = prefix_[k] + partial_cell(k, offset);
        const double value = y0_ * std::exp(p_.node(0) - p_x) + std::exp(-p_x) * integral;
        if (!std::isfinite(value)) {
            std::ostringstream os;
            os.precision(17);
            os << "SurrogateSolution: non-finite value at x = " << x;
            throw OverflowError(os.str());
        }
        return value;
    }

    double operator()(double x) const { return eval(x); }

private:
    DyadicInterpolant p_;
    DyadicInterpolant q_;
    double y0_;
    std::vector<double> prefix_;
};

/// Per-cell integrals of q~' e^{p~}, cell k anchored at its left node.
inline std::vector<double> cell_integrals(const DyadicInterpolant& p_tilde,
                                          const DyadicInterpolant& q_tilde) {
    if (p_tilde.level() != q_tilde.level())
        throw Error("surrogate solve: p~ and q~ must share the same level");
    const std::size_t cells = p_tilde.cells();
    const double width = p_tilde.cell_width();
    std::vector<double> out(cells);
    parallel_for(cells, [&](std::size_t k) {
        try {
            out[k] = cell_integral(p_tilde.node(k), p_tilde.cell_slope(k), q_tilde.cell_slope(k), width);
        } catch (const OverflowError& e) {
            throw OverflowError("cell " + std::to_string(k) + ": " + e.what());
        }
    });
    return out;
}

/// Solves the surrogate problem exactly. Cell integrals may be computed in
/// parallel; the prefix sum runs sequentially in cell order.
inline SurrogateSolution solve(DyadicInterpolant p_tilde, DyadicInterpolant q_tilde, double y0) {
    if (!std::isfinite(y0)) throw Error("surrogate solve: y0 must be finite");
    const std::vector<double> cells = cell_integrals(p_tilde, q_tilde);
    std::vector<double> prefix(cells.size() + 1);
    prefix[0] = 0.0;
    CompensatedSum acc;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        acc += cells[k];
        prefix[k + 1] = acc.get();
        if (!std::isfinite(prefix[k + 1]))
            throw OverflowError("surrogate solve: prefix integral overflows at node " +
                                std::to_string(k + 1));
    }
    return SurrogateSolution(std::move(p_tilde), std::move(q_tilde), y0, std::move(prefix));
}

/// Convenience: interpolate p and q at `level` and solve.
inline SurrogateSolution solve(const ProblemSpec& spec, int level) {
    if (!spec.interval().is_unit())
        throw Error("surrogate solve: problem must be on [0,1]; call normalize() first");
    return solve(DyadicInterpolant::build(spec.p(), level), DyadicInterpolant::build(spec.q(), level),
                 spec.y0());
}

}  // namespace henstock_ode
