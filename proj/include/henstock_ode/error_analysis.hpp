#pragma once

/**
 * @file error_analysis.hpp
 * @brief A-priori error bound for the surrogate solution and the measured
 *        grid error it is compared against.
 *
 * With delta = 2^-n the bound reads
 *
 *   |y(x) - y~(x)| <= C_{-1} w(e^{-p}) + C_1 w(e^p) + C_0 w(q) + C_2 w(q) w(p)
 *
 *   C_{-1} = |y0| e^{p(0)} + |e^p|_C V(q)      C_1 = 2 |e^p|_C V(q)
 *   C_0    = |e^p|_C + |e^p|_C V(e^p)         C_2 = |e^p|_C^2
 *
 * where w(.) is the modulus of continuity at delta, V(.) the total variation
 * on [0,1] and |.|_C the sup norm. The bound is certified when p' and q' are
 * absolutely integrable.
 *
 * Moduli and variations are estimated. With monotone-piece metadata they are
 * exact up to the placement of the window; without it they are lower
 * estimates from a sampled grid, so the computed bound is then an estimate of
 * the true bound as well.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "henstock_ode/error.hpp"
#include "henstock_ode/parallel.hpp"
#include "henstock_ode/problem_model.hpp"
#include "henstock_ode/surrogate_solver.hpp"

namespace henstock_ode {

namespace detail {

inline std::vector<double> uniform_grid(const Interval& iv, std::size_t resolution) {
    std::vector<double> xs(resolution + 1);
    for (std::size_t i = 0; i <= resolution; ++i)
        xs[i] = iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(resolution);
    xs.back() = iv.hi;
    return xs;
}

inline std::vector<double> merged_sorted(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

// max - min of f over [lo, hi] for f monotone between consecutive `breaks`
inline double range_on_window(const CoefficientFn& f, const std::vector<double>& breaks, double lo, double hi) {
    double vmin = f(lo);
    double vmax = vmin;
    const auto take = [&](double x) {
        const double v = f(x);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    };
    take(hi);
    for (auto it = std::upper_bound(breaks.begin(), breaks.end(), lo); it != breaks.end() && *it < hi; ++it)
        take(*it);
    return vmax - vmin;
}

inline double modulus_piecewise_monotone(const CoefficientFn& f, double delta, std::size_t resolution) {
    const Interval iv = f.domain();
    const double width = delta * iv.length();
    const double last_start = iv.hi - width;
    const std::vector<double> breaks =
        merged_sorted(f.monotone_pieces()->breaks, f.singular_points());

    std::vector<double> starts = uniform_grid(iv, resolution);
    for (double b : breaks) {
        starts.push_back(b);
        starts.push_back(b - width);
    }
    starts.push_back(last_start);
    for (double& s : starts) s = std::clamp(s, iv.lo, std::max(iv.lo, last_start));
    starts = merged_sorted(std::move(starts), {});

    std::vector<double> ranges(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        const double lo = starts[i];
        const double hi = std::min(iv.hi, lo + width);
        ranges[i] = range_on_window(f, breaks, lo, hi);
    });
    return *std::max_element(ranges.begin(), ranges.end());
}

inline double modulus_sampled(const CoefficientFn& f, double delta, std::size_t resolution) {
    const Interval iv = f.domain();
    const double width = delta * iv.length();
    const std::vector<double> xs = merged_sorted(uniform_grid(iv, resolution), f.singular_points());
    std::vector<double> vs(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { vs[i] = f(xs[i]); });

    // sliding window over samples with x_j - x_i <= width
    std::deque<std::size_t> maxq;
    std::deque<std::size_t> minq;
    std::size_t left = 0;
    double best = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        while (xs[j] - xs[left] > width) ++left;
        while (!maxq.empty() && maxq.front() < left) maxq.pop_front();
        while (!minq.empty() && minq.front() < left) minq.pop_front();
        while (!maxq.empty() && vs[maxq.back()] <= vs[j]) maxq.pop_back();
        while (!minq.empty() && vs[minq.back()] >= vs[j]) minq.pop_back();
        maxq.push_back(j);
        minq.push_back(j);
        best = std::max(best, vs[maxq.front()] - vs[minq.front()]);
    }
    return best;
}

}  // namespace detail

/// Modulus of continuity w_delta(f) = sup_{|x-y| <= delta} |f(x) - f(y)|, with
/// delta measured on the unit scale. Sampled on resolution + 1 uniform points
/// plus the declared singular points; with monotone-piece metadata each
/// window's oscillation is taken exactly from its endpoints and interior
/// breakpoints. Always a lower estimate of the true value.
inline double modulus_of_continuity(const CoefficientFn& f, double delta, std::size_t resolution) {
    if (!(delta > 0.0 && delta <= 1.0)) throw Error("modulus_of_continuity: delta must lie in (0,1]");
    if (static_cast<double>(resolution) < 2.0 / delta)
        throw Error("modulus_of_continuity: resolution must be at least 2/delta");
    if (f.monotone_pieces()) return detail::modulus_piecewise_monotone(f, delta, resolution);
    return detail::modulus_sampled(f, delta, resolution);
}

struct VariationEstimate {
    double value = 0.0;
    bool lower_bound = false;  // true when taken from a sampled grid
};

/// Total variation of f on its domain. Exact from monotone pieces when
/// present, otherwise a grid lower bound at `fallback_resolution`.
inline VariationEstimate total_variation(const CoefficientFn& f, std::size_t fallback_resolution = 1 << 16) {
    if (const auto& pieces = f.monotone_pieces()) {
        CompensatedSum acc;
        const auto& b = pieces->breaks;
        for (std::size_t i = 0; i + 1 < b.size(); ++i) acc += std::abs(f(b[i + 1]) - f(b[i]));
        return {acc.get(), false};
    }
    if (fallback_resolution < 1) throw Error("total_variation: fallback resolution must be positive");
    const std::vector<double> xs =
        detail::merged_sorted(detail::uniform_grid(f.domain(), fallback_resolution), f.singular_points());
    CompensatedSum acc;
    double prev = f(xs.front());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double v = f(xs[i]);
        acc += std::abs(v - prev);
        prev = v;
    }
    return {acc.get(), true};
}

struct ErrorBudget {
    int n = 0;
    double delta = 1.0;

    double omega_q = 0.0;
    double omega_p = 0.0;
    double omega_ep = 0.0;   // w(e^p)
    double omega_emp = 0.0;  // w(e^{-p})

    double var_q = 0.0;
    double var_ep = 0.0;
    double sup_ep = 1.0;
    double abs_y0_ep0 = 0.0;  // |y0| e^{p(0)}

    double c_minus1 = 0.0;
    double c_1 = 0.0;
    double c_0 = 0.0;
    double c_2 = 0.0;
    double bound = 0.0;

    bool estimated = false;  // some ingredient came from a sampled lower estimate

    /// Recomputes the constants and the bound from the stored ingredients.
    void assemble() {
        c_minus1 = abs_y0_ep0 + sup_ep * var_q;
        c_1 = 2.0 * sup_ep * var_q;
        c_0 = sup_ep + sup_ep * var_ep;
        c_2 = sup_ep * sup_ep;
        bound = c_minus1 * omega_emp + c_1 * omega_ep + c_0 * omega_q + c_2 * omega_q * omega_p;
    }
};

/// Default sampling resolution for level n: 2^(n+6).
inline std::size_t default_modulus_resolution(int n) { return std::size_t{1} << (n + 6); }

inline ErrorBudget theorem_bound(const ProblemSpec& spec, int n, std::size_t resolution = 0) {
    if (!spec.interval().is_unit()) throw Error("theorem_bound: problem must be on [0,1]");
    if (n < 0 || n > kMaxLevel) throw Error("theorem_bound: level out of range");
    if (resolution == 0) resolution = default_modulus_resolution(n);

    const CoefficientFn& p = spec.p();
    const CoefficientFn& q = spec.q();
    const CoefficientFn exp_p = compose_monotone(p, [](double v) { return std::exp(v); }, true);
    const CoefficientFn exp_mp = compose_monotone(p, [](double v) { return std::exp(-v); }, false);

    ErrorBudget b;
    b.n = n;
    b.delta = std::ldexp(1.0, -n);
    b.omega_q = modulus_of_continuity(q, b.delta, resolution);
    b.omega_p = modulus_of_continuity(p, b.delta, resolution);
    b.omega_ep = modulus_of_continuity(exp_p, b.delta, resolution);
    b.omega_emp = modulus_of_continuity(exp_mp, b.delta, resolution);

    const VariationEstimate vq = total_variation(q, resolution);
    const VariationEstimate vep = total_variation(exp_p, resolution);
    b.var_q = vq.value;
    b.var_ep = vep.value;

    std::vector<double> probe = detail::uniform_grid(p.domain(), resolution);
    probe = detail::merged_sorted(std::move(probe), p.singular_points());
    if (const auto& pieces = p.monotone_pieces()) probe = detail::merged_sorted(std::move(probe), pieces->breaks);
    double p_max = -HUGE_VAL;
    for (double x : probe) p_max = std::max(p_max, p(x));
    b.sup_ep = std::exp(p_max);
    b.abs_y0_ep0 = std::abs(spec.y0()) * std::exp(p(0.0));

    b.estimated = vq.lower_bound || vep.lower_bound || !p.monotone_pieces() || !q.monotone_pieces();
    b.assemble();
    if (!std::isfinite(b.bound)) throw OverflowError("theorem_bound: bound is not finite");
    return b;
}

/// max_j |y~(j/2^m) - y(j/2^m)|, j = 0..2^m; m = level gives delta_n.
inline double measured_error(const SurrogateSolution& surrogate, const RealFn& exact, int m) {
    if (m < surrogate.level()) throw Error("measured_error: grid level must be >= surrogate level");
    if (m > kMaxLevel) throw Error("measured_error: grid level out of range");
    const std::size_t points = (std::size_t{1} << m) + 1;
    std::vector<double> errs(points);
    parallel_for(points, [&](std::size_t j) {
        const double x = std::ldexp(static_cast<double>(j), -m);
        errs[j] = std::abs(surrogate.eval(x) - exact(x));
    }, 256);
    double worst = 0.0;
    for (double e : errs) {
        if (!std::isfinite(e)) throw Error("measured_error: non-finite error value");
        worst = std::max(worst, e);
    }
    return worst;
}

}  // namespace henstock_ode
