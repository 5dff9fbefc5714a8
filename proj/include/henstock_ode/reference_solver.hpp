#pragma once

/**
 * @file reference_solver.hpp
 * @brief Verification paths that do not go through the surrogate:
 *   - exact_via_formula: y(x) = y0 e^{p(0)-p(x)} + e^{-p(x)} int_0^x q'(t) e^{p(t)} dt
 *     with the (possibly improper) integral taken as a limit of proper
 *     integrals toward each declared singular point;
 *   - rk4_baseline: classical fixed-step RK4 on y' = q' - p' y;
 *   - hake_series: partial sums of closed-form segment integrals shrinking
 *     toward 0, the computational form of the improper-integral limit.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "henstock_ode/compensated_sum.hpp"
#include "henstock_ode/error.hpp"
#include "henstock_ode/problem_model.hpp"

namespace henstock_ode {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    int max_depth = 50;
    double singularity_halo = 0x1p-40;

    void check() const {
        if (!(abs_tol > 0.0)) throw Error("QuadratureConfig: abs_tol must be positive");
        if (max_depth < 1) throw Error("QuadratureConfig: max_depth must be at least 1");
        if (!(singularity_halo > 0.0 && singularity_halo < 1.0))
            throw Error("QuadratureConfig: singularity_halo must lie in (0,1)");
    }
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
    double value;
    double error;
};

// Open rule: never evaluates f at a or b.
template <typename F>
GkResult gauss_kronrod15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth, const QuadratureConfig& cfg) {
    const GkResult r = gauss_kronrod15(f, a, b);
    if (!std::isfinite(r.value)) {
        std::ostringstream os;
        os.precision(17);
        os << "quadrature: non-finite integrand on [" << a << ", " << b << "]";
        throw ConvergenceError(os.str(), HUGE_VAL);
    }
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(r.value);
    if (r.error <= tol || r.error <= roundoff) return r.value;
    if (depth >= cfg.max_depth) {
        std::ostringstream os;
        os.precision(17);
        os << "quadrature: no convergence on [" << a << ", " << b << "] within depth " << cfg.max_depth
           << " (residual estimate " << r.error << ")";
        throw ConvergenceError(os.str(), r.error);
    }
    const double mid = 0.5 * (a + b);
    return adaptive_gk(f, a, mid, 0.5 * tol, depth + 1, cfg) +
           adaptive_gk(f, mid, b, 0.5 * tol, depth + 1, cfg);
}

}  // namespace detail

/// integral_lo^hi q'(t) e^{p(t)} dt between two consecutive breakpoints.
/// Endpoints flagged singular are approached by halving panels down to the
/// halo; the last sliver [s, s + halo] is closed with the mean-value estimate
/// e^{p(mid)} (q(s + halo) - q(s)), which only needs the primitive q.
inline double weighted_segment_integral(const ProblemSpec& spec, double lo, double hi, bool lo_singular,
                                        bool hi_singular, const QuadratureConfig& cfg) {
    if (!(lo < hi)) return 0.0;
    const CoefficientFn& p = spec.p();
    const CoefficientFn& q = spec.q();
    const auto integrand = [&](double t) { return q.derivative(t) * std::exp(p(t)); };

    if (lo_singular && hi_singular) {
        const double mid = 0.5 * (lo + hi);
        return weighted_segment_integral(spec, lo, mid, true, false, cfg) +
               weighted_segment_integral(spec, mid, hi, false, true, cfg);
    }
    if (!lo_singular && !hi_singular) return detail::adaptive_gk(integrand, lo, hi, cfg.abs_tol, 0, cfg);

    CompensatedSum acc;
    const double s = lo_singular ? lo : hi;
    double far = lo_singular ? hi : lo;
    // geometric panels [s + w/2, s + w] (or mirrored) until w reaches the halo
    while (std::abs(far - s) > cfg.singularity_halo) {
        const double near = s + 0.5 * (far - s);
        if (near == s || near == far) break;
        acc += lo_singular ? detail::adaptive_gk(integrand, near, far, cfg.abs_tol, 0, cfg)
                           : detail::adaptive_gk(integrand, far, near, cfg.abs_tol, 0, cfg);
        far = near;
    }
    const double mid = 0.5 * (s + far);
    const double q_jump = lo_singular ? q(far) - q(s) : q(s) - q(far);
    acc += std::exp(p(mid)) * q_jump;
    return acc.get();
}

/// integral_0^x q'(t) e^{p(t)} dt, split at the declared singular points.
inline double weighted_integral(const ProblemSpec& spec, double x, const QuadratureConfig& cfg = {}) {
    cfg.check();
    if (!spec.interval().is_unit()) throw Error("exact_via_formula: problem must be on [0,1]");
    if (!spec.q().has_derivative()) throw Error("exact_via_formula: q' is required");
    if (!(x >= 0.0 && x <= 1.0)) throw Error("exact_via_formula: x outside [0,1]");
    if (x == 0.0) return 0.0;

    const std::vector<double> singular = spec.singular_points();
    const auto is_singular = [&](double t) {
        return std::binary_search(singular.begin(), singular.end(), t);
    };
    std::vector<double> cuts{0.0};
    for (double s : singular)
        if (s > 0.0 && s < x) cuts.push_back(s);
    cuts.push_back(x);

    CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += weighted_segment_integral(spec, cuts[i], cuts[i + 1], is_singular(cuts[i]),
                                         is_singular(cuts[i + 1]), cfg);
    return acc.get();
}

/// The solution through its integral representation. Needs q'; p is used
/// only through its primitive.
inline double exact_via_formula(const ProblemSpec& spec, double x, const QuadratureConfig& cfg = {}) {
    const double integral = weighted_integral(spec, x, cfg);
    const double p0 = spec.p()(0.0);
    const double px = spec.p()(x);
    return spec.y0() * std::exp(p0 - px) + std::exp(-px) * integral;
}

/// Where RK4 hit a non-finite stage value.
struct NonFiniteReport {
    int stage = 0;          // 1..4
    double t = 0.0;         // abscissa the stage was evaluated at
    std::size_t step = 0;   // zero-based step index
    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << "non-finite RK4 stage " << stage << " at t = " << t << " (step " << step << ")";
        return os.str();
    }
};

using Rk4Result = std::variant<double, NonFiniteReport>;

struct Rk4Start {
    double t = 0.0;
    double y = 0.0;
};

/// Fixed-step classical RK4 for y' = q'(t) - p'(t) y from `start` to x, last
/// step shortened. Stops at the first non-finite stage instead of carrying a
/// NaN forward.
inline Rk4Result rk4_baseline(const ProblemSpec& spec, double h, double x, std::optional<Rk4Start> start = {}) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error("rk4_baseline: step must be positive");
    if (!spec.p().has_derivative() || !spec.q().has_derivative())
        throw Error("rk4_baseline: p' and q' are required");
    const Rk4Start s0 = start.value_or(Rk4Start{spec.interval().lo, spec.y0()});
    if (!(x >= s0.t)) throw Error("rk4_baseline: x must not precede the start point");

    const CoefficientFn& p = spec.p();
    const CoefficientFn& q = spec.q();
    const auto rhs = [&](double t, double y) { return q.derivative(t) - p.derivative(t) * y; };

    double y = s0.y;
    double t = s0.t;
    for (std::size_t step = 0; t < x; ++step) {
        const double t_next = std::min(x, s0.t + static_cast<double>(step + 1) * h);
        const double hh = t_next - t;
        if (!(hh > 0.0)) break;
        const double k1 = rhs(t, y);
        if (!std::isfinite(k1)) return NonFiniteReport{1, t, step};
        const double k2 = rhs(t + 0.5 * hh, y + 0.5 * hh * k1);
        if (!std::isfinite(k2)) return NonFiniteReport{2, t + 0.5 * hh, step};
        const double k3 = rhs(t + 0.5 * hh, y + 0.5 * hh * k2);
        if (!std::isfinite(k3)) return NonFiniteReport{3, t + 0.5 * hh, step};
        const double k4 = rhs(t_next, y + hh * k3);
        if (!std::isfinite(k4)) return NonFiniteReport{4, t_next, step};
        y += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = t_next;
    }
    return y;
}

/// One dyadic segment [left, right] with its integrals in closed form.
struct HakeSegment {
    double left = 0.0;
    double right = 0.0;
    double signed_integral = 0.0;
    double abs_integral = 0.0;
};

struct HakeSums {
    double partial_integral = 0.0;
    double partial_abs_integral = 0.0;
};

/// Sums the first m segments (ordered from the outermost toward 0) of the
/// signed integral and of the integral of the absolute value.
inline HakeSums hake_series(std::span<const HakeSegment> segments, std::size_t m) {
    if (m < 1) throw Error("hake_series: depth must be at least 1");
    if (m > segments.size())
        throw Error("hake_series: depth " + std::to_string(m) + " exceeds the " +
                    std::to_string(segments.size()) + " available segments");
    CompensatedSum signed_sum;
    CompensatedSum abs_sum;
    for (std::size_t i = 0; i < m; ++i) {
        const HakeSegment& seg = segments[i];
        if (!(seg.left < seg.right) || (i > 0 && seg.right > segments[i - 1].left))
            throw Error("hake_series: segments must be nonempty and decrease toward 0");
        signed_sum += seg.signed_integral;
        abs_sum += seg.abs_integral;
    }
    return {signed_sum.get(), abs_sum.get()};
}

/// Running partial sums for depths 1..m.
inline std::vector<HakeSums> hake_partial_sums(std::span<const HakeSegment> segments, std::size_t m) {
    std::vector<HakeSums> out;
    out.reserve(m);
    hake_series(segments, m);  // validates
    CompensatedSum signed_sum;
    CompensatedSum abs_sum;
    for (std::size_t i = 0; i < m; ++i) {
        signed_sum += segments[i].signed_integral;
        abs_sum += segments[i].abs_integral;
        out.push_back({signed_sum.get(), abs_sum.get()});
    }
    return out;
}

/// sup |S_j - S_k| over depths j, k in [from, to]: the Cauchy gap of the
/// signed partial sums on that range.
inline double hake_cauchy_gap(std::span<const HakeSegment> segments, std::size_t from, std::size_t to) {
    if (from < 1 || from > to) throw Error("hake_cauchy_gap: need 1 <= from <= to");
    const std::vector<HakeSums> sums = hake_partial_sums(segments, to);
    double lo = sums[from - 1].partial_integral;
    double hi = lo;
    for (std::size_t j = from; j < to; ++j) {
        lo = std::min(lo, sums[j].partial_integral);
        hi = std::max(hi, sums[j].partial_integral);
    }
    return hi - lo;
}

}  // namespace henstock_ode
