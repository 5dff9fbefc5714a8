#pragma once

/**
 * @file fixtures.hpp
 * @brief Canonical test problems.
 *
 *  example3: p = sqrt(x), q = x + 2 sqrt(x), y0 = 0, y = 2 sqrt(x).
 *  example4: three-branch p, q with singular derivatives at 0 and 2/3 and
 *            kinks at 1/3; y = sqrt(x) | sqrt(3)(2/3 - x) | sqrt(x - 2/3).
 *  example1: sawtooth q with zeros at x_n = 2^-n and peak 1/n at the midpoint
 *            of [x_{n+1}, x_n]; q' is improperly integrable but not absolutely.
 *  example2: q from example1, e^p piecewise linear through (2^-n, beta_n);
 *            q' e^p keeps a convergent improper integral without being
 *            absolutely integrable.
 *
 * The sawtooth constructions are infinite toward 0; here they stop after
 * `depth` segments and the function is identically 0 below 2^-(depth+1).
 */

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "henstock_ode/error.hpp"
#include "henstock_ode/problem_model.hpp"
#include "henstock_ode/reference_solver.hpp"

namespace henstock_ode {

struct Fixture {
    std::string name;
    ProblemSpec spec;
    std::optional<RealFn> closed_form_solution;
    std::string notes;
    std::vector<HakeSegment> hake_segments;  // only for the sawtooth fixtures
};

inline constexpr int kMaxSawtoothDepth = 1000;

namespace detail {

inline constexpr double kOneThird = 1.0 / 3.0;
inline constexpr double kTwoThirds = 2.0 / 3.0;
inline const double kSqrt3 = std::sqrt(3.0);

inline MonotonePieces pieces(std::vector<double> breaks, std::vector<Monotonicity> dirs) {
    return MonotonePieces{std::move(breaks), std::move(dirs)};
}

// Segment index n >= 1 covers [2^-(n+1), 2^-n]; returns 0 when x is outside
// every segment of the truncated sawtooth.
inline int sawtooth_segment(double x, int depth) {
    if (!(x > 0.0) || x >= 0.5) return 0;
    const int n = -(std::ilogb(x) + 1);  // x in [2^-(n+1), 2^-n)
    return (n >= 1 && n <= depth) ? n : 0;
}

inline double sawtooth(double x, int depth) {
    const int n = sawtooth_segment(x, depth);
    if (n == 0) return 0.0;
    const double left = std::ldexp(1.0, -(n + 1));
    const double half = std::ldexp(1.0, -(n + 2));
    const double peak = 1.0 / n;
    const double t = x - left;  // in [0, 2*half)
    return t <= half ? peak * t / half : peak * (2.0 * half - t) / half;
}

inline double sawtooth_slope(double x, int depth) {
    const int n = sawtooth_segment(x, depth);
    if (n == 0) return 0.0;
    const double left = std::ldexp(1.0, -(n + 1));
    const double half = std::ldexp(1.0, -(n + 2));
    const double slope = (1.0 / n) / half;
    return (x - left) < half ? slope : -slope;
}

inline std::vector<double> sawtooth_singular_points(int depth) {
    std::vector<double> pts{0.0};
    for (int n = depth; n >= 1; --n) {
        pts.push_back(std::ldexp(1.0, -(n + 1)));
        pts.push_back(std::ldexp(3.0, -(n + 2)));  // midpoint of [2^-(n+1), 2^-n]
    }
    pts.push_back(0.5);
    return pts;
}

inline MonotonePieces sawtooth_pieces(int depth) {
    std::vector<double> breaks{0.0};
    std::vector<Monotonicity> dirs{Monotonicity::constant};
    for (int n = depth; n >= 1; --n) {
        breaks.push_back(std::ldexp(1.0, -(n + 1)));
        dirs.push_back(Monotonicity::increasing);
        breaks.push_back(std::ldexp(3.0, -(n + 2)));
        dirs.push_back(Monotonicity::decreasing);
    }
    breaks.push_back(0.5);
    dirs.push_back(Monotonicity::constant);
    breaks.push_back(1.0);
    return MonotonePieces{std::move(breaks), std::move(dirs)};
}

inline void check_depth(int depth) {
    if (depth < 1 || depth > kMaxSawtoothDepth)
        throw Error("sawtooth depth must lie in [1, " + std::to_string(kMaxSawtoothDepth) + "]");
}

}  // namespace detail

inline Fixture example3() {
    CoefficientFn p([](double x) { return std::sqrt(x); }, RealFn([](double x) { return 0.5 / std::sqrt(x); }),
                    {0.0}, detail::pieces({0.0, 1.0}, {Monotonicity::increasing}));
    CoefficientFn q([](double x) { return x + 2.0 * std::sqrt(x); },
                    RealFn([](double x) { return 1.0 + 1.0 / std::sqrt(x); }), {0.0},
                    detail::pieces({0.0, 1.0}, {Monotonicity::increasing}));
    return Fixture{"example3", ProblemSpec(std::move(p), std::move(q), 0.0),
                   RealFn([](double x) { return 2.0 * std::sqrt(x); }),
                   "y' + y/(2 sqrt x) = 1 + 1/sqrt x, y(0) = 0; coefficients unbounded at 0",
                   {}};
}

inline Fixture example4() {
    using detail::kOneThird;
    using detail::kSqrt3;
    using detail::kTwoThirds;
    RealFn p = [](double x) {
        if (x <= kOneThird) return std::sqrt(x);
        if (x <= kTwoThirds) return (kTwoThirds - x) * kSqrt3;
        return std::sqrt(x - kTwoThirds);
    };
    RealFn dp = [](double x) {
        if (x <= kOneThird) return 0.5 / std::sqrt(x);
        if (x <= kTwoThirds) return -kSqrt3;
        return 0.5 / std::sqrt(x - kTwoThirds);
    };
    RealFn q = [](double x) {
        if (x <= kOneThird) return 0.5 * x + std::sqrt(x) - kTwoThirds;
        if (x <= kTwoThirds) return -x * (2.0 + kSqrt3) + 1.5 * x * x + 2.0 / kSqrt3;
        return 0.5 * x + std::sqrt(x - kTwoThirds) - 1.0;
    };
    RealFn dq = [](double x) {
        if (x <= kOneThird) return 0.5 * (1.0 + 1.0 / std::sqrt(x));
        if (x <= kTwoThirds) return -2.0 - kSqrt3 + 3.0 * x;
        return 0.5 * (1.0 + 1.0 / std::sqrt(x - kTwoThirds));
    };
    RealFn y = [](double x) {
        if (x <= kOneThird) return std::sqrt(x);
        if (x <= kTwoThirds) return kSqrt3 * (kTwoThirds - x);
        return std::sqrt(x - kTwoThirds);
    };
    const std::vector<double> singular{0.0, kOneThird, kTwoThirds};
    const auto up_down_up = [] {
        return detail::pieces({0.0, kOneThird, kTwoThirds, 1.0},
                              {Monotonicity::increasing, Monotonicity::decreasing, Monotonicity::increasing});
    };
    CoefficientFn pf(std::move(p), std::move(dp), singular, up_down_up());
    CoefficientFn qf(std::move(q), std::move(dq), singular, up_down_up());
    return Fixture{"example4", ProblemSpec(std::move(pf), std::move(qf), 0.0), std::move(y),
                   "three-branch coefficients; derivatives unbounded at 0 and 2/3, jump at 1/3",
                   {}};
}

/// Sawtooth q of depth m with p = 0 and y0 = 0, so y = q.
inline Fixture example1_sawtooth(int depth) {
    detail::check_depth(depth);
    CoefficientFn p([](double) { return 0.0; }, RealFn([](double) { return 0.0; }), {},
                    detail::pieces({0.0, 1.0}, {Monotonicity::constant}));
    RealFn q = [depth](double x) { return detail::sawtooth(x, depth); };
    CoefficientFn qf(q, RealFn([depth](double x) { return detail::sawtooth_slope(x, depth); }),
                     detail::sawtooth_singular_points(depth), detail::sawtooth_pieces(depth));

    std::vector<HakeSegment> segments;
    segments.reserve(static_cast<std::size_t>(depth));
    for (int n = 1; n <= depth; ++n) {
        // q rises 1/n and falls 1/n: signed integral 0, integral of |q'| = 2/n
        segments.push_back({std::ldexp(1.0, -(n + 1)), std::ldexp(1.0, -n), 0.0, 2.0 / n});
    }
    return Fixture{"example1", ProblemSpec(std::move(p), std::move(qf), 0.0), std::move(q),
                   "sawtooth q' integrable only as an improper limit toward 0; depth " + std::to_string(depth),
                   std::move(segments)};
}

/// beta_n = 1 + 2^-n for n = 1..depth+1, held at 1 + 2^-52 past n = 52 so
/// every entry stays above 1 in double precision.
inline std::vector<double> default_beta_schedule(int depth) {
    std::vector<double> beta(static_cast<std::size_t>(depth) + 1);
    for (int n = 1; n <= depth + 1; ++n)
        beta[static_cast<std::size_t>(n - 1)] = 1.0 + std::ldexp(1.0, -std::min(n, 52));
    return beta;
}

/// `beta` holds beta_1..beta_{depth+1}: non-increasing, all > 1.
inline Fixture example2_pair(std::vector<double> beta, int depth) {
    detail::check_depth(depth);
    if (beta.size() != static_cast<std::size_t>(depth) + 1)
        throw Error("example2_pair: beta schedule needs depth + 1 entries");
    for (std::size_t i = 0; i < beta.size(); ++i) {
        if (!(beta[i] > 1.0) || !std::isfinite(beta[i]))
            throw Error("example2_pair: every beta must be finite and > 1");
        if (i > 0 && beta[i] > beta[i - 1])
            throw Error("example2_pair: beta schedule must be non-increasing");
    }

    // E = e^p: beta_1 on [1/2, 1]; linear on [2^-(n+1), 2^-n] from beta_{n+1} to beta_n;
    // linear from 1 at 0 to beta_{depth+1} at 2^-(depth+1).
    const auto e_p = [beta, depth](double x) {
        if (x >= 0.5) return beta[0];
        if (!(x > 0.0)) return 1.0;
        const int n = detail::sawtooth_segment(x, depth);
        if (n == 0) {
            const double right = std::ldexp(1.0, -(depth + 1));
            return 1.0 + (beta[static_cast<std::size_t>(depth)] - 1.0) * (x / right);
        }
        const double left = std::ldexp(1.0, -(n + 1));
        const double width = left;
        const double lo = beta[static_cast<std::size_t>(n)];
        const double hi = beta[static_cast<std::size_t>(n - 1)];
        return lo + (hi - lo) * ((x - left) / width);
    };
    const auto e_p_slope = [beta, depth](double x) {
        if (x >= 0.5) return 0.0;
        const int n = detail::sawtooth_segment(x, depth);
        if (n == 0) {
            const double right = std::ldexp(1.0, -(depth + 1));
            return (beta[static_cast<std::size_t>(depth)] - 1.0) / right;
        }
        const double width = std::ldexp(1.0, -(n + 1));
        return (beta[static_cast<std::size_t>(n - 1)] - beta[static_cast<std::size_t>(n)]) / width;
    };

    // e^p is increasing on [0, 1/2] and constant after
    CoefficientFn p([e_p](double x) { return std::log(e_p(x)); },
                    RealFn([e_p, e_p_slope](double x) { return e_p_slope(x) / e_p(x); }),
                    detail::sawtooth_singular_points(depth),
                    detail::pieces({0.0, 0.5, 1.0}, {Monotonicity::increasing, Monotonicity::constant}));
    CoefficientFn q([depth](double x) { return detail::sawtooth(x, depth); },
                    RealFn([depth](double x) { return detail::sawtooth_slope(x, depth); }),
                    detail::sawtooth_singular_points(depth), detail::sawtooth_pieces(depth));

    std::vector<HakeSegment> segments;
    segments.reserve(static_cast<std::size_t>(depth));
    for (int n = 1; n <= depth; ++n) {
        const double hi = beta[static_cast<std::size_t>(n - 1)];
        const double lo = beta[static_cast<std::size_t>(n)];
        // q' = +-2/(n w) on the two halves, e^p linear: rising half weighs lo + d/4,
        // falling half lo + 3d/4, with d = hi - lo.
        segments.push_back({std::ldexp(1.0, -(n + 1)), std::ldexp(1.0, -n), -(hi - lo) / (2.0 * n),
                            (hi + lo) / n});
    }
    return Fixture{"example2", ProblemSpec(std::move(p), std::move(q), 0.0), std::nullopt,
                   "q' e^p has an improper integral but is not absolutely integrable; depth " +
                       std::to_string(depth),
                   std::move(segments)};
}

inline Fixture example2_pair(int depth) { return example2_pair(default_beta_schedule(depth), depth); }

inline constexpr int kDefaultSawtoothDepth = 84;

/// Fixture by CLI identifier; sawtooth fixtures use `depth`.
inline Fixture fixture_by_name(std::string_view name, int depth = kDefaultSawtoothDepth) {
    if (name == "example1") return example1_sawtooth(depth);
    if (name == "example2") return example2_pair(depth);
    if (name == "example3") return example3();
    if (name == "example4") return example4();
    throw Error("unknown problem '" + std::string(name) + "' (expected example1..example4)");
}

}  // namespace henstock_ode
