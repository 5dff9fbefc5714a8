#pragma once

/**
 * @file problem_model.hpp
 * @brief Coefficients given through their primitives, and Cauchy problems
 *        y' + p'(x) y = q'(x), y(a) = y0 built from them.
 *
 * A coefficient is carried by its continuous primitive. The derivative is
 * optional: the surrogate solver never looks at it, only the reference
 * solver and the consistency check in validate() do. Points where the
 * derivative is undefined or unbounded are declared as singular points; the
 * primitive must still return its finite value there.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "henstock_ode/error.hpp"

namespace henstock_ode {

using RealFn = std::function<double(double)>;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool is_unit() const { return lo == 0.0 && hi == 1.0; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Monotonicity { increasing, decreasing, constant };

/// Breakpoints b_0 < b_1 < ... < b_k covering the domain; the function is
/// monotone on each [b_i, b_{i+1}] in the direction directions[i].
struct MonotonePieces {
    std::vector<double> breaks;
    std::vector<Monotonicity> directions;
};

inline Monotonicity flipped(Monotonicity m) {
    switch (m) {
        case Monotonicity::increasing: return Monotonicity::decreasing;
        case Monotonicity::decreasing: return Monotonicity::increasing;
        case Monotonicity::constant: break;
    }
    return Monotonicity::constant;
}

class CoefficientFn {
public:
    explicit CoefficientFn(RealFn primitive, std::optional<RealFn> derivative = std::nullopt,
                           std::vector<double> singular_points = {},
                           std::optional<MonotonePieces> monotone = std::nullopt,
                           Interval domain = {})
        : primitive_(std::move(primitive)),
          derivative_(std::move(derivative)),
          singular_points_(std::move(singular_points)),
          monotone_(std::move(monotone)),
          domain_(domain) {
        if (!primitive_) throw Error("CoefficientFn: primitive is empty");
        if (!(domain_.lo < domain_.hi) || !std::isfinite(domain_.lo) || !std::isfinite(domain_.hi))
            throw Error("CoefficientFn: domain must be a finite interval with lo < hi");
        for (std::size_t i = 0; i < singular_points_.size(); ++i) {
            const double s = singular_points_[i];
            if (!domain_.contains(s))
                throw Error("CoefficientFn: singular point outside the domain");
            if (i > 0 && !(singular_points_[i - 1] < s))
                throw Error("CoefficientFn: singular points must be strictly increasing");
        }
        if (monotone_) check_monotone(*monotone_);
    }

    double operator()(double x) const { return primitive_(x); }
    double primitive(double x) const { return primitive_(x); }

    bool has_derivative() const { return derivative_.has_value(); }
    double derivative(double x) const {
        if (!derivative_) throw Error("CoefficientFn: derivative not available");
        return (*derivative_)(x);
    }

    const RealFn& primitive_fn() const { return primitive_; }
    const std::optional<RealFn>& derivative_fn() const { return derivative_; }
    const std::vector<double>& singular_points() const { return singular_points_; }
    const std::optional<MonotonePieces>& monotone_pieces() const { return monotone_; }
    const Interval& domain() const { return domain_; }

    bool is_singular(double x) const {
        return std::binary_search(singular_points_.begin(), singular_points_.end(), x);
    }

private:
    void check_monotone(const MonotonePieces& m) const {
        const auto& b = m.breaks;
        if (b.size() < 2 || m.directions.size() + 1 != b.size())
            throw Error("CoefficientFn: monotone pieces need k+1 breaks for k directions");
        if (b.front() != domain_.lo || b.back() != domain_.hi)
            throw Error("CoefficientFn: monotone pieces must cover the domain");
        for (std::size_t i = 1; i < b.size(); ++i)
            if (!(b[i - 1] < b[i]))
                throw Error("CoefficientFn: monotone breaks must be strictly increasing");
    }

    RealFn primitive_;
    std::optional<RealFn> derivative_;
    std::vector<double> singular_points_;
    std::optional<MonotonePieces> monotone_;
    Interval domain_;
};

/// g o f keeps f's monotone pieces when g is monotone; pass `increasing` for
/// the direction of g. The derivative is dropped.
inline CoefficientFn compose_monotone(const CoefficientFn& f, RealFn g, bool increasing) {
    std::optional<MonotonePieces> pieces = f.monotone_pieces();
    if (pieces && !increasing)
        for (auto& d : pieces->directions) d = flipped(d);
    RealFn inner = f.primitive_fn();
    return CoefficientFn([inner, g = std::move(g)](double x) { return g(inner(x)); }, std::nullopt,
                         f.singular_points(), std::move(pieces), f.domain());
}

/// Cauchy problem y' + p'(x) y = q'(x) on [a, b], y(a) = y0.
class ProblemSpec {
public:
    ProblemSpec(CoefficientFn p, CoefficientFn q, double y0, Interval interval = {})
        : p_(std::move(p)), q_(std::move(q)), y0_(y0), interval_(interval) {
        if (!std::isfinite(interval_.lo) || !std::isfinite(interval_.hi))
            throw Error("ProblemSpec: interval endpoints must be finite");
        if (!(interval_.lo < interval_.hi)) throw Error("ProblemSpec: interval requires a < b");
        if (!std::isfinite(y0_)) throw Error("ProblemSpec: y0 must be finite");
        if (p_.domain() != interval_ || q_.domain() != interval_)
            throw Error("ProblemSpec: coefficient domains must equal the problem interval");
    }

    const CoefficientFn& p() const { return p_; }
    const CoefficientFn& q() const { return q_; }
    double y0() const { return y0_; }
    const Interval& interval() const { return interval_; }

    /// Union of the singular points of p and q, sorted, without duplicates.
    std::vector<double> singular_points() const {
        std::vector<double> all = p_.singular_points();
        all.insert(all.end(), q_.singular_points().begin(), q_.singular_points().end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        return all;
    }

private:
    CoefficientFn p_;
    CoefficientFn q_;
    double y0_;
    Interval interval_;
};

namespace detail {

inline CoefficientFn to_unit(const CoefficientFn& f, Interval from) {
    const double a = from.lo;
    const double len = from.length();
    const auto to_u = [a, len](double x) { return (x - a) / len; };
    // endpoints pinned so rounding cannot push them out of [0,1]
    const auto remap = [&](double x) {
        if (x == from.lo) return 0.0;
        if (x == from.hi) return 1.0;
        return std::clamp(to_u(x), 0.0, 1.0);
    };

    std::vector<double> sing;
    sing.reserve(f.singular_points().size());
    for (double s : f.singular_points()) sing.push_back(remap(s));

    std::optional<MonotonePieces> pieces;
    if (const auto& m = f.monotone_pieces()) {
        pieces = *m;
        for (auto& b : pieces->breaks) b = remap(b);
    }

    RealFn prim = f.primitive_fn();
    RealFn unit_prim = [prim, a, len](double u) { return prim(a + len * u); };
    std::optional<RealFn> unit_deriv;
    if (const auto& d = f.derivative_fn()) {
        RealFn deriv = *d;
        unit_deriv = [deriv, a, len](double u) { return len * deriv(a + len * u); };
    }
    return CoefficientFn(std::move(unit_prim), std::move(unit_deriv), std::move(sing),
                         std::move(pieces), Interval{0.0, 1.0});
}

}  // namespace detail

/// Maps the problem onto [0,1] through x = a + (b - a) u. The derivative is
/// rescaled by (b - a), so y_orig(a + (b - a) u) = y_norm(u). Problems already
/// on [0,1] come back unchanged.
inline ProblemSpec normalize(const ProblemSpec& spec) {
    const Interval iv = spec.interval();
    if (iv.is_unit()) return spec;
    return ProblemSpec(detail::to_unit(spec.p(), iv), detail::to_unit(spec.q(), iv), spec.y0(),
                       Interval{0.0, 1.0});
}

/// Non-fatal finding from validate().
struct Diagnostic {
    std::string coefficient;  // "p" or "q"
    double x = 0.0;           // worst offending abscissa
    std::string message;
};

struct ValidateOptions {
    std::size_t grid = 1024;
    double relative_tolerance = 1e-5;
    double exclusion_radius = 1.0 / 1024.0;
    double fd_step = 1e-6;
};

namespace detail {

inline void check_finite_samples(const CoefficientFn& f, const char* name, const ProblemSpec& spec,
                                 std::size_t grid) {
    const Interval iv = spec.interval();
    auto probe = [&](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os.precision(17);
            os << "primitive " << name << " is not finite at x = " << x;
            throw Error(os.str());
        }
    };
    for (std::size_t i = 0; i <= grid; ++i)
        probe(iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(grid));
    for (double s : f.singular_points()) {
        probe(s);
        const double eps = iv.length() * 0x1p-30;
        if (s - eps >= iv.lo) probe(s - eps);
        if (s + eps <= iv.hi) probe(s + eps);
    }
}

inline std::optional<Diagnostic> check_derivative(const CoefficientFn& f, const char* name,
                                                  const ProblemSpec& spec,
                                                  const std::vector<double>& singular,
                                                  const ValidateOptions& opt) {
    if (!f.has_derivative()) return std::nullopt;
    const Interval iv = spec.interval();
    const double len = iv.length();
    const double radius = opt.exclusion_radius * len;
    const double h = opt.fd_step * len;

    double worst = 0.0;
    double worst_x = 0.0;
    for (std::size_t i = 0; i < opt.grid; ++i) {
        const double x = iv.lo + len * (static_cast<double>(i) + 0.5) / static_cast<double>(opt.grid);
        const bool near_singular = std::any_of(singular.begin(), singular.end(),
                                               [&](double s) { return std::abs(x - s) <= radius; });
        if (near_singular) continue;
        const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
        const double d = f.derivative(x);
        const double rel = std::abs(fd - d) / std::max(1.0, std::abs(d));
        if (!(rel <= worst) || !std::isfinite(rel)) {
            worst = std::isfinite(rel) ? rel : HUGE_VAL;
            worst_x = x;
        }
    }
    if (worst <= opt.relative_tolerance) return std::nullopt;
    std::ostringstream os;
    os << "derivative of " << name << " disagrees with finite differences of the primitive"
       << " (relative mismatch " << worst << ")";
    return Diagnostic{name, worst_x, os.str()};
}

}  // namespace detail

/// Checks a problem before solving. A non-finite primitive sample throws;
/// derivative/primitive mismatches come back as diagnostics because the
/// surrogate method never uses the derivative.
inline std::vector<Diagnostic> validate(const ProblemSpec& spec, const ValidateOptions& opt = {}) {
    detail::check_finite_samples(spec.p(), "p", spec, opt.grid);
    detail::check_finite_samples(spec.q(), "q", spec, opt.grid);

    const std::vector<double> singular = spec.singular_points();
    std::vector<Diagnostic> out;
    if (auto d = detail::check_derivative(spec.p(), "p", spec, singular, opt)) out.push_back(*d);
    if (auto d = detail::check_derivative(spec.q(), "q", spec, singular, opt)) out.push_back(*d);
    return out;
}

}  // namespace henstock_ode
