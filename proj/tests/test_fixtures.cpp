#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "henstock_ode/fixtures.hpp"

namespace henstock_ode {
namespace {

// midpoint rule; never samples the kinks at lo and hi
double midpoint(const RealFn& f, double lo, double hi, int panels) {
    const double h = (hi - lo) / panels;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) acc += f(lo + (i + 0.5) * h);
    return acc * h;
}

double distance_to(const std::vector<double>& pts, double x) {
    double d = HUGE_VAL;
    for (double s : pts) d = std::min(d, std::abs(x - s));
    return d;
}

TEST(Example3, ClosedForm) {
    const Fixture fx = example3();
    const RealFn& y = *fx.closed_form_solution;
    EXPECT_EQ(y(0.0), 0.0);
    EXPECT_EQ(y(0.25), 1.0);
    EXPECT_NEAR(y(0.125), 0.70711, 5e-6);
    EXPECT_NEAR(y(0.5), 1.41421, 5e-6);
    EXPECT_NEAR(y(0.75), 1.73205, 5e-6);
    EXPECT_EQ(y(1.0), 2.0);
    EXPECT_EQ(fx.spec.y0(), 0.0);
    EXPECT_EQ(fx.spec.p().singular_points(), std::vector<double>{0.0});
}

TEST(Example4, BranchesAndContinuity) {
    const Fixture fx = example4();
    const RealFn& y = *fx.closed_form_solution;
    EXPECT_NEAR(y(0.25), 0.5, 1e-15);
    EXPECT_NEAR(y(0.5), std::sqrt(3.0) / 6.0, 1e-15);
    EXPECT_NEAR(y(0.75), std::sqrt(1.0 / 12.0), 1e-15);
    for (double s : {1.0 / 3.0, 2.0 / 3.0}) {
        const double eps = 1e-12;
        EXPECT_NEAR(y(s - eps), y(s + eps), 1e-5);
        EXPECT_NEAR(fx.spec.p()(s - eps), fx.spec.p()(s + eps), 1e-5);
        EXPECT_NEAR(fx.spec.q()(s - eps), fx.spec.q()(s + eps), 1e-5);
    }
    EXPECT_EQ(fx.spec.p().singular_points(), (std::vector<double>{0.0, 1.0 / 3.0, 2.0 / 3.0}));
}

TEST(Example1, SawtoothShape) {
    const Fixture fx = example1_sawtooth(20);
    const CoefficientFn& q = fx.spec.q();
    for (int n = 1; n <= 21; ++n) EXPECT_EQ(q(std::ldexp(1.0, -n)), 0.0) << n;
    for (int n = 1; n <= 20; ++n) EXPECT_NEAR(q(std::ldexp(3.0, -(n + 2))), 1.0 / n, 1e-15) << n;
    EXPECT_EQ(q(0.375), 1.0);
    EXPECT_EQ(q(0.1875), 0.5);
    EXPECT_EQ(q(0.0), 0.0);
    EXPECT_EQ(q(0.8), 0.0);
    // below the truncation depth q vanishes
    EXPECT_EQ(q(std::ldexp(1.5, -23)), 0.0);
    EXPECT_EQ(fx.spec.p()(0.3), 0.0);
}

TEST(Example1, SegmentIntegralsAgainstQuadrature) {
    const Fixture fx = example1_sawtooth(12);
    const RealFn dq = *fx.spec.q().derivative_fn();
    const RealFn abs_dq = [&dq](double x) { return std::abs(dq(x)); };
    ASSERT_EQ(fx.hake_segments.size(), 12u);
    for (int n = 1; n <= 12; ++n) {
        const HakeSegment& s = fx.hake_segments[static_cast<std::size_t>(n - 1)];
        const double mid = 0.5 * (s.left + s.right);
        const double signed_int = midpoint(dq, s.left, mid, 64) + midpoint(dq, mid, s.right, 64);
        const double abs_int = midpoint(abs_dq, s.left, mid, 64) + midpoint(abs_dq, mid, s.right, 64);
        EXPECT_NEAR(s.signed_integral, signed_int, 1e-10);
        EXPECT_NEAR(s.abs_integral, abs_int, 1e-10);
        EXPECT_NEAR(s.abs_integral, 2.0 / n, 1e-15);
    }
}

TEST(Example2, EpAtHalfIsBetaOne) {
    const Fixture fx = example2_pair(30);
    const auto beta = default_beta_schedule(30);
    EXPECT_NEAR(std::exp(fx.spec.p()(0.5)), beta[0], 1e-15);
    EXPECT_NEAR(std::exp(fx.spec.p()(0.9)), beta[0], 1e-15);
    EXPECT_EQ(fx.spec.p()(0.0), 0.0);
    for (int n = 1; n <= 30; ++n)
        EXPECT_NEAR(std::exp(fx.spec.p()(std::ldexp(1.0, -n))), beta[static_cast<std::size_t>(n - 1)], 1e-15);
    EXPECT_FALSE(fx.closed_form_solution.has_value());
}

TEST(Example2, ConstantBetaScalesSawtooth) {
    const int depth = 8;
    const Fixture fx = example2_pair(std::vector<double>(depth + 1, 2.5), depth);
    const Fixture saw = example1_sawtooth(depth);
    for (const HakeSegment& s : fx.hake_segments) EXPECT_EQ(s.signed_integral, 0.0);
    for (std::size_t i = 0; i < fx.hake_segments.size(); ++i)
        EXPECT_NEAR(fx.hake_segments[i].abs_integral, 2.5 * saw.hake_segments[i].abs_integral, 1e-15);
}

TEST(Example2, SegmentIntegralsAgainstQuadrature) {
    const Fixture fx = example2_pair(10);
    const RealFn dq = *fx.spec.q().derivative_fn();
    const CoefficientFn& p = fx.spec.p();
    const RealFn w = [&](double x) { return dq(x) * std::exp(p(x)); };
    const RealFn aw = [&](double x) { return std::abs(w(x)); };
    for (std::size_t i = 0; i < fx.hake_segments.size(); ++i) {
        const HakeSegment& s = fx.hake_segments[i];
        const double mid = 0.5 * (s.left + s.right);
        // the integrand is affine on each half, so the midpoint rule is exact
        const double si = midpoint(w, s.left, mid, 8) + midpoint(w, mid, s.right, 8);
        const double ai = midpoint(aw, s.left, mid, 8) + midpoint(aw, mid, s.right, 8);
        EXPECT_NEAR(s.signed_integral, si, 1e-12 * (1.0 + std::abs(ai)));
        EXPECT_NEAR(s.abs_integral, ai, 1e-12 * (1.0 + ai));
    }
}

TEST(Example2, RejectsBadSchedules) {
    EXPECT_THROW(example2_pair(std::vector<double>{1.5, 1.6, 1.2}, 2), Error);
    EXPECT_THROW(example2_pair(std::vector<double>{1.5, 1.0, 1.0}, 2), Error);
    EXPECT_THROW(example2_pair(std::vector<double>{1.5, 1.2}, 2), Error);
    EXPECT_THROW(example2_pair(0), Error);
    EXPECT_THROW(example1_sawtooth(kMaxSawtoothDepth + 1), Error);
}

TEST(Fixtures, ValidateClean) {
    for (const Fixture& fx : {example1_sawtooth(20), example2_pair(20), example3(), example4()})
        EXPECT_TRUE(validate(fx.spec).empty()) << fx.name;
}

TEST(Fixtures, ClosedFormsSolveTheOde) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const Fixture& fx : {example1_sawtooth(30), example3(), example4()}) {
        const RealFn& y = *fx.closed_form_solution;
        const std::vector<double> singular = fx.spec.singular_points();
        int checked = 0;
        while (checked < 1024) {
            const double x = u(rng);
            if (distance_to(singular, x) < 0x1p-10 || x < 0x1p-10 || x > 1.0 - 0x1p-10) continue;
            const double h = 1e-6;
            const double dy = (y(x + h) - y(x - h)) / (2.0 * h);
            const double residual = dy + fx.spec.p().derivative(x) * y(x) - fx.spec.q().derivative(x);
            EXPECT_LE(std::abs(residual), 1e-4) << fx.name << " x = " << x;
            ++checked;
        }
    }
}

TEST(Fixtures, Deterministic) {
    for (const char* name : {"example1", "example2", "example3", "example4"}) {
        const Fixture a = fixture_by_name(name, 25);
        const Fixture b = fixture_by_name(name, 25);
        EXPECT_EQ(a.name, name);
        for (int j = 0; j <= 64; ++j) {
            const double x = j / 64.0;
            EXPECT_EQ(a.spec.p()(x), b.spec.p()(x));
            EXPECT_EQ(a.spec.q()(x), b.spec.q()(x));
        }
        EXPECT_EQ(a.hake_segments.size(), b.hake_segments.size());
    }
    EXPECT_THROW(fixture_by_name("example5"), Error);
}

}  // namespace
}  // namespace henstock_ode
