#pragma once

#include <cmath>

namespace henstock_ode {

// Neumaier's variant of Kahan summation; also exact when |input| > |sum|.
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double init) : sum_(init) {}

    void add(double input) {
        const double t = sum_ + input;
        if (std::abs(sum_) >= std::abs(input))
            c_ += (sum_ - t) + input;
        else
            c_ += (input - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double input) {
        add(input);
        return *this;
    }

    double get() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

}  // namespace henstock_ode
