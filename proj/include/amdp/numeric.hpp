#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace amdp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Neumaier-compensated running sum. Order of additions is the caller's
/// responsibility; results are reproducible for a fixed order.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::isinf(t) || std::isnan(t)) {
            sum_ = t;
            return;
        }
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const {
        if (std::isinf(sum_) || std::isnan(sum_)) return sum_;
        return sum_ + comp_;
    }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Accumulates sum_i a_i * b_i with error-free products (fma), giving a
/// result as accurate as if computed in twice the working precision.
class CompensatedDot {
public:
    void add_product(double a, double b) {
        const double p = a * b;
        if (!std::isfinite(p)) {
            sum_.add(p);
            return;
        }
        const double err = std::fma(a, b, -p);
        sum_.add(p);
        sum_.add(err);
    }
    void add(double x) { sum_.add(x); }
    double value() const { return sum_.value(); }

private:
    CompensatedSum sum_;
};

/// Relative difference guarded for values near zero.
inline double relative_change(double before, double after) {
    if (before == after) return 0.0;
    if (std::isinf(before) || std::isinf(after)) return kInf;
    return std::fabs(after - before) / std::max(1.0, std::fabs(after));
}

} // namespace amdp
