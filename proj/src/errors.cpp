#include "amdp/errors.hpp"

#include <sstream>

namespace amdp {

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

TruncationLeak::TruncationLeak(double l, double tolerance)
    : Error("mass " + fmt_double(l) + " leaves the truncation window (tolerance " +
            fmt_double(tolerance) + ")"),
      leaked(l) {}

WindowTooSmall::WindowTooSmall(std::uint64_t state, std::uint64_t window, std::uint64_t margin)
    : Error("state " + std::to_string(state) + " lies within " + std::to_string(margin) +
            " of the window bound " + std::to_string(window)) {}

NoConvergence::NoConvergence(const std::string& what, long sweeps, double residual)
    : Error(what + ": no convergence after " + std::to_string(sweeps) + " sweeps (residual " +
            fmt_double(residual) + ")") {}

EvaluationOverflow::EvaluationOverflow(std::uint64_t state, double value)
    : Error("candidate value at state " + std::to_string(state) + " is not finite (" +
            fmt_double(value) + "); shrink the window") {}

SupportExplosion::SupportExplosion(std::size_t cap)
    : Error("prefix support exceeds " + std::to_string(cap) + " paths") {}

HorizonMismatch::HorizonMismatch(int lhs, int rhs)
    : Error("prefix horizons differ: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}

ParseError::ParseError(const std::string& path, std::size_t l, const std::string& detail)
    : Error(path + ":" + std::to_string(l) + ": " + detail), line(l) {}

} // namespace amdp
