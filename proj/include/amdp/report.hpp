#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace amdp {

struct ReportEntry {
    std::string id;
    std::string anchor;  ///< the closed-form statement being checked
    double expected = 0.0;
    double computed = 0.0;
    double tol = 0.0;
    bool pass = false;
    double ms = 0.0;
    std::string detail;

    bool operator==(const ReportEntry&) const = default;
};

struct PaperReport {
    std::vector<ReportEntry> checks;
    bool pass = false;

    bool operator==(const PaperReport&) const = default;
};

struct ReportOptions {
    std::uint64_t seed = 1;
    std::uint64_t mc_samples = 100000;
    std::uint64_t mc_cap = 10000;
    unsigned threads = 0;
    /// Test hook: replaces example1 by a variant whose action-2 step goes up
    /// with probability 1/4, so every example1 check must fail.
    bool corrupt_builtin = false;
};

/// Runs every check in a fixed order. A check that throws becomes a failing
/// entry carrying the exception text.
PaperReport reproduce_paper(const ReportOptions& opts = {});

/// JSON: {"checks":[{id,anchor,expected,computed,tol,status,ms,detail}],"status"}.
/// Non-finite numbers are written as the strings "inf", "-inf", "nan".
std::string report_to_json(const PaperReport& r);
PaperReport report_from_json(const std::string& text);

/// Fixed-width human-readable table.
std::string report_table(const PaperReport& r);

} // namespace amdp
