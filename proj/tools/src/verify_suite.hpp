#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ccwb::cli {

struct VerifyCheck {
    std::string name;
    double tolerance = 0.0;
    double deviation = 0.0;
    bool pass = false;
};

/// "fast" runs the analytic kernel cases and the exhaustive cardinality
/// sweep; "full" adds brute-force zeta cross-checks of the assembled bound
/// entries and a Monte Carlo block suite. Tolerances are absolute except
/// where a row's name says otherwise.
std::vector<VerifyCheck> run_verify(const std::string& level);

/// One row per check; returns true when every check passed.
bool print_verify_table(const std::vector<VerifyCheck>& checks, std::ostream& out);

} // namespace ccwb::cli
