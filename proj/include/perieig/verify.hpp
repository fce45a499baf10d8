#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "perieig/parallel.hpp"

namespace perieig {

/// One measured quantity against its acceptance bound.
struct Check {
    std::string label;
    double value = 0.0;
    double bound = 0.0;
    std::string relation;  // "<=", ">=", "==" or "is"
    bool pass = false;
};

Check at_most(std::string label, double value, double bound);
Check at_least(std::string label, double value, double bound);
Check holds(std::string label, bool ok);

struct CriterionReport {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    std::string error;  // solver or config failure, makes the criterion fail
    double seconds = 0.0;

    bool pass() const;
};

struct VerifyOptions {
    std::string fixture_dir;
    std::set<int> only;  // empty: all twelve
    std::function<void(const CriterionReport&)> on_result;
};

/// Titles of the acceptance criteria, by id.
const std::map<int, std::string>& criterion_titles();

/// Runs the acceptance criteria on the fixtures in `fixture_dir`. Failures
/// inside one criterion are recorded on its report; the run continues.
std::vector<CriterionReport> run_verify(const VerifyOptions& options);

/// "key = value" reference file; '#' starts a comment.
std::map<std::string, std::string> read_reference(const std::string& path);

/// One line per criterion: "[PASS] 3 omega-monotonicity (12.3 s)" plus the checks.
std::string format_report(const CriterionReport& r, bool details = true);

}  // namespace perieig
