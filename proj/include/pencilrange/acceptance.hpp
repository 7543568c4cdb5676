#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pencilrange {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

/// Run the acceptance criteria (all of them when `only` is empty); one result
/// per criterion.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {});

/// Print one pass/fail line per criterion; returns the number of failures.
int acceptance_main(std::ostream& out, const std::vector<int>& only = {});

}  // namespace pencilrange
