#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace clonetrade {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::string> details;
};

// scope: "fast" (closed forms plus the small oracle checks) or "full".
std::vector<CriterionResult> run_acceptance(const std::string &scope, std::ostream *progress = nullptr);

// One line per criterion, then indented details.
void print_acceptance(std::ostream &out, const std::vector<CriterionResult> &results);

}  // namespace clonetrade
