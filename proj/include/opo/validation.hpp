#pragma once

#include <string>
#include <vector>

namespace opo {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    // Failure belongs to the documented-unattainable list (see README).
    bool documented = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    // Multiplies every Monte Carlo trajectory count (1 = acceptance scale).
    double scale = 1.0;
    int threads = 0;
    unsigned long long seed = 20240611ULL;
};

constexpr int kCriterionCount = 12;

CriterionResult run_criterion(int id, const ValidationOptions& opt = {});

// All criteria in order when ids is empty.
std::vector<CriterionResult> run_validation(const ValidationOptions& opt = {},
                                            const std::vector<int>& ids = {});

// "PASS", "FAIL" or "FAIL (documented)".
std::string status_word(const CriterionResult& r);

// true when every failure is documented.
bool acceptable(const std::vector<CriterionResult>& rs);

}  // namespace opo
