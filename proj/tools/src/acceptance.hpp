#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fermat::cli {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;          // measured values against their limits
    nlohmann::json values;       // deterministic measurements
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> criteria;   // empty runs all
    std::uint64_t seed = 0;
    int threads = 1;
    std::string scratch_dir = "acceptance-scratch";
    // called after each criterion finishes
    std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

// "[PASS] 3 helmholtz-residual-order: ..." / "[FAIL] ..."
std::string format_result(const CriterionResult& r);

}  // namespace fermat::cli
