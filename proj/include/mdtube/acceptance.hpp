#pragma once

// The acceptance suite behind `mdtube verify`: criteria 1-8, each reduced to
// a pass/fail verdict with the numbers it was decided on.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mdtube {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::ostream* log = nullptr;  ///< per-run progress lines
    int threads = 1;
    /// Criteria to run; empty runs 1-8.
    std::vector<int> only;
    /// Run the full collar-pressure sweep on the 61k-cell root-soil grid
    /// instead of the driest pressure only.
    bool fine_sweep = false;
    /// When non-empty, each criterion's tables are written below this directory.
    std::string artifact_directory;
    /// Called after each criterion finishes.
    std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kNumCriteria = 8;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

/// "criterion 3 PASS  nonlinearity stress: ... (12.3 s)"
std::string format_criterion(const CriterionResult& result);

}  // namespace mdtube
