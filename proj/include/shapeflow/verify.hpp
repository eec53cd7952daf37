#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shapeflow {

// Two presets for the verification battery: Quick favors coarse meshes and
// short horizons for a fast smoke signal; Full runs the pinned reference
// parameters (finer meshes, longer flows, larger sample counts).
enum class VerifyLevel { Quick, Full };

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;  // one-line measured numbers behind the verdict
};

struct VerifyReport {
    VerifyLevel level = VerifyLevel::Quick;
    std::vector<CriterionResult> criteria;
    double total_seconds = 0.0;

    bool allPass() const;
};

// Runs all fourteen numerical checks in order. When `progress` is nonnull it
// receives one formatted line per criterion as that criterion completes.
VerifyReport verifySuite(VerifyLevel level, std::ostream* progress = nullptr);

// Fixed-format "[ k/14] name ... PASS/FAIL (1.2s) detail" line.
std::string criterionLine(const CriterionResult& c);

// Machine-readable verdict (JSON): level, per-criterion results, overall flag.
std::string verifyVerdictJson(const VerifyReport& report);

const char* verifyLevelName(VerifyLevel level);

}  // namespace shapeflow
