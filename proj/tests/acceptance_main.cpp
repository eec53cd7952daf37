// Acceptance battery driver: one PASS/FAIL line per criterion, exit 0 only if
// every criterion holds. Optional argv[1] selects the quick or full profile.

#include <cstring>
#include <iostream>

#include "shapeflow/verify.hpp"

int main(int argc, char** argv) {
    using namespace shapeflow;
    VerifyLevel level = VerifyLevel::Full;
    if (argc > 1 && std::strcmp(argv[1], "quick") == 0) level = VerifyLevel::Quick;
    std::cout << "acceptance battery, " << verifyLevelName(level) << " profile\n";
    const VerifyReport report = verifySuite(level, &std::cout);
    int passed = 0;
    for (const auto& c : report.criteria) passed += c.pass ? 1 : 0;
    std::cout << passed << "/" << report.criteria.size() << " criteria passed in "
              << report.total_seconds << "s\n";
    return report.allPass() ? 0 : 2;
}
