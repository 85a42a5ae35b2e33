#pragma once

#include <string>
#include <vector>

#include "henon/io.hpp"

namespace henon {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;     // deterministic measured values
    double seconds = 0.0;   // wall time; reported to stdout, never serialized
};

struct AcceptanceOutcome {
    std::vector<CriterionResult> criteria;
    bool allPassed() const {
        for (const auto& c : criteria)
            if (!c.passed) return false;
        return !criteria.empty();
    }
};

/// Runs the full acceptance suite for the given configuration, writing
/// byte-reproducible artifacts under outDir. The determinism criterion reruns
/// the artifact pipeline into a sibling directory and compares bytes.
AcceptanceOutcome run_acceptance(const RunConfig& cfg, const std::string& outDir);

/// One "id name PASS/FAIL detail (t s)" line per criterion.
std::string format_results_table(const AcceptanceOutcome& outcome);

/// The acceptance report artifact (no timings, fully deterministic).
std::string results_report_json(const AcceptanceOutcome& outcome);

}  // namespace henon
