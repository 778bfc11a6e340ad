#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "movescanner/findings.hpp"
#include "movescanner/module.hpp"

namespace mvsc {

struct ScannerConfig {
    std::set<CheckKind> enabled_checks;  // defaults to all five
    size_t back_edge_budget = 1;
    size_t max_paths = 4096;
    std::vector<std::string> capability_name_suffixes = {"Cap", "Capability"};
    Severity fail_on = Severity::Low;
    bool deterministic_timing = false;  // report per-module times as 0

    static ScannerConfig defaults();
    bool enabled(CheckKind c) const { return enabled_checks.count(c) > 0; }
    // Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

struct Report {
    std::string tool = "movescanner";
    std::string version;
    size_t modules_analyzed = 0;
    std::vector<Finding> findings;  // sorted
    std::map<CheckKind, size_t> per_check_counts;   // all kinds, zeros kept
    std::map<std::string, int64_t> per_module_ms;   // module id -> elapsed
    std::vector<std::string> warnings;              // parser/ladder warnings
    size_t load_error_count = 0;  // unreadable/unparsable inputs (exit 2)

    bool any_at_or_above(Severity s) const;
};

extern const char* kToolVersion;

// Loads every input through the parse ladder, builds the package views once,
// then runs the enabled per-function and package-level detectors. Files that
// fail to load are reported in warnings and load_error_count; the rest are
// still scanned.
Report scan(const std::vector<std::string>& paths, const ScannerConfig& cfg);

// Same pipeline over already-parsed modules (used by tests and the corpus
// evaluator). Duplicate module ids raise a load error.
Report scan_modules(const std::vector<ModuleDef>& modules,
                    const ScannerConfig& cfg);

}  // namespace mvsc
