#pragma once

#include <map>
#include <string>
#include <vector>

#include "movescanner/findings.hpp"
#include "movescanner/scanner.hpp"

namespace mvsc {

struct FixtureLabel {
    CheckKind check = CheckKind::ResourceLeak;
    std::string function;
    int instruction_index = 0;
};

struct FixtureEntry {
    std::string file;               // relative to the corpus directory
    std::vector<std::string> deps;  // scanned together, unlabeled
    std::string clean;              // paired fixed variant
    std::vector<FixtureLabel> labels;
};

struct LabelManifest {
    std::vector<FixtureEntry> fixtures;
};

// Reads manifest.json; throws std::runtime_error on malformed input.
LabelManifest load_manifest(const std::string& path);

struct ScoreRow {
    size_t test_cases = 0;
    size_t detected = 0;
    size_t false_positives = 0;  // five-check findings on clean variants
};

struct ScoreTable {
    std::map<CheckKind, ScoreRow> rows;  // the five checks
    ScoreRow total;

    // 100 * detected / test_cases, one decimal.
    static double rate(size_t num, size_t den);
};

// Scans each fixture (with its deps) and its clean pair. A label counts as
// detected when a finding matches (check, function) with the instruction
// index within +-1. Any five-check finding on a clean variant is a false
// positive. Throws std::runtime_error on manifest/corpus mismatches.
ScoreTable evaluate_corpus(const std::string& corpus_dir,
                           const LabelManifest& manifest,
                           const ScannerConfig& cfg);

std::string render_score_text(const ScoreTable& t);
std::string render_score_json(const ScoreTable& t);

}  // namespace mvsc
