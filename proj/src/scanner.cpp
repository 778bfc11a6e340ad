#include "movescanner/scanner.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "movescanner/binary.hpp"
#include "movescanner/crossmodule.hpp"
#include "movescanner/detectors.hpp"
#include "movescanner/errors.hpp"

namespace mvsc {

const char* kToolVersion = "0.1.0";

ScannerConfig ScannerConfig::defaults() {
    ScannerConfig c;
    for (CheckKind k : all_checks()) c.enabled_checks.insert(k);
    return c;
}

void ScannerConfig::validate() const {
    if (max_paths < 1)
        throw std::invalid_argument("max_paths must be at least 1");
    for (CheckKind c : enabled_checks)
        if (c == CheckKind::Diagnostic)
            throw std::invalid_argument("diagnostic is not a configurable check");
}

bool Report::any_at_or_above(Severity s) const {
    for (const auto& f : findings)
        if (f.severity >= s) return true;
    return false;
}

namespace {

struct LoadedModule {
    ModuleDef module;
    std::string origin;  // path or synthetic name
};

Report run_pipeline(std::vector<LoadedModule> loaded, const ScannerConfig& cfg,
                    std::vector<std::string> warnings, size_t load_errors) {
    cfg.validate();
    Report rep;
    rep.version = kToolVersion;
    rep.warnings = std::move(warnings);
    rep.load_error_count = load_errors;

    // Duplicate module ids: first one wins, later files are load errors.
    std::vector<LoadedModule> unique;
    for (auto& lm : loaded) {
        bool dup = false;
        for (const auto& u : unique)
            if (u.module.id == lm.module.id) dup = true;
        if (dup) {
            rep.warnings.push_back("load error: " + lm.origin +
                                   ": duplicate module id " +
                                   lm.module.id.str());
            ++rep.load_error_count;
        } else {
            unique.push_back(std::move(lm));
        }
    }

    std::vector<ModuleDef> defs;
    for (auto& lm : unique) defs.push_back(std::move(lm.module));
    PackageAnalysis pa =
        analyze_package(std::move(defs), cfg.back_edge_budget, cfg.max_paths,
                        !cfg.deterministic_timing);
    rep.modules_analyzed = pa.pkg.modules.size();
    rep.per_module_ms = pa.per_module_ms;

    std::vector<Finding> findings;
    auto append = [&](std::vector<Finding> v) {
        for (auto& f : v) findings.push_back(std::move(f));
    };

    for (const auto& [qn, fa] : pa.analyses) {
        if (cfg.enabled(CheckKind::ResourceLeak))
            append(detect_resource_leak(pa.pkg, fa));
        if (cfg.enabled(CheckKind::UncheckedReturn))
            append(detect_unchecked_return(pa.pkg, fa));
        if (cfg.enabled(CheckKind::ArithOverflow))
            append(detect_arith_overflow(fa));
    }
    if (cfg.enabled(CheckKind::CrossModule))
        append(detect_cross_module(pa.pkg, pa.call_graph, pa.analyses));
    if (cfg.enabled(CheckKind::CapabilityLeak))
        append(detect_capability_leak(pa.pkg, pa.resource_flow, pa.analyses,
                                      cfg.capability_name_suffixes));
    append(collect_diagnostics(pa.pkg, pa.call_graph, pa.analyses));

    sort_findings(findings);
    rep.findings = std::move(findings);

    rep.per_check_counts[CheckKind::ResourceLeak] = 0;
    rep.per_check_counts[CheckKind::UncheckedReturn] = 0;
    rep.per_check_counts[CheckKind::ArithOverflow] = 0;
    rep.per_check_counts[CheckKind::CrossModule] = 0;
    rep.per_check_counts[CheckKind::CapabilityLeak] = 0;
    rep.per_check_counts[CheckKind::Diagnostic] = 0;
    for (const auto& f : rep.findings) ++rep.per_check_counts[f.check];
    return rep;
}

}  // namespace

Report scan(const std::vector<std::string>& paths, const ScannerConfig& cfg) {
    std::vector<LoadedModule> loaded;
    std::vector<std::string> warnings;
    size_t load_errors = 0;

    for (const auto& path : paths) {
        std::error_code ec;
        bool regular = std::filesystem::is_regular_file(path, ec);
        std::ifstream in(path, std::ios::binary);
        if (!in || !regular) {
            warnings.push_back("load error: " + path + ": unreadable path");
            ++load_errors;
            continue;
        }
        std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
        try {
            LoadResult res = parse_binary(bytes);
            for (const auto& w : res.warnings)
                warnings.push_back(path + ": " + w);
            loaded.push_back({std::move(res.module), path});
        } catch (const ParseError& e) {
            warnings.push_back("load error: " + path + ": " + e.what());
            ++load_errors;
        }
    }
    return run_pipeline(std::move(loaded), cfg, std::move(warnings),
                        load_errors);
}

Report scan_modules(const std::vector<ModuleDef>& modules,
                    const ScannerConfig& cfg) {
    std::vector<LoadedModule> loaded;
    for (const auto& m : modules) loaded.push_back({m, m.id.str()});
    return run_pipeline(std::move(loaded), cfg, {}, 0);
}

}  // namespace mvsc
