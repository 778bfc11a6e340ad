// The five vulnerability detectors plus the informational diagnostics pass.
// Each consumes the shared per-function analyses and the package views.
#pragma once

#include <map>
#include <vector>

#include "movescanner/cfg.hpp"
#include "movescanner/crossmodule.hpp"
#include "movescanner/dataflow.hpp"
#include "movescanner/findings.hpp"
#include "movescanner/typing.hpp"

namespace mvsc {

// Everything computed once per function and shared across detectors.
struct FunctionAnalysis {
    const TypedModule* module = nullptr;
    const FunctionDef* fn = nullptr;
    ControlFlowGraph cfg;
    DomTree dom;
    DefUseMap defuse;
    DataflowResult reaching;
    DataflowResult liveness;
    PathSet paths;
};

FunctionAnalysis analyze_function(const Package& pkg, const TypedModule& tm,
                                  const FunctionDef& f,
                                  size_t back_edge_budget, size_t max_paths);

using AnalysisMap = std::map<QualifiedName, FunctionAnalysis>;

// The shared infrastructure built once per scan: every per-function analysis
// plus the package-level views the detectors and API consumers read.
struct PackageAnalysis {
    Package pkg;
    AnalysisMap analyses;
    CallGraph call_graph;
    ResourceFlowGraph resource_flow;
    CapabilityMatrix access_matrix;
    std::map<std::string, int64_t> per_module_ms;
};

PackageAnalysis analyze_package(std::vector<ModuleDef> modules,
                                size_t back_edge_budget, size_t max_paths,
                                bool record_timing);

// A resource instance is created by pack/move_from of a resource struct and
// consumed by move_to (value operand), any call argument, ret, or unpack.
// One finding per creation site that escapes some ret-ending path; abort
// paths roll back and never report.
std::vector<Finding> detect_resource_leak(const Package& pkg,
                                          const FunctionAnalysis& fa);

// Call return values immediately popped (medium) or stored into a local that
// is dead right after the store (low). External callees are skipped.
std::vector<Finding> detect_unchecked_return(const Package& pkg,
                                             const FunctionAnalysis& fa);

// add/sub/mul without a related, dominating, aborting bound check; div/mod
// likewise unless the divisor is a nonzero constant.
std::vector<Finding> detect_arith_overflow(const FunctionAnalysis& fa);

// Public functions calling another module's state-modifying function without
// a signer/capability parameter or a dominating address-equality guard.
std::vector<Finding> detect_cross_module(const Package& pkg,
                                         const CallGraph& cg,
                                         const AnalysisMap& analyses);

// Capability transfers to untrusted recipients: move_to at a non-signer
// address, public functions returning capabilities, and by-value capability
// arguments to non-friend modules.
std::vector<Finding> detect_capability_leak(
    const Package& pkg, const ResourceFlowGraph& rfg,
    const AnalysisMap& analyses,
    const std::vector<std::string>& capability_name_suffixes);

// Informational: stack-discipline violations, unreachable blocks, uses of
// uninitialized locals, unresolved struct references, external callees
// skipped by the cross-module check. Independent of check configuration.
std::vector<Finding> collect_diagnostics(const Package& pkg,
                                         const CallGraph& cg,
                                         const AnalysisMap& analyses);

}  // namespace mvsc
