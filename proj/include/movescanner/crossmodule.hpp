// Package-level views: global call graph, module access (capability) matrix,
// resource flow graph.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "movescanner/dataflow.hpp"
#include "movescanner/typing.hpp"

namespace mvsc {

struct CallGraphNode {
    QualifiedName fn;
    bool external = false;  // referenced but not declared in the package
};

struct CallEdge {
    QualifiedName caller;
    QualifiedName callee;
    size_t site = 0;  // call instruction index in the caller's body
};

struct CallGraph {
    std::vector<CallGraphNode> nodes;  // declared functions, then externals
    std::vector<CallEdge> edges;       // in module/body order

    bool is_external(const QualifiedName& fn) const;
};

enum class AccessKind : uint8_t { Call, GlobalRead, GlobalWrite, ResourceTransfer };

const char* access_kind_name(AccessKind k);

struct AccessSite {
    ModuleId module;       // module whose body holds the witness instruction
    std::string function;
    size_t instr = 0;
};

// entries[(from, to)][kind] = witness sites; every recorded kind is
// witnessed by at least one concrete instruction.
struct CapabilityMatrix {
    std::map<std::pair<ModuleId, ModuleId>,
             std::map<AccessKind, std::vector<AccessSite>>>
        entries;

    bool has(const ModuleId& from, const ModuleId& to, AccessKind k) const;
};

struct ResourceFlowEdge {
    ModuleId from;
    ModuleId to;
    QualifiedName resource;   // defining module + struct name
    QualifiedName caller_fn;  // call site location
    QualifiedName callee_fn;
    size_t site = 0;
    bool is_return = false;       // value flows callee -> caller
    bool external_callee = false; // argument types inferred from the stack sim
};

struct ResourceFlowGraph {
    std::vector<ResourceFlowEdge> edges;
};

// One node per declared function plus one per unresolved external target;
// one edge per call instruction, in body order.
CallGraph build_call_graph(const Package& pkg);

// By-value resource structs crossing module boundaries through call
// arguments (caller -> callee) or returns (callee -> caller). External
// callees get argument types from the caller's stack simulation.
ResourceFlowGraph build_resource_flow(
    const Package& pkg, const CallGraph& cg,
    const std::map<QualifiedName, const DefUseMap*>& defuse);

CapabilityMatrix build_capability_matrix(const Package& pkg,
                                         const CallGraph& cg,
                                         const ResourceFlowGraph& rfg);

}  // namespace mvsc
