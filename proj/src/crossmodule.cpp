#include "movescanner/crossmodule.hpp"

#include <algorithm>
#include <set>

namespace mvsc {

bool CallGraph::is_external(const QualifiedName& fn) const {
    for (const auto& n : nodes)
        if (n.fn == fn) return n.external;
    return false;
}

const char* access_kind_name(AccessKind k) {
    switch (k) {
        case AccessKind::Call: return "Call";
        case AccessKind::GlobalRead: return "GlobalRead";
        case AccessKind::GlobalWrite: return "GlobalWrite";
        case AccessKind::ResourceTransfer: return "ResourceTransfer";
    }
    return "?";
}

bool CapabilityMatrix::has(const ModuleId& from, const ModuleId& to,
                           AccessKind k) const {
    auto it = entries.find({from, to});
    return it != entries.end() && it->second.count(k) > 0;
}

CallGraph build_call_graph(const Package& pkg) {
    CallGraph cg;
    for (const auto& tm : pkg.modules)
        for (const auto& f : tm.base.functions)
            cg.nodes.push_back({{tm.base.id, f.name}, false});

    std::set<QualifiedName> externals;
    for (const auto& tm : pkg.modules) {
        for (const auto& f : tm.base.functions) {
            QualifiedName caller{tm.base.id, f.name};
            for (size_t i = 0; i < f.body.size(); ++i) {
                const Instruction& ins = f.body[i];
                if (ins.op != Opcode::Call) continue;
                QualifiedName callee{ins.target_module, ins.target_name};
                if (!pkg.find_function(callee.module, callee.name))
                    externals.insert(callee);
                cg.edges.push_back({caller, callee, i});
            }
        }
    }
    for (const auto& e : externals) cg.nodes.push_back({e, true});
    return cg;
}

ResourceFlowGraph build_resource_flow(
    const Package& pkg, const CallGraph& cg,
    const std::map<QualifiedName, const DefUseMap*>& defuse) {
    ResourceFlowGraph rfg;
    for (const auto& e : cg.edges) {
        if (e.caller.module == e.callee.module) continue;
        const FunctionDef* callee =
            pkg.find_function(e.callee.module, e.callee.name);
        if (callee) {
            for (const auto& [pname, pt] : callee->params) {
                if (!pt.is_struct() ||
                    !pkg.is_resource(pt.module, pt.name))
                    continue;
                rfg.edges.push_back({e.caller.module, e.callee.module,
                                     {pt.module, pt.name}, e.caller, e.callee,
                                     e.site, false, false});
            }
            for (const auto& rt : callee->returns) {
                if (!rt.is_struct() ||
                    !pkg.is_resource(rt.module, rt.name))
                    continue;
                rfg.edges.push_back({e.callee.module, e.caller.module,
                                     {rt.module, rt.name}, e.caller, e.callee,
                                     e.site, true, false});
            }
        } else {
            // Unknown signature: the stack simulation recorded what the call
            // consumed; any by-value resource among it crosses the boundary.
            auto it = defuse.find(e.caller);
            if (it == defuse.end() || !it->second->valid) continue;
            const DefUseMap& du = *it->second;
            for (const TypeTag& t : du.popped_types[e.site]) {
                if (!t.is_struct() || !pkg.is_resource(t.module, t.name))
                    continue;
                rfg.edges.push_back({e.caller.module, e.callee.module,
                                     {t.module, t.name}, e.caller, e.callee,
                                     e.site, false, true});
            }
        }
    }
    return rfg;
}

CapabilityMatrix build_capability_matrix(const Package& pkg,
                                         const CallGraph& cg,
                                         const ResourceFlowGraph& rfg) {
    CapabilityMatrix mat;
    for (const auto& tm : pkg.modules) {
        for (const auto& f : tm.base.functions) {
            for (size_t i = 0; i < f.body.size(); ++i) {
                const Instruction& ins = f.body[i];
                AccessKind kind;
                switch (ins.op) {
                    case Opcode::MoveTo:
                    case Opcode::MoveFrom:
                    case Opcode::BorrowGlobalMut:
                        kind = AccessKind::GlobalWrite;
                        break;
                    case Opcode::BorrowGlobal:
                    case Opcode::Exists:
                        kind = AccessKind::GlobalRead;
                        break;
                    default:
                        continue;
                }
                mat.entries[{tm.base.id, ins.target_module}][kind].push_back(
                    {tm.base.id, f.name, i});
            }
        }
    }
    for (const auto& e : cg.edges)
        mat.entries[{e.caller.module, e.callee.module}][AccessKind::Call]
            .push_back({e.caller.module, e.caller.name, e.site});
    for (const auto& e : rfg.edges)
        mat.entries[{e.from, e.to}][AccessKind::ResourceTransfer].push_back(
            {e.caller_fn.module, e.caller_fn.name, e.site});
    return mat;
}

}  // namespace mvsc
