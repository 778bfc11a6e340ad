#include "movescanner/detectors.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace mvsc {

FunctionAnalysis analyze_function(const Package& pkg, const TypedModule& tm,
                                  const FunctionDef& f,
                                  size_t back_edge_budget, size_t max_paths) {
    FunctionAnalysis fa;
    fa.module = &tm;
    fa.fn = &f;
    fa.cfg = build_cfg(f);
    fa.dom = dominators(fa.cfg);
    fa.defuse = link_stack_defs(f, fa.cfg, pkg.resolve_ctx());
    fa.reaching = reaching_definitions(f, fa.cfg);
    fa.liveness = live_variables(f, fa.cfg);
    fa.paths = enumerate_paths(fa.cfg, back_edge_budget, max_paths);
    return fa;
}

PackageAnalysis analyze_package(std::vector<ModuleDef> modules,
                                size_t back_edge_budget, size_t max_paths,
                                bool record_timing) {
    PackageAnalysis pa;
    pa.pkg = make_package(std::move(modules));

    using clock = std::chrono::steady_clock;
    for (const auto& tm : pa.pkg.modules) {
        auto t0 = clock::now();
        for (const auto& f : tm.base.functions)
            pa.analyses.emplace(
                QualifiedName{tm.base.id, f.name},
                analyze_function(pa.pkg, tm, f, back_edge_budget, max_paths));
        pa.per_module_ms[tm.base.id.str()] =
            record_timing
                ? std::chrono::duration_cast<std::chrono::milliseconds>(
                      clock::now() - t0)
                      .count()
                : 0;
    }

    pa.call_graph = build_call_graph(pa.pkg);
    std::map<QualifiedName, const DefUseMap*> du_ptrs;
    for (const auto& [qn, fa] : pa.analyses) du_ptrs[qn] = &fa.defuse;
    pa.resource_flow = build_resource_flow(pa.pkg, pa.call_graph, du_ptrs);
    pa.access_matrix =
        build_capability_matrix(pa.pkg, pa.call_graph, pa.resource_flow);
    return pa;
}

namespace {

// Flow-insensitive ancestry over the def-use graph: instruction nodes are
// their own index, local l is node body.size()+l. A local-read instruction
// has the local as ancestor; a local has every st_loc writing it as ancestor.
class AncestorGraph {
public:
    AncestorGraph(const FunctionDef& f, const DefUseMap& du)
        : f_(f), du_(du), nlocal_base_(f.body.size()) {
        stores_.resize(f.locals.size());
        for (size_t i = 0; i < f.body.size(); ++i)
            if (f.body[i].op == Opcode::StLoc)
                stores_[f.body[i].local].push_back(static_cast<int>(i));
    }

    int local_node(uint32_t l) const {
        return static_cast<int>(nlocal_base_) + static_cast<int>(l);
    }

    // Closure over the seed nodes (seeds included).
    std::set<int> closure(std::vector<int> seeds) const {
        std::set<int> seen;
        while (!seeds.empty()) {
            int n = seeds.back();
            seeds.pop_back();
            if (!seen.insert(n).second) continue;
            if (n >= static_cast<int>(nlocal_base_)) {
                uint32_t l = static_cast<uint32_t>(n - nlocal_base_);
                for (int st : stores_[l]) seeds.push_back(st);
                continue;
            }
            const Instruction& ins = f_.body[n];
            for (int p : du_.operand_producers[n]) seeds.push_back(p);
            if (ins.op == Opcode::CopyLoc || ins.op == Opcode::MoveLoc ||
                ins.op == Opcode::BorrowLoc)
                seeds.push_back(local_node(ins.local));
        }
        return seen;
    }

    std::set<int> operand_closure(size_t instr) const {
        return closure(du_.operand_producers[instr]);
    }

private:
    const FunctionDef& f_;
    const DefUseMap& du_;
    size_t nlocal_base_;
    std::vector<std::vector<int>> stores_;
};

bool intersects(const std::set<int>& a, const std::set<int>& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib) return true;
        if (*ia < *ib) ++ia;
        else ++ib;
    }
    return false;
}

bool block_contains(const ControlFlowGraph& g, int block,
                    const FunctionDef& f, Opcode op) {
    const BasicBlock& b = g.blocks[block];
    for (size_t i = b.begin; i < b.end; ++i)
        if (f.body[i].op == op) return true;
    return false;
}

bool is_comparison(Opcode op) {
    switch (op) {
        case Opcode::Lt:
        case Opcode::Le:
        case Opcode::Gt:
        case Opcode::Ge:
        case Opcode::Eq:
        case Opcode::Neq:
            return true;
        default:
            return false;
    }
}

Finding base_finding(CheckKind check, Severity sev, const FunctionAnalysis& fa,
                     size_t index, std::string msg,
                     Confidence conf = Confidence::High) {
    Finding f;
    f.check = check;
    f.severity = sev;
    f.module = fa.module->base.id;
    f.function = fa.fn->name;
    f.instruction_index = static_cast<int>(index);
    f.message = std::move(msg);
    f.confidence = conf;
    return f;
}

// Does the branch ending `block` guard with an abort? True when one of its
// successors contains an abort instruction.
bool has_aborting_successor(const ControlFlowGraph& g, const FunctionDef& f,
                            int block) {
    for (int s : g.blocks[block].successors)
        if (block_contains(g, s, f, Opcode::Abort)) return true;
    return false;
}

}  // namespace

std::vector<Finding> detect_resource_leak(const Package& pkg,
                                          const FunctionAnalysis& fa) {
    std::vector<Finding> out;
    const FunctionDef& f = *fa.fn;
    const DefUseMap& du = fa.defuse;
    if (!du.valid) return out;

    std::set<size_t> creations;
    for (size_t i = 0; i < f.body.size(); ++i) {
        const Instruction& ins = f.body[i];
        if ((ins.op == Opcode::Pack || ins.op == Opcode::MoveFrom) &&
            pkg.is_resource(ins.target_module, ins.target_name))
            creations.insert(i);
    }
    if (creations.empty()) return out;

    std::map<size_t, const std::vector<int>*> reported;  // site -> witness
    for (const auto& path : fa.paths.paths) {
        const BasicBlock& last = fa.cfg.blocks[path.back()];
        if (f.body[last.end - 1].op == Opcode::Abort) continue;  // rollback

        std::map<uint32_t, size_t> held;  // local -> creation site
        std::vector<int> stack;           // creation site or -1 per slot
        std::set<size_t> escaped;         // created, never consumed
        for (int bid : path) {
            const BasicBlock& b = fa.cfg.blocks[bid];
            for (size_t i = b.begin; i < b.end; ++i) {
                const Instruction& ins = f.body[i];
                size_t pops = du.operand_producers[i].size();
                std::vector<int> popped(stack.end() - pops, stack.end());
                stack.resize(stack.size() - pops);

                switch (ins.op) {
                    case Opcode::Call:
                    case Opcode::Ret:
                    case Opcode::Unpack:
                        break;  // all popped instances are consumed
                    case Opcode::MoveTo:
                        // [address, value]: the value is consumed, an
                        // instance in the address slot would not be.
                        if (popped[0] >= 0)
                            escaped.insert(static_cast<size_t>(popped[0]));
                        break;
                    case Opcode::StLoc: {
                        auto it = held.find(ins.local);
                        if (it != held.end()) escaped.insert(it->second);
                        held.erase(ins.local);
                        if (popped[0] >= 0)
                            held[ins.local] = static_cast<size_t>(popped[0]);
                        break;
                    }
                    default:
                        // pop, arithmetic, branches, write_ref...: an
                        // instance disappearing here was never consumed.
                        for (int t : popped)
                            if (t >= 0) escaped.insert(static_cast<size_t>(t));
                        break;
                }

                size_t pushes = du.push_types[i].size();
                int tag = -1;
                if (creations.count(i)) {
                    tag = static_cast<int>(i);
                } else if (ins.op == Opcode::MoveLoc) {
                    auto it = held.find(ins.local);
                    if (it != held.end()) {
                        tag = static_cast<int>(it->second);
                        held.erase(it);
                    }
                }
                for (size_t k = 0; k < pushes; ++k)
                    stack.push_back(k == 0 ? tag : -1);
            }
        }
        for (const auto& [loc, site] : held) escaped.insert(site);
        for (size_t site : escaped)
            if (!reported.count(site)) reported[site] = &path;
    }

    Confidence conf = fa.paths.truncated ? Confidence::Medium : Confidence::High;
    for (const auto& [site, witness] : reported) {
        const Instruction& ins = f.body[site];
        Finding fd = base_finding(
            CheckKind::ResourceLeak, Severity::High, fa, site,
            "resource " + ins.target_module.str() + "::" + ins.target_name +
                " created here is neither moved nor consumed on some path",
            conf);
        fd.witness_path = *witness;
        out.push_back(std::move(fd));
    }
    return out;
}

std::vector<Finding> detect_unchecked_return(const Package& pkg,
                                             const FunctionAnalysis& fa) {
    std::vector<Finding> out;
    const FunctionDef& f = *fa.fn;
    const DefUseMap& du = fa.defuse;
    if (!du.valid) return out;

    for (size_t i = 0; i < f.body.size(); ++i) {
        const Instruction& ins = f.body[i];
        if (ins.op != Opcode::Call) continue;
        const FunctionDef* callee =
            pkg.find_function(ins.target_module, ins.target_name);
        if (!callee || callee->returns.empty()) continue;  // external or void

        bool popped = false, dead_store = false;
        for (size_t k = 0; k < du.consumers[i].size(); ++k) {
            int c = du.consumers[i][k];
            if (c < 0) continue;
            if (f.body[c].op == Opcode::Pop) {
                popped = true;
            } else if (f.body[c].op == Opcode::StLoc) {
                uint32_t l = f.body[c].local;
                if (!live_after(f, fa.cfg, fa.liveness, c, l))
                    dead_store = true;
            }
        }
        std::string callee_name =
            ins.target_module.str() + "::" + ins.target_name;
        if (popped) {
            out.push_back(base_finding(
                CheckKind::UncheckedReturn, Severity::Medium, fa, i,
                "return value of " + callee_name + " is discarded with pop",
                Confidence::High));
        } else if (dead_store) {
            out.push_back(base_finding(
                CheckKind::UncheckedReturn, Severity::Low, fa, i,
                "return value of " + callee_name +
                    " is stored into a local that is never read",
                Confidence::Medium));
        }
    }
    return out;
}

std::vector<Finding> detect_arith_overflow(const FunctionAnalysis& fa) {
    std::vector<Finding> out;
    const FunctionDef& f = *fa.fn;
    const DefUseMap& du = fa.defuse;
    if (!du.valid) return out;

    AncestorGraph anc(f, du);

    for (size_t i = 0; i < f.body.size(); ++i) {
        Opcode op = f.body[i].op;
        bool overflow_class =
            op == Opcode::Add || op == Opcode::Sub || op == Opcode::Mul;
        bool division_class = op == Opcode::Div || op == Opcode::Mod;
        if (!overflow_class && !division_class) continue;

        if (division_class) {
            // A constant nonzero divisor cannot trap.
            int divisor = du.operand_producers[i].back();
            const Instruction& dp = f.body[divisor];
            if ((dp.op == Opcode::LdU8 || dp.op == Opcode::LdU64 ||
                 dp.op == Opcode::LdU128) &&
                dp.imm != 0)
                continue;
        }

        int op_block = fa.cfg.block_of(i);
        std::set<int> op_anc = anc.operand_closure(i);
        bool checked = false;
        for (size_t c = 0; c < f.body.size() && !checked; ++c) {
            if (!is_comparison(f.body[c].op)) continue;
            int br = du.consumers[c].empty() ? -1 : du.consumers[c][0];
            if (br < 0) continue;
            Opcode brop = f.body[br].op;
            if (brop != Opcode::BrTrue && brop != Opcode::BrFalse) continue;
            int br_block = fa.cfg.block_of(br);
            if (!fa.dom.strictly_dominates(br_block, op_block, fa.cfg))
                continue;
            if (!has_aborting_successor(fa.cfg, f, br_block)) continue;
            if (intersects(op_anc, anc.operand_closure(c))) checked = true;
        }
        if (checked) continue;

        if (division_class) {
            out.push_back(base_finding(
                CheckKind::ArithOverflow, Severity::High, fa, i,
                std::string(mnemonic(op)) +
                    " with an unchecked divisor may abort on zero",
                Confidence::High));
        } else {
            out.push_back(base_finding(
                CheckKind::ArithOverflow,
                op == Opcode::Mul ? Severity::High : Severity::Medium, fa, i,
                std::string(mnemonic(op)) +
                    " has no dominating bound check and may overflow",
                Confidence::Medium));
        }
    }
    return out;
}

namespace {

bool param_is_access_token(const Package& pkg, const TypeTag& t) {
    if (t.is_signer_like()) return true;
    const TypeTag* s = &t;
    if (t.is_reference() && t.inner) s = t.inner.get();
    return s->is_struct() && pkg.is_capability(s->module, s->name);
}

// Clause (c): a strictly dominating block whose terminating branch consumes
// an address equality and can fall into an abort.
bool has_address_guard(const FunctionAnalysis& fa, int target_block) {
    const FunctionDef& f = *fa.fn;
    const DefUseMap& du = fa.defuse;
    for (size_t c = 0; c < f.body.size(); ++c) {
        if (f.body[c].op != Opcode::Eq) continue;
        if (du.popped_types[c].size() != 2 ||
            du.popped_types[c][0].kind != TypeTag::Kind::Address ||
            du.popped_types[c][1].kind != TypeTag::Kind::Address)
            continue;
        int br = du.consumers[c].empty() ? -1 : du.consumers[c][0];
        if (br < 0) continue;
        Opcode brop = f.body[br].op;
        if (brop != Opcode::BrTrue && brop != Opcode::BrFalse) continue;
        int br_block = fa.cfg.block_of(br);
        if (!fa.dom.strictly_dominates(br_block, target_block, fa.cfg))
            continue;
        if (has_aborting_successor(fa.cfg, f, br_block)) return true;
    }
    return false;
}

bool modifies_global_state(const FunctionDef& f) {
    for (const auto& ins : f.body)
        if (ins.op == Opcode::MoveTo || ins.op == Opcode::MoveFrom ||
            ins.op == Opcode::BorrowGlobalMut)
            return true;
    return false;
}

}  // namespace

std::vector<Finding> detect_cross_module(const Package& pkg,
                                         const CallGraph& cg,
                                         const AnalysisMap& analyses) {
    std::vector<Finding> out;
    for (const auto& e : cg.edges) {
        auto it = analyses.find(e.caller);
        if (it == analyses.end()) continue;
        const FunctionAnalysis& fa = it->second;
        if (fa.fn->visibility != Visibility::Public) continue;
        if (!fa.defuse.valid) continue;  // excluded at link time

        const FunctionDef* callee =
            pkg.find_function(e.callee.module, e.callee.name);
        if (!callee) continue;  // unknown body; diagnostics cover this
        if (e.callee.module == e.caller.module) continue;
        if (!modifies_global_state(*callee)) continue;

        bool guarded = false;
        for (const auto& [pn, pt] : fa.fn->params)
            if (param_is_access_token(pkg, pt)) guarded = true;
        if (!guarded)
            guarded = has_address_guard(fa, fa.cfg.block_of(e.site));
        if (guarded) continue;

        out.push_back(base_finding(
            CheckKind::CrossModule, Severity::High, fa, e.site,
            "public function calls " + e.callee.str() +
                ", which modifies global state, without access control",
            Confidence::High));
    }
    return out;
}

namespace {

bool name_matches_suffix(const std::string& name,
                         const std::vector<std::string>& suffixes) {
    for (const auto& suf : suffixes)
        if (name.size() >= suf.size() &&
            name.compare(name.size() - suf.size(), suf.size(), suf) == 0)
            return true;
    return false;
}

// The address fed to move_to is trusted when its producer chain reaches
// signer_addr applied to a signer parameter of this function.
bool address_from_signer(const FunctionDef& f, const DefUseMap& du,
                         const AncestorGraph& anc, size_t move_to) {
    std::set<int> addr_anc = anc.closure({du.operand_producers[move_to][0]});
    for (int n : addr_anc) {
        if (n >= static_cast<int>(f.body.size())) continue;
        if (f.body[n].op != Opcode::SignerAddr) continue;
        for (int m : anc.operand_closure(n)) {
            int local = m - static_cast<int>(f.body.size());
            if (local < 0) continue;
            if (static_cast<size_t>(local) < f.params.size() &&
                f.params[local].second.is_signer_like())
                return true;
        }
    }
    return false;
}

}  // namespace

std::vector<Finding> detect_capability_leak(
    const Package& pkg, const ResourceFlowGraph& rfg,
    const AnalysisMap& analyses,
    const std::vector<std::string>& capability_name_suffixes) {
    std::vector<Finding> out;
    auto confidence_for = [&](const std::string& struct_name) {
        return name_matches_suffix(struct_name, capability_name_suffixes)
                   ? Confidence::High
                   : Confidence::Medium;
    };

    for (const auto& [qn, fa] : analyses) {
        const FunctionDef& f = *fa.fn;

        // T1: storing a capability at an address not derived from a signer.
        if (fa.defuse.valid) {
            AncestorGraph anc(f, fa.defuse);
            for (size_t i = 0; i < f.body.size(); ++i) {
                const Instruction& ins = f.body[i];
                if (ins.op != Opcode::MoveTo ||
                    !pkg.is_capability(ins.target_module, ins.target_name))
                    continue;
                if (address_from_signer(f, fa.defuse, anc, i)) continue;
                out.push_back(base_finding(
                    CheckKind::CapabilityLeak, Severity::High, fa, i,
                    "capability " + ins.target_module.str() +
                        "::" + ins.target_name +
                        " is stored at an address not derived from a signer",
                    confidence_for(ins.target_name)));
            }
        }

        // T2: a public function handing a capability to any caller.
        if (f.visibility == Visibility::Public) {
            std::vector<std::string> caps;
            for (const auto& rt : f.returns)
                if (rt.is_struct() && pkg.is_capability(rt.module, rt.name))
                    caps.push_back(rt.module.str() + "::" + rt.name);
            if (!caps.empty()) {
                size_t ret_site = f.body.size();
                for (size_t i = 0; i < f.body.size(); ++i)
                    if (f.body[i].op == Opcode::Ret) {
                        ret_site = i;
                        break;
                    }
                if (ret_site < f.body.size()) {
                    std::string list;
                    for (const auto& c : caps)
                        list += (list.empty() ? "" : ", ") + c;
                    Confidence conf = Confidence::Medium;
                    for (const auto& rt : f.returns)
                        if (rt.is_struct() &&
                            pkg.is_capability(rt.module, rt.name) &&
                            name_matches_suffix(rt.name,
                                                capability_name_suffixes))
                            conf = Confidence::High;
                    out.push_back(base_finding(
                        CheckKind::CapabilityLeak, Severity::High, fa,
                        ret_site,
                        "public function returns capability " + list,
                        conf));
                }
            }
        }
    }

    // T3: a capability crossing to a module outside the defining module's
    // friend list, by value.
    for (const auto& e : rfg.edges) {
        if (e.is_return) continue;
        if (!pkg.is_capability(e.resource.module, e.resource.name)) continue;
        const TypedModule* owner = pkg.find_module(e.resource.module);
        if (owner && owner->is_friend(e.to)) continue;
        auto it = analyses.find(e.caller_fn);
        if (it == analyses.end()) continue;
        Confidence conf = confidence_for(e.resource.name);
        if (e.external_callee) conf = lower(conf);
        out.push_back(base_finding(
            CheckKind::CapabilityLeak, Severity::High, it->second, e.site,
            "capability " + e.resource.str() + " is passed by value to " +
                e.callee_fn.str() + ", which is not a friend of " +
                e.resource.module.str(),
            conf));
    }
    return out;
}

std::vector<Finding> collect_diagnostics(const Package& pkg,
                                         const CallGraph& cg,
                                         const AnalysisMap& analyses) {
    std::vector<Finding> out;
    for (const auto& [qn, fa] : analyses) {
        const FunctionDef& f = *fa.fn;

        if (!fa.defuse.valid) {
            size_t site = fa.defuse.violation_site >= 0
                              ? static_cast<size_t>(fa.defuse.violation_site)
                              : 0;
            out.push_back(base_finding(
                CheckKind::Diagnostic, Severity::Info, fa, site,
                "stack discipline violation (" + fa.defuse.violation +
                    "); function excluded from stack-dependent checks",
                Confidence::High));
        }

        for (const auto& b : fa.cfg.blocks)
            if (!b.reachable)
                out.push_back(base_finding(CheckKind::Diagnostic,
                                           Severity::Info, fa, b.begin,
                                           "unreachable block", Confidence::High));

        for (size_t i = 0; i < f.body.size(); ++i) {
            const Instruction& ins = f.body[i];
            if (ins.op != Opcode::CopyLoc && ins.op != Opcode::MoveLoc &&
                ins.op != Opcode::BorrowLoc)
                continue;
            if (!fa.cfg.blocks[fa.cfg.block_of(i)].reachable) continue;
            if (reaching_at(f, fa.cfg, fa.reaching, i, ins.local).empty())
                out.push_back(base_finding(
                    CheckKind::Diagnostic, Severity::Info, fa, i,
                    "use of uninitialized local '" +
                        f.locals[ins.local].first + "'",
                    Confidence::High));
        }
    }

    // Unresolved struct references, once per name at its first use site.
    for (const auto& tm : pkg.modules) {
        std::set<QualifiedName> seen;
        for (const auto& f : tm.base.functions) {
            for (size_t i = 0; i < f.body.size(); ++i) {
                const Instruction& ins = f.body[i];
                if (operand_kind(ins.op) != OperandKind::StructRef) continue;
                QualifiedName qn{ins.target_module, ins.target_name};
                if (!tm.external_structs.count(qn) || !seen.insert(qn).second)
                    continue;
                auto it = analyses.find({tm.base.id, f.name});
                if (it == analyses.end()) continue;
                out.push_back(base_finding(
                    CheckKind::Diagnostic, Severity::Info, it->second, i,
                    "struct " + qn.str() +
                        " is not defined in the scanned package",
                    Confidence::High));
            }
        }
    }

    // External callees skipped by the cross-module check.
    for (const auto& e : cg.edges) {
        if (pkg.find_function(e.callee.module, e.callee.name)) continue;
        auto it = analyses.find(e.caller);
        if (it == analyses.end()) continue;
        if (it->second.fn->visibility != Visibility::Public) continue;
        out.push_back(base_finding(
            CheckKind::Diagnostic, Severity::Info, it->second, e.site,
            "call to external " + e.callee.str() +
                " skipped by the cross-module check (unknown body)",
            Confidence::Low));
    }
    return out;
}

}  // namespace mvsc
