// Shared test helpers: hand-assembled function fixtures, a seeded random
// function generator, and the independent oracles the analysis fixpoints are
// checked against (all-paths dominator intersection, meet-over-paths
// dataflow, DAG path counting).
#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "movescanner/cfg.hpp"
#include "movescanner/dataflow.hpp"
#include "movescanner/module.hpp"

namespace mvsc::testsupport {

class FnBuilder {
public:
    explicit FnBuilder(std::string name,
                       Visibility vis = Visibility::Private) {
        f_.name = std::move(name);
        f_.visibility = vis;
    }

    FnBuilder& param(std::string n, TypeTag t) {
        f_.params.emplace_back(n, t);
        f_.locals.emplace_back(std::move(n), std::move(t));
        return *this;
    }
    FnBuilder& local(std::string n, TypeTag t) {
        f_.locals.emplace_back(std::move(n), std::move(t));
        return *this;
    }
    FnBuilder& ret_type(TypeTag t) {
        f_.returns.push_back(std::move(t));
        return *this;
    }
    FnBuilder& label(const std::string& name) {
        f_.labels[name] = f_.body.size();
        return *this;
    }
    FnBuilder& ins(Instruction i) {
        f_.body.push_back(std::move(i));
        return *this;
    }
    uint32_t local_index(const std::string& n) const {
        for (uint32_t i = 0; i < f_.locals.size(); ++i)
            if (f_.locals[i].first == n) return i;
        return ~0u;
    }
    FunctionDef build() { return f_; }

private:
    FunctionDef f_;
};

// Random function with 1..max_blocks blocks and 1..max_locals u64 locals.
// Every block is reachable through the fall-through chain; optional back
// edges make it cyclic. Bodies are stack-balanced within each block.
inline FunctionDef random_function(std::mt19937& rng, int max_blocks = 6,
                                   int max_locals = 4,
                                   bool allow_cycles = false) {
    auto rnd = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    int blocks = rnd(1, max_blocks);
    int locals = rnd(1, max_locals);
    int params = rnd(0, locals);

    FunctionDef f;
    f.name = "gen";
    for (int i = 0; i < locals; ++i) {
        std::string n = "l" + std::to_string(i);
        f.locals.emplace_back(n, TypeTag::u64());
        if (i < params) f.params.emplace_back(n, TypeTag::u64());
    }

    std::vector<char> targeted(blocks + 1, 0);
    auto lbl = [](int b) { return "B" + std::to_string(b); };

    for (int b = 0; b < blocks; ++b) {
        f.labels[lbl(b)] = f.body.size();
        int stmts = rnd(0, 3);
        for (int s = 0; s < stmts; ++s) {
            uint32_t x = static_cast<uint32_t>(rnd(0, locals - 1));
            uint32_t y = static_cast<uint32_t>(rnd(0, locals - 1));
            switch (rnd(0, 2)) {
                case 0:
                    f.body.push_back(make_imm(Opcode::LdU64, rnd(0, 99)));
                    f.body.push_back(make_loc(Opcode::StLoc, x));
                    break;
                case 1:
                    f.body.push_back(make_loc(Opcode::CopyLoc, x));
                    f.body.push_back(make_instr(Opcode::Pop));
                    break;
                default:
                    f.body.push_back(make_loc(Opcode::CopyLoc, x));
                    f.body.push_back(make_loc(Opcode::StLoc, y));
                    break;
            }
        }
        bool last = b == blocks - 1;
        if (last) {
            if (rnd(0, 4) == 0) {
                f.body.push_back(make_imm(Opcode::LdU64, 1));
                f.body.push_back(make_instr(Opcode::Abort));
            } else {
                f.body.push_back(make_instr(Opcode::Ret));
            }
            break;
        }
        int choice = rnd(0, 9);
        if (choice < 5) {
            // Conditional: labeled target plus fall-through.
            int j;
            if (allow_cycles && rnd(0, 3) == 0)
                j = rnd(0, b);  // back edge
            else
                j = rnd(b + 1, blocks - 1);
            targeted[j] = 1;
            f.body.push_back(make_instr(Opcode::LdTrue));
            f.body.push_back(make_branch(Opcode::BrTrue, lbl(j)));
        } else if (choice < 8 || !targeted[b + 1]) {
            f.body.push_back(make_branch(Opcode::Br, lbl(b + 1)));
            targeted[b + 1] = 1;
        } else if (choice == 8) {
            // Skip ahead; b+1 stays reachable through an earlier edge.
            int j = rnd(b + 1, blocks - 1);
            targeted[j] = 1;
            f.body.push_back(make_branch(Opcode::Br, lbl(j)));
        } else {
            f.body.push_back(make_instr(Opcode::Ret));
        }
    }
    // Unused labels are harmless; drop the ones past the terminator.
    for (auto it = f.labels.begin(); it != f.labels.end();)
        it = it->second >= f.body.size() ? f.labels.erase(it) : std::next(it);
    return f;
}

// All simple entry->target paths; dominators of `target` are the
// intersection of their vertex sets. A path avoiding a block can always be
// reduced to a simple path avoiding it, so simple paths decide dominance on
// cyclic graphs too.
inline std::set<int> dominator_set_oracle(const ControlFlowGraph& g,
                                          int target) {
    std::set<int> doms;
    bool first = true;
    std::vector<int> path;
    std::vector<char> on_path(g.blocks.size(), 0);
    std::function<void(int)> dfs = [&](int b) {
        path.push_back(b);
        on_path[b] = 1;
        if (b == target) {
            std::set<int> verts(path.begin(), path.end());
            if (first) {
                doms = verts;
                first = false;
            } else {
                std::set<int> inter;
                std::set_intersection(doms.begin(), doms.end(), verts.begin(),
                                      verts.end(),
                                      std::inserter(inter, inter.begin()));
                doms = std::move(inter);
            }
        } else {
            for (int s : g.blocks[b].successors)
                if (!on_path[s]) dfs(s);
        }
        on_path[b] = 0;
        path.pop_back();
    };
    dfs(0);
    return doms;  // empty when target is unreachable
}

inline std::set<int> dom_set_from_idom(const DomTree& dt, int b) {
    std::set<int> out{b};
    int cur = b;
    while (dt.idom[cur] != cur) {
        cur = dt.idom[cur];
        out.insert(cur);
    }
    return out;
}

// Exact number of entry->exit paths in an acyclic CFG, by dynamic
// programming over a topological order.
inline size_t dag_path_count(const ControlFlowGraph& g) {
    std::vector<int> topo = reverse_post_order(g);
    std::vector<size_t> ways(g.blocks.size(), 0);
    ways[0] = 1;
    size_t total = 0;
    for (int b : topo) {
        if (g.blocks[b].successors.empty()) {
            total += ways[b];
            continue;
        }
        for (int s : g.blocks[b].successors) ways[s] += ways[b];
    }
    return total;
}

struct PathOracle {
    std::vector<std::set<Definition>> def_in, def_out;
    std::vector<std::set<uint32_t>> live_in, live_out;
};

// Meet-over-paths facts for acyclic CFGs, from explicit enumeration of all
// full entry->terminator paths (budget 0 covers a DAG completely).
inline PathOracle meet_over_paths(const FunctionDef& f,
                                  const ControlFlowGraph& g) {
    PathOracle o;
    o.def_in.resize(g.blocks.size());
    o.def_out.resize(g.blocks.size());
    o.live_in.resize(g.blocks.size());
    o.live_out.resize(g.blocks.size());

    PathSet ps = enumerate_paths(g, 0, 1u << 20);
    for (const auto& path : ps.paths) {
        // Forward: last definition per local along the path prefix.
        std::map<uint32_t, Definition> last;
        for (uint32_t p = 0; p < f.params.size(); ++p)
            last[p] = {p, param_pseudo_site(p)};
        for (int bid : path) {
            const BasicBlock& b = g.blocks[bid];
            for (const auto& [l, d] : last) o.def_in[bid].insert(d);
            for (size_t i = b.begin; i < b.end; ++i)
                if (f.body[i].op == Opcode::StLoc)
                    last[f.body[i].local] = {f.body[i].local,
                                             static_cast<int>(i)};
            for (const auto& [l, d] : last) o.def_out[bid].insert(d);
        }
        // Backward: locals read before being overwritten in the suffix.
        std::set<uint32_t> live;
        for (size_t k = path.size(); k-- > 0;) {
            int bid = path[k];
            const BasicBlock& b = g.blocks[bid];
            o.live_out[bid].insert(live.begin(), live.end());
            for (size_t i = b.end; i-- > b.begin;) {
                const Instruction& ins = f.body[i];
                if (ins.op == Opcode::StLoc) live.erase(ins.local);
                if (ins.op == Opcode::CopyLoc || ins.op == Opcode::MoveLoc ||
                    ins.op == Opcode::BorrowLoc)
                    live.insert(ins.local);
            }
            o.live_in[bid].insert(live.begin(), live.end());
        }
    }
    return o;
}

inline ModuleId mid(const std::string& addr, const std::string& name) {
    return ModuleId{addr, name};
}

}  // namespace mvsc::testsupport
