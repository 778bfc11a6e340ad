// Per-function control flow: basic blocks, dominators, bounded path
// enumeration.
#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "movescanner/module.hpp"

namespace mvsc {

struct BasicBlock {
    int id = 0;
    size_t begin = 0;  // half-open instruction range [begin, end)
    size_t end = 0;
    std::vector<int> successors;
    std::vector<int> predecessors;
    bool reachable = true;

    size_t size() const { return end - begin; }
};

struct ControlFlowGraph {
    std::vector<BasicBlock> blocks;  // blocks[0] is the entry
    std::set<std::pair<int, int>> back_edges;

    const BasicBlock& entry() const { return blocks.front(); }
    int block_of(size_t instr_index) const;
};

// Immediate dominators; entry maps to itself. Unreachable blocks map to
// themselves and are excluded from dominance queries.
struct DomTree {
    std::vector<int> idom;

    // Reflexive: dominates(b, b) is true for reachable b.
    bool dominates(int a, int b, const ControlFlowGraph& g) const;
    bool strictly_dominates(int a, int b, const ControlFlowGraph& g) const {
        return a != b && dominates(a, b, g);
    }
};

struct PathSet {
    std::vector<std::vector<int>> paths;  // entry -> ret/abort block sequences
    bool truncated = false;
    size_t budget_used = 0;  // block expansions spent during the walk
};

// Leaders: index 0, every branch target, every instruction after a
// branch/terminator. br_true/br_false successors list the labeled target
// first, fall-through last. Unreachable blocks are kept and flagged.
ControlFlowGraph build_cfg(const FunctionDef& f);

// Reverse post-order over reachable blocks, starting at the entry.
std::vector<int> reverse_post_order(const ControlFlowGraph& g);

// Iterative dominance fixpoint over reverse post-order.
DomTree dominators(const ControlFlowGraph& g);

// Depth-first enumeration in successor order of all entry-to-terminator
// paths. Each back edge is taken at most back_edge_budget times per path;
// collection stops (truncated) once max_paths paths are gathered. A per-path
// step cap guards against irreducible cycles, which have no dominance back
// edge.
PathSet enumerate_paths(const ControlFlowGraph& g, size_t back_edge_budget,
                        size_t max_paths);

}  // namespace mvsc
