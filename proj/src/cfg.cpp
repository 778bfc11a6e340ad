#include "movescanner/cfg.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace mvsc {

int ControlFlowGraph::block_of(size_t instr_index) const {
    for (const auto& b : blocks)
        if (instr_index >= b.begin && instr_index < b.end) return b.id;
    return -1;
}

bool DomTree::dominates(int a, int b, const ControlFlowGraph& g) const {
    if (!g.blocks[b].reachable) return a == b;
    int cur = b;
    while (true) {
        if (cur == a) return true;
        int up = idom[cur];
        if (up == cur) return false;  // reached the entry (or an orphan root)
        cur = up;
    }
}

std::vector<int> reverse_post_order(const ControlFlowGraph& g) {
    std::vector<int> order;
    std::vector<char> seen(g.blocks.size(), 0);
    std::vector<std::pair<int, size_t>> stack{{0, 0}};
    seen[0] = 1;
    while (!stack.empty()) {
        auto& [b, i] = stack.back();
        if (i < g.blocks[b].successors.size()) {
            int s = g.blocks[b].successors[i++];
            if (!seen[s]) {
                seen[s] = 1;
                stack.emplace_back(s, 0);
            }
        } else {
            order.push_back(b);
            stack.pop_back();
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

namespace {

DomTree compute_idoms(const ControlFlowGraph& g, std::vector<int>& rpo_pos) {
    const size_t n = g.blocks.size();
    std::vector<int> rpo = reverse_post_order(g);
    rpo_pos.assign(n, -1);
    for (size_t i = 0; i < rpo.size(); ++i) rpo_pos[rpo[i]] = static_cast<int>(i);

    DomTree dt;
    dt.idom.assign(n, -1);
    dt.idom[0] = 0;

    auto intersect = [&](int a, int b) {
        while (a != b) {
            while (rpo_pos[a] > rpo_pos[b]) a = dt.idom[a];
            while (rpo_pos[b] > rpo_pos[a]) b = dt.idom[b];
        }
        return a;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int b : rpo) {
            if (b == 0) continue;
            int new_idom = -1;
            for (int p : g.blocks[b].predecessors) {
                if (rpo_pos[p] < 0 || dt.idom[p] < 0) continue;
                new_idom = new_idom < 0 ? p : intersect(p, new_idom);
            }
            if (new_idom >= 0 && dt.idom[b] != new_idom) {
                dt.idom[b] = new_idom;
                changed = true;
            }
        }
    }
    for (size_t b = 0; b < n; ++b)
        if (dt.idom[b] < 0) dt.idom[b] = static_cast<int>(b);  // unreachable
    return dt;
}

}  // namespace

ControlFlowGraph build_cfg(const FunctionDef& f) {
    ControlFlowGraph g;
    const auto& body = f.body;
    const size_t n = body.size();

    std::vector<char> leader(n, 0);
    if (n > 0) leader[0] = 1;
    for (size_t i = 0; i < n; ++i) {
        const Instruction& ins = body[i];
        if (is_branch(ins.op)) leader[f.labels.at(ins.label)] = 1;
        if (ends_block(ins.op) && i + 1 < n) leader[i + 1] = 1;
    }

    std::map<size_t, int> block_at;  // leader index -> block id
    for (size_t i = 0; i < n; ++i) {
        if (!leader[i]) continue;
        BasicBlock b;
        b.id = static_cast<int>(g.blocks.size());
        b.begin = i;
        size_t j = i + 1;
        while (j < n && !leader[j]) ++j;
        b.end = j;
        block_at[i] = b.id;
        g.blocks.push_back(b);
    }

    for (auto& b : g.blocks) {
        const Instruction& last = body[b.end - 1];
        switch (last.op) {
            case Opcode::Br:
                b.successors.push_back(block_at.at(f.labels.at(last.label)));
                break;
            case Opcode::BrTrue:
            case Opcode::BrFalse: {
                b.successors.push_back(block_at.at(f.labels.at(last.label)));
                if (b.end < n) {
                    int ft = block_at.at(b.end);
                    if (ft != b.successors[0]) b.successors.push_back(ft);
                }
                break;
            }
            case Opcode::Ret:
            case Opcode::Abort:
                break;
            default:
                if (b.end < n) b.successors.push_back(block_at.at(b.end));
                break;
        }
    }
    for (const auto& b : g.blocks)
        for (int s : b.successors) g.blocks[s].predecessors.push_back(b.id);

    std::vector<int> rpo_pos;
    DomTree dt = compute_idoms(g, rpo_pos);
    for (auto& b : g.blocks) b.reachable = rpo_pos[b.id] >= 0;
    for (const auto& b : g.blocks)
        for (int s : b.successors)
            if (dt.dominates(s, b.id, g)) g.back_edges.insert({b.id, s});
    return g;
}

DomTree dominators(const ControlFlowGraph& g) {
    std::vector<int> rpo_pos;
    return compute_idoms(g, rpo_pos);
}

PathSet enumerate_paths(const ControlFlowGraph& g, size_t back_edge_budget,
                        size_t max_paths) {
    PathSet ps;
    if (g.blocks.empty()) return ps;
    // Guard for irreducible cycles, which never register as back edges.
    const size_t step_cap = g.blocks.size() * (back_edge_budget + 2) + 8;

    std::vector<int> path;
    std::map<std::pair<int, int>, size_t> edge_uses;

    std::function<bool(int)> walk = [&](int b) -> bool {
        ++ps.budget_used;
        path.push_back(b);
        if (path.size() > step_cap) {
            ps.truncated = true;
            path.pop_back();
            return true;
        }
        if (g.blocks[b].successors.empty()) {  // ret or abort block
            ps.paths.push_back(path);
            path.pop_back();
            if (ps.paths.size() >= max_paths) {
                ps.truncated = true;
                return false;
            }
            return true;
        }
        for (int s : g.blocks[b].successors) {
            std::pair<int, int> e{b, s};
            bool back = g.back_edges.count(e) > 0;
            if (back && edge_uses[e] >= back_edge_budget) continue;
            if (back) ++edge_uses[e];
            bool keep = walk(s);
            if (back) --edge_uses[e];
            if (!keep) {
                path.pop_back();
                return false;
            }
        }
        path.pop_back();
        return true;
    };
    walk(0);
    return ps;
}

}  // namespace mvsc
