// Worklist fixpoints (reaching definitions, live variables) and the abstract
// stack simulation that links every popped operand to the instruction that
// pushed it.
#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "movescanner/cfg.hpp"
#include "movescanner/module.hpp"

namespace mvsc {

// One definition of a local. Parameters get pseudo-sites -1-p so they are
// distinct from body indices.
struct Definition {
    uint32_t local = 0;
    int site = 0;

    bool operator==(const Definition&) const = default;
    bool operator<(const Definition& o) const {
        return local != o.local ? local < o.local : site < o.site;
    }
};

inline int param_pseudo_site(uint32_t param_index) {
    return -1 - static_cast<int>(param_index);
}

enum class Direction { Forward, Backward };

struct DataflowResult {
    Direction direction = Direction::Forward;
    // Reaching definitions use def_in/def_out, liveness uses live_in/live_out.
    std::vector<std::set<Definition>> def_in, def_out;
    std::vector<std::set<uint32_t>> live_in, live_out;
    size_t iterations = 0;  // round-robin sweeps, final quiescent one included
};

// Callee signature as needed by the stack simulation.
struct CalleeSig {
    bool known = false;
    size_t param_count = 0;
    std::vector<TypeTag> returns;
};

// Resolution hooks: a single module supplies itself; a package supplies every
// loaded module. Unknown lookups return known=false / nullptr.
struct ResolveCtx {
    std::function<CalleeSig(const ModuleId&, const std::string&)> signature;
    std::function<const StructDef*(const ModuleId&, const std::string&)> struct_def;

    static ResolveCtx for_module(const ModuleDef& m);
};

struct DefUseMap {
    // operand_producers[i] lists, for each value instruction i pops, the index
    // of the instruction that pushed it, in push order (last = top of stack).
    std::vector<std::vector<int>> operand_producers;
    std::vector<std::vector<TypeTag>> popped_types;
    std::vector<std::vector<TypeTag>> push_types;
    // consumers[i][slot]: instruction that pops the slot-th value pushed by i.
    std::vector<std::vector<int>> consumers;

    bool valid = true;  // stack discipline held and all effects were resolvable
    std::string violation;
    int violation_site = -1;
};

// Simulates the evaluation stack through each block (empty at every block
// boundary) and records producer/consumer links and value types. An external
// callee consumes the entire current stack and pushes nothing. On underflow,
// a non-empty stack at a block boundary, or pack/unpack of an unresolvable
// struct, the map comes back with valid=false and the reason filled in.
DefUseMap link_stack_defs(const FunctionDef& f, const ControlFlowGraph& g,
                          const ResolveCtx& ctx);

// IN[B] = union of OUT over predecessors; OUT[B] = gen(B) + (IN[B] - kill(B)).
// Parameter definitions reach the entry.
DataflowResult reaching_definitions(const FunctionDef& f,
                                    const ControlFlowGraph& g);

// OUT[B] = union of IN over successors; IN[B] = use(B) + (OUT[B] - def(B)).
// copy_loc/move_loc/borrow_loc read, st_loc writes.
DataflowResult live_variables(const FunctionDef& f, const ControlFlowGraph& g);

// Definitions of `local` reaching the program point just before body[index].
std::set<Definition> reaching_at(const FunctionDef& f,
                                 const ControlFlowGraph& g,
                                 const DataflowResult& rd, size_t index,
                                 uint32_t local);

// Is `local` live immediately after body[index]?
bool live_after(const FunctionDef& f, const ControlFlowGraph& g,
                const DataflowResult& lv, size_t index, uint32_t local);

}  // namespace mvsc
