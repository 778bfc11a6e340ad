#include "movescanner/dataflow.hpp"

#include <algorithm>
#include <map>

namespace mvsc {

ResolveCtx ResolveCtx::for_module(const ModuleDef& m) {
    ResolveCtx ctx;
    ctx.signature = [&m](const ModuleId& mid, const std::string& fn) {
        CalleeSig sig;
        if (mid != m.id) return sig;
        const FunctionDef* f = m.find_function(fn);
        if (!f) return sig;
        sig.known = true;
        sig.param_count = f->params.size();
        sig.returns = f->returns;
        return sig;
    };
    ctx.struct_def = [&m](const ModuleId& mid,
                          const std::string& name) -> const StructDef* {
        return mid == m.id ? m.find_struct(name) : nullptr;
    };
    return ctx;
}

namespace {

struct Slot {
    int producer;
    int slot;
    TypeTag type;
};

}  // namespace

DefUseMap link_stack_defs(const FunctionDef& f, const ControlFlowGraph& g,
                          const ResolveCtx& ctx) {
    DefUseMap du;
    const size_t n = f.body.size();
    du.operand_producers.resize(n);
    du.popped_types.resize(n);
    du.push_types.resize(n);
    du.consumers.resize(n);

    auto fail = [&](size_t site, const std::string& why) {
        du.valid = false;
        du.violation = why;
        du.violation_site = static_cast<int>(site);
    };

    for (const auto& b : g.blocks) {
        std::vector<Slot> stack;
        for (size_t i = b.begin; i < b.end && du.valid; ++i) {
            const Instruction& ins = f.body[i];
            size_t pops = 0;
            std::vector<TypeTag> pushes;
            TypeTag local_ty;
            if (operand_kind(ins.op) == OperandKind::Local) {
                if (ins.local >= f.locals.size())
                    return fail(i, "local index out of range"), du;
                local_ty = f.locals[ins.local].second;
            }
            switch (ins.op) {
                case Opcode::LdU8: pushes = {TypeTag::u8()}; break;
                case Opcode::LdU64: pushes = {TypeTag::u64()}; break;
                case Opcode::LdU128: pushes = {TypeTag::u128()}; break;
                case Opcode::LdTrue:
                case Opcode::LdFalse: pushes = {TypeTag::boolean()}; break;
                case Opcode::LdAddr: pushes = {TypeTag::address()}; break;
                case Opcode::CopyLoc:
                case Opcode::MoveLoc: pushes = {local_ty}; break;
                case Opcode::BorrowLoc:
                    pushes = {TypeTag::reference(local_ty, true)};
                    break;
                case Opcode::StLoc: pops = 1; break;
                case Opcode::ReadRef: {
                    pops = 1;
                    if (stack.empty()) return fail(i, "stack underflow"), du;
                    const TypeTag& t = stack.back().type;
                    pushes = {t.is_reference() && t.inner ? *t.inner : t};
                    break;
                }
                case Opcode::WriteRef: pops = 2; break;
                case Opcode::Pop: pops = 1; break;
                case Opcode::Add:
                case Opcode::Sub:
                case Opcode::Mul:
                case Opcode::Div:
                case Opcode::Mod: {
                    pops = 2;
                    if (stack.size() < 2) return fail(i, "stack underflow"), du;
                    pushes = {stack[stack.size() - 2].type};
                    break;
                }
                case Opcode::Lt:
                case Opcode::Le:
                case Opcode::Gt:
                case Opcode::Ge:
                case Opcode::Eq:
                case Opcode::Neq:
                    pops = 2;
                    pushes = {TypeTag::boolean()};
                    break;
                case Opcode::Not:
                    pops = 1;
                    pushes = {TypeTag::boolean()};
                    break;
                case Opcode::And:
                case Opcode::Or:
                    pops = 2;
                    pushes = {TypeTag::boolean()};
                    break;
                case Opcode::Br: break;
                case Opcode::BrTrue:
                case Opcode::BrFalse: pops = 1; break;
                case Opcode::Ret: pops = f.returns.size(); break;
                case Opcode::Abort: pops = 1; break;
                case Opcode::Call: {
                    CalleeSig sig = ctx.signature(ins.target_module, ins.target_name);
                    if (sig.known) {
                        pops = sig.param_count;
                        pushes = sig.returns;
                    } else {
                        // Unknown callee: assume it consumes everything
                        // prepared on the stack and returns nothing.
                        pops = stack.size();
                    }
                    break;
                }
                case Opcode::Pack: {
                    const StructDef* s =
                        ctx.struct_def(ins.target_module, ins.target_name);
                    if (!s)
                        return fail(i, "pack of unresolved struct " +
                                           ins.target_module.str() +
                                           "::" + ins.target_name),
                               du;
                    pops = s->fields.size();
                    pushes = {TypeTag::struct_ref(ins.target_module,
                                                  ins.target_name)};
                    break;
                }
                case Opcode::Unpack: {
                    const StructDef* s =
                        ctx.struct_def(ins.target_module, ins.target_name);
                    if (!s)
                        return fail(i, "unpack of unresolved struct " +
                                           ins.target_module.str() +
                                           "::" + ins.target_name),
                               du;
                    pops = 1;
                    for (const auto& [fn, ft] : s->fields) pushes.push_back(ft);
                    break;
                }
                case Opcode::MoveTo: pops = 2; break;  // [address, value]
                case Opcode::MoveFrom:
                    pops = 1;
                    pushes = {TypeTag::struct_ref(ins.target_module,
                                                  ins.target_name)};
                    break;
                case Opcode::BorrowGlobal:
                case Opcode::BorrowGlobalMut:
                    pops = 1;
                    pushes = {TypeTag::reference(
                        TypeTag::struct_ref(ins.target_module, ins.target_name),
                        ins.op == Opcode::BorrowGlobalMut)};
                    break;
                case Opcode::Exists:
                    pops = 1;
                    pushes = {TypeTag::boolean()};
                    break;
                case Opcode::SignerAddr:
                    pops = 1;
                    pushes = {TypeTag::address()};
                    break;
            }
            if (!du.valid) break;
            if (stack.size() < pops) {
                fail(i, "stack underflow");
                break;
            }
            for (size_t k = stack.size() - pops; k < stack.size(); ++k) {
                const Slot& s = stack[k];
                du.operand_producers[i].push_back(s.producer);
                du.popped_types[i].push_back(s.type);
                du.consumers[s.producer][s.slot] = static_cast<int>(i);
            }
            stack.resize(stack.size() - pops);
            du.push_types[i] = pushes;
            du.consumers[i].assign(pushes.size(), -1);
            for (size_t k = 0; k < pushes.size(); ++k)
                stack.push_back({static_cast<int>(i), static_cast<int>(k),
                                 pushes[k]});
        }
        if (!du.valid) break;
        if (!stack.empty()) {
            fail(b.end - 1, "value left on stack at end of block " +
                                std::to_string(b.id));
            break;
        }
    }
    return du;
}

namespace {

bool is_local_read(Opcode op) {
    return op == Opcode::CopyLoc || op == Opcode::MoveLoc ||
           op == Opcode::BorrowLoc;
}

// Reverse post-order with unreachable blocks appended, so their facts are
// still computed.
std::vector<int> sweep_order(const ControlFlowGraph& g) {
    std::vector<int> order = reverse_post_order(g);
    std::vector<char> in_order(g.blocks.size(), 0);
    for (int b : order) in_order[b] = 1;
    for (const auto& b : g.blocks)
        if (!in_order[b.id]) order.push_back(b.id);
    return order;
}

}  // namespace

DataflowResult reaching_definitions(const FunctionDef& f,
                                    const ControlFlowGraph& g) {
    const size_t nb = g.blocks.size();
    DataflowResult r;
    r.direction = Direction::Forward;
    r.def_in.resize(nb);
    r.def_out.resize(nb);

    std::map<uint32_t, std::set<Definition>> all_defs;
    for (uint32_t p = 0; p < f.params.size(); ++p)
        all_defs[p].insert({p, param_pseudo_site(p)});
    for (size_t i = 0; i < f.body.size(); ++i)
        if (f.body[i].op == Opcode::StLoc)
            all_defs[f.body[i].local].insert(
                {f.body[i].local, static_cast<int>(i)});

    std::vector<std::set<Definition>> gen(nb), kill(nb);
    for (const auto& b : g.blocks) {
        std::map<uint32_t, Definition> last;
        for (size_t i = b.begin; i < b.end; ++i)
            if (f.body[i].op == Opcode::StLoc)
                last[f.body[i].local] = {f.body[i].local, static_cast<int>(i)};
        for (const auto& [loc, d] : last) {
            gen[b.id].insert(d);
            for (const auto& other : all_defs[loc])
                if (!(other == d)) kill[b.id].insert(other);
        }
    }

    std::set<Definition> entry_seed;
    for (uint32_t p = 0; p < f.params.size(); ++p)
        entry_seed.insert({p, param_pseudo_site(p)});

    std::vector<int> order = sweep_order(g);

    // Round-robin sweeps in reverse post-order until stable.
    bool changed = true;
    while (changed) {
        changed = false;
        ++r.iterations;
        for (int bid : order) {
            const auto& b = g.blocks[bid];
            std::set<Definition> in;
            if (bid == 0) in = entry_seed;
            for (int p : b.predecessors)
                in.insert(r.def_out[p].begin(), r.def_out[p].end());
            std::set<Definition> out = gen[bid];
            for (const auto& d : in)
                if (!kill[bid].count(d)) out.insert(d);
            if (in != r.def_in[bid] || out != r.def_out[bid]) {
                r.def_in[bid] = std::move(in);
                r.def_out[bid] = std::move(out);
                changed = true;
            }
        }
    }
    return r;
}

DataflowResult live_variables(const FunctionDef& f,
                              const ControlFlowGraph& g) {
    const size_t nb = g.blocks.size();
    DataflowResult r;
    r.direction = Direction::Backward;
    r.live_in.resize(nb);
    r.live_out.resize(nb);

    // Upward-exposed uses and definitions per block.
    std::vector<std::set<uint32_t>> use(nb), def(nb);
    for (const auto& b : g.blocks) {
        for (size_t i = b.begin; i < b.end; ++i) {
            const Instruction& ins = f.body[i];
            if (is_local_read(ins.op) && !def[b.id].count(ins.local))
                use[b.id].insert(ins.local);
            if (ins.op == Opcode::StLoc) def[b.id].insert(ins.local);
        }
    }

    // Post-order sweeps for the backward direction.
    std::vector<int> order = sweep_order(g);
    std::reverse(order.begin(), order.end());

    bool changed = true;
    while (changed) {
        changed = false;
        ++r.iterations;
        for (int bid : order) {
            const auto& b = g.blocks[bid];
            std::set<uint32_t> out;
            for (int s : b.successors)
                out.insert(r.live_in[s].begin(), r.live_in[s].end());
            std::set<uint32_t> in = use[bid];
            for (uint32_t l : out)
                if (!def[bid].count(l)) in.insert(l);
            if (in != r.live_in[bid] || out != r.live_out[bid]) {
                r.live_in[bid] = std::move(in);
                r.live_out[bid] = std::move(out);
                changed = true;
            }
        }
    }
    return r;
}

std::set<Definition> reaching_at(const FunctionDef& f,
                                 const ControlFlowGraph& g,
                                 const DataflowResult& rd, size_t index,
                                 uint32_t local) {
    int bid = g.block_of(index);
    std::set<Definition> facts = rd.def_in[bid];
    for (size_t i = g.blocks[bid].begin; i < index; ++i) {
        if (f.body[i].op != Opcode::StLoc) continue;
        uint32_t l = f.body[i].local;
        for (auto it = facts.begin(); it != facts.end();)
            it = it->local == l ? facts.erase(it) : std::next(it);
        facts.insert({l, static_cast<int>(i)});
    }
    std::set<Definition> out;
    for (const auto& d : facts)
        if (d.local == local) out.insert(d);
    return out;
}

bool live_after(const FunctionDef& f, const ControlFlowGraph& g,
                const DataflowResult& lv, size_t index, uint32_t local) {
    int bid = g.block_of(index);
    const BasicBlock& b = g.blocks[bid];
    std::set<uint32_t> live = lv.live_out[bid];
    for (size_t k = b.end; k-- > index + 1;) {
        const Instruction& ins = f.body[k];
        if (ins.op == Opcode::StLoc) live.erase(ins.local);
        if (is_local_read(ins.op)) live.insert(ins.local);
    }
    return live.count(local) > 0;
}

}  // namespace mvsc
