#include "movescanner/validate.hpp"

#include <algorithm>
#include <set>

#include "movescanner/cfg.hpp"
#include "movescanner/dataflow.hpp"
#include "movescanner/errors.hpp"

namespace mvsc {

namespace {

[[noreturn]] void bad(const std::string& msg, int line = 0) {
    throw ParseError(ErrorKind::Validation, msg, line);
}

void check_module_id(const ModuleId& id, const std::string& what) {
    std::string canon;
    if (!canonicalize_address(id.address, canon) || canon != id.address)
        bad(what + ": invalid address '" + id.address + "'");
    if (!is_identifier(id.name))
        bad(what + ": invalid name '" + id.name + "'");
}

// allow_signer: bare signer is legal only as a parameter type.
void check_type(const TypeTag& t, const std::string& where, bool allow_signer) {
    switch (t.kind) {
        case TypeTag::Kind::Signer:
            if (!allow_signer)
                bad(where + ": signer is only legal as a parameter type or "
                            "behind a reference");
            break;
        case TypeTag::Kind::Reference:
            if (!t.inner) bad(where + ": reference without inner type");
            if (t.inner->is_reference())
                bad(where + ": references cannot nest");
            break;
        case TypeTag::Kind::Struct:
            check_module_id(t.module, where);
            if (!is_identifier(t.name))
                bad(where + ": invalid struct name '" + t.name + "'");
            break;
        default:
            break;
    }
}

void check_function(const ModuleDef& m, const FunctionDef& f) {
    const std::string fq = m.id.str() + "::" + f.name;
    if (!is_identifier(f.name)) bad("invalid function name '" + f.name + "'");
    if (f.locals.size() < f.params.size() ||
        !std::equal(f.params.begin(), f.params.end(), f.locals.begin()))
        bad(fq + ": parameters must occupy the leading local slots");
    std::set<std::string> names;
    for (const auto& [n, t] : f.locals) {
        if (!is_identifier(n)) bad(fq + ": invalid local name '" + n + "'");
        if (!names.insert(n).second) bad(fq + ": duplicate local '" + n + "'");
    }
    for (size_t i = 0; i < f.locals.size(); ++i)
        check_type(f.locals[i].second, fq, /*allow_signer=*/i < f.params.size());
    for (const auto& t : f.returns) check_type(t, fq + " return", false);

    if (f.body.empty()) bad(fq + ": empty body");
    Opcode last = f.body.back().op;
    if (last != Opcode::Ret && last != Opcode::Abort && last != Opcode::Br)
        bad(fq + ": body must end with ret, abort or br");

    for (const auto& [label, idx] : f.labels) {
        if (!is_identifier(label)) bad(fq + ": invalid label '" + label + "'");
        if (idx >= f.body.size())
            bad(fq + ": label '" + label + "' points past the end of the body");
    }

    for (size_t i = 0; i < f.body.size(); ++i) {
        const Instruction& ins = f.body[i];
        int line = ins.line;
        switch (operand_kind(ins.op)) {
            case OperandKind::ImmU8:
                if (ins.imm > 0xff) bad(fq + ": u8 immediate > 255", line);
                break;
            case OperandKind::ImmU64:
                if (ins.imm > 0xffffffffffffffffULL)
                    bad(fq + ": u64 immediate overflow", line);
                break;
            case OperandKind::Addr: {
                std::string canon;
                if (!canonicalize_address(ins.addr, canon) || canon != ins.addr)
                    bad(fq + ": invalid address operand '" + ins.addr + "'",
                        line);
                break;
            }
            case OperandKind::Local:
                if (ins.local >= f.locals.size())
                    bad(fq + ": local index " + std::to_string(ins.local) +
                            " out of range",
                        line);
                break;
            case OperandKind::Label:
                if (!f.labels.count(ins.label))
                    bad(fq + ": branch to missing label '" + ins.label + "'",
                        line);
                break;
            case OperandKind::CallTarget:
                check_module_id(ins.target_module, fq);
                if (!is_identifier(ins.target_name))
                    bad(fq + ": invalid call target '" + ins.target_name + "'",
                        line);
                // Calls within the module must resolve; other modules may be
                // absent from the package (flagged external downstream).
                if (ins.target_module == m.id &&
                    !m.find_function(ins.target_name))
                    bad(fq + ": unknown function '" + ins.target_name + "'",
                        line);
                break;
            case OperandKind::StructRef:
                check_module_id(ins.target_module, fq);
                if (!is_identifier(ins.target_name))
                    bad(fq + ": invalid struct operand '" + ins.target_name +
                            "'",
                        line);
                // Own-module struct operands must resolve here; cross-module
                // ones resolve (or get flagged) at package level.
                if (ins.target_module == m.id &&
                    !m.find_struct(ins.target_name))
                    bad(fq + ": unknown struct '" + ins.target_name + "'",
                        line);
                break;
            default:
                break;
        }
    }
}

}  // namespace

void validate_module(const ModuleDef& m) {
    check_module_id(m.id, "module id");
    for (const auto& fr : m.friends) check_module_id(fr, "friend");

    std::set<std::string> struct_names;
    for (const auto& s : m.structs) {
        if (!is_identifier(s.name)) bad("invalid struct name '" + s.name + "'");
        if (!struct_names.insert(s.name).second)
            bad("duplicate struct '" + s.name + "'");
        std::set<std::string> field_names;
        for (const auto& [n, t] : s.fields) {
            if (!is_identifier(n))
                bad("struct " + s.name + ": invalid field name '" + n + "'");
            if (!field_names.insert(n).second)
                bad("struct " + s.name + ": duplicate field '" + n + "'");
            check_type(t, "struct " + s.name + "." + n, false);
        }
    }

    std::set<std::string> fn_names;
    for (const auto& f : m.functions) {
        if (!fn_names.insert(f.name).second)
            bad("duplicate function '" + f.name + "'");
        check_function(m, f);
    }
}

namespace {

// Functions whose stack effects depend on other modules get checked at
// package link time instead.
bool needs_package_context(const ModuleDef& m, const FunctionDef& f) {
    for (const auto& ins : f.body) {
        if (ins.op == Opcode::Call && ins.target_module != m.id) return true;
        if ((ins.op == Opcode::Pack || ins.op == Opcode::Unpack) &&
            ins.target_module != m.id)
            return true;
    }
    return false;
}

}  // namespace

void validate_stack_discipline(const ModuleDef& m) {
    ResolveCtx ctx = ResolveCtx::for_module(m);
    for (const auto& f : m.functions) {
        if (needs_package_context(m, f)) continue;
        ControlFlowGraph g = build_cfg(f);
        DefUseMap du = link_stack_defs(f, g, ctx);
        if (!du.valid) {
            int line = du.violation_site >= 0 &&
                               du.violation_site < static_cast<int>(f.body.size())
                           ? f.body[du.violation_site].line
                           : 0;
            bad(m.id.str() + "::" + f.name + ": " + du.violation, line);
        }
    }
}

}  // namespace mvsc
