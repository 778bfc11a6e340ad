#include "movescanner/module.hpp"

#include <algorithm>
#include <array>

#include "movescanner/errors.hpp"

namespace mvsc {

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

bool parse_u128(const std::string& text, u128& out) {
    if (text.empty()) return false;
    constexpr u128 kMax = ~static_cast<u128>(0);
    u128 v = 0;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
        unsigned d = static_cast<unsigned>(c - '0');
        if (v > (kMax - d) / 10) return false;
        v = v * 10 + d;
    }
    out = v;
    return true;
}

TypeTag TypeTag::reference(TypeTag inner, bool mut) {
    TypeTag t;
    t.kind = Kind::Reference;
    t.mut = mut;
    t.inner = std::make_shared<const TypeTag>(std::move(inner));
    return t;
}

TypeTag TypeTag::struct_ref(ModuleId m, std::string n) {
    TypeTag t;
    t.kind = Kind::Struct;
    t.module = std::move(m);
    t.name = std::move(n);
    return t;
}

bool TypeTag::operator==(const TypeTag& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Reference:
            return mut == o.mut && inner && o.inner && *inner == *o.inner;
        case Kind::Struct:
            return module == o.module && name == o.name;
        default:
            return true;
    }
}

std::string TypeTag::str() const {
    switch (kind) {
        case Kind::U8: return "u8";
        case Kind::U64: return "u64";
        case Kind::U128: return "u128";
        case Kind::Bool: return "bool";
        case Kind::Address: return "address";
        case Kind::Signer: return "signer";
        case Kind::Reference:
            return std::string(mut ? "&mut " : "&") + (inner ? inner->str() : "?");
        case Kind::Struct: return module.str() + "::" + name;
    }
    return "?";
}

namespace {

struct OpEntry {
    Opcode op;
    const char* mnemonic;
    OperandKind operand;
};

constexpr std::array<OpEntry, 41> kOps{{
    {Opcode::LdU8, "ld_u8", OperandKind::ImmU8},
    {Opcode::LdU64, "ld_u64", OperandKind::ImmU64},
    {Opcode::LdU128, "ld_u128", OperandKind::ImmU128},
    {Opcode::LdTrue, "ld_true", OperandKind::None},
    {Opcode::LdFalse, "ld_false", OperandKind::None},
    {Opcode::LdAddr, "ld_addr", OperandKind::Addr},
    {Opcode::CopyLoc, "copy_loc", OperandKind::Local},
    {Opcode::MoveLoc, "move_loc", OperandKind::Local},
    {Opcode::StLoc, "st_loc", OperandKind::Local},
    {Opcode::BorrowLoc, "borrow_loc", OperandKind::Local},
    {Opcode::ReadRef, "read_ref", OperandKind::None},
    {Opcode::WriteRef, "write_ref", OperandKind::None},
    {Opcode::Pop, "pop", OperandKind::None},
    {Opcode::Add, "add", OperandKind::None},
    {Opcode::Sub, "sub", OperandKind::None},
    {Opcode::Mul, "mul", OperandKind::None},
    {Opcode::Div, "div", OperandKind::None},
    {Opcode::Mod, "mod", OperandKind::None},
    {Opcode::Lt, "lt", OperandKind::None},
    {Opcode::Le, "le", OperandKind::None},
    {Opcode::Gt, "gt", OperandKind::None},
    {Opcode::Ge, "ge", OperandKind::None},
    {Opcode::Eq, "eq", OperandKind::None},
    {Opcode::Neq, "neq", OperandKind::None},
    {Opcode::Not, "not", OperandKind::None},
    {Opcode::And, "and", OperandKind::None},
    {Opcode::Or, "or", OperandKind::None},
    {Opcode::Br, "br", OperandKind::Label},
    {Opcode::BrTrue, "br_true", OperandKind::Label},
    {Opcode::BrFalse, "br_false", OperandKind::Label},
    {Opcode::Ret, "ret", OperandKind::None},
    {Opcode::Abort, "abort", OperandKind::None},
    {Opcode::Call, "call", OperandKind::CallTarget},
    {Opcode::Pack, "pack", OperandKind::StructRef},
    {Opcode::Unpack, "unpack", OperandKind::StructRef},
    {Opcode::MoveTo, "move_to", OperandKind::StructRef},
    {Opcode::MoveFrom, "move_from", OperandKind::StructRef},
    {Opcode::BorrowGlobal, "borrow_global", OperandKind::StructRef},
    {Opcode::BorrowGlobalMut, "borrow_global_mut", OperandKind::StructRef},
    {Opcode::Exists, "exists", OperandKind::StructRef},
    {Opcode::SignerAddr, "signer_addr", OperandKind::None},
}};

const OpEntry& entry(Opcode op) {
    return kOps[static_cast<size_t>(op) - 1];
}

}  // namespace

const char* mnemonic(Opcode op) { return entry(op).mnemonic; }
OperandKind operand_kind(Opcode op) { return entry(op).operand; }

std::optional<Opcode> opcode_from_mnemonic(const std::string& m) {
    for (const auto& e : kOps)
        if (m == e.mnemonic) return e.op;
    return std::nullopt;
}

bool Instruction::operator==(const Instruction& o) const {
    if (op != o.op) return false;
    switch (operand_kind(op)) {
        case OperandKind::None: return true;
        case OperandKind::ImmU8:
        case OperandKind::ImmU64:
        case OperandKind::ImmU128: return imm == o.imm;
        case OperandKind::Addr: return addr == o.addr;
        case OperandKind::Local: return local == o.local;
        case OperandKind::Label: return label == o.label;
        case OperandKind::CallTarget:
        case OperandKind::StructRef:
            return target_module == o.target_module && target_name == o.target_name;
    }
    return true;
}

std::string Instruction::str() const {
    std::string s = mnemonic(op);
    switch (operand_kind(op)) {
        case OperandKind::None: break;
        case OperandKind::ImmU8:
        case OperandKind::ImmU64:
        case OperandKind::ImmU128: s += " " + u128_to_string(imm); break;
        case OperandKind::Addr: s += " " + addr; break;
        case OperandKind::Local: s += " $" + std::to_string(local); break;
        case OperandKind::Label: s += " " + label; break;
        case OperandKind::CallTarget:
        case OperandKind::StructRef:
            s += " " + target_module.str() + "::" + target_name;
            break;
    }
    return s;
}

Instruction make_instr(Opcode op) {
    Instruction i;
    i.op = op;
    return i;
}

Instruction make_imm(Opcode op, u128 v) {
    Instruction i = make_instr(op);
    i.imm = v;
    return i;
}

Instruction make_loc(Opcode op, uint32_t local) {
    Instruction i = make_instr(op);
    i.local = local;
    return i;
}

Instruction make_branch(Opcode op, std::string label) {
    Instruction i = make_instr(op);
    i.label = std::move(label);
    return i;
}

Instruction make_target(Opcode op, ModuleId m, std::string name) {
    Instruction i = make_instr(op);
    i.target_module = std::move(m);
    i.target_name = std::move(name);
    return i;
}

Instruction make_addr(std::string addr) {
    Instruction i = make_instr(Opcode::LdAddr);
    i.addr = std::move(addr);
    return i;
}

const char* visibility_name(Visibility v) {
    switch (v) {
        case Visibility::Public: return "public";
        case Visibility::Friend: return "friend";
        case Visibility::Private: return "private";
    }
    return "?";
}

bool FunctionDef::operator==(const FunctionDef& o) const {
    return name == o.name && visibility == o.visibility && params == o.params &&
           returns == o.returns && locals == o.locals && body == o.body &&
           labels == o.labels;
}

const StructDef* ModuleDef::find_struct(const std::string& n) const {
    for (const auto& s : structs)
        if (s.name == n) return &s;
    return nullptr;
}

const FunctionDef* ModuleDef::find_function(const std::string& n) const {
    for (const auto& f : functions)
        if (f.name == n) return &f;
    return nullptr;
}

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    auto head = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s[0])) return false;
    for (size_t i = 1; i < s.size(); ++i)
        if (!tail(s[i])) return false;
    return true;
}

bool canonicalize_address(const std::string& in, std::string& out) {
    if (in.size() < 3 || in[0] != '0' || in[1] != 'x') return false;
    std::string digits = in.substr(2);
    if (digits.size() > 64) return false;  // 32 bytes max
    for (char c : digits)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    size_t nz = digits.find_first_not_of('0');
    if (nz == std::string::npos)
        digits = "0";
    else
        digits = digits.substr(nz);
    out = "0x" + digits;
    return true;
}

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Syntax: return "syntax error";
        case ErrorKind::Validation: return "validation error";
        case ErrorKind::BinaryFormat: return "binary format error";
        case ErrorKind::UnsupportedChain: return "unsupported chain bytecode";
        case ErrorKind::Io: return "io error";
    }
    return "error";
}

std::string ParseError::format(ErrorKind kind, const std::string& msg,
                               int line, int col) {
    std::string s = error_kind_name(kind);
    if (line > 0) {
        s += " at line " + std::to_string(line);
        if (col > 0) s += ":" + std::to_string(col);
    }
    s += ": " + msg;
    return s;
}

}  // namespace mvsc
