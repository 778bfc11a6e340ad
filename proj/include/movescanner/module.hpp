// Core data model for the analyzable module format: identities, abilities,
// types, instructions, struct and function definitions.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mvsc {

using u128 = unsigned __int128;

std::string u128_to_string(u128 v);
// Returns false on overflow or non-digit input.
bool parse_u128(const std::string& text, u128& out);

// Module identity: canonical lowercase hex address (leading zeros stripped)
// plus an identifier name. Ordering is numeric on the address.
struct ModuleId {
    std::string address;  // "0x1", "0xcafe", ...
    std::string name;

    std::string str() const { return address + "::" + name; }
    bool operator==(const ModuleId& o) const = default;
    bool operator<(const ModuleId& o) const {
        if (address.size() != o.address.size())
            return address.size() < o.address.size();
        if (address != o.address) return address < o.address;
        return name < o.name;
    }
};

enum class Ability : uint8_t { Copy = 1, Drop = 2, Store = 4, Key = 8 };

struct AbilitySet {
    uint8_t bits = 0;

    bool has(Ability a) const { return bits & static_cast<uint8_t>(a); }
    void add(Ability a) { bits |= static_cast<uint8_t>(a); }
    bool operator==(const AbilitySet&) const = default;
};

struct TypeTag;
using TypeTagPtr = std::shared_ptr<const TypeTag>;

struct TypeTag {
    enum class Kind : uint8_t {
        U8 = 1, U64, U128, Bool, Address, Signer, Reference, Struct,
    };

    Kind kind = Kind::U64;
    bool mut = false;       // Reference only
    TypeTagPtr inner;       // Reference only
    ModuleId module;        // Struct only
    std::string name;       // Struct only

    bool is_integer() const {
        return kind == Kind::U8 || kind == Kind::U64 || kind == Kind::U128;
    }
    bool is_struct() const { return kind == Kind::Struct; }
    bool is_reference() const { return kind == Kind::Reference; }
    bool is_signer_like() const {
        if (kind == Kind::Signer) return true;
        return kind == Kind::Reference && inner && inner->kind == Kind::Signer;
    }

    static TypeTag prim(Kind k) {
        TypeTag t;
        t.kind = k;
        return t;
    }
    static TypeTag u8() { return prim(Kind::U8); }
    static TypeTag u64() { return prim(Kind::U64); }
    static TypeTag u128() { return prim(Kind::U128); }
    static TypeTag boolean() { return prim(Kind::Bool); }
    static TypeTag address() { return prim(Kind::Address); }
    static TypeTag signer() { return prim(Kind::Signer); }
    static TypeTag reference(TypeTag inner, bool mut);
    static TypeTag struct_ref(ModuleId m, std::string n);

    bool operator==(const TypeTag& o) const;
    std::string str() const;
};

struct StructDef {
    std::string name;
    AbilitySet abilities;
    std::vector<std::pair<std::string, TypeTag>> fields;

    // Linear discipline: no copy and no drop means every value must be
    // explicitly consumed. Storable linears serve as permission tokens.
    bool is_resource() const {
        return !abilities.has(Ability::Copy) && !abilities.has(Ability::Drop);
    }
    bool is_capability() const {
        return is_resource() && abilities.has(Ability::Store);
    }
    bool operator==(const StructDef&) const = default;
};

enum class Opcode : uint8_t {
    LdU8 = 0x01, LdU64, LdU128, LdTrue, LdFalse, LdAddr,
    CopyLoc, MoveLoc, StLoc, BorrowLoc,
    ReadRef, WriteRef, Pop,
    Add, Sub, Mul, Div, Mod,
    Lt, Le, Gt, Ge, Eq, Neq,
    Not, And, Or,
    Br, BrTrue, BrFalse, Ret, Abort,
    Call, Pack, Unpack,
    MoveTo, MoveFrom, BorrowGlobal, BorrowGlobalMut, Exists,
    SignerAddr,  // 0x29
};

constexpr uint8_t kOpcodeMax = 0x29;

enum class OperandKind : uint8_t {
    None, ImmU8, ImmU64, ImmU128, Addr, Local, Label, CallTarget, StructRef,
};

const char* mnemonic(Opcode op);
OperandKind operand_kind(Opcode op);
// Mnemonic lookup for the text parser; nullopt for unknown.
std::optional<Opcode> opcode_from_mnemonic(const std::string& m);

inline bool is_branch(Opcode op) {
    return op == Opcode::Br || op == Opcode::BrTrue || op == Opcode::BrFalse;
}
inline bool is_terminator(Opcode op) {
    return op == Opcode::Ret || op == Opcode::Abort;
}
// Ends a basic block.
inline bool ends_block(Opcode op) { return is_branch(op) || is_terminator(op); }

struct Instruction {
    Opcode op = Opcode::Ret;
    u128 imm = 0;               // ld_u8 / ld_u64 / ld_u128
    std::string addr;           // ld_addr
    uint32_t local = 0;         // *_loc
    std::string label;          // br / br_true / br_false
    ModuleId target_module;     // call and struct-operand opcodes
    std::string target_name;    // function or struct name
    int line = 0;               // source position, not part of equality

    bool operator==(const Instruction& o) const;
    std::string str() const;
};

Instruction make_instr(Opcode op);
Instruction make_imm(Opcode op, u128 v);
Instruction make_loc(Opcode op, uint32_t local);
Instruction make_branch(Opcode op, std::string label);
Instruction make_target(Opcode op, ModuleId m, std::string name);
Instruction make_addr(std::string addr);

enum class Visibility : uint8_t { Public = 0, Friend = 1, Private = 2 };

const char* visibility_name(Visibility v);

struct FunctionDef {
    std::string name;
    Visibility visibility = Visibility::Private;
    std::vector<std::pair<std::string, TypeTag>> params;
    std::vector<TypeTag> returns;
    // All locals; params occupy indices 0..params.size()-1.
    std::vector<std::pair<std::string, TypeTag>> locals;
    std::vector<Instruction> body;
    std::map<std::string, size_t> labels;  // label name -> instruction index

    size_t param_count() const { return params.size(); }
    bool is_param(uint32_t local) const { return local < params.size(); }

    bool operator==(const FunctionDef& o) const;
};

struct ModuleDef {
    ModuleId id;
    std::vector<ModuleId> friends;  // sorted, deduplicated
    std::vector<StructDef> structs;
    std::vector<FunctionDef> functions;

    const StructDef* find_struct(const std::string& n) const;
    const FunctionDef* find_function(const std::string& n) const;

    bool operator==(const ModuleDef& o) const = default;
};

// Identifier and address validation shared by both parsers.
bool is_identifier(const std::string& s);
// Accepts "0x" + lowercase hex, at most 64 digits; canonicalizes by
// stripping leading zeros ("0x0" stays "0x0").
bool canonicalize_address(const std::string& in, std::string& out);

}  // namespace mvsc
