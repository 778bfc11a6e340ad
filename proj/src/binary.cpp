#include "movescanner/binary.hpp"

#include <algorithm>

#include "movescanner/errors.hpp"
#include "movescanner/text_parser.hpp"
#include "movescanner/validate.hpp"

namespace mvsc {

namespace {

class Writer {
public:
    std::vector<uint8_t> out;

    void byte(uint8_t b) { out.push_back(b); }

    void uleb(u128 v) {
        do {
            uint8_t b = static_cast<uint8_t>(v & 0x7f);
            v >>= 7;
            if (v != 0) b |= 0x80;
            out.push_back(b);
        } while (v != 0);
    }

    void str(const std::string& s) {
        uleb(s.size());
        out.insert(out.end(), s.begin(), s.end());
    }

    void module_id(const ModuleId& id) {
        str(id.address);
        str(id.name);
    }

    void type(const TypeTag& t) {
        byte(static_cast<uint8_t>(t.kind));
        if (t.kind == TypeTag::Kind::Reference) {
            byte(t.mut ? 1 : 0);
            type(*t.inner);
        } else if (t.kind == TypeTag::Kind::Struct) {
            module_id(t.module);
            str(t.name);
        }
    }
};

class Reader {
public:
    Reader(const std::vector<uint8_t>& bytes, size_t pos)
        : bytes_(bytes), pos_(pos) {}

    size_t pos() const { return pos_; }
    size_t remaining() const { return bytes_.size() - pos_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ErrorKind::BinaryFormat,
                         msg + " (offset " + std::to_string(pos_) + ")");
    }

    uint8_t byte() {
        if (pos_ >= bytes_.size()) fail("unexpected end of input");
        return bytes_[pos_++];
    }

    u128 uleb(unsigned max_bits) {
        u128 v = 0;
        unsigned shift = 0;
        while (true) {
            uint8_t b = byte();
            if (shift >= max_bits || (shift + 7 > max_bits &&
                                      (b & 0x7f) >> (max_bits - shift) != 0))
                fail("ULEB128 value overflows " + std::to_string(max_bits) +
                     " bits");
            v |= static_cast<u128>(b & 0x7f) << shift;
            if (!(b & 0x80)) return v;
            shift += 7;
        }
    }

    uint64_t uleb64() { return static_cast<uint64_t>(uleb(64)); }

    // Element counts are sanity-checked against the remaining bytes so a
    // hostile count cannot trigger a huge allocation.
    size_t count() {
        uint64_t c = uleb64();
        if (c > remaining()) fail("count exceeds remaining input");
        return static_cast<size_t>(c);
    }

    std::string str() {
        uint64_t len = uleb64();
        if (len > remaining()) fail("string length exceeds remaining input");
        std::string s(bytes_.begin() + pos_, bytes_.begin() + pos_ + len);
        pos_ += len;
        return s;
    }

    std::string address() {
        std::string a = str();
        std::string canon;
        if (!canonicalize_address(a, canon) || canon != a)
            fail("invalid address '" + a + "'");
        return a;
    }

    std::string ident() {
        std::string s = str();
        if (!is_identifier(s)) fail("invalid identifier '" + s + "'");
        return s;
    }

    ModuleId module_id() {
        ModuleId id;
        id.address = address();
        id.name = ident();
        return id;
    }

    TypeTag type(bool inside_ref = false) {
        uint8_t tag = byte();
        switch (tag) {
            case 1: return TypeTag::u8();
            case 2: return TypeTag::u64();
            case 3: return TypeTag::u128();
            case 4: return TypeTag::boolean();
            case 5: return TypeTag::address();
            case 6: return TypeTag::signer();
            case 7: {
                if (inside_ref) fail("references cannot nest");
                bool mut = byte() != 0;
                return TypeTag::reference(type(true), mut);
            }
            case 8: {
                ModuleId m = module_id();
                return TypeTag::struct_ref(std::move(m), ident());
            }
            default:
                fail("unknown type tag " + std::to_string(tag));
        }
    }

private:
    const std::vector<uint8_t>& bytes_;
    size_t pos_;
};

void write_function(Writer& w, const FunctionDef& f) {
    w.str(f.name);
    w.byte(static_cast<uint8_t>(f.visibility));
    w.uleb(f.params.size());
    for (const auto& [n, t] : f.params) {
        w.str(n);
        w.type(t);
    }
    w.uleb(f.returns.size());
    for (const auto& t : f.returns) w.type(t);
    w.uleb(f.locals.size() - f.params.size());
    for (size_t i = f.params.size(); i < f.locals.size(); ++i) {
        w.str(f.locals[i].first);
        w.type(f.locals[i].second);
    }
    // Label table in name order; branch operands index into it.
    w.uleb(f.labels.size());
    std::vector<std::string> label_names;
    for (const auto& [name, idx] : f.labels) {
        w.str(name);
        w.uleb(idx);
        label_names.push_back(name);
    }
    w.uleb(f.body.size());
    for (const Instruction& ins : f.body) {
        w.byte(static_cast<uint8_t>(ins.op));
        switch (operand_kind(ins.op)) {
            case OperandKind::None:
                break;
            case OperandKind::ImmU8:
                w.byte(static_cast<uint8_t>(ins.imm));
                break;
            case OperandKind::ImmU64:
            case OperandKind::ImmU128:
                w.uleb(ins.imm);
                break;
            case OperandKind::Addr:
                w.str(ins.addr);
                break;
            case OperandKind::Local:
                w.uleb(ins.local);
                break;
            case OperandKind::Label: {
                size_t idx = std::lower_bound(label_names.begin(),
                                              label_names.end(), ins.label) -
                             label_names.begin();
                w.uleb(idx);
                break;
            }
            case OperandKind::CallTarget:
            case OperandKind::StructRef:
                w.module_id(ins.target_module);
                w.str(ins.target_name);
                break;
        }
    }
}

FunctionDef read_function(Reader& r) {
    FunctionDef f;
    f.name = r.ident();
    uint8_t vis = r.byte();
    if (vis > 2) r.fail("invalid visibility byte");
    f.visibility = static_cast<Visibility>(vis);
    size_t nparams = r.count();
    for (size_t i = 0; i < nparams; ++i) {
        std::string n = r.ident();
        f.params.emplace_back(std::move(n), r.type());
    }
    size_t nret = r.count();
    for (size_t i = 0; i < nret; ++i) f.returns.push_back(r.type());
    f.locals = f.params;
    size_t nlocals = r.count();
    for (size_t i = 0; i < nlocals; ++i) {
        std::string n = r.ident();
        f.locals.emplace_back(std::move(n), r.type());
    }
    size_t nlabels = r.count();
    std::vector<std::string> label_names;
    for (size_t i = 0; i < nlabels; ++i) {
        std::string name = r.ident();
        size_t idx = static_cast<size_t>(r.uleb64());
        if (f.labels.count(name)) r.fail("duplicate label '" + name + "'");
        f.labels[name] = idx;
        label_names.push_back(name);
    }
    std::sort(label_names.begin(), label_names.end());
    size_t nbody = r.count();
    for (size_t i = 0; i < nbody; ++i) {
        uint8_t opbyte = r.byte();
        if (opbyte == 0 || opbyte > kOpcodeMax)
            r.fail("unknown opcode " + std::to_string(opbyte));
        Instruction ins = make_instr(static_cast<Opcode>(opbyte));
        switch (operand_kind(ins.op)) {
            case OperandKind::None:
                break;
            case OperandKind::ImmU8:
                ins.imm = r.byte();
                break;
            case OperandKind::ImmU64:
                ins.imm = r.uleb(64);
                break;
            case OperandKind::ImmU128:
                ins.imm = r.uleb(128);
                break;
            case OperandKind::Addr:
                ins.addr = r.address();
                break;
            case OperandKind::Local:
                ins.local = static_cast<uint32_t>(r.uleb(32));
                break;
            case OperandKind::Label: {
                size_t idx = static_cast<size_t>(r.uleb64());
                if (idx >= label_names.size())
                    r.fail("branch label index out of range");
                ins.label = label_names[idx];
                break;
            }
            case OperandKind::CallTarget:
            case OperandKind::StructRef:
                ins.target_module = r.module_id();
                ins.target_name = r.ident();
                break;
        }
        f.body.push_back(std::move(ins));
    }
    return f;
}

ModuleDef read_module(Reader& r) {
    ModuleDef m;
    m.id = r.module_id();
    size_t nfriends = r.count();
    for (size_t i = 0; i < nfriends; ++i) m.friends.push_back(r.module_id());
    std::sort(m.friends.begin(), m.friends.end());
    m.friends.erase(std::unique(m.friends.begin(), m.friends.end()),
                    m.friends.end());
    size_t nstructs = r.count();
    for (size_t i = 0; i < nstructs; ++i) {
        StructDef s;
        s.name = r.ident();
        uint8_t ab = r.byte();
        if (ab > 0x0f) r.fail("invalid ability bitmask");
        s.abilities.bits = ab;
        size_t nfields = r.count();
        for (size_t j = 0; j < nfields; ++j) {
            std::string n = r.ident();
            s.fields.emplace_back(std::move(n), r.type());
        }
        m.structs.push_back(std::move(s));
    }
    size_t nfuns = r.count();
    for (size_t i = 0; i < nfuns; ++i) m.functions.push_back(read_function(r));
    return m;
}

bool is_valid_utf8(const std::vector<uint8_t>& b) {
    size_t i = 0;
    while (i < b.size()) {
        uint8_t c = b[i];
        size_t extra;
        uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            extra = 1;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            extra = 2;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= b.size()) return false;
        for (size_t k = 1; k <= extra; ++k) {
            if ((b[i + k] & 0xc0) != 0x80) return false;
            cp = (cp << 6) | (b[i + k] & 0x3f);
        }
        // Overlong encodings and surrogates are rejected.
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
            (extra == 3 && cp < 0x10000) || cp > 0x10ffff ||
            (cp >= 0xd800 && cp <= 0xdfff))
            return false;
        i += extra + 1;
    }
    return true;
}

}  // namespace

std::vector<uint8_t> serialize_binary(const ModuleDef& m) {
    Writer w;
    for (uint8_t b : kMagic) w.byte(b);
    w.byte(kVersion);
    w.module_id(m.id);
    w.uleb(m.friends.size());
    for (const auto& fr : m.friends) w.module_id(fr);
    w.uleb(m.structs.size());
    for (const auto& s : m.structs) {
        w.str(s.name);
        w.byte(s.abilities.bits);
        w.uleb(s.fields.size());
        for (const auto& [n, t] : s.fields) {
            w.str(n);
            w.type(t);
        }
    }
    w.uleb(m.functions.size());
    for (const auto& f : m.functions) write_function(w, f);
    return std::move(w.out);
}

LoadResult parse_binary(const std::vector<uint8_t>& bytes) {
    if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4,
                                        std::begin(kChainMagic))) {
        throw ParseError(ErrorKind::UnsupportedChain,
                         "on-chain Move bytecode (magic a11ceb0b) is detected "
                         "but not deserialized");
    }
    if (bytes.size() >= 5 &&
        std::equal(bytes.begin(), bytes.begin() + 4, std::begin(kMagic))) {
        uint8_t version = bytes[4];
        if (version == 0)
            throw ParseError(ErrorKind::BinaryFormat,
                             "unsupported container version 0");
        LoadResult res;
        Reader r(bytes, 5);
        res.module = read_module(r);
        if (version == kVersion) {
            if (r.remaining() > 0)
                r.fail("trailing bytes after module");
        } else if (r.remaining() > 0) {
            res.warnings.push_back(
                "container version " + std::to_string(version) +
                " is newer than " + std::to_string(kVersion) + "; skipped " +
                std::to_string(r.remaining()) + " trailing bytes");
        } else {
            res.warnings.push_back("container version " +
                                   std::to_string(version) +
                                   " is newer than " + std::to_string(kVersion) +
                                   "; parsed known fields only");
        }
        validate_module(res.module);
        validate_stack_discipline(res.module);
        return res;
    }
    if (is_valid_utf8(bytes)) {
        LoadResult res;
        res.module = parse_text(std::string(bytes.begin(), bytes.end()));
        return res;
    }
    throw ParseError(ErrorKind::BinaryFormat,
                     "unrecognized input: no MVSC magic, not chain bytecode, "
                     "not UTF-8 text");
}

}  // namespace mvsc
