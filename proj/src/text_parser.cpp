#include "movescanner/text_parser.hpp"

#include <map>
#include <set>
#include <vector>

#include "movescanner/errors.hpp"
#include "movescanner/validate.hpp"

namespace mvsc {

namespace {

struct Token {
    enum Kind { Ident, Address, Number, Punct, Newline, End };
    Kind kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        int line = 1, col = 1;
        size_t i = 0;
        auto push = [&](Token::Kind k, std::string t, int l, int c) {
            out.push_back({k, std::move(t), l, c});
        };
        while (i < src_.size()) {
            char c = src_[i];
            if (c == '\n') {
                if (out.empty() || out.back().kind != Token::Newline)
                    push(Token::Newline, "\n", line, col);
                ++line;
                col = 1;
                ++i;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                ++i;
                ++col;
                continue;
            }
            if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
                while (i < src_.size() && src_[i] != '\n') ++i;
                continue;
            }
            int tl = line, tc = col;
            if (c == ':' && i + 1 < src_.size() && src_[i + 1] == ':') {
                push(Token::Punct, "::", tl, tc);
                i += 2;
                col += 2;
                continue;
            }
            if (std::string(":,{}()&").find(c) != std::string::npos) {
                push(Token::Punct, std::string(1, c), tl, tc);
                ++i;
                ++col;
                continue;
            }
            if (c >= '0' && c <= '9') {
                std::string word;
                while (i < src_.size() && (isalnum_(src_[i]) || src_[i] == '_')) {
                    word.push_back(src_[i++]);
                    ++col;
                }
                push(word.size() > 1 && word[1] == 'x' ? Token::Address
                                                       : Token::Number,
                     word, tl, tc);
                continue;
            }
            if (isalpha_(c) || c == '_') {
                std::string word;
                while (i < src_.size() && (isalnum_(src_[i]) || src_[i] == '_')) {
                    word.push_back(src_[i++]);
                    ++col;
                }
                push(Token::Ident, word, tl, tc);
                continue;
            }
            throw ParseError(ErrorKind::Syntax,
                             std::string("unexpected character '") + c + "'",
                             tl, tc);
        }
        push(Token::End, "", line, col);
        return out;
    }

private:
    static bool isalpha_(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    static bool isalnum_(char c) {
        return isalpha_(c) || (c >= '0' && c <= '9');
    }

    const std::string& src_;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ModuleDef run() {
        skip_newlines();
        expect_keyword("module");
        mod_.id = parse_module_id();
        end_of_line();
        skip_newlines();
        while (peek().kind != Token::End) {
            const Token& t = peek();
            if (t.kind != Token::Ident)
                throw err("expected declaration, got '" + t.text + "'");
            if (t.text == "friend" && toks_[pos_ + 1].kind == Token::Address) {
                next();
                mod_.friends.push_back(parse_module_id());
                end_of_line();
            } else if (t.text == "struct") {
                parse_struct();
            } else if (t.text == "fun" || t.text == "public" ||
                       t.text == "private" || t.text == "friend") {
                parse_function();
            } else {
                throw err("expected declaration, got '" + t.text + "'");
            }
            skip_newlines();
        }
        finish();
        return std::move(mod_);
    }

private:
    const Token& peek(size_t ahead = 0) const {
        size_t p = pos_ + ahead;
        return p < toks_.size() ? toks_[p] : toks_.back();
    }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    ParseError err(const std::string& msg) const {
        return ParseError(ErrorKind::Syntax, msg, peek().line, peek().col);
    }

    void skip_newlines() {
        while (peek().kind == Token::Newline) next();
    }

    void end_of_line() {
        if (peek().kind == Token::End) return;
        if (peek().kind != Token::Newline)
            throw err("expected end of line, got '" + peek().text + "'");
        next();
    }

    void expect_keyword(const std::string& kw) {
        if (peek().kind != Token::Ident || peek().text != kw)
            throw err("expected '" + kw + "', got '" + peek().text + "'");
        next();
    }

    void expect_punct(const std::string& p) {
        if (peek().kind != Token::Punct || peek().text != p)
            throw err("expected '" + p + "', got '" + peek().text + "'");
        next();
    }

    bool at_punct(const std::string& p) const {
        return peek().kind == Token::Punct && peek().text == p;
    }

    std::string parse_ident() {
        if (peek().kind != Token::Ident)
            throw err("expected identifier, got '" + peek().text + "'");
        std::string s = next().text;
        if (!is_identifier(s)) throw err("invalid identifier '" + s + "'");
        return s;
    }

    std::string parse_address() {
        if (peek().kind != Token::Address)
            throw err("expected address, got '" + peek().text + "'");
        const Token& t = next();
        std::string canon;
        if (!canonicalize_address(t.text, canon))
            throw ParseError(ErrorKind::Syntax,
                             "invalid address '" + t.text +
                                 "' (lowercase hex, at most 32 bytes)",
                             t.line, t.col);
        return canon;
    }

    ModuleId parse_module_id() {
        ModuleId id;
        id.address = parse_address();
        expect_punct("::");
        id.name = parse_ident();
        return id;
    }

    TypeTag parse_type() {
        if (at_punct("&")) {
            next();
            bool mut = false;
            if (peek().kind == Token::Ident && peek().text == "mut") {
                next();
                mut = true;
            }
            TypeTag inner = parse_type();
            if (inner.is_reference()) throw err("references cannot nest");
            return TypeTag::reference(std::move(inner), mut);
        }
        if (peek().kind == Token::Address) {
            ModuleId m = parse_module_id();
            expect_punct("::");
            return TypeTag::struct_ref(std::move(m), parse_ident());
        }
        std::string n = parse_ident();
        if (n == "u8") return TypeTag::u8();
        if (n == "u64") return TypeTag::u64();
        if (n == "u128") return TypeTag::u128();
        if (n == "bool") return TypeTag::boolean();
        if (n == "address") return TypeTag::address();
        if (n == "signer") return TypeTag::signer();
        return TypeTag::struct_ref(mod_.id, n);
    }

    void parse_struct() {
        expect_keyword("struct");
        StructDef s;
        s.name = parse_ident();
        if (peek().kind == Token::Ident && peek().text == "has") {
            next();
            while (true) {
                const Token& t = peek();
                std::string a = parse_ident();
                Ability ab;
                if (a == "copy") ab = Ability::Copy;
                else if (a == "drop") ab = Ability::Drop;
                else if (a == "store") ab = Ability::Store;
                else if (a == "key") ab = Ability::Key;
                else
                    throw ParseError(ErrorKind::Syntax,
                                     "unknown ability '" + a + "'", t.line,
                                     t.col);
                if (s.abilities.has(ab))
                    throw ParseError(ErrorKind::Syntax,
                                     "duplicate ability '" + a + "'", t.line,
                                     t.col);
                s.abilities.add(ab);
                if (at_punct(",")) next();
                else break;
            }
        }
        expect_punct("{");
        skip_newlines();
        std::set<std::string> seen;
        while (!at_punct("}")) {
            std::string fname = parse_ident();
            if (!seen.insert(fname).second)
                throw err("duplicate field '" + fname + "' in struct " + s.name);
            expect_punct(":");
            s.fields.emplace_back(fname, parse_type());
            skip_newlines();
            if (at_punct(",")) {
                next();
                skip_newlines();
            }
        }
        expect_punct("}");
        if (mod_.find_struct(s.name))
            throw err("duplicate struct '" + s.name + "'");
        mod_.structs.push_back(std::move(s));
        end_of_line();
    }

    void parse_function() {
        FunctionDef f;
        if (peek().text == "public") {
            f.visibility = Visibility::Public;
            next();
        } else if (peek().text == "friend") {
            f.visibility = Visibility::Friend;
            next();
        } else if (peek().text == "private") {
            f.visibility = Visibility::Private;
            next();
        }
        expect_keyword("fun");
        f.name = parse_ident();
        expect_punct("(");
        std::map<std::string, uint32_t> local_index;
        while (!at_punct(")")) {
            std::string pname = parse_ident();
            if (local_index.count(pname))
                throw err("duplicate parameter '" + pname + "'");
            expect_punct(":");
            TypeTag t = parse_type();
            local_index[pname] = static_cast<uint32_t>(f.params.size());
            f.params.emplace_back(pname, std::move(t));
            if (at_punct(",")) next();
        }
        expect_punct(")");
        if (at_punct(":")) {
            next();
            f.returns.push_back(parse_type());
            while (at_punct(",")) {
                next();
                f.returns.push_back(parse_type());
            }
        }
        f.locals = f.params;
        expect_punct("{");
        end_of_line();
        parse_body(f, local_index);
        if (mod_.find_function(f.name))
            throw err("duplicate function '" + f.name + "'");
        mod_.functions.push_back(std::move(f));
        end_of_line();
    }

    void parse_body(FunctionDef& f, std::map<std::string, uint32_t>& local_index) {
        skip_newlines();
        while (!at_punct("}")) {
            const Token& t = peek();
            if (t.kind != Token::Ident)
                throw err("expected instruction, label or 'locals', got '" +
                          t.text + "'");
            if (t.text == "locals") {
                next();
                while (true) {
                    std::string lname = parse_ident();
                    if (local_index.count(lname))
                        throw err("duplicate local '" + lname + "'");
                    expect_punct(":");
                    TypeTag ty = parse_type();
                    local_index[lname] = static_cast<uint32_t>(f.locals.size());
                    f.locals.emplace_back(lname, std::move(ty));
                    if (at_punct(",")) next();
                    else break;
                }
                end_of_line();
            } else if (peek(1).kind == Token::Punct && peek(1).text == ":") {
                // Label line.
                if (opcode_from_mnemonic(t.text))
                    throw err("label '" + t.text + "' collides with a mnemonic");
                std::string lname = parse_ident();
                if (f.labels.count(lname))
                    throw err("duplicate label '" + lname + "'");
                f.labels[lname] = f.body.size();
                expect_punct(":");
                end_of_line();
            } else {
                parse_instruction(f, local_index);
            }
            skip_newlines();
        }
        expect_punct("}");
    }

    void parse_instruction(FunctionDef& f,
                           const std::map<std::string, uint32_t>& local_index) {
        const Token& t = peek();
        auto op = opcode_from_mnemonic(t.text);
        if (!op)
            throw ParseError(ErrorKind::Syntax,
                             "unknown mnemonic '" + t.text + "'", t.line, t.col);
        next();
        Instruction ins = make_instr(*op);
        ins.line = t.line;
        switch (operand_kind(*op)) {
            case OperandKind::None:
                break;
            case OperandKind::ImmU8:
            case OperandKind::ImmU64:
            case OperandKind::ImmU128: {
                if (peek().kind != Token::Number)
                    throw err("expected integer literal");
                const Token& n = next();
                u128 v;
                if (!parse_u128(n.text, v))
                    throw ParseError(ErrorKind::Syntax,
                                     "integer literal out of range", n.line,
                                     n.col);
                if (operand_kind(*op) == OperandKind::ImmU8 && v > 0xff)
                    throw ParseError(ErrorKind::Syntax, "u8 literal > 255",
                                     n.line, n.col);
                if (operand_kind(*op) == OperandKind::ImmU64 &&
                    v > 0xffffffffffffffffULL)
                    throw ParseError(ErrorKind::Syntax, "u64 literal overflow",
                                     n.line, n.col);
                ins.imm = v;
                break;
            }
            case OperandKind::Addr:
                ins.addr = parse_address();
                break;
            case OperandKind::Local: {
                const Token& n = peek();
                std::string lname = parse_ident();
                auto it = local_index.find(lname);
                if (it == local_index.end())
                    throw ParseError(ErrorKind::Syntax,
                                     "unknown local '" + lname + "'", n.line,
                                     n.col);
                ins.local = it->second;
                break;
            }
            case OperandKind::Label:
                ins.label = parse_ident();
                break;
            case OperandKind::CallTarget: {
                ins.target_module = parse_module_id();
                expect_punct("::");
                ins.target_name = parse_ident();
                break;
            }
            case OperandKind::StructRef: {
                if (peek().kind == Token::Address) {
                    ins.target_module = parse_module_id();
                    expect_punct("::");
                    ins.target_name = parse_ident();
                } else {
                    ins.target_module = mod_.id;
                    ins.target_name = parse_ident();
                }
                break;
            }
        }
        end_of_line();
        f.body.push_back(std::move(ins));
    }

    void finish() {
        std::sort(mod_.friends.begin(), mod_.friends.end());
        mod_.friends.erase(std::unique(mod_.friends.begin(), mod_.friends.end()),
                           mod_.friends.end());
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    ModuleDef mod_;
};

}  // namespace

ModuleDef parse_text(const std::string& source) {
    Lexer lex(source);
    Parser parser(lex.run());
    ModuleDef m = parser.run();
    validate_module(m);
    validate_stack_discipline(m);
    return m;
}

}  // namespace mvsc
