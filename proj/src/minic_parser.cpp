#include "regkit/error.hpp"
#include "regkit/minic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <unordered_map>

namespace regkit::minic {

namespace {

enum class Tok {
    End, Int, Ident,
    KwInt, KwVoid, KwIf, KwElse, KwFor, KwWhile, KwReturn,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket, Semi, Comma, Colon,
    Assign, PlusAssign, MinusAssign, PlusPlus, MinusMinus,
    Plus, Minus, Star, Slash, Percent,
    Lt, Le, Gt, Ge, EqEq, NotEq, AndAnd, OrOr, Bang,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
    SourcePos end;
};

const char* describe(Tok t) {
    switch (t) {
        case Tok::End: return "end of input";
        case Tok::Int: return "integer literal";
        case Tok::Ident: return "identifier";
        case Tok::KwInt: return "'int'";
        case Tok::KwVoid: return "'void'";
        case Tok::KwIf: return "'if'";
        case Tok::KwElse: return "'else'";
        case Tok::KwFor: return "'for'";
        case Tok::KwWhile: return "'while'";
        case Tok::KwReturn: return "'return'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Semi: return "';'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Assign: return "'='";
        case Tok::PlusAssign: return "'+='";
        case Tok::MinusAssign: return "'-='";
        case Tok::PlusPlus: return "'++'";
        case Tok::MinusMinus: return "'--'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Percent: return "'%'";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::EqEq: return "'=='";
        case Tok::NotEq: return "'!='";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
        case Tok::Bang: return "'!'";
    }
    return "token";
}

std::vector<Token> lex(const std::vector<std::string>& lines) {
    static const std::unordered_map<std::string_view, Tok> keywords = {
        {"int", Tok::KwInt},       {"void", Tok::KwVoid},   {"if", Tok::KwIf},
        {"else", Tok::KwElse},     {"for", Tok::KwFor},     {"while", Tok::KwWhile},
        {"return", Tok::KwReturn},
    };
    // Longest match first.
    static const std::pair<std::string_view, Tok> punct[] = {
        {"++", Tok::PlusPlus}, {"--", Tok::MinusMinus}, {"+=", Tok::PlusAssign},
        {"-=", Tok::MinusAssign}, {"<=", Tok::Le}, {">=", Tok::Ge}, {"==", Tok::EqEq},
        {"!=", Tok::NotEq}, {"&&", Tok::AndAnd}, {"||", Tok::OrOr},
        {"(", Tok::LParen}, {")", Tok::RParen}, {"{", Tok::LBrace}, {"}", Tok::RBrace},
        {"[", Tok::LBracket}, {"]", Tok::RBracket}, {";", Tok::Semi}, {",", Tok::Comma},
        {":", Tok::Colon}, {"=", Tok::Assign}, {"+", Tok::Plus}, {"-", Tok::Minus},
        {"*", Tok::Star}, {"/", Tok::Slash}, {"%", Tok::Percent}, {"<", Tok::Lt},
        {">", Tok::Gt}, {"!", Tok::Bang},
    };

    std::vector<Token> out;
    bool in_block_comment = false;
    SourcePos comment_start;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string& s = lines[li];
        const int line = static_cast<int>(li) + 1;
        std::size_t i = 0;
        while (i < s.size()) {
            if (in_block_comment) {
                auto close = s.find("*/", i);
                if (close == std::string::npos) { i = s.size(); break; }
                i = close + 2;
                in_block_comment = false;
                continue;
            }
            const char c = s[i];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') { ++i; continue; }
            if (s.compare(i, 2, "//") == 0) break;
            if (s.compare(i, 2, "/*") == 0) {
                in_block_comment = true;
                comment_start = {line, static_cast<int>(i) + 1};
                i += 2;
                continue;
            }
            Token t;
            t.pos = {line, static_cast<int>(i) + 1};
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                if (j < s.size() && (std::isalpha(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                    throw SyntaxError(line, static_cast<int>(j) + 1, "malformed number");
                t.kind = Tok::Int;
                t.text = s.substr(i, j - i);
                i = j;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
                t.text = s.substr(i, j - i);
                auto kw = keywords.find(t.text);
                t.kind = kw != keywords.end() ? kw->second : Tok::Ident;
                i = j;
            } else {
                bool matched = false;
                for (const auto& [spell, kind] : punct) {
                    if (s.compare(i, spell.size(), spell) == 0) {
                        t.kind = kind;
                        t.text = std::string(spell);
                        i += spell.size();
                        matched = true;
                        break;
                    }
                }
                if (!matched)
                    throw SyntaxError(line, static_cast<int>(i) + 1,
                                      std::string("unexpected character '") + c + "'");
            }
            t.end = {line, static_cast<int>(i) + 1};
            out.push_back(std::move(t));
        }
    }
    if (in_block_comment)
        throw SyntaxError(comment_start.line, comment_start.col, "unterminated comment");
    Token end;
    end.kind = Tok::End;
    const int last = static_cast<int>(lines.size());
    end.pos = end.end = {last == 0 ? 1 : last, last == 0 ? 1 : static_cast<int>(lines.back().size()) + 1};
    out.push_back(end);
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, SourceProgram::Data& out) : toks_(std::move(toks)), out_(out) {}

    void parse_unit() {
        while (peek().kind != Tok::End) {
            if (peek().kind == Tok::KwVoid) {
                parse_function();
            } else if (peek().kind == Tok::KwInt) {
                // `int name =` is a global, `int name (` a function.
                if (peek(2).kind == Tok::LParen) parse_function();
                else parse_global();
            } else {
                fail(peek(), std::string("expected declaration, found ") + describe(peek().kind));
            }
        }
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[k];
    }
    const Token& advance() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        last_end_ = t.end;
        return t;
    }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        advance();
        return true;
    }
    const Token& expect(Tok k) {
        if (peek().kind != k)
            fail(peek(), std::string("expected ") + describe(k) + ", found " + describe(peek().kind));
        return advance();
    }
    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw SyntaxError(t.pos.line, t.pos.col, msg);
    }

    void parse_global() {
        const Token& kw = expect(Tok::KwInt);
        const Token& name = expect(Tok::Ident);
        if (globals_.count(name.text) || functions_.count(name.text))
            throw ScopeError(name.text, name.pos.line, "redefinition of");
        expect(Tok::Assign);
        const bool neg = accept(Tok::Minus);
        const Token& lit = expect(Tok::Int);
        std::int64_t v = parse_literal(lit);
        if (neg) v = -v;
        if (v < INT32_MIN || v > INT32_MAX) fail(lit, "global initializer out of range");
        expect(Tok::Semi);
        globals_[name.text] = static_cast<int>(out_.globals.size());
        out_.globals.push_back({name.text, static_cast<std::int32_t>(v), kw.pos.line});
    }

    static std::int64_t parse_literal(const Token& t) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || v > 2147483648LL) fail(t, "integer literal out of range");
        return v;
    }

    void parse_function() {
        FunctionDef f;
        const Token& kw = advance();
        f.ret = kw.kind == Tok::KwVoid ? ReturnKind::Void : ReturnKind::Int;
        f.first_line = kw.pos.line;
        const Token& name = expect(Tok::Ident);
        if (functions_.count(name.text) || globals_.count(name.text))
            throw ScopeError(name.text, name.pos.line, "redefinition of");
        f.name = name.text;
        cur_ = &f;
        scopes_.clear();
        scopes_.emplace_back();
        expect(Tok::LParen);
        if (peek().kind != Tok::RParen) {
            do {
                expect(Tok::KwInt);
                const Token& pn = expect(Tok::Ident);
                VarKind kind = VarKind::Int;
                if (accept(Tok::LBracket)) {
                    expect(Tok::RBracket);
                    kind = VarKind::IntArray;
                }
                f.params.push_back({pn.text, kind});
                declare_local(pn, kind);
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen);
        // Visible inside its own body for recursion.
        const int index = static_cast<int>(out_.functions.size());
        functions_[f.name] = index;
        f.body = parse_block();
        f.last_line = f.body.end_line;
        cur_ = nullptr;
        out_.functions.push_back(std::move(f));
    }

    VarRef declare_local(const Token& name, VarKind kind) {
        auto& scope = scopes_.back();
        if (scope.count(name.text)) throw ScopeError(name.text, name.pos.line, "redeclaration of");
        VarRef ref{VarRef::Scope::Local, static_cast<int>(cur_->local_names.size()), kind};
        cur_->local_names.push_back(name.text);
        cur_->local_kinds.push_back(kind);
        scope[name.text] = ref;
        return ref;
    }

    VarRef resolve(const Token& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name.text);
            if (f != it->end()) return f->second;
        }
        auto g = globals_.find(name.text);
        if (g != globals_.end()) return {VarRef::Scope::Global, g->second, VarKind::Int};
        throw ScopeError(name.text, name.pos.line);
    }

    Stmt parse_block() {
        Stmt b;
        b.kind = StmtKind::Block;
        b.pos = expect(Tok::LBrace).pos;
        scopes_.emplace_back();
        while (peek().kind != Tok::RBrace) {
            if (peek().kind == Tok::End) fail(peek(), "expected '}' before end of input");
            b.body.push_back(parse_statement(true));
        }
        b.end_line = advance().pos.line;
        scopes_.pop_back();
        return b;
    }

    // A lone statement body (if/else/loop) gets its own scope.
    Stmt parse_substatement() {
        if (peek().kind == Tok::KwInt) fail(peek(), "declaration not allowed here");
        scopes_.emplace_back();
        Stmt s = parse_statement(false);
        scopes_.pop_back();
        return s;
    }

    Stmt parse_statement(bool allow_decl) {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::LBrace:
                return parse_block();
            case Tok::KwInt: {
                if (!allow_decl) fail(t, "declaration not allowed here");
                Stmt s = parse_decl();
                expect(Tok::Semi);
                s.end_line = last_end_.line;
                return s;
            }
            case Tok::KwIf: {
                Stmt s;
                s.kind = StmtKind::If;
                s.pos = advance().pos;
                expect(Tok::LParen);
                s.value = parse_expr();
                expect(Tok::RParen);
                s.body.push_back(parse_substatement());
                if (accept(Tok::KwElse)) s.else_body.push_back(parse_substatement());
                s.end_line = last_end_.line;
                return s;
            }
            case Tok::KwWhile: {
                Stmt s;
                s.kind = StmtKind::While;
                s.pos = advance().pos;
                expect(Tok::LParen);
                s.value = parse_expr();
                expect(Tok::RParen);
                s.body.push_back(parse_substatement());
                s.end_line = last_end_.line;
                return s;
            }
            case Tok::KwFor: {
                Stmt s;
                s.kind = StmtKind::For;
                s.pos = advance().pos;
                expect(Tok::LParen);
                scopes_.emplace_back();
                if (peek().kind == Tok::KwInt) s.init.push_back(parse_decl());
                else if (peek().kind != Tok::Semi) s.init.push_back(parse_assign());
                expect(Tok::Semi);
                s.value = parse_expr();
                expect(Tok::Semi);
                if (peek().kind != Tok::RParen) s.step.push_back(parse_assign());
                expect(Tok::RParen);
                s.body.push_back(parse_substatement());
                scopes_.pop_back();
                s.end_line = last_end_.line;
                return s;
            }
            case Tok::KwReturn: {
                Stmt s;
                s.kind = StmtKind::Return;
                s.pos = advance().pos;
                if (peek().kind != Tok::Semi) s.value = parse_expr();
                expect(Tok::Semi);
                s.end_line = last_end_.line;
                return s;
            }
            case Tok::Ident: {
                if (peek(1).kind == Tok::Colon) {
                    Stmt s;
                    s.kind = StmtKind::Label;
                    s.pos = t.pos;
                    s.name = advance().text;
                    advance();
                    s.end_line = last_end_.line;
                    return s;
                }
                if (peek(1).kind == Tok::LParen) {
                    Stmt s;
                    s.kind = StmtKind::Call;
                    s.pos = t.pos;
                    s.value = parse_primary();
                    expect(Tok::Semi);
                    s.end_line = last_end_.line;
                    return s;
                }
                Stmt s = parse_assign();
                expect(Tok::Semi);
                s.end_line = last_end_.line;
                return s;
            }
            default:
                fail(t, std::string("expected statement, found ") + describe(t.kind));
        }
    }

    Stmt parse_decl() {
        Stmt s;
        s.kind = StmtKind::Decl;
        s.pos = expect(Tok::KwInt).pos;
        const Token& name = expect(Tok::Ident);
        s.name = name.text;
        expect(Tok::Assign);
        s.value = parse_expr();
        s.target = declare_local(name, VarKind::Int);
        s.end_line = last_end_.line;
        return s;
    }

    Stmt parse_assign() {
        Stmt s;
        s.kind = StmtKind::Assign;
        const Token& name = expect(Tok::Ident);
        s.pos = name.pos;
        s.name = name.text;
        s.target = resolve(name);
        if (accept(Tok::LBracket)) {
            s.index = parse_expr();
            expect(Tok::RBracket);
        }
        const Token& op = advance();
        switch (op.kind) {
            case Tok::Assign: s.op = AssignOp::Set; s.value = parse_expr(); break;
            case Tok::PlusAssign: s.op = AssignOp::AddSet; s.value = parse_expr(); break;
            case Tok::MinusAssign: s.op = AssignOp::SubSet; s.value = parse_expr(); break;
            case Tok::PlusPlus: s.op = AssignOp::Inc; break;
            case Tok::MinusMinus: s.op = AssignOp::Dec; break;
            default: fail(op, std::string("expected assignment operator, found ") + describe(op.kind));
        }
        s.end_line = last_end_.line;
        return s;
    }

    // Precedence climbing: || < && < equality < relational < additive < multiplicative.
    static int precedence(Tok t) {
        switch (t) {
            case Tok::OrOr: return 1;
            case Tok::AndAnd: return 2;
            case Tok::EqEq: case Tok::NotEq: return 3;
            case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge: return 4;
            case Tok::Plus: case Tok::Minus: return 5;
            case Tok::Star: case Tok::Slash: case Tok::Percent: return 6;
            default: return 0;
        }
    }
    static BinaryOp binary_op(Tok t) {
        switch (t) {
            case Tok::OrOr: return BinaryOp::Or;
            case Tok::AndAnd: return BinaryOp::And;
            case Tok::EqEq: return BinaryOp::Eq;
            case Tok::NotEq: return BinaryOp::Ne;
            case Tok::Lt: return BinaryOp::Lt;
            case Tok::Le: return BinaryOp::Le;
            case Tok::Gt: return BinaryOp::Gt;
            case Tok::Ge: return BinaryOp::Ge;
            case Tok::Plus: return BinaryOp::Add;
            case Tok::Minus: return BinaryOp::Sub;
            case Tok::Star: return BinaryOp::Mul;
            case Tok::Slash: return BinaryOp::Div;
            default: return BinaryOp::Mod;
        }
    }

    Expr parse_expr(int min_prec = 1) {
        Expr lhs = parse_unary();
        while (true) {
            const Token& op = peek();
            const int prec = precedence(op.kind);
            if (prec < min_prec || prec == 0) break;
            advance();
            Expr rhs = parse_expr(prec + 1);
            Expr bin;
            bin.kind = ExprKind::Binary;
            bin.binary = binary_op(op.kind);
            bin.op_pos = op.pos;
            bin.pos = lhs.pos;
            bin.end = rhs.end;
            bin.operands.push_back(std::move(lhs));
            bin.operands.push_back(std::move(rhs));
            lhs = std::move(bin);
        }
        return lhs;
    }

    Expr parse_unary() {
        const Token& t = peek();
        if (t.kind == Tok::Minus || t.kind == Tok::Bang) {
            advance();
            Expr operand = parse_unary();
            Expr u;
            u.kind = ExprKind::Unary;
            u.unary = t.kind == Tok::Minus ? UnaryOp::Neg : UnaryOp::Not;
            u.pos = u.op_pos = t.pos;
            u.end = operand.end;
            u.operands.push_back(std::move(operand));
            return u;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = peek();
        Expr e;
        e.pos = t.pos;
        switch (t.kind) {
            case Tok::Int: {
                advance();
                e.kind = ExprKind::IntLit;
                e.value = parse_literal(t);
                e.end = t.end;
                return e;
            }
            case Tok::LParen: {
                advance();
                Expr inner = parse_expr();
                expect(Tok::RParen);
                inner.pos = t.pos;
                inner.end = last_end_;
                return inner;
            }
            case Tok::Ident: {
                const Token& name = advance();
                e.name = name.text;
                if (accept(Tok::LParen)) {
                    auto f = functions_.find(name.text);
                    if (f == functions_.end()) throw ScopeError(name.text, name.pos.line);
                    e.kind = ExprKind::Call;
                    e.callee = f->second;
                    if (peek().kind != Tok::RParen) {
                        do {
                            e.operands.push_back(parse_expr());
                        } while (accept(Tok::Comma));
                    }
                    expect(Tok::RParen);
                    e.end = last_end_;
                    return e;
                }
                e.ref = resolve(name);
                if (accept(Tok::LBracket)) {
                    e.kind = ExprKind::Index;
                    e.operands.push_back(parse_expr());
                    expect(Tok::RBracket);
                } else {
                    e.kind = ExprKind::Var;
                }
                e.end = last_end_;
                return e;
            }
            default:
                fail(t, std::string("expected expression, found ") + describe(t.kind));
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SourcePos last_end_;
    SourceProgram::Data& out_;
    std::unordered_map<std::string, int> globals_;
    std::unordered_map<std::string, int> functions_;
    std::vector<std::unordered_map<std::string, VarRef>> scopes_;
    FunctionDef* cur_ = nullptr;
};

}  // namespace

SourceProgram parse_program(std::string_view text) {
    auto data = std::make_shared<SourceProgram::Data>();
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) data->lines.emplace_back(text.substr(start));
            break;
        }
        data->lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    data->trailing_newline = !text.empty() && text.back() == '\n';

    Parser parser(lex(data->lines), *data);
    parser.parse_unit();
    return SourceProgram(std::move(data));
}

SourceProgram load_program(std::string_view text) {
    SourceProgram p = parse_program(text);
    check_program(p);
    return p;
}

int SourceProgram::find_function(std::string_view name) const {
    const auto& fs = functions();
    for (std::size_t i = 0; i < fs.size(); ++i)
        if (fs[i].name == name) return static_cast<int>(i);
    return -1;
}

const FunctionDef& SourceProgram::function(std::string_view name) const {
    const int i = find_function(name);
    if (i < 0) throw UnknownFunction(std::string(name));
    return functions()[static_cast<std::size_t>(i)];
}

}  // namespace regkit::minic
