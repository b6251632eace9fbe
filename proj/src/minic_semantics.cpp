#include "regkit/error.hpp"
#include "regkit/minic.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace regkit::minic {

const char* to_string(VarKind k) { return k == VarKind::Int ? "int" : "int-array"; }
const char* to_string(ReturnKind k) { return k == ReturnKind::Int ? "int" : "void"; }

const char* spelling(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

const char* spelling(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

std::string to_string(const Signature& s) {
    std::string out = "(" + s.name + ", [";
    for (std::size_t i = 0; i < s.params.size(); ++i) {
        if (i) out += ", ";
        out += to_string(s.params[i]);
    }
    out += "], ";
    out += to_string(s.ret);
    out += ")";
    return out;
}

Signature signature_of(const SourceProgram& p, std::string_view fn) {
    const FunctionDef& f = p.function(fn);
    Signature s;
    s.name = f.name;
    s.ret = f.ret;
    for (const auto& prm : f.params) s.params.push_back(prm.kind);
    return s;
}

// ---------------------------------------------------------------------------
// Semantic checks

namespace {

class Checker {
public:
    explicit Checker(const SourceProgram& p) : p_(p) {}

    void run() {
        for (const auto& f : p_.functions()) {
            fn_ = &f;
            labels_.clear();
            check_stmt(f.body);
            if (f.ret == ReturnKind::Int && !always_returns(f.body))
                throw SemanticError(f.last_line, "control reaches end of non-void function '" + f.name + "'");
        }
    }

private:
    void check_int(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit:
                return;
            case ExprKind::Var:
                if (e.ref.kind != VarKind::Int)
                    throw SemanticError(e.pos.line, "array '" + e.name + "' used as an integer");
                return;
            case ExprKind::Index:
                if (e.ref.kind != VarKind::IntArray)
                    throw SemanticError(e.pos.line, "'" + e.name + "' is not an array");
                check_int(e.operands[0]);
                return;
            case ExprKind::Unary:
                check_int(e.operands[0]);
                return;
            case ExprKind::Binary:
                check_int(e.operands[0]);
                check_int(e.operands[1]);
                return;
            case ExprKind::Call:
                check_call(e);
                if (p_.functions()[static_cast<std::size_t>(e.callee)].ret == ReturnKind::Void)
                    throw SemanticError(e.pos.line, "void function '" + e.name + "' used as a value");
                return;
        }
    }

    void check_call(const Expr& e) {
        const FunctionDef& callee = p_.functions()[static_cast<std::size_t>(e.callee)];
        if (callee.params.size() != e.operands.size())
            throw SemanticError(e.pos.line, "wrong number of arguments to '" + e.name + "'");
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
            const Expr& a = e.operands[i];
            if (callee.params[i].kind == VarKind::IntArray) {
                if (a.kind != ExprKind::Var || a.ref.kind != VarKind::IntArray)
                    throw SemanticError(a.pos.line, "argument " + std::to_string(i + 1) + " of '" + e.name +
                                                        "' must be an array variable");
            } else {
                check_int(a);
            }
        }
    }

    void check_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Decl:
                check_int(*s.value);
                break;
            case StmtKind::Assign:
                if (s.index) {
                    if (s.target.kind != VarKind::IntArray)
                        throw SemanticError(s.pos.line, "'" + s.name + "' is not an array");
                    check_int(*s.index);
                } else if (s.target.kind != VarKind::Int) {
                    throw SemanticError(s.pos.line, "cannot assign to array '" + s.name + "'");
                }
                if (s.value) check_int(*s.value);
                break;
            case StmtKind::If:
            case StmtKind::While:
            case StmtKind::For:
                for (const auto& st : s.init) check_stmt(st);
                check_int(*s.value);
                for (const auto& st : s.step) check_stmt(st);
                for (const auto& st : s.body) check_stmt(st);
                for (const auto& st : s.else_body) check_stmt(st);
                break;
            case StmtKind::Return:
                if (fn_->ret == ReturnKind::Int && !s.value)
                    throw SemanticError(s.pos.line, "non-void function '" + fn_->name + "' must return a value");
                if (fn_->ret == ReturnKind::Void && s.value)
                    throw SemanticError(s.pos.line, "void function '" + fn_->name + "' cannot return a value");
                if (s.value) check_int(*s.value);
                break;
            case StmtKind::Block:
                for (const auto& st : s.body) check_stmt(st);
                break;
            case StmtKind::Call:
                check_call(*s.value);
                break;
            case StmtKind::Label:
                if (!labels_.insert(s.name).second)
                    throw SemanticError(s.pos.line, "duplicate label '" + s.name + "'");
                break;
        }
    }

    // Conservative: loops never count as returning.
    static bool always_returns(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Return:
                return true;
            case StmtKind::Block:
                return std::any_of(s.body.begin(), s.body.end(), always_returns);
            case StmtKind::If:
                return !s.else_body.empty() && always_returns(s.body[0]) && always_returns(s.else_body[0]);
            default:
                return false;
        }
    }

    const SourceProgram& p_;
    const FunctionDef* fn_ = nullptr;
    std::set<std::string> labels_;
};

}  // namespace

void check_program(const SourceProgram& p) { Checker(p).run(); }

// ---------------------------------------------------------------------------
// Rendering

std::string render(const SourceProgram& p) {
    std::string out;
    const auto& lines = p.source_lines();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    if (p.trailing_newline()) out += '\n';
    return out;
}

namespace {

int expr_precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Binary:
            switch (e.binary) {
                case BinaryOp::Or: return 1;
                case BinaryOp::And: return 2;
                case BinaryOp::Eq: case BinaryOp::Ne: return 3;
                case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge: return 4;
                case BinaryOp::Add: case BinaryOp::Sub: return 5;
                default: return 6;
            }
        case ExprKind::Unary: return 7;
        default: return 8;
    }
}

class Printer {
public:
    explicit Printer(const SourceProgram& p) : p_(p) {}

    std::string run() {
        for (const auto& g : p_.globals()) out_ << "int " << g.name << " = " << g.init << ";\n";
        for (const auto& f : p_.functions()) {
            if (!p_.globals().empty() || &f != &p_.functions().front()) out_ << "\n";
            out_ << (f.ret == ReturnKind::Int ? "int " : "void ") << f.name << "(";
            for (std::size_t i = 0; i < f.params.size(); ++i) {
                if (i) out_ << ", ";
                out_ << "int " << f.params[i].name << (f.params[i].kind == VarKind::IntArray ? "[]" : "");
            }
            out_ << ") ";
            block(f.body, 0);
            out_ << "\n";
        }
        return out_.str();
    }

    static std::string expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: return std::to_string(e.value);
            case ExprKind::Var: return e.name;
            case ExprKind::Index: return e.name + "[" + expr(e.operands[0]) + "]";
            case ExprKind::Call: {
                std::string s = e.name + "(";
                for (std::size_t i = 0; i < e.operands.size(); ++i) {
                    if (i) s += ", ";
                    s += expr(e.operands[i]);
                }
                return s + ")";
            }
            case ExprKind::Unary: {
                const Expr& o = e.operands[0];
                const bool paren = expr_precedence(o) < 7 || o.kind == ExprKind::Unary;
                return std::string(spelling(e.unary)) + (paren ? "(" + expr(o) + ")" : expr(o));
            }
            case ExprKind::Binary: {
                const int prec = expr_precedence(e);
                const Expr& l = e.operands[0];
                const Expr& r = e.operands[1];
                std::string ls = expr(l), rs = expr(r);
                if (expr_precedence(l) < prec) ls = "(" + ls + ")";
                if (expr_precedence(r) <= prec) rs = "(" + rs + ")";
                return ls + " " + spelling(e.binary) + " " + rs;
            }
        }
        return {};
    }

private:
    void indent(int depth) { out_ << std::string(static_cast<std::size_t>(depth) * 4, ' '); }

    void block(const Stmt& b, int depth) {
        out_ << "{\n";
        for (const auto& s : b.body) stmt(s, depth + 1);
        indent(depth);
        out_ << "}";
    }

    static std::string simple(const Stmt& s) {
        if (s.kind == StmtKind::Decl) return "int " + s.name + " = " + expr(*s.value);
        std::string lhs = s.name + (s.index ? "[" + expr(*s.index) + "]" : "");
        switch (s.op) {
            case AssignOp::Set: return lhs + " = " + expr(*s.value);
            case AssignOp::AddSet: return lhs + " += " + expr(*s.value);
            case AssignOp::SubSet: return lhs + " -= " + expr(*s.value);
            case AssignOp::Inc: return lhs + "++";
            case AssignOp::Dec: return lhs + "--";
        }
        return lhs;
    }

    // Body of if/else/loop: blocks stay on the header line.
    void sub(const Stmt& s, int depth) {
        if (s.kind == StmtKind::Block) {
            out_ << " ";
            block(s, depth);
            out_ << "\n";
        } else {
            out_ << "\n";
            stmt(s, depth + 1);
        }
    }

    void stmt(const Stmt& s, int depth) {
        indent(depth);
        switch (s.kind) {
            case StmtKind::Decl:
            case StmtKind::Assign:
                out_ << simple(s) << ";\n";
                break;
            case StmtKind::Return:
                out_ << "return" << (s.value ? " " + expr(*s.value) : "") << ";\n";
                break;
            case StmtKind::Call:
                out_ << expr(*s.value) << ";\n";
                break;
            case StmtKind::Label:
                out_ << s.name << ":\n";
                break;
            case StmtKind::Block:
                block(s, depth);
                out_ << "\n";
                break;
            case StmtKind::If:
                out_ << "if (" << expr(*s.value) << ")";
                sub(s.body[0], depth);
                if (!s.else_body.empty()) {
                    indent(depth);
                    out_ << "else";
                    sub(s.else_body[0], depth);
                }
                break;
            case StmtKind::While:
                out_ << "while (" << expr(*s.value) << ")";
                sub(s.body[0], depth);
                break;
            case StmtKind::For:
                out_ << "for (" << (s.init.empty() ? "" : simple(s.init[0])) << "; " << expr(*s.value) << "; "
                     << (s.step.empty() ? "" : simple(s.step[0])) << ")";
                sub(s.body[0], depth);
                break;
        }
    }

    const SourceProgram& p_;
    std::ostringstream out_;
};

bool equal_expr(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.value != b.value || a.name != b.name || a.operands.size() != b.operands.size())
        return false;
    if ((a.kind == ExprKind::Var || a.kind == ExprKind::Index) && !(a.ref == b.ref)) return false;
    if (a.kind == ExprKind::Call && a.callee != b.callee) return false;
    if (a.kind == ExprKind::Unary && a.unary != b.unary) return false;
    if (a.kind == ExprKind::Binary && a.binary != b.binary) return false;
    for (std::size_t i = 0; i < a.operands.size(); ++i)
        if (!equal_expr(a.operands[i], b.operands[i])) return false;
    return true;
}

bool equal_opt(const std::optional<Expr>& a, const std::optional<Expr>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || equal_expr(*a, *b);
}

bool equal_stmt(const Stmt& a, const Stmt& b);

bool equal_list(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!equal_stmt(a[i], b[i])) return false;
    return true;
}

bool equal_stmt(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind || a.name != b.name || a.op != b.op) return false;
    if ((a.kind == StmtKind::Decl || a.kind == StmtKind::Assign) && !(a.target == b.target)) return false;
    return equal_opt(a.index, b.index) && equal_opt(a.value, b.value) && equal_list(a.body, b.body) &&
           equal_list(a.else_body, b.else_body) && equal_list(a.init, b.init) && equal_list(a.step, b.step);
}

void collect_callees(const Expr& e, std::set<int>& out) {
    if (e.kind == ExprKind::Call) out.insert(e.callee);
    for (const auto& o : e.operands) collect_callees(o, out);
}

void collect_callees(const Stmt& s, std::set<int>& out) {
    if (s.index) collect_callees(*s.index, out);
    if (s.value) collect_callees(*s.value, out);
    for (const auto* list : {&s.body, &s.else_body, &s.init, &s.step})
        for (const auto& c : *list) collect_callees(c, out);
}

}  // namespace

std::string pretty_print(const SourceProgram& p) { return Printer(p).run(); }

std::string expr_text(const Expr& e) { return Printer::expr(e); }

bool structurally_equal(const SourceProgram& a, const SourceProgram& b) {
    if (a.globals().size() != b.globals().size() || a.functions().size() != b.functions().size()) return false;
    for (std::size_t i = 0; i < a.globals().size(); ++i) {
        if (a.globals()[i].name != b.globals()[i].name || a.globals()[i].init != b.globals()[i].init) return false;
    }
    for (std::size_t i = 0; i < a.functions().size(); ++i) {
        const auto& fa = a.functions()[i];
        const auto& fb = b.functions()[i];
        if (fa.name != fb.name || fa.ret != fb.ret || fa.params != fb.params) return false;
        if (!equal_stmt(fa.body, fb.body)) return false;
    }
    return true;
}

std::vector<int> reachable_functions(const SourceProgram& p, int fn) {
    std::set<int> seen{fn};
    std::vector<int> work{fn};
    while (!work.empty()) {
        const int f = work.back();
        work.pop_back();
        std::set<int> callees;
        collect_callees(p.functions()[static_cast<std::size_t>(f)].body, callees);
        for (int c : callees)
            if (seen.insert(c).second) work.push_back(c);
    }
    std::vector<int> out{fn};
    for (int f : seen)
        if (f != fn) out.push_back(f);
    return out;
}

std::optional<std::string> entry_function(const SourceProgram& p) {
    std::set<int> called;
    for (std::size_t i = 0; i < p.functions().size(); ++i) {
        std::set<int> callees;
        collect_callees(p.functions()[i].body, callees);
        for (int c : callees)
            if (c != static_cast<int>(i)) called.insert(c);
    }
    std::optional<std::string> entry;
    for (std::size_t i = 0; i < p.functions().size(); ++i) {
        if (called.count(static_cast<int>(i))) continue;
        if (entry) return std::nullopt;
        entry = p.functions()[i].name;
    }
    return entry;
}

}  // namespace regkit::minic
