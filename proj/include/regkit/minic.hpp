#pragma once

// MiniC: a deterministic, integer-only subset of C.
//
//   program  := { global | function }
//   global   := 'int' IDENT '=' ['-'] INT ';'
//   function := ('int' | 'void') IDENT '(' [param {',' param}] ')' block
//   param    := 'int' IDENT ['[' ']']
//   stmt     := 'int' IDENT '=' expr ';' | assign ';' | call ';' | IDENT ':'
//             | 'if' '(' expr ')' stmt ['else' stmt]
//             | 'while' '(' expr ')' stmt
//             | 'for' '(' [decl | assign] ';' expr ';' [assign] ')' stmt
//             | 'return' [expr] ';' | block
//   assign   := lvalue ('=' | '+=' | '-=') expr | lvalue '++' | lvalue '--'
//
// Every AST node remembers where it came from so that goals, patches and
// mutants can be expressed in source-line coordinates.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regkit::minic {

enum class VarKind { Int, IntArray };
enum class ReturnKind { Int, Void };

const char* to_string(VarKind k);
const char* to_string(ReturnKind k);

struct SourcePos {
    int line = 0;  // 1-based
    int col = 0;   // 1-based, byte offset within the line

    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

/// Resolved variable reference. Locals are numbered per function.
struct VarRef {
    enum class Scope { Global, Local };
    Scope scope = Scope::Local;
    int slot = -1;
    VarKind kind = VarKind::Int;

    friend bool operator==(const VarRef&, const VarRef&) = default;
};

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char* spelling(UnaryOp op);
const char* spelling(BinaryOp op);

enum class ExprKind { IntLit, Var, Index, Unary, Binary, Call };

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    SourcePos pos;     // first token
    SourcePos end;     // one past the last token
    SourcePos op_pos;  // operator token (Unary, Binary)
    std::int64_t value = 0;  // IntLit, always >= 0
    std::string name;        // Var, Index (array), Call (callee)
    VarRef ref;              // Var, Index
    int callee = -1;         // Call: index into SourceProgram::functions()
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    std::vector<Expr> operands;  // Unary: 1, Binary: 2, Index: 1, Call: args
};

enum class StmtKind { Decl, Assign, If, For, While, Return, Block, Call, Label };
enum class AssignOp { Set, AddSet, SubSet, Inc, Dec };

struct Stmt {
    StmtKind kind = StmtKind::Block;
    SourcePos pos;
    int end_line = 0;

    std::string name;                 // Decl/Assign target name, Label name
    VarRef target;                    // Decl, Assign
    AssignOp op = AssignOp::Set;      // Assign
    std::optional<Expr> index;        // Assign to an array element
    std::optional<Expr> value;        // Decl init, Assign rhs, Return value, Call expr, loop/if condition

    std::vector<Stmt> body;       // Block: statements; If/While/For: the single body statement
    std::vector<Stmt> else_body;  // If: 0 or 1 statements
    std::vector<Stmt> init;       // For: 0 or 1 (Decl or Assign)
    std::vector<Stmt> step;       // For: 0 or 1 (Assign)
};

struct Param {
    std::string name;
    VarKind kind = VarKind::Int;

    friend bool operator==(const Param&, const Param&) = default;
};

struct FunctionDef {
    std::string name;
    std::vector<Param> params;
    ReturnKind ret = ReturnKind::Int;
    Stmt body;  // a Block
    int first_line = 0;
    int last_line = 0;
    /// All locals including parameters (which occupy slots 0..params-1).
    std::vector<std::string> local_names;
    std::vector<VarKind> local_kinds;
};

struct Global {
    std::string name;
    std::int32_t init = 0;
    int line = 0;
};

struct Signature {
    std::string name;
    std::vector<VarKind> params;
    ReturnKind ret = ReturnKind::Int;

    friend bool operator==(const Signature&, const Signature&) = default;
};

std::string to_string(const Signature& s);

/// An immutable parsed compilation unit. Copies share the underlying AST.
class SourceProgram {
public:
    struct Data {
        std::vector<Global> globals;
        std::vector<FunctionDef> functions;
        std::vector<std::string> lines;
        bool trailing_newline = false;
    };

    SourceProgram() = default;
    explicit SourceProgram(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

    const std::vector<Global>& globals() const { return data_->globals; }
    const std::vector<FunctionDef>& functions() const { return data_->functions; }
    const std::vector<std::string>& source_lines() const { return data_->lines; }
    int line_count() const { return static_cast<int>(data_->lines.size()); }
    bool trailing_newline() const { return data_->trailing_newline; }

    /// Index of the named function, or -1.
    int find_function(std::string_view name) const;
    /// Like find_function but throws UnknownFunction.
    const FunctionDef& function(std::string_view name) const;

    bool valid() const { return data_ != nullptr; }

private:
    std::shared_ptr<const Data> data_;
};

/// Lexes, parses and resolves scopes. Throws SyntaxError or ScopeError.
SourceProgram parse_program(std::string_view text);

/// Kind, arity and return-path checks. Throws SemanticError.
void check_program(const SourceProgram& p);

/// parse_program followed by check_program.
SourceProgram load_program(std::string_view text);

Signature signature_of(const SourceProgram& p, std::string_view fn);

/// Line-faithful text of the program; parse_program(render(p)) reproduces p.
std::string render(const SourceProgram& p);

/// Canonical re-formatting straight from the AST.
std::string pretty_print(const SourceProgram& p);

/// Canonical text of a single expression.
std::string expr_text(const Expr& e);

/// AST equality ignoring source positions.
bool structurally_equal(const SourceProgram& a, const SourceProgram& b);

/// Function indices reachable from fn through calls, fn first, then ascending.
std::vector<int> reachable_functions(const SourceProgram& p, int fn);

/// The unique function that no other function calls, if there is exactly one.
std::optional<std::string> entry_function(const SourceProgram& p);

}  // namespace regkit::minic
