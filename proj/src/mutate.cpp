#include "regkit/mutate.hpp"

#include "regkit/error.hpp"
#include "regkit/history.hpp"
#include "regkit/rng.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

namespace regkit::mutate {

const char* to_string(Group g) {
    switch (g) {
        case Group::ValueReplacement: return "value";
        case Group::OperatorReplacement: return "operator";
        case Group::ReferenceReplacement: return "reference";
    }
    return "?";
}

const std::vector<Operator>& list_operators() {
    static const std::vector<Operator> ops{
        {"VAL-inc", Group::ValueReplacement, "integer literal c -> c+1"},
        {"VAL-dec", Group::ValueReplacement, "integer literal c -> c-1"},
        {"VAL-zero", Group::ValueReplacement, "non-zero integer literal -> 0"},
        {"VAR-swap", Group::ValueReplacement, "variable -> another variable of the same kind"},
        {"AOR-add-sub", Group::OperatorReplacement, "+ <-> -"},
        {"AOR-mul-div", Group::OperatorReplacement, "* <-> /"},
        {"ROR-lt-le", Group::OperatorReplacement, "< -> <="},
        {"ROR-le-lt", Group::OperatorReplacement, "<= -> <"},
        {"ROR-le-eq", Group::OperatorReplacement, "<= -> =="},
        {"ROR-eq-ne", Group::OperatorReplacement, "== -> !="},
        {"ROR-gt-ge", Group::OperatorReplacement, "> -> >="},
        {"LCR-and-or", Group::OperatorReplacement, "&& <-> ||"},
        {"ARR-idx-inc", Group::ReferenceReplacement, "a[e] -> a[e+1]"},
        {"ARR-idx-dec", Group::ReferenceReplacement, "a[e] -> a[e-1]"},
        {"ARR-base-swap", Group::ReferenceReplacement, "a[e] -> b[e] for another array b"},
    };
    return ops;
}

namespace {

struct Site {
    int line;
    int col;       // 1-based start of the replaced fragment
    int end_col;   // 1-based, exclusive
    std::string op;
    std::string replacement;

    auto key() const { return std::tie(line, col, op, replacement); }
};

class Collector {
public:
    Collector(const minic::SourceProgram& p, const minic::FunctionDef& f) : p_(p) {
        for (const auto& g : p.globals()) ints_.push_back(g.name);
        for (std::size_t i = 0; i < f.local_names.size(); ++i)
            (f.local_kinds[i] == minic::VarKind::Int ? ints_ : arrays_).push_back(f.local_names[i]);
        dedup(ints_);
        dedup(arrays_);
    }

    void stmt(const minic::Stmt& s) {
        using minic::StmtKind;
        if (s.value) expr(*s.value);
        if (s.kind == StmtKind::Assign && s.index) {
            expr(*s.index);
            index_sites(*s.index);
            base_swap(s.pos, s.name);
        }
        for (const auto& c : s.init) stmt(c);
        for (const auto& c : s.step) stmt(c);
        for (const auto& c : s.body) stmt(c);
        for (const auto& c : s.else_body) stmt(c);
    }

    std::vector<Site> sites;

private:
    static void dedup(std::vector<std::string>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    std::string fragment(minic::SourcePos a, minic::SourcePos b) const {
        const auto& line = p_.source_lines()[static_cast<std::size_t>(a.line - 1)];
        return line.substr(static_cast<std::size_t>(a.col - 1), static_cast<std::size_t>(b.col - a.col));
    }

    void add(minic::SourcePos at, int len, std::string op, std::string repl) {
        sites.push_back({at.line, at.col, at.col + len, std::move(op), std::move(repl)});
    }

    void index_sites(const minic::Expr& idx) {
        if (idx.pos.line != idx.end.line) return;
        const std::string t = fragment(idx.pos, idx.end);
        using minic::ExprKind;
        const bool atom = idx.kind == ExprKind::Var || idx.kind == ExprKind::IntLit || idx.kind == ExprKind::Index ||
                          idx.kind == ExprKind::Call ||
                          (idx.kind == ExprKind::Binary &&
                           (idx.binary == minic::BinaryOp::Add || idx.binary == minic::BinaryOp::Sub ||
                            idx.binary == minic::BinaryOp::Mul || idx.binary == minic::BinaryOp::Div ||
                            idx.binary == minic::BinaryOp::Mod));
        const std::string base = atom ? t : "(" + t + ")";
        const int len = idx.end.col - idx.pos.col;
        add(idx.pos, len, "ARR-idx-inc", base + "+1");
        add(idx.pos, len, "ARR-idx-dec", base + "-1");
    }

    void base_swap(minic::SourcePos at, const std::string& name) {
        for (const auto& other : arrays_)
            if (other != name) add(at, static_cast<int>(name.size()), "ARR-base-swap", other);
    }

    void expr(const minic::Expr& e) {
        using minic::BinaryOp;
        using minic::ExprKind;
        switch (e.kind) {
            case ExprKind::IntLit: {
                const int len = e.end.col - e.pos.col;
                add(e.pos, len, "VAL-inc", std::to_string(e.value + 1));
                add(e.pos, len, "VAL-dec", std::to_string(e.value - 1));
                if (e.value != 0) add(e.pos, len, "VAL-zero", "0");
                break;
            }
            case ExprKind::Var: {
                const auto& pool = e.ref.kind == minic::VarKind::Int ? ints_ : arrays_;
                for (const auto& other : pool)
                    if (other != e.name) add(e.pos, static_cast<int>(e.name.size()), "VAR-swap", other);
                break;
            }
            case ExprKind::Index:
                index_sites(e.operands[0]);
                base_swap(e.pos, e.name);
                break;
            case ExprKind::Binary: {
                auto op = [&](const char* id, const char* from, const char* to) {
                    add(e.op_pos, static_cast<int>(std::string_view(from).size()), id, to);
                };
                switch (e.binary) {
                    case BinaryOp::Add: op("AOR-add-sub", "+", "-"); break;
                    case BinaryOp::Sub: op("AOR-add-sub", "-", "+"); break;
                    case BinaryOp::Mul: op("AOR-mul-div", "*", "/"); break;
                    case BinaryOp::Div: op("AOR-mul-div", "/", "*"); break;
                    case BinaryOp::Lt: op("ROR-lt-le", "<", "<="); break;
                    case BinaryOp::Le:
                        op("ROR-le-lt", "<=", "<");
                        op("ROR-le-eq", "<=", "==");
                        break;
                    case BinaryOp::Eq: op("ROR-eq-ne", "==", "!="); break;
                    case BinaryOp::Gt: op("ROR-gt-ge", ">", ">="); break;
                    case BinaryOp::And: op("LCR-and-or", "&&", "||"); break;
                    case BinaryOp::Or: op("LCR-and-or", "||", "&&"); break;
                    default: break;
                }
                break;
            }
            default: break;
        }
        for (const auto& o : e.operands) expr(o);
    }

    const minic::SourceProgram& p_;
    std::vector<std::string> ints_;
    std::vector<std::string> arrays_;
};

}  // namespace

std::vector<Mutant> enumerate_mutants(const minic::SourceProgram& p, std::string_view fn,
                                      std::vector<std::string>* dropped) {
    const int root = p.find_function(fn);
    if (root < 0) throw UnknownFunction(std::string(fn));
    std::vector<Site> sites;
    for (int fi : minic::reachable_functions(p, root)) {
        const auto& f = p.functions()[static_cast<std::size_t>(fi)];
        Collector c(p, f);
        c.stmt(f.body);
        sites.insert(sites.end(), c.sites.begin(), c.sites.end());
    }
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.key() < b.key(); });
    sites.erase(std::unique(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.key() == b.key(); }),
                sites.end());

    const std::string base = minic::render(p);
    bool trailing = false;
    const auto lines = history::split_lines(base, &trailing);
    std::vector<Mutant> out;
    std::set<std::string> texts;
    int cur_line = 0;
    int ordinal = 0;
    int last_col = 0;
    for (const auto& s : sites) {
        if (s.line != cur_line) {
            cur_line = s.line;
            ordinal = 0;
            last_col = 0;
        }
        if (s.col != last_col) {
            ++ordinal;
            last_col = s.col;
        }
        auto edited = lines;
        std::string& line = edited[static_cast<std::size_t>(s.line - 1)];
        const auto from = static_cast<std::size_t>(s.col - 1);
        const auto len = static_cast<std::size_t>(s.end_col - s.col);
        Mutant m;
        m.op = s.op;
        m.line = s.line;
        m.col = s.col;
        m.ordinal = ordinal;
        m.original = line.substr(from, len);
        m.replacement = s.replacement;
        line.replace(from, len, s.replacement);
        for (std::size_t i = 0; i < edited.size(); ++i) {
            m.text += edited[i];
            if (i + 1 < edited.size() || trailing) m.text += "\n";
        }
        try {
            m.program = minic::load_program(m.text);
        } catch (const Error& e) {
            if (dropped)
                dropped->push_back(m.op + " @ " + std::to_string(m.line) + ":" + std::to_string(m.col) + " ('" +
                                   m.original + "' -> '" + m.replacement + "'): " + e.what());
            continue;
        }
        if (minic::structurally_equal(m.program, p)) {
            if (dropped)
                dropped->push_back(m.op + " @ " + std::to_string(m.line) + ":" + std::to_string(m.col) +
                                   ": no change");
            continue;
        }
        // e.g. 1 -> 0 is both a decrement and a zeroing; keep the first
        if (!texts.insert(m.text).second) {
            if (dropped)
                dropped->push_back(m.op + " @ " + std::to_string(m.line) + ":" + std::to_string(m.col) +
                                   ": same text as an earlier mutant");
            continue;
        }
        out.push_back(std::move(m));
    }
    return out;
}

Mutant pick_mutant(const minic::SourceProgram& p, std::string_view fn, std::uint64_t seed) {
    auto all = enumerate_mutants(p, fn);
    if (all.empty()) throw NoApplicableMutant();
    std::mt19937_64 g(seed);
    return std::move(all[rng::uniform_below(g, all.size())]);
}

std::string header_comment(const Mutant& m) {
    return "// mutant: " + m.op + " @ line " + std::to_string(m.line);
}

}  // namespace regkit::mutate
