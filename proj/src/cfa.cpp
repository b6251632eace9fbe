#include "regkit/cfa.hpp"

#include "regkit/error.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace regkit::cfa {

using minic::BinaryOp;
using minic::Expr;
using minic::ExprKind;
using minic::Stmt;
using minic::StmtKind;

const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Assume: return "assume";
        case EdgeKind::Assign: return "assign";
        case EdgeKind::Declare: return "declare";
        case EdgeKind::Return: return "return";
        case EdgeKind::Call: return "call";
        case EdgeKind::Label: return "label";
        case EdgeKind::Skip: return "skip";
    }
    return "?";
}

class Builder {
public:
    Builder(ProgramCfa& g, Cfa& c) : g_(g), c_(c) {}

    int node() { return g_.add_node(c_); }

    int edge(int from, int to, EdgeKind kind, int line) {
        Edge e;
        e.id = static_cast<int>(g_.edges_.size());
        e.from = from;
        e.to = to;
        e.kind = kind;
        e.line = line;
        e.function = c_.function;
        g_.edges_.push_back(std::move(e));
        c_.edges.push_back(g_.edges_.back().id);
        return g_.edges_.back().id;
    }

    Edge& at(int id) { return g_.edges_[static_cast<std::size_t>(id)]; }

    // Short-circuit operators become nested assume pairs.
    void cond(const Expr& e, int from, int on_true, int on_false) {
        if (e.kind == ExprKind::Binary && e.binary == BinaryOp::And) {
            const int mid = node();
            cond(e.operands[0], from, mid, on_false);
            cond(e.operands[1], mid, on_true, on_false);
            return;
        }
        if (e.kind == ExprKind::Binary && e.binary == BinaryOp::Or) {
            const int mid = node();
            cond(e.operands[0], from, on_true, mid);
            cond(e.operands[1], mid, on_true, on_false);
            return;
        }
        if (e.kind == ExprKind::Unary && e.unary == minic::UnaryOp::Not &&
            e.operands[0].kind == ExprKind::Binary &&
            (e.operands[0].binary == BinaryOp::And || e.operands[0].binary == BinaryOp::Or)) {
            cond(e.operands[0], from, on_false, on_true);
            return;
        }
        const int t = edge(from, on_true, EdgeKind::Assume, e.pos.line);
        const int f = edge(from, on_false, EdgeKind::Assume, e.pos.line);
        at(t).expr = &e;
        at(t).polarity = true;
        at(t).partner = f;
        at(f).expr = &e;
        at(f).polarity = false;
        at(f).partner = t;
    }

    // Returns the node where control continues after s, or -1 if it cannot.
    int stmt(const Stmt& s, int cur) {
        if (cur < 0) cur = node();  // dead code gets its own component
        switch (s.kind) {
            case StmtKind::Block:
                for (const auto& child : s.body) cur = stmt(child, cur);
                return cur;
            case StmtKind::Decl:
            case StmtKind::Assign: {
                const int next = node();
                const int id = edge(cur, next, s.kind == StmtKind::Decl ? EdgeKind::Declare : EdgeKind::Assign,
                                    s.pos.line);
                at(id).stmt = &s;
                return next;
            }
            case StmtKind::Call: {
                const int next = node();
                const int id = edge(cur, next, EdgeKind::Call, s.pos.line);
                at(id).expr = &*s.value;
                return next;
            }
            case StmtKind::Label: {
                const int next = node();
                const int id = edge(cur, next, EdgeKind::Label, s.pos.line);
                at(id).label = s.name;
                return next;
            }
            case StmtKind::Return: {
                const int id = edge(cur, c_.exit, EdgeKind::Return, s.pos.line);
                if (s.value) at(id).expr = &*s.value;
                return -1;
            }
            case StmtKind::If: {
                const int then_start = node();
                if (s.else_body.empty()) {
                    const int join = node();
                    cond(*s.value, cur, then_start, join);
                    const int then_end = stmt(s.body.front(), then_start);
                    if (then_end >= 0) edge(then_end, join, EdgeKind::Skip, s.end_line);
                    return join;
                }
                const int else_start = node();
                cond(*s.value, cur, then_start, else_start);
                const int then_end = stmt(s.body.front(), then_start);
                const int else_end = stmt(s.else_body.front(), else_start);
                if (then_end < 0 && else_end < 0) return -1;
                const int join = node();
                if (then_end >= 0) edge(then_end, join, EdgeKind::Skip, s.end_line);
                if (else_end >= 0) edge(else_end, join, EdgeKind::Skip, s.end_line);
                return join;
            }
            case StmtKind::While: {
                const int body_start = node();
                const int after = node();
                cond(*s.value, cur, body_start, after);
                const int body_end = stmt(s.body.front(), body_start);
                if (body_end >= 0) edge(body_end, cur, EdgeKind::Skip, s.end_line);
                return after;
            }
            case StmtKind::For: {
                int head = cur;
                if (!s.init.empty()) head = stmt(s.init.front(), cur);
                const int body_start = node();
                const int after = node();
                cond(*s.value, head, body_start, after);
                const int body_end = stmt(s.body.front(), body_start);
                if (body_end >= 0) {
                    if (!s.step.empty()) {
                        const Stmt& st = s.step.front();
                        const int id = edge(body_end, head, EdgeKind::Assign, st.pos.line);
                        at(id).stmt = &st;
                    } else {
                        edge(body_end, head, EdgeKind::Skip, s.end_line);
                    }
                }
                return after;
            }
        }
        return cur;
    }

    void function(const minic::FunctionDef& f) {
        c_.entry = node();
        c_.exit = node();
        const int end = stmt(f.body, c_.entry);
        // void functions fall off the end; int functions cannot (checked upstream)
        if (end >= 0)
            edge(end, c_.exit, f.ret == minic::ReturnKind::Void ? EdgeKind::Return : EdgeKind::Skip, f.last_line);
    }

private:
    ProgramCfa& g_;
    Cfa& c_;
};

ProgramCfa::ProgramCfa(minic::SourceProgram program) : program_(std::move(program)) {
    const auto& fns = program_.functions();
    functions_.resize(fns.size());
    for (std::size_t i = 0; i < fns.size(); ++i) {
        functions_[i].function = static_cast<int>(i);
        functions_[i].name = fns[i].name;
        Builder(*this, functions_[i]).function(fns[i]);
    }
    rebuild_adjacency();
}

int ProgramCfa::add_node(Cfa& c) {
    c.nodes.push_back(node_count_);
    return node_count_++;
}

void ProgramCfa::rebuild_adjacency() {
    out_.assign(static_cast<std::size_t>(node_count_), {});
    for (const auto& e : edges_) out_[static_cast<std::size_t>(e.from)].push_back(e.id);
    for (auto& list : out_) {
        if (list.size() == 2 && edges_[static_cast<std::size_t>(list[0])].kind == EdgeKind::Assume &&
            !edges_[static_cast<std::size_t>(list[0])].polarity)
            std::swap(list[0], list[1]);
    }
}

const Cfa& ProgramCfa::function(std::string_view name) const {
    for (const auto& c : functions_)
        if (c.name == name) return c;
    throw UnknownFunction(std::string(name));
}

ProgramCfa::LabelResult ProgramCfa::insert_label_goals(std::string_view fn, const std::set<int>& lines) {
    const int index = program_.find_function(fn);
    if (index < 0) throw UnknownFunction(std::string(fn));
    std::vector<int> fns = minic::reachable_functions(program_, index);

    // first edge created for each line, restricted to fn and its callees
    std::map<int, int> first_edge;
    for (int f : fns)
        for (int id : functions_[static_cast<std::size_t>(f)].edges)
            first_edge.emplace(edges_[static_cast<std::size_t>(id)].line, id);  // keeps the earliest

    LabelResult result;
    for (int line : lines) {
        auto it = first_edge.find(line);
        if (it == first_edge.end()) {
            result.ignored.push_back(line);
            continue;
        }
        const std::string id = "L" + std::to_string(line);
        bool exists = false;
        for (const auto& g : labels_)
            if (g.id == id) {
                result.goals.push_back(g);
                exists = true;
            }
        if (exists) continue;

        const int src = edges_[static_cast<std::size_t>(it->second)].from;
        const int fidx = edges_[static_cast<std::size_t>(it->second)].function;
        Cfa& c = functions_[static_cast<std::size_t>(fidx)];
        const int fresh = add_node(c);
        for (auto& e : edges_)
            if (e.to == src) e.to = fresh;
        if (c.entry == src) c.entry = fresh;
        Edge lab;
        lab.id = static_cast<int>(edges_.size());
        lab.from = fresh;
        lab.to = src;
        lab.kind = EdgeKind::Label;
        lab.line = line;
        lab.function = fidx;
        lab.label = id;
        edges_.push_back(lab);
        c.edges.push_back(lab.id);
        TestGoal g{id, lab.id, GoalKind::ModificationLabel, line};
        labels_.push_back(g);
        result.goals.push_back(g);
    }
    rebuild_adjacency();
    return result;
}

ProgramCfa build_cfa(const minic::SourceProgram& p) { return ProgramCfa(p); }

std::vector<TestGoal> branch_goals(const ProgramCfa& c, std::string_view fn) {
    const int index = c.program().find_function(fn);
    if (index < 0) throw UnknownFunction(std::string(fn));
    std::vector<int> ids;
    for (int f : minic::reachable_functions(c.program(), index))
        for (int id : c.function(f).edges)
            if (c.edge(id).kind == EdgeKind::Assume) ids.push_back(id);
    // pairs are created together, so sorting by (line, id of the true edge, polarity) works
    auto key = [&](int id) {
        const Edge& e = c.edge(id);
        const int pair_first = std::min(e.id, e.partner);
        return std::make_tuple(e.line, pair_first, e.polarity ? 0 : 1);
    };
    std::sort(ids.begin(), ids.end(), [&](int a, int b) { return key(a) < key(b); });
    std::vector<TestGoal> goals;
    for (std::size_t i = 0; i < ids.size(); ++i)
        goals.push_back({"g" + std::to_string(i + 1), ids[i], GoalKind::Branch, c.edge(ids[i]).line});
    return goals;
}

std::vector<TestGoal> insert_label_goals(ProgramCfa& c, std::string_view fn, const std::set<int>& lines,
                                         std::vector<int>* ignored) {
    auto r = c.insert_label_goals(fn, lines);
    if (ignored) *ignored = r.ignored;
    return r.goals;
}

std::string describe(const Edge& e) {
    switch (e.kind) {
        case EdgeKind::Assume:
            return std::string(e.polarity ? "[" : "[!(") + minic::expr_text(*e.expr) + (e.polarity ? "]" : ")]");
        case EdgeKind::Assign:
        case EdgeKind::Declare: {
            const Stmt& s = *e.stmt;
            std::string lhs = (e.kind == EdgeKind::Declare ? "int " : "") + s.name;
            if (s.index) lhs += "[" + minic::expr_text(*s.index) + "]";
            switch (s.op) {
                case minic::AssignOp::Set: return lhs + " = " + minic::expr_text(*s.value);
                case minic::AssignOp::AddSet: return lhs + " += " + minic::expr_text(*s.value);
                case minic::AssignOp::SubSet: return lhs + " -= " + minic::expr_text(*s.value);
                case minic::AssignOp::Inc: return lhs + "++";
                case minic::AssignOp::Dec: return lhs + "--";
            }
            return lhs;
        }
        case EdgeKind::Return: return e.expr ? "return " + minic::expr_text(*e.expr) : "return";
        case EdgeKind::Call: return minic::expr_text(*e.expr);
        case EdgeKind::Label: return e.label + ":";
        case EdgeKind::Skip: return "skip";
    }
    return "?";
}

std::string to_dot(const ProgramCfa& c, std::string_view fn) {
    const int index = c.program().find_function(fn);
    if (index < 0) throw UnknownFunction(std::string(fn));
    std::map<int, std::string> goal_of;
    for (const auto& g : branch_goals(c, fn)) goal_of[g.edge] = g.id;
    for (const auto& g : c.label_goals()) goal_of[g.edge] = g.id;

    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') out += '\\';
            out += ch;
        }
        return out + "\"";
    };

    std::ostringstream os;
    os << "digraph " << quote(std::string(fn)) << " {\n";
    for (int f : minic::reachable_functions(c.program(), index)) {
        const Cfa& cfa = c.function(f);
        os << "  subgraph " << quote("cluster_" + cfa.name) << " {\n";
        os << "    label=" << quote(cfa.name) << ";\n";
        for (int n : cfa.nodes) {
            os << "    n" << n;
            if (n == cfa.entry) os << " [shape=box,label=" << quote("entry " + std::to_string(n)) << "]";
            else if (n == cfa.exit) os << " [shape=doublecircle,label=" << quote("exit " + std::to_string(n)) << "]";
            os << ";\n";
        }
        for (int id : cfa.edges) {
            const Edge& e = c.edge(id);
            std::string text = "e" + std::to_string(e.id) + " l" + std::to_string(e.line) + ": " + describe(e);
            if (auto it = goal_of.find(e.id); it != goal_of.end()) text = it->second + " " + text;
            os << "    n" << e.from << " -> n" << e.to << " [label=" << quote(text) << "];\n";
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace regkit::cfa
