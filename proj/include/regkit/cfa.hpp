#pragma once

#include "regkit/minic.hpp"

#include <set>
#include <string>
#include <vector>

namespace regkit::cfa {

enum class EdgeKind { Assume, Assign, Declare, Return, Call, Label, Skip };

const char* to_string(EdgeKind k);

struct Edge {
    int id = -1;
    int from = -1;
    int to = -1;
    EdgeKind kind = EdgeKind::Skip;
    int line = 0;
    int function = -1;
    bool polarity = true;                // Assume
    int partner = -1;                    // Assume: the complementary edge
    const minic::Expr* expr = nullptr;   // Assume condition, Return value, Call expression
    const minic::Stmt* stmt = nullptr;   // Assign, Declare
    std::string label;                   // Label
};

/// One function's automaton. Node and edge ids are global to the ProgramCfa.
struct Cfa {
    int function = -1;
    std::string name;
    int entry = -1;
    int exit = -1;
    std::vector<int> nodes;
    std::vector<int> edges;  // ids, in construction order
};

enum class GoalKind { Branch, ModificationLabel };

struct TestGoal {
    std::string id;  // g1, g2, ... or L<line>
    int edge = -1;
    GoalKind kind = GoalKind::Branch;
    int line = 0;

    friend bool operator==(const TestGoal&, const TestGoal&) = default;
};

/// Control-flow automata for every function of a program. Holds a copy of
/// the program so the expression pointers on the edges stay valid.
class ProgramCfa {
public:
    explicit ProgramCfa(minic::SourceProgram program);

    const minic::SourceProgram& program() const { return program_; }
    const Cfa& function(int index) const { return functions_.at(static_cast<std::size_t>(index)); }
    const Cfa& function(std::string_view name) const;
    const std::vector<Cfa>& functions() const { return functions_; }

    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int id) const { return edges_.at(static_cast<std::size_t>(id)); }
    int node_count() const { return node_count_; }

    /// Outgoing edge ids per node: one non-assume edge, or a true/false assume pair (true first).
    const std::vector<int>& out_edges(int node) const { return out_.at(static_cast<std::size_t>(node)); }

    /// Splices a label edge in front of the first edge of each line that
    /// belongs to fn or one of its callees. Lines with no edge in that
    /// range are returned in `ignored`.
    struct LabelResult {
        std::vector<TestGoal> goals;
        std::vector<int> ignored;
    };
    LabelResult insert_label_goals(std::string_view fn, const std::set<int>& lines);

    /// Label goals inserted so far.
    const std::vector<TestGoal>& label_goals() const { return labels_; }

private:
    friend class Builder;
    int add_node(Cfa& c);
    void rebuild_adjacency();

    minic::SourceProgram program_;
    std::vector<Cfa> functions_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> out_;
    std::vector<TestGoal> labels_;
    int node_count_ = 0;
};

/// Builds the automaton of one function (with every other function of the
/// program alongside, since calls are edges executed by the interpreter).
ProgramCfa build_cfa(const minic::SourceProgram& p);

/// One goal per assume edge of fn and its callees, ordered by line, then
/// construction order, then polarity (true first); ids g1..gn.
std::vector<TestGoal> branch_goals(const ProgramCfa& c, std::string_view fn);

/// Convenience wrapper around ProgramCfa::insert_label_goals.
std::vector<TestGoal> insert_label_goals(ProgramCfa& c, std::string_view fn, const std::set<int>& lines,
                                         std::vector<int>* ignored = nullptr);

/// Plain-text graph description (graphviz dot syntax).
std::string to_dot(const ProgramCfa& c, std::string_view fn);

std::string describe(const Edge& e);

}  // namespace regkit::cfa
