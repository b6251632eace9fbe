#include "doctest.h"

#include "regkit/cfa.hpp"
#include "regkit/error.hpp"
#include "support/fixtures.hpp"
#include "support/random_program.hpp"

#include <map>
#include <queue>

using namespace regkit;
using namespace regkit::cfa;

namespace {

int count_kind(const ProgramCfa& c, EdgeKind k) {
    int n = 0;
    for (const auto& e : c.edges())
        if (e.kind == k) ++n;
    return n;
}

void check_structure(const ProgramCfa& c, bool expect_connected) {
    for (const auto& f : c.functions()) {
        for (int n : f.nodes) {
            const auto& out = c.out_edges(n);
            if (n == f.exit) {
                CHECK(out.empty());
                continue;
            }
            REQUIRE(!out.empty());
            const bool assume = c.edge(out[0]).kind == EdgeKind::Assume;
            if (assume) {
                REQUIRE(out.size() == 2);
                const Edge& t = c.edge(out[0]);
                const Edge& fl = c.edge(out[1]);
                CHECK(t.polarity);
                CHECK_FALSE(fl.polarity);
                CHECK(fl.kind == EdgeKind::Assume);
                CHECK(t.partner == fl.id);
                CHECK(fl.partner == t.id);
                CHECK(t.expr == fl.expr);
            } else {
                CHECK(out.size() == 1);
            }
        }
        if (!expect_connected) continue;
        std::set<int> seen{f.entry};
        std::queue<int> q;
        q.push(f.entry);
        while (!q.empty()) {
            const int n = q.front();
            q.pop();
            for (int e : c.out_edges(n))
                if (seen.insert(c.edge(e).to).second) q.push(c.edge(e).to);
        }
        CHECK(seen.size() == f.nodes.size());
    }
}

}  // namespace

TEST_CASE("running example has three branch pairs") {
    const ProgramCfa c(testing::find_last_history().version(1));
    const auto goals = branch_goals(c, "find_last");
    REQUIRE(goals.size() == 6);
    CHECK(goals[0].id == "g1");
    CHECK(goals[0].line == 2);
    CHECK(c.edge(goals[0].edge).polarity);
    CHECK(goals[1].line == 2);
    CHECK_FALSE(c.edge(goals[1].edge).polarity);
    CHECK(goals[2].line == 5);
    CHECK(goals[4].line == 6);
    for (const auto& g : goals) CHECK(g.kind == GoalKind::Branch);
    check_structure(c, true);
}

TEST_CASE("straight-line and empty functions have no branch goals") {
    CHECK(branch_goals(ProgramCfa(minic::load_program("int f(int a) { int b = a + 1; return b; }")), "f").empty());
    CHECK(branch_goals(ProgramCfa(minic::load_program("void f() { }")), "f").empty());
}

TEST_CASE("single-if program") {
    const ProgramCfa c(minic::load_program(testing::single_if_text()));
    CHECK(branch_goals(c, "f").size() == 2);
    CHECK(count_kind(c, EdgeKind::Return) == 1);
    check_structure(c, true);
}

TEST_CASE("goal ids are stable across builds") {
    const auto& p = testing::find_last_history().version(2);
    CHECK(branch_goals(ProgramCfa(p), "find_last") == branch_goals(ProgramCfa(p), "find_last"));
}

TEST_CASE("short-circuit conditions become nested pairs") {
    const ProgramCfa c(minic::load_program(
        "int f(int a, int b) {\n  if (a > 0 && b > 0)\n    return 1;\n  if (a < 0 || !(b < 0 && a == 0))\n    return 2;\n  return 3;\n}\n"));
    const auto goals = branch_goals(c, "f");
    CHECK(goals.size() == 10);
    check_structure(c, true);
}

TEST_CASE("every statement line has an edge") {
    const auto& p = testing::find_last_history().version(3);
    const ProgramCfa c(p);
    std::set<int> lines;
    for (const auto& e : c.edges()) lines.insert(e.line);
    for (int l : {2, 3, 4, 5, 6, 7, 8}) CHECK(lines.count(l) == 1);
    for (const auto& e : c.edges()) {
        CHECK(e.line >= 1);
        CHECK(e.line <= p.line_count());
    }
}

TEST_CASE("label goal lands in front of the line's first edge") {
    ProgramCfa c(testing::find_last_history().version(3));
    const auto before = branch_goals(c, "find_last");
    std::vector<int> ignored;
    const auto goals = insert_label_goals(c, "find_last", {6}, &ignored);
    REQUIRE(goals.size() == 1);
    CHECK(goals[0].id == "L6");
    CHECK(goals[0].kind == GoalKind::ModificationLabel);
    CHECK(ignored.empty());
    const Edge& label = c.edge(goals[0].edge);
    CHECK(label.kind == EdgeKind::Label);
    // the label leads straight into the line-6 condition
    const auto& out = c.out_edges(label.to);
    REQUIRE(out.size() == 2);
    CHECK(c.edge(out[0]).kind == EdgeKind::Assume);
    CHECK(c.edge(out[0]).line == 6);
    // and nothing bypasses it
    for (const auto& e : c.edges())
        if (e.id != label.id) CHECK(e.to != label.to);
    CHECK(branch_goals(c, "find_last") == before);
    check_structure(c, true);

    CHECK(insert_label_goals(c, "find_last", {}).empty());
    CHECK(insert_label_goals(c, "find_last", {6}) == goals);
}

TEST_CASE("lines without edges are ignored and reported") {
    ProgramCfa c(testing::find_last_history().version(3));
    std::vector<int> ignored;
    const auto goals = insert_label_goals(c, "find_last", {0, 5, 42}, &ignored);
    REQUIRE(goals.size() == 1);
    CHECK(goals[0].id == "L5");
    CHECK(ignored == std::vector<int>{0, 42});
}

TEST_CASE("labels on the first line of a function move the entry") {
    ProgramCfa c(minic::load_program("int f(int a) {\n  int b = a;\n  while (b > 0)\n    b--;\n  return b;\n}\n"));
    const auto goals = insert_label_goals(c, "f", {2, 3});
    REQUIRE(goals.size() == 2);
    CHECK(c.edge(goals[0].edge).from == c.function("f").entry);
    check_structure(c, true);
}

TEST_CASE("labels reach callees") {
    ProgramCfa c(minic::load_program("int g(int a) {\n  return a + 1;\n}\nint f(int a) {\n  return g(a);\n}\n"));
    const auto goals = insert_label_goals(c, "f", {2});
    REQUIRE(goals.size() == 1);
    CHECK(c.edge(goals[0].edge).function == 0);
    std::vector<int> ignored;
    ProgramCfa c2(minic::load_program("int g(int a) {\n  return a + 1;\n}\nint f(int a) {\n  return a;\n}\n"));
    CHECK(insert_label_goals(c2, "f", {2}, &ignored).empty());
    CHECK(ignored == std::vector<int>{2});
}

TEST_CASE("dead code still gets edges") {
    ProgramCfa c(minic::load_program("int f(int a) {\n  return a;\n  a = 2;\n}\n"));
    const auto goals = insert_label_goals(c, "f", {3});
    REQUIRE(goals.size() == 1);
    check_structure(c, false);
}

TEST_CASE("random programs satisfy the automaton invariants") {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        CAPTURE(seed);
        testing::RandomProgram gen(seed);
        const std::string text = gen.generate();
        CAPTURE(text);
        ProgramCfa c(minic::load_program(text));
        check_structure(c, true);
        const auto goals = branch_goals(c, "f");
        std::size_t assumes = 0;
        for (int fn : minic::reachable_functions(c.program(), c.program().find_function("f")))
            for (int e : c.function(fn).edges)
                if (c.edge(e).kind == EdgeKind::Assume) ++assumes;
        CHECK(assumes % 2 == 0);
        CHECK(goals.size() == assumes);
        std::set<std::string> ids;
        for (const auto& g : goals) ids.insert(g.id);
        CHECK(ids.size() == goals.size());
        std::set<int> lines;
        for (int l = 1; l <= c.program().line_count(); ++l) lines.insert(l);
        insert_label_goals(c, "f", lines);
        check_structure(c, true);
        CHECK(branch_goals(c, "f") == goals);
    }
}

TEST_CASE("dot output") {
    ProgramCfa c(testing::find_last_history().version(3));
    insert_label_goals(c, "find_last", {6});
    const std::string dot = to_dot(c, "find_last");
    CHECK(dot.rfind("digraph \"find_last\" {", 0) == 0);
    CHECK(dot.find("L6 ") != std::string::npos);
    CHECK(dot.find("g1 ") != std::string::npos);
    CHECK_THROWS_AS(to_dot(c, "nope"), UnknownFunction);
}
