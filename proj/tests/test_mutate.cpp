#include "doctest.h"

#include "regkit/error.hpp"
#include "regkit/exec.hpp"
#include "regkit/history.hpp"
#include "regkit/mutate.hpp"
#include "support/fixtures.hpp"
#include "support/random_program.hpp"

#include <algorithm>
#include <set>

using namespace regkit;
using namespace regkit::mutate;

namespace {

int differing_lines(const std::string& a, const std::string& b) {
    const auto la = history::split_lines(a);
    const auto lb = history::split_lines(b);
    if (la.size() != lb.size()) return -1;
    int n = 0;
    for (std::size_t i = 0; i < la.size(); ++i) n += la[i] != lb[i];
    return n;
}

void check_invariants(const minic::SourceProgram& p, const std::vector<Mutant>& ms) {
    const std::string base = minic::render(p);
    std::set<std::string> ids;
    for (const auto& op : list_operators()) ids.insert(op.id);
    std::set<std::string> texts;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto& m = ms[i];
        CAPTURE(m.text);
        CHECK(texts.insert(m.text).second);
        CHECK(ids.count(m.op) == 1);
        CHECK(differing_lines(base, m.text) == 1);
        CHECK(history::split_lines(m.text)[static_cast<std::size_t>(m.line - 1)] !=
              history::split_lines(base)[static_cast<std::size_t>(m.line - 1)]);
        CHECK(minic::render(m.program) == m.text);
        CHECK_FALSE(minic::structurally_equal(m.program, p));
        if (i > 0) {
            const auto& a = ms[i - 1];
            CHECK(std::tie(a.line, a.col, a.op, a.replacement) < std::tie(m.line, m.col, m.op, m.replacement));
        }
    }
}

}  // namespace

TEST_CASE("operator catalog") {
    const auto& ops = list_operators();
    CHECK(ops.size() == 15);
    std::set<std::string> ids;
    std::set<Group> groups;
    for (const auto& o : ops) {
        ids.insert(o.id);
        groups.insert(o.group);
    }
    CHECK(ids.size() == ops.size());
    CHECK(ids.count("ROR-le-eq") == 1);
    CHECK(groups.size() == 3);
}

TEST_CASE("the last bug fix is one of the mutants of its predecessor") {
    const auto& h = testing::find_last_history();
    const auto ms = enumerate_mutants(h.version(2), "find_last");
    const auto hit = std::find_if(ms.begin(), ms.end(),
                                  [&](const Mutant& m) { return minic::structurally_equal(m.program, h.version(3)); });
    REQUIRE(hit != ms.end());
    CHECK(hit->op == "ROR-le-eq");
    CHECK(hit->line == 6);
    CHECK(hit->text == h.text(3));
    CHECK(header_comment(*hit) == "// mutant: ROR-le-eq @ line 6");
}

TEST_CASE("enumeration on the initial version") {
    const auto& p0 = testing::find_last_history().version(0);
    std::vector<std::string> dropped;
    const auto ms = enumerate_mutants(p0, "find_last", &dropped);
    CHECK(ms.size() >= 10);
    // pinned: a change here means the catalog or the site walk changed
    CHECK(ms.size() == 38);
    check_invariants(p0, ms);
    CHECK(enumerate_mutants(p0, "find_last").size() == ms.size());
    // every dropped candidate has a reason
    for (const auto& d : dropped) CHECK(d.find(" @ ") != std::string::npos);

    // an index shift can crash the program where the original does not
    bool crash = false;
    for (const auto& m : ms) {
        if (m.op != "ARR-idx-inc") continue;
        const auto o = exec::run(m.program, "find_last", testing::find_last_test("t", {3, 1}, 0)).first;
        crash = crash || o.kind == exec::OutcomeKind::RuntimeError;
    }
    CHECK(crash);
}

TEST_CASE("constant function") {
    const auto p = minic::load_program("int f() { return 1; }");
    const auto ms = enumerate_mutants(p, "f");
    // 1 -> 0 counts once
    REQUIRE(ms.size() == 2);
    CHECK(ms[0].op == "VAL-dec");
    CHECK(ms[0].replacement == "0");
    CHECK(ms[1].op == "VAL-inc");
    CHECK(ms[1].replacement == "2");
    const auto seven = enumerate_mutants(minic::load_program("int f() { return 7; }"), "f");
    REQUIRE(seven.size() == 3);
    CHECK(seven[2].op == "VAL-zero");
}

TEST_CASE("callees are mutated too, unreachable functions are not") {
    const auto p = minic::load_program(
        "int h(int a) {\n  return a + 1;\n}\n"
        "int unused(int a) {\n  return a * 2;\n}\n"
        "int f(int b) {\n  return h(b);\n}\n");
    const auto ms = enumerate_mutants(p, "f");
    CHECK(std::any_of(ms.begin(), ms.end(), [](const Mutant& m) { return m.op == "AOR-add-sub" && m.line == 2; }));
    CHECK(std::none_of(ms.begin(), ms.end(), [](const Mutant& m) { return m.line == 5; }));
    check_invariants(p, ms);
}

TEST_CASE("picking") {
    const auto& p0 = testing::find_last_history().version(0);
    const auto all = enumerate_mutants(p0, "find_last");
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto a = pick_mutant(p0, "find_last", seed);
        const auto b = pick_mutant(p0, "find_last", seed);
        CHECK(a.text == b.text);
        CHECK(std::any_of(all.begin(), all.end(), [&](const Mutant& m) { return m.text == a.text; }));
        seen.insert(a.text);
    }
    CHECK(seen.size() > 1);
    CHECK_THROWS_AS(pick_mutant(minic::load_program("void f() {\n}\n"), "f", 1), NoApplicableMutant);
    CHECK_THROWS_AS(enumerate_mutants(p0, "nope"), UnknownFunction);
}

TEST_CASE("mutants of random programs stay valid single-line edits") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        CAPTURE(seed);
        const auto p = minic::load_program(testing::RandomProgram(seed).generate());
        const auto ms = enumerate_mutants(p, "f");
        CHECK_FALSE(ms.empty());
        check_invariants(p, ms);
    }
}
