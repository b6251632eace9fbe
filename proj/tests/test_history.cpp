#include "doctest.h"

#include "regkit/error.hpp"
#include "regkit/history.hpp"
#include "regkit/rng.hpp"
#include "support/fixtures.hpp"

#include <fstream>
#include <random>

using namespace regkit;
using namespace regkit::history;

namespace {

std::string line_of(const std::string& text, int line) { return split_lines(text).at(static_cast<std::size_t>(line - 1)); }

// Random multi-hunk patch against `text`; keeps at least one line in the result.
Patch random_patch(std::mt19937_64& g, const std::vector<std::string>& lines) {
    Patch p;
    int at = 1;
    const int n = static_cast<int>(lines.size());
    while (at <= n + 1) {
        at += static_cast<int>(rng::uniform_below(g, 4));
        if (at > n + 1) break;
        Hunk h;
        h.old_line = at;
        const int max_remove = std::min(2, n - at + 1);
        const int removed = max_remove > 0 ? static_cast<int>(rng::uniform_below(g, static_cast<std::uint64_t>(max_remove + 1))) : 0;
        for (int r = 0; r < removed; ++r) h.removed.push_back(lines[static_cast<std::size_t>(at - 1 + r)]);
        const int added = static_cast<int>(rng::uniform_below(g, 3));
        for (int a = 0; a < added; ++a) h.added.push_back("new " + std::to_string(g() % 100));
        if (h.removed.empty() && h.added.empty()) h.added.push_back("filler");
        p.hunks.push_back(h);
        at += std::max(removed, 1);
    }
    return p;
}

}  // namespace

TEST_CASE("running example patches") {
    const auto& h = testing::find_last_history();
    REQUIRE(h.size() == 4);
    CHECK(line_of(h.text(1), 5) == "  for (int i=1; i <= x[0]-2; i++)");
    CHECK(line_of(h.text(2), 5) == "  for (int i=1; i <= x[0]-1; i++)");
    CHECK(line_of(h.text(3), 6) == "    if (x[i] == y)");
    CHECK(apply_patch(h.text(0), h.patch(1)) == h.text(1));
    CHECK(apply_patch(h.text(2), h.patch(3)) == h.text(3));
    CHECK(apply_patch(h.text(3), invert_patch(h.patch(3))) == h.text(2));
    CHECK(modified_lines(h.patch(1)).lines == std::set<int>{5});
    CHECK(modified_lines(h.patch(3)).lines == std::set<int>{6});
    CHECK(modified_lines(h.patch(3)).anchors.empty());
}

TEST_CASE("empty patch and inversion basics") {
    const std::string t = "a\nb\nc\n";
    CHECK(apply_patch(t, Patch{}) == t);
    CHECK(invert_patch(Patch{}) == Patch{});
    const auto& h = testing::find_last_history();
    for (std::size_t i = 1; i <= h.patch_count(); ++i) CHECK(invert_patch(invert_patch(h.patch(i))) == h.patch(i));
}

TEST_CASE("mismatch is reported with hunk and both lines") {
    Patch p;
    p.hunks.push_back({2, {"x"}, {"y"}});
    try {
        apply_patch("a\nb\nc\n", p);
        FAIL("expected PatchMismatch");
    } catch (const PatchMismatch& e) {
        CHECK(e.hunk() == 1);
        CHECK(e.expected() == "x");
        CHECK(e.actual() == "b");
    }
    Patch past_end;
    past_end.hunks.push_back({9, {"x"}, {}});
    CHECK_THROWS_AS(apply_patch("a\n", past_end), PatchMismatch);
}

TEST_CASE("invalid hunk layouts are rejected") {
    Patch overlap;
    overlap.hunks.push_back({2, {"b", "c"}, {"x"}});
    overlap.hunks.push_back({3, {"c"}, {"y"}});
    CHECK_THROWS_AS(validate(overlap), Error);
    Patch unsorted;
    unsorted.hunks.push_back({3, {"c"}, {"y"}});
    unsorted.hunks.push_back({1, {"a"}, {"x"}});
    CHECK_THROWS_AS(apply_patch("a\nb\nc\n", unsorted), Error);
    CHECK_THROWS_AS(parse_patch("-- a\n"), SyntaxError);
    CHECK_THROWS_AS(parse_patch("@ x\n"), SyntaxError);
    CHECK_THROWS_AS(parse_patch("@ 1\n++ a\n-- b\n"), SyntaxError);
    CHECK_THROWS_AS(parse_patch("@ 1\nhello\n"), SyntaxError);
}

TEST_CASE("multi-hunk application shifts later hunks") {
    const std::string t = "1\n2\n3\n4\n5\n";
    Patch p;
    p.hunks.push_back({1, {}, {"0a", "0b"}});
    p.hunks.push_back({3, {"3"}, {"three"}});
    p.hunks.push_back({5, {"5"}, {}});
    const std::string out = apply_patch(t, p);
    CHECK(out == "0a\n0b\n1\n2\nthree\n4\n");
    CHECK(apply_patch(out, invert_patch(p)) == t);
    const ModifiedLines m = modified_lines(p);
    CHECK(m.lines == std::set<int>{1, 2, 5});
    CHECK(m.anchors == std::set<int>{7});
    CHECK(format_patch(parse_patch(format_patch(p))) == format_patch(p));
    CHECK(parse_patch(format_patch(p)) == p);
}

TEST_CASE("pure deletion anchors to the following line") {
    const std::string t = "a\nb\nc\nd\n";
    Patch p;
    p.hunks.push_back({2, {"b", "c"}, {}});
    CHECK(apply_patch(t, p) == "a\nd\n");
    const ModifiedLines m = modified_lines(p);
    CHECK(m.lines.empty());
    CHECK(m.anchors == std::set<int>{2});
    CHECK(split_lines(apply_patch(t, p))[1] == "d");
    CHECK(map_line(p, 1) == 1);
    CHECK_FALSE(map_line(p, 2).has_value());
    CHECK(map_line(p, 4) == 2);
}

TEST_CASE("random patches round trip") {
    std::mt19937_64 g(17);
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<std::string> lines;
        const int n = 1 + static_cast<int>(rng::uniform_below(g, 8));
        for (int i = 0; i < n; ++i) lines.push_back("line " + std::to_string(g() % 5));
        std::string text;
        for (const auto& l : lines) text += l + "\n";
        const Patch p = random_patch(g, lines);
        const std::string patched = apply_patch(text, p);
        if (patched.empty()) continue;
        CAPTURE(format_patch(p));
        CHECK(apply_patch(patched, invert_patch(p)) == text);
        CHECK(invert_patch(invert_patch(p)) == p);
        // unmodified old lines map to identical new lines
        const auto new_lines = split_lines(patched);
        for (int l = 1; l <= n; ++l)
            if (auto m = map_line(p, l)) CHECK(new_lines.at(static_cast<std::size_t>(*m - 1)) == lines[static_cast<std::size_t>(l - 1)]);
        for (int l : modified_lines(p).lines) CHECK(l <= static_cast<int>(new_lines.size()));
    }
}

TEST_CASE("reconstruct and modified_since") {
    const auto& h = testing::find_last_history();
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) CHECK(h.reconstruct(i, j) == h.text(j));
    CHECK(h.modified_since(3, 2) == std::set<int>{6});
    CHECK(h.modified_since(2, 1) == std::set<int>{5});
    CHECK(h.modified_since(3, 1) == std::set<int>{5, 6});
    CHECK(h.modified_since(3, 0) == std::set<int>{5, 6});
    CHECK_THROWS_AS(h.reconstruct(1, 2), Error);
}

TEST_CASE("line maps compose through insertions") {
    const std::string base = "int f(int a) {\n  return a;\n}\n";
    Patch p1;  // change line 2
    p1.hunks.push_back({2, {"  return a;"}, {"  return a + 1;"}});
    Patch p2;  // insert above it
    p2.hunks.push_back({2, {}, {"  a = a * 2;"}});
    VersionHistory h("composed", base, {p1, p2});
    CHECK(h.modified_since(2, 1) == std::set<int>{2});
    CHECK(h.modified_since(2, 0) == std::set<int>{2, 3});
}

TEST_CASE("loading fails loudly") {
    const auto dir = std::filesystem::temp_directory_path() / "regkit_history_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "p0.mc") << "int f(int a) {\n  return a;\n}\n";
        std::ofstream(dir / "patch1.diff") << "@ 2\n--   return a;\n++   return a +;\n";
    }
    CHECK_THROWS_AS(VersionHistory::load(dir), Error);
    {
        std::ofstream(dir / "patch1.diff") << "@ 2\n--   return b;\n++   return a;\n";
    }
    CHECK_THROWS_AS(VersionHistory::load(dir), Error);
    {
        std::ofstream(dir / "patch1.diff") << "# ok\n@ 2\n--   return a;\n++   return a + 1;\n";
    }
    const VersionHistory h = VersionHistory::load(dir);
    CHECK(h.size() == 2);
    CHECK(h.name() == "regkit_history_test");
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(VersionHistory::load(dir), Error);
}
