#pragma once

#include "regkit/exec.hpp"
#include "regkit/history.hpp"
#include "regkit/minic.hpp"

#include <filesystem>
#include <string>

#ifndef REGKIT_CORPUS_DIR
#error "REGKIT_CORPUS_DIR must point at the shipped corpus"
#endif

namespace regkit::testing {

inline std::filesystem::path corpus_dir() { return REGKIT_CORPUS_DIR; }

inline const history::VersionHistory& find_last_history() {
    static const history::VersionHistory h = history::VersionHistory::load(corpus_dir() / "find_last");
    return h;
}

inline const char* single_if_text() {
    return "int f(int x) {\n"
           "  int r = x;\n"
           "  if (x < 0)\n"
           "    r = 0;\n"
           "  return r;\n"
           "}\n";
}

inline exec::TestCase find_last_test(std::string id, exec::IntArray x, std::int32_t y) {
    return {std::move(id), {{"x", std::move(x)}, {"y", y}}};
}

inline exec::TestCase t1() { return find_last_test("t1", {0}, 0); }
inline exec::TestCase t2() { return find_last_test("t2", {3, 5, 5, 3}, 4); }
inline exec::TestCase t3() { return find_last_test("t3", {1, 1, 1}, 2); }
inline exec::TestCase t4() { return find_last_test("t4", {1, 2, 2}, 0); }

}  // namespace regkit::testing
