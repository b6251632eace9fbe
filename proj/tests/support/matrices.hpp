#pragma once

#include "regkit/exec.hpp"
#include "regkit/io.hpp"
#include "support/fixtures.hpp"

#include <algorithm>
#include <random>

namespace regkit::testing {

inline exec::CoverageMatrix four_tests() { return io::parse_matrix_csv(io::read_file(corpus_dir() / "matrices" / "four_tests.csv")); }

inline exec::CoverageMatrix make(const std::vector<std::vector<int>>& rows, std::size_t goals) {
    exec::CoverageMatrix m;
    for (std::size_t g = 0; g < goals; ++g) m.goals.push_back("g" + std::to_string(g + 1));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        m.tests.push_back("t" + std::to_string(t + 1));
        std::vector<std::uint8_t> r(goals, 0);
        for (int g : rows[t]) r[static_cast<std::size_t>(g)] = 1;
        m.relation.push_back(r);
    }
    m.flag_uncoverable();
    return m;
}

inline exec::CoverageMatrix random_matrix(std::mt19937_64& g, std::size_t max_tests, std::size_t max_goals) {
    const std::size_t nt = 1 + g() % max_tests;
    const std::size_t ng = 1 + g() % max_goals;
    exec::CoverageMatrix m;
    for (std::size_t j = 0; j < ng; ++j) m.goals.push_back("g" + std::to_string(j + 1));
    for (std::size_t t = 0; t < nt; ++t) {
        m.tests.push_back("t" + std::to_string(t + 1));
        std::vector<std::uint8_t> r(ng);
        for (auto& c : r) c = (g() % 3 == 0) ? 1 : 0;
        m.relation.push_back(r);
    }
    // every goal gets at least one covering test
    for (std::size_t j = 0; j < ng; ++j) m.relation[g() % nt][j] = 1;
    m.flag_uncoverable();
    return m;
}

inline exec::TestSuite random_suite(std::mt19937_64& g, const exec::CoverageMatrix& m) {
    exec::TestSuite s;
    for (const auto& id : m.tests) {
        exec::IntArray x(g() % 4);
        for (auto& v : x) v = static_cast<std::int32_t>(g() % 7) - 3;
        s.push_back(find_last_test(id, x, static_cast<std::int32_t>(g() % 7) - 3));
    }
    return s;
}

inline std::size_t brute_min(const exec::CoverageMatrix& m) {
    const std::size_t n = m.tests.size();
    std::size_t best = n;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        bool ok = true;
        for (std::size_t g = 0; g < m.goals.size() && ok; ++g) {
            bool any = false;
            for (std::size_t t = 0; t < n; ++t) any = any || ((mask >> t) & 1 && m.covers(t, g));
            ok = any;
        }
        if (ok) best = std::min<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
    }
    return best;
}

}  // namespace regkit::testing
