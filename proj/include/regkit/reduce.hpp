#pragma once

#include "regkit/exec.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace regkit::reduce {

enum class Strategy { None, ILP, FastPP, DIFF };
const char* to_string(Strategy s);
/// Accepts none, ilp, fast++ / fastpp, diff (case-insensitive).
Strategy parse_strategy(std::string_view s);

struct ReductionResult {
    std::vector<std::string> selected;  // in selection order
    Strategy strategy = Strategy::None;
    std::uint64_t candidates = 0;  // search nodes (ILP), draws (FAST++), rounds (DIFF)
    double millis = 0;
};

/// Throws UncoverableGoal listing every goal no test covers.
void require_coverable(const exec::CoverageMatrix& m);

/// The same matrix without the goals no test covers; their ids go to `dropped`.
exec::CoverageMatrix drop_uncovered(const exec::CoverageMatrix& m, std::vector<std::string>* dropped = nullptr);

/// Minimum-cardinality cover. Among the minimum ones, the smallest sequence
/// of row indices; `selected` lists the rows in matrix order.
ReductionResult reduce_ilp(const exec::CoverageMatrix& m);

/// The set-cover integer program as text: objective, one clause per goal.
std::string ilp_clauses(const exec::CoverageMatrix& m);

/// Ascending distinct integers appearing anywhere in the suite's inputs.
std::vector<std::int32_t> value_alphabet(const exec::TestSuite& suite);
/// Occurrence count of each alphabet value in t's inputs.
std::vector<int> frequency_vector(const exec::TestCase& t, const std::vector<std::int32_t>& alphabet);

/// Random-projection farthest-point style selection. `suite` must contain
/// every test id of the matrix.
ReductionResult reduce_fastpp(const exec::CoverageMatrix& m, const exec::TestSuite& suite, std::uint64_t seed,
                              int dims = 3);

/// Greedy: the test with the most still-uncovered goals, ties to the earlier row.
ReductionResult reduce_diff(const exec::CoverageMatrix& m);

/// Dispatch; None returns every test in matrix order.
ReductionResult reduce(Strategy s, const exec::CoverageMatrix& m, const exec::TestSuite& suite, std::uint64_t seed,
                       int dims = 3);

/// Goals covered by at least one of the named tests.
std::vector<std::string> covered_goals(const exec::CoverageMatrix& m, const std::vector<std::string>& tests);

}  // namespace regkit::reduce
