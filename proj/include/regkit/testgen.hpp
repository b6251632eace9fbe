#pragma once

#include "regkit/cfa.hpp"
#include "regkit/exec.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace regkit::testgen {

struct InputDomain {
    std::int32_t lo = -8;  // scalar parameters
    std::int32_t hi = 8;
    int min_len = 0;  // array lengths
    int max_len = 4;
    std::int32_t elem_lo = -8;  // array elements
    std::int32_t elem_hi = 8;

    /// Throws regkit::Error on empty or inverted ranges.
    void validate() const;
    /// Number of candidate inputs for these parameter kinds (saturates at UINT64_MAX).
    std::uint64_t size(const std::vector<minic::VarKind>& params) const;

    friend bool operator==(const InputDomain&, const InputDomain&) = default;
};

std::string to_string(const InputDomain& d);

/// Walks every input of a domain in canonical order: array-length vectors by
/// ascending total length then lexicographically, and within one length
/// vector all values lexicographically (first position most significant).
class CandidateEnumerator {
public:
    CandidateEnumerator(std::vector<minic::VarKind> params, const InputDomain& dom);

    /// Advances to the next candidate; the first call yields the first one.
    bool next();
    const std::vector<exec::Value>& current() const { return values_; }
    /// Number of candidates produced so far.
    std::uint64_t produced() const { return produced_; }

private:
    void load_lengths();

    std::vector<minic::VarKind> params_;
    InputDomain dom_;
    std::vector<std::vector<int>> length_vectors_;
    std::size_t length_index_ = 0;
    struct Position {
        std::size_t param;
        std::size_t element;  // unused for scalars
        std::int32_t lo, hi;
    };
    std::vector<Position> positions_;
    std::vector<exec::Value> values_;
    bool started_ = false;
    bool done_ = false;
    std::uint64_t produced_ = 0;
};

enum class Exhaustion { None, DomainExhausted, StepBudget };
const char* to_string(Exhaustion e);

/// Assume-sequences already used for one goal, each truncated right after
/// the goal edge was first traversed.
using PathSet = std::set<std::vector<int>>;

struct BlockedPathSet {
    std::map<std::string, PathSet> per_goal;
};

inline constexpr std::uint64_t kDefaultBudget = 2'000'000;

struct GeneratedTest {
    exec::TestCase test;
    std::vector<int> path;
    std::uint64_t work = 0;  // candidates examined up to and including this one
};

struct SearchResult {
    std::vector<GeneratedTest> tests;
    Exhaustion reason = Exhaustion::None;  // why fewer than requested were found
    std::uint64_t work = 0;                // candidate executions in total
};

/// Generator over one program and a set of target edges: a candidate
/// qualifies if it traverses any target, and its path is the assume
/// prefix up to the first target reached.
class Generator {
public:
    Generator(const cfa::ProgramCfa& c, std::string_view fn, const InputDomain& dom, exec::Limits limits = {});

    SearchResult find(const std::vector<cfa::TestGoal>& targets, std::size_t n, const PathSet& blocked,
                      std::uint64_t budget = kDefaultBudget, const std::string& id_prefix = "t");

    exec::Interpreter& interpreter() { return interp_; }

private:
    const cfa::ProgramCfa& cfa_;
    const minic::FunctionDef& fn_;
    InputDomain dom_;
    exec::Interpreter interp_;
};

/// First qualifying candidate for goal, or none with the exhaustion reason.
SearchResult find_test(const cfa::ProgramCfa& c, std::string_view fn, const cfa::TestGoal& goal,
                       const InputDomain& dom, const PathSet& blocked = {}, std::uint64_t budget = kDefaultBudget,
                       exec::Limits limits = {});

/// Up to n tests with pairwise distinct paths (and therefore distinct inputs).
SearchResult find_n_tests(const cfa::ProgramCfa& c, std::string_view fn, const cfa::TestGoal& goal,
                          const InputDomain& dom, std::size_t n, std::uint64_t budget = kDefaultBudget,
                          exec::Limits limits = {});

struct BranchSuite {
    exec::TestSuite suite;
    exec::CoverageMatrix matrix;
    std::map<std::string, Exhaustion> uncovered;  // goal id -> reason
    std::uint64_t work = 0;
};

/// Greedy branch coverage: target the first uncovered goal, keep the test,
/// mark everything its run covers, repeat. A program without branches gets
/// the first input that returns normally.
BranchSuite cover_branches(const cfa::ProgramCfa& c, std::string_view fn, const InputDomain& dom,
                           std::uint64_t budget = kDefaultBudget, exec::Limits limits = {});
BranchSuite cover_branches(const minic::SourceProgram& p, std::string_view fn, const InputDomain& dom,
                           std::uint64_t budget = kDefaultBudget, exec::Limits limits = {});

}  // namespace regkit::testgen
