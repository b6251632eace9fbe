#pragma once

#include "regkit/cfa.hpp"
#include "regkit/minic.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace regkit::exec {

using IntArray = std::vector<std::int32_t>;
using Value = std::variant<std::int32_t, IntArray>;

struct Binding {
    std::string name;
    Value value;

    friend bool operator==(const Binding&, const Binding&) = default;
};

struct TestCase {
    std::string id;
    std::vector<Binding> bindings;

    std::vector<Value> inputs() const;
    /// Equality of the input values only (ids ignored).
    bool same_inputs(const TestCase& other) const;
};

using TestSuite = std::vector<TestCase>;

/// `x=[3,5,5,3]; y=4`
std::string format_bindings(const std::vector<Binding>& b);
/// Builds a test from positional values named after the function's parameters.
TestCase make_test(std::string id, const minic::FunctionDef& f, const std::vector<Value>& values);

enum class OutcomeKind { Returned, VoidReturned, RuntimeError, StepLimitExceeded };
enum class ErrorClass { None, IndexOutOfBounds, DivByZero, RecursionLimit };

struct ObservedOutcome {
    OutcomeKind kind = OutcomeKind::VoidReturned;
    std::int32_t value = 0;                // Returned
    ErrorClass error = ErrorClass::None;   // RuntimeError
    std::vector<std::pair<std::string, std::int32_t>> globals;  // declaration order

    friend bool operator==(const ObservedOutcome&, const ObservedOutcome&) = default;
};

/// Kind, payload and globals (compared by name).
bool outcomes_equal(const ObservedOutcome& a, const ObservedOutcome& b);
std::string to_string(const ObservedOutcome& o);

struct Limits {
    std::uint64_t steps = 100000;
    int recursion = 64;
    // interpreter steps one search may spend over all its candidates; keeps
    // non-terminating mutants from costing steps * candidates
    std::uint64_t search_steps = 200'000'000;
};

struct ExecutionTrace {
    std::vector<int> assumes;          // assume edge ids in execution order
    std::set<int> edges;               // every edge traversed
    std::set<std::string> covered;     // goal ids, filled by run() when goals are given
    std::uint64_t steps = 0;
};

/// Reusable interpreter over a ProgramCfa; one instance per thread.
class Interpreter {
public:
    Interpreter(const cfa::ProgramCfa& program, std::string_view fn, Limits limits = {});

    /// Runs fn on positional inputs. The trace accessors below describe this run.
    const ObservedOutcome& run(const std::vector<Value>& inputs);

    const ObservedOutcome& outcome() const { return outcome_; }
    const std::vector<int>& assumes() const { return assumes_; }
    std::uint64_t steps() const { return steps_; }
    bool visited(int edge) const { return epoch_[static_cast<std::size_t>(edge)] == current_; }
    /// Length of the assume sequence right after the first traversal of edge.
    int first_visit(int edge) const { return first_[static_cast<std::size_t>(edge)]; }

    ExecutionTrace trace() const;
    const cfa::ProgramCfa& program() const { return *cfa_; }
    const Limits& limits() const { return limits_; }
    int function_index() const { return fn_; }

private:
    struct Slot {
        std::int32_t v = 0;
        IntArray* arr = nullptr;
    };

    bool call(int fn, Slot* frame, int depth, std::int32_t& result);
    std::int32_t eval(const minic::Expr& e, Slot* frame, int depth);
    void fail(ErrorClass c);
    bool traverse(int edge);
    Slot* var(const minic::VarRef& r, Slot* frame);

    const cfa::ProgramCfa* cfa_;
    int fn_;
    Limits limits_;

    std::vector<Slot> stack_;
    std::size_t sp_ = 0;
    std::vector<IntArray> args_;
    std::vector<Slot> globals_;

    ObservedOutcome outcome_;
    bool error_ = false;
    std::uint64_t steps_ = 0;
    std::vector<int> assumes_;
    std::vector<std::uint32_t> epoch_;
    std::vector<int> first_;
    std::uint32_t current_ = 0;
};

/// One-shot run. The trace's covered set is computed against the branch
/// goals of fn plus any label goals present in c.
std::pair<ObservedOutcome, ExecutionTrace> run(const cfa::ProgramCfa& c, std::string_view fn, const TestCase& t,
                                               Limits limits = {});
std::pair<ObservedOutcome, ExecutionTrace> run(const minic::SourceProgram& p, std::string_view fn,
                                               const TestCase& t, Limits limits = {});

/// Checks binding order and kinds against fn's parameters; throws SignatureMismatch.
void check_test(const minic::SourceProgram& p, std::string_view fn, const TestCase& t);
bool matches_signature(const minic::SourceProgram& p, std::string_view fn, const TestCase& t);

struct CoverageMatrix {
    std::vector<std::string> tests;
    std::vector<std::string> goals;
    std::vector<std::vector<std::uint8_t>> relation;  // tests x goals
    std::vector<std::string> uncoverable;              // goals no test covers

    bool covers(std::size_t test, std::size_t goal) const { return relation[test][goal] != 0; }
    void flag_uncoverable();
};

CoverageMatrix coverage_matrix(const cfa::ProgramCfa& c, std::string_view fn, const TestSuite& suite,
                               const std::vector<cfa::TestGoal>& goals, Limits limits = {});

}  // namespace regkit::exec
