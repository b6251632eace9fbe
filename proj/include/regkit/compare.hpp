#pragma once

#include "regkit/cfa.hpp"
#include "regkit/exec.hpp"
#include "regkit/testgen.hpp"

#include <set>
#include <string>
#include <vector>

namespace regkit::compare {

enum class Mode { MT, MR };
const char* to_string(Mode m);

struct ComparatorSpec {
    Mode mode = Mode::MT;
    minic::SourceProgram newer;  // P_i
    minic::SourceProgram older;  // P_j
    std::string fn;
    std::set<int> modified_lines;  // MT, in newer-version coordinates
};

struct LabelGoals {
    cfa::ProgramCfa cfa;  // the newer version with labels spliced in
    std::vector<cfa::TestGoal> goals;
    std::vector<int> ignored;
};

/// Label goals on the newer version's automaton. Throws EmptyDiff when
/// there are no modified lines.
LabelGoals mt_goals(const ComparatorSpec& spec);

struct DifferenceWitness {
    exec::TestCase test;
    exec::ObservedOutcome newer;
    exec::ObservedOutcome older;
    std::vector<int> path;   // full assume sequence in the newer version
    std::uint64_t work = 0;  // executions up to and including this witness
};

struct WitnessSearch {
    std::vector<DifferenceWitness> witnesses;
    testgen::Exhaustion reason = testgen::Exhaustion::None;
    std::uint64_t candidates = 0;
    std::uint64_t executions = 0;
};

/// Throws InvalidComparator when the two versions' signatures differ.
void check_comparable(const minic::SourceProgram& newer, const minic::SourceProgram& older, std::string_view fn);

/// Runs both versions over the canonical input order and keeps inputs whose
/// outcomes differ, at most one per newer-version path.
WitnessSearch mr_find_witnesses(const ComparatorSpec& spec, const testgen::InputDomain& dom, std::size_t n,
                                std::uint64_t budget = testgen::kDefaultBudget, exec::Limits limits = {});

/// True iff the outcomes on t differ. Throws SignatureMismatch.
bool differs_on(const minic::SourceProgram& pi, const minic::SourceProgram& pj, std::string_view fn,
                const exec::TestCase& t, exec::Limits limits = {});

/// `# differs: <older outcome> vs <newer outcome>`
std::string differs_comment(const DifferenceWitness& w);

}  // namespace regkit::compare
