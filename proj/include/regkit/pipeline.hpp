#pragma once

#include "regkit/compare.hpp"
#include "regkit/exec.hpp"
#include "regkit/history.hpp"
#include "regkit/mutate.hpp"
#include "regkit/reduce.hpp"
#include "regkit/testgen.hpp"

#include <compare>
#include <memory>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace regkit::pipeline {

/// Where a revision's suite starts from.
enum class Carry { CR, NoCR, None };
const char* to_string(Carry c);

struct Strategy {
    compare::Mode rtc = compare::Mode::MT;
    int nrt = 1;
    int npr = 1;
    reduce::Strategy rs = reduce::Strategy::None;
    Carry cr = Carry::NoCR;

    /// `[MT,1,1,None,No-CR]`
    std::string name() const;
    bool valid() const;
    friend auto operator<=>(const Strategy&, const Strategy&) = default;
};

/// Parses the bracketed name produced by Strategy::name().
Strategy parse_strategy(std::string_view text);

/// Every valid strategy in ascending tuple order (144 of them).
std::vector<Strategy> enumerate_strategies();

inline const Strategy kBaseline1{compare::Mode::MT, 1, 1, reduce::Strategy::None, Carry::NoCR};
inline const Strategy kBaseline2{compare::Mode::MT, 1, 1, reduce::Strategy::None, Carry::None};

/// A version history plus the function under test.
struct Subject {
    history::VersionHistory history;
    std::string fn;
};

/// Loads a history directory. The function under test comes from an
/// optional `history.conf` (`function = <name>`), else the one function
/// nobody calls.
Subject load_subject(const std::filesystem::path& dir);

enum class MutantMode { Single, All };
const char* to_string(MutantMode m);

struct Config {
    testgen::InputDomain dom;
    std::uint64_t budget = testgen::kDefaultBudget;
    exec::Limits limits;
    std::vector<std::uint64_t> seeds{7};
    MutantMode mutants = MutantMode::Single;
    bool label_mutation_site = false;
    int fastpp_dims = 3;
    int jobs = 1;
};

/// 1 iff some test's outcome differs between the two versions. Throws SignatureMismatch.
int detects(const exec::TestSuite& t, const minic::SourceProgram& fixed, const minic::SourceProgram& bugged,
            std::string_view fn, exec::Limits limits = {});

/// Tests found for one (newer, older) version pair, up to the largest nrt.
struct PairJob {
    std::size_t older = 0;
    std::vector<exec::TestCase> tests;
    std::vector<std::uint64_t> work_at;  // work spent when tests[k] was found
    std::uint64_t total_work = 0;        // work of the whole search
    double millis = 0;
    std::string failure;  // invalid-comparator, empty-diff, no-label, or empty

    /// Work and time charged for asking only n tests.
    std::uint64_t work_for(std::size_t n) const;
    double millis_for(std::size_t n) const;
};

/// One version of one history with its bugged variant and the automaton
/// the revision's suites are measured on.
struct RevisionContext {
    std::size_t revision = 0;
    minic::SourceProgram fixed;   // P_i
    minic::SourceProgram bugged;  // B_i (P_0 at revision 0)
    std::string mutant;           // `<op> @ line L`, empty at revision 0
    std::shared_ptr<cfa::ProgramCfa> cfa;  // B_i with revision labels
    std::vector<cfa::TestGoal> goals;      // branch goals then labels
    std::map<std::pair<std::size_t, int>, PairJob> jobs;  // (older, rtc)
};

/// Builds B_i's context and runs every pair search the given strategies
/// can ask for. `mutant` is null at revision 0.
RevisionContext prepare_revision(const Subject& s, std::size_t i, const mutate::Mutant* mutant, const Config& cfg,
                                 const std::vector<Strategy>& strategies);

/// The record of one revision under one strategy.
struct RevisionRun {
    std::size_t revision = 0;
    std::string mutant;
    std::vector<std::string> inherited;   // ids carried over from revision i-1
    std::vector<exec::TestCase> added;    // generated here
    exec::TestSuite suite;                // T_i before reduction
    exec::TestSuite selected;             // T_i after reduction
    std::vector<std::string> covered_before;
    std::vector<std::string> covered_after;
    int detected = 0;
    std::uint64_t work = 0;
    double gen_ms = 0;
    double reduce_ms = 0;
    bool skipped = false;
    std::vector<std::string> notes;  // one per failed pair
};

/// One revision under strategy s: start from the previous suite
/// as the carry rule says, add up to nrt tests per older version, reduce.
RevisionRun generate_suite(const Strategy& s, const Subject& subj, const RevisionContext& ctx,
                           const exec::TestSuite& prev, const exec::TestSuite& prev_reduced, const Config& cfg,
                           std::uint64_t seed);

struct MetricsRecord {
    Strategy strategy;
    std::size_t n = 0;
    double effectiveness = 0;
    double eff_size = 0;
    double eff_cpu_ms = 0;
    std::uint64_t work_count = 0;
    std::optional<double> tradeoff_size;
    std::optional<double> tradeoff_cpu;  // bugs per second
    std::vector<std::string> skipped;
    MutantMode mode = MutantMode::Single;
};

struct RunSummary {
    int detected = 0;
    std::size_t size = 0;
    double cpu_ms = 0;
};

/// effectiveness, efficiency and trade-offs over non-skipped runs.
MetricsRecord compute_metrics(const Strategy& s, const std::vector<RunSummary>& runs);

struct ExperimentResult {
    std::vector<MetricsRecord> rows;               // sorted by strategy
    std::vector<std::vector<RevisionRun>> traces;  // parallel to rows when kept
};

ExperimentResult run_experiment(const std::vector<Subject>& subjects, const std::vector<Strategy>& strategies,
                                const Config& cfg, bool keep_traces = false);

std::string metrics_header();
std::string format_metrics_row(const MetricsRecord& r);
std::string format_metrics_csv(const std::vector<MetricsRecord>& rows);
/// Throws SyntaxError with the offending row number.
std::vector<MetricsRecord> parse_metrics_csv(std::string_view text);

/// Marginal means per parameter and best/worst strategies per metric.
std::string report(const std::vector<MetricsRecord>& rows);

}  // namespace regkit::pipeline
