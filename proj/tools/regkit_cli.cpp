// regkit: command-line front end over the library.
// Exit codes: 0 ok, 1 domain error, 2 usage error.

#include "CLI11.hpp"

#include "regkit/cfa.hpp"
#include "regkit/compare.hpp"
#include "regkit/error.hpp"
#include "regkit/exec.hpp"
#include "regkit/history.hpp"
#include "regkit/io.hpp"
#include "regkit/minic.hpp"
#include "regkit/mutate.hpp"
#include "regkit/pipeline.hpp"
#include "regkit/reduce.hpp"
#include "regkit/testgen.hpp"

#include <iostream>
#include <optional>
#include <set>
#include <sstream>

using namespace regkit;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// file errors carry the path; parser positions come out as path:line:col
minic::SourceProgram load_source(const std::string& path) {
    const auto text = io::read_file(path);
    try {
        return minic::load_program(text);
    } catch (const SyntaxError& e) {
        throw Error(path + ":" + e.what());
    } catch (const ScopeError& e) {
        throw Error(path + ":" + e.what());
    } catch (const SemanticError& e) {
        throw Error(path + ":" + e.what());
    }
}

std::string pick_function(const minic::SourceProgram& p, const std::string& given) {
    if (!given.empty()) {
        p.function(given);
        return given;
    }
    if (auto e = minic::entry_function(p)) return *e;
    throw UsageError("cannot tell which function to use; pass --fn");
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        io::write_file(out_path, text);
}

std::set<int> to_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
    return out;
}

struct Common {
    testgen::InputDomain dom;
    std::uint64_t budget = testgen::kDefaultBudget;
    exec::Limits limits;
    std::string out;
};

void add_domain(CLI::App* sub, Common& c) {
    sub->add_option("--lo", c.dom.lo, "smallest scalar input")->capture_default_str();
    sub->add_option("--hi", c.dom.hi, "largest scalar input")->capture_default_str();
    sub->add_option("--min-len", c.dom.min_len, "shortest array input")->capture_default_str();
    sub->add_option("--max-len", c.dom.max_len, "longest array input")->capture_default_str();
    sub->add_option("--elem-lo", c.dom.elem_lo, "smallest array element")->capture_default_str();
    sub->add_option("--elem-hi", c.dom.elem_hi, "largest array element")->capture_default_str();
    sub->add_option("--budget", c.budget, "candidate inputs per search")->capture_default_str();
}

void add_limits(CLI::App* sub, Common& c) {
    sub->add_option("--max-steps", c.limits.steps, "interpreter step limit per run")->capture_default_str();
    sub->add_option("--max-depth", c.limits.recursion, "call depth limit")->capture_default_str();
}

void add_out(CLI::App* sub, Common& c) { sub->add_option("--out", c.out, "write data here instead of stdout"); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regkit: regression test generation, reduction and strategy experiments for MiniC"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file; keys as the flags, [subcommand] sections; flags win");
    app.set_help_all_flag("--help-all", "help for every subcommand");

    Common c;
    std::string file, fn;

    // parse
    auto* parse = app.add_subcommand("parse", "check a MiniC file and list its functions");
    parse->add_option("file", file, "MiniC source")->required();

    // cfa-dump
    std::vector<int> label_lines;
    bool goals_only = false;
    auto* dump = app.add_subcommand("cfa-dump", "print a function's control-flow automaton as graphviz dot");
    dump->add_option("file", file, "MiniC source")->required();
    dump->add_option("--fn", fn, "function (default: the one nobody calls)");
    dump->add_option("--labels", label_lines, "insert label goals before these lines")->delimiter(',');
    dump->add_flag("--goals", goals_only, "list the test goals instead of the graph");
    add_out(dump, c);

    // exec
    std::string test_text, suite_path;
    bool show_trace = false;
    auto* ex = app.add_subcommand("exec", "run tests and print their outcomes");
    ex->add_option("file", file, "MiniC source")->required();
    ex->add_option("--fn", fn, "function (default: the one nobody calls)");
    auto* opt_test = ex->add_option("--test", test_text, "inputs, e.g. 'x=[3,5,5,3]; y=4'");
    auto* opt_suite = ex->add_option("--suite", suite_path, "suite file");
    opt_test->excludes(opt_suite);
    ex->add_flag("--trace", show_trace, "also print the assume path and covered branch goals");
    add_limits(ex, c);
    add_out(ex, c);

    // testgen
    std::string goal_id;
    std::size_t n = 1;
    auto* tg = app.add_subcommand("testgen", "generate tests for a goal, label lines, or all branches");
    tg->add_option("file", file, "MiniC source")->required();
    tg->add_option("--fn", fn, "function (default: the one nobody calls)");
    auto* opt_goal = tg->add_option("--goal", goal_id, "branch goal id (see cfa-dump --goals)");
    auto* opt_lines = tg->add_option("--lines", label_lines, "target labels before these lines")->delimiter(',');
    opt_goal->excludes(opt_lines);
    tg->add_option("-n,--n", n, "tests wanted, with distinct paths")->capture_default_str()->check(
        CLI::Range(1, 1000000));
    add_domain(tg, c);
    add_limits(tg, c);
    add_out(tg, c);

    // compare
    std::string newer_path, older_path, mode_text = "mr", history_dir, patch_path;
    std::size_t rev = 0, older_rev = 0;
    auto* cmp = app.add_subcommand("compare", "regression tests for a version pair (mt: traverse changes, mr: reveal them)");
    cmp->add_option("--mode", mode_text, "mt or mr")->check(CLI::IsMember({"mt", "mr", "MT", "MR"}))->capture_default_str();
    auto* opt_new = cmp->add_option("--new", newer_path, "newer version");
    auto* opt_old = cmp->add_option("--old", older_path, "older version");
    auto* opt_hist = cmp->add_option("--history", history_dir, "history directory instead of --new/--old");
    auto* opt_rev = cmp->add_option("--rev", rev, "newer revision in --history");
    auto* opt_older = cmp->add_option("--older", older_rev, "older revision in --history (default rev-1)");
    auto* opt_clines = cmp->add_option("--lines", label_lines, "mt: modified lines of the newer version")->delimiter(',');
    auto* opt_patch = cmp->add_option("--patch", patch_path, "mt: take modified lines from this patch");
    opt_hist->excludes(opt_new)->excludes(opt_old)->excludes(opt_clines)->excludes(opt_patch);
    opt_rev->needs(opt_hist);
    opt_older->needs(opt_rev);
    opt_clines->excludes(opt_patch);
    cmp->add_option("--fn", fn, "function (default: the one nobody calls)");
    cmp->add_option("-n,--n", n, "tests wanted")->capture_default_str()->check(CLI::Range(1, 1000000));
    add_domain(cmp, c);
    add_limits(cmp, c);
    add_out(cmp, c);

    // reduce
    std::string matrix_path, strategy_text;
    std::uint64_t seed = 7;
    int dims = 3;
    bool emit_ilp = false;
    auto* red = app.add_subcommand("reduce", "reduce a suite given its coverage matrix");
    red->add_option("--matrix", matrix_path, "coverage matrix CSV")->required();
    red->add_option("--strategy", strategy_text, "none, ilp, fast++ or diff");
    red->add_option("--suite", suite_path, "suite file (fast++ encodes test inputs)");
    red->add_option("--seed", seed, "fast++ seed")->capture_default_str();
    red->add_option("--dims", dims, "fast++ projection dimensions")->capture_default_str()->check(CLI::PositiveNumber);
    red->add_flag("--emit-ilp", emit_ilp, "print the set-cover integer program instead of solving");
    add_out(red, c);

    // mutate
    bool list_ops = false, list_all = false;
    std::optional<std::uint64_t> mutant_seed;
    auto* mut = app.add_subcommand("mutate", "list operators, list mutants, or write one seeded mutant");
    mut->add_option("file", file, "MiniC source");
    mut->add_option("--fn", fn, "function (default: the one nobody calls)");
    auto* opt_list = mut->add_flag("--list", list_ops, "print the operator catalog");
    auto* opt_all = mut->add_flag("--all", list_all, "print every mutant of the file");
    auto* opt_mseed = mut->add_option("--seed", mutant_seed, "pick one mutant with this seed");
    opt_list->excludes(opt_all)->excludes(opt_mseed);
    opt_all->excludes(opt_mseed);
    add_out(mut, c);

    // run / experiment share these
    pipeline::Config pc;
    std::vector<std::string> histories, strategy_names;
    std::vector<std::uint64_t> seeds;
    bool all_strategies = false, all_mutants = false, label_site = false;

    auto* run = app.add_subcommand("run", "one strategy over one history, revision by revision");
    run->add_option("--history", history_dir, "history directory")->required();
    run->add_option("--strategy", strategy_text, "e.g. '[MT,1,1,None,No-CR]'")->required();
    run->add_option("--seed", seed, "mutant and reduction seed")->capture_default_str();
    run->add_flag("--all-mutants", all_mutants, "evaluate every mutant per revision");
    run->add_flag("--label-mutation-site", label_site, "also label the mutated line");
    run->add_option("--dims", dims, "fast++ projection dimensions")->capture_default_str()->check(CLI::PositiveNumber);
    add_domain(run, c);
    add_limits(run, c);
    add_out(run, c);

    int jobs = 1;
    auto* exp = app.add_subcommand("experiment", "strategies x histories x seeds, one metrics row per strategy");
    exp->add_option("--history", histories, "history directory (repeatable)")->required()->allow_extra_args(false);
    auto* opt_allst = exp->add_flag("--all-strategies", all_strategies, "all 144 strategies");
    // one value per flag; otherwise CLI11 reads [a,b] as a list
    auto* opt_st = exp->add_option("--strategy", strategy_names, "strategy (repeatable)")->allow_extra_args(false);
    opt_allst->excludes(opt_st);
    exp->add_option("--seed", seeds, "seed (repeatable; default 7)")->allow_extra_args(false);
    exp->add_option("--jobs", jobs, "worker threads; results do not depend on it")->capture_default_str()->check(
        CLI::PositiveNumber);
    exp->add_flag("--all-mutants", all_mutants, "evaluate every mutant per revision");
    exp->add_flag("--label-mutation-site", label_site, "also label the mutated line");
    exp->add_option("--dims", dims, "fast++ projection dimensions")->capture_default_str()->check(CLI::PositiveNumber);
    add_domain(exp, c);
    add_limits(exp, c);
    add_out(exp, c);

    std::string metrics_path;
    auto* rep = app.add_subcommand("report", "marginal tables and best/worst strategies from a metrics CSV");
    rep->add_option("metrics", metrics_path, "metrics CSV")->required();
    add_out(rep, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        c.dom.validate();

        if (*parse) {
            const auto p = load_source(file);
            for (const auto& f : p.functions())
                std::cout << minic::to_string(minic::signature_of(p, f.name)) << "\n";
            return 0;
        }

        if (*dump) {
            const auto p = load_source(file);
            const auto f = pick_function(p, fn);
            cfa::ProgramCfa cf(p);
            std::vector<int> ignored;
            auto goals = cfa::branch_goals(cf, f);
            for (auto& g : cfa::insert_label_goals(cf, f, to_set(label_lines), &ignored)) goals.push_back(g);
            for (int l : ignored) std::cerr << "line " << l << ": no statement, label ignored\n";
            if (goals_only) {
                std::string text;
                for (const auto& g : goals)
                    text += g.id + " line " + std::to_string(g.line) + " edge " + std::to_string(g.edge) + " " +
                            cfa::describe(cf.edge(g.edge)) + "\n";
                emit(c.out, text);
            } else {
                emit(c.out, cfa::to_dot(cf, f));
            }
            return 0;
        }

        if (*ex) {
            const auto p = load_source(file);
            const auto f = pick_function(p, fn);
            exec::TestSuite suite;
            if (!test_text.empty())
                suite = io::parse_suite("test t: " + test_text + "\n");
            else if (!suite_path.empty())
                suite = io::parse_suite(io::read_file(suite_path));
            else
                throw UsageError("exec needs --test or --suite");
            const cfa::ProgramCfa cf(p);
            const auto goals = cfa::branch_goals(cf, f);
            std::string text;
            for (const auto& t : suite) {
                exec::check_test(p, f, t);
                const auto [o, tr] = exec::run(cf, f, t, c.limits);
                text += t.id + ": " + exec::to_string(o) + "\n";
                if (show_trace) {
                    std::string path, cov;
                    for (int e : tr.assumes) path += " e" + std::to_string(e);
                    for (const auto& g : goals)
                        if (tr.edges.count(g.edge)) cov += " " + g.id;
                    text += "  path:" + path + "\n  covered:" + cov + "\n  steps: " + std::to_string(tr.steps) + "\n";
                }
            }
            emit(c.out, text);
            return 0;
        }

        if (*tg) {
            const auto p = load_source(file);
            const auto f = pick_function(p, fn);
            cfa::ProgramCfa cf(p);
            if (goal_id.empty() && label_lines.empty()) {
                auto b = testgen::cover_branches(cf, f, c.dom, c.budget, c.limits);
                for (const auto& [g, why] : b.uncovered)
                    std::cerr << g << ": not covered (" << testgen::to_string(why) << ")\n";
                emit(c.out, io::format_suite(b.suite));
                return 0;
            }
            std::vector<cfa::TestGoal> targets;
            if (!goal_id.empty()) {
                for (const auto& g : cfa::branch_goals(cf, f))
                    if (g.id == goal_id) targets.push_back(g);
                if (targets.empty()) throw Error("no goal '" + goal_id + "' in " + f);
            } else {
                std::vector<int> ignored;
                targets = cfa::insert_label_goals(cf, f, to_set(label_lines), &ignored);
                for (int l : ignored) std::cerr << "line " << l << ": no statement, label ignored\n";
                if (targets.empty()) throw Error("no label could be placed");
            }
            testgen::Generator gen(cf, f, c.dom, c.limits);
            const auto r = gen.find(targets, n, {}, c.budget);
            exec::TestSuite suite;
            for (const auto& t : r.tests) suite.push_back(t.test);
            if (r.tests.size() < n)
                std::cerr << "found " << r.tests.size() << " of " << n << " (" << testgen::to_string(r.reason)
                          << ")\n";
            emit(c.out, io::format_suite(suite));
            return 0;
        }

        if (*cmp) {
            minic::SourceProgram newer, older;
            std::set<int> lines = to_set(label_lines);
            if (!history_dir.empty()) {
                const auto h = history::VersionHistory::load(history_dir);
                if (!*opt_rev) throw UsageError("--history needs --rev");
                if (rev == 0 || rev >= h.size()) throw UsageError("--rev must be in 1.." + std::to_string(h.size() - 1));
                if (!*opt_older) older_rev = rev - 1;
                if (older_rev >= rev) throw UsageError("--older must be below --rev");
                newer = h.version(rev);
                older = h.version(older_rev);
                lines = h.modified_since(rev, older_rev);
            } else {
                if (newer_path.empty() || older_path.empty()) throw UsageError("compare needs --new and --old, or --history");
                newer = load_source(newer_path);
                older = load_source(older_path);
                if (!patch_path.empty()) {
                    const auto m = history::modified_lines(history::parse_patch(io::read_file(patch_path)));
                    lines = m.lines;
                    lines.insert(m.anchors.begin(), m.anchors.end());
                }
            }
            const auto f = pick_function(newer, fn);
            if (mode_text == "mt" || mode_text == "MT") {
                compare::ComparatorSpec spec{compare::Mode::MT, newer, older, f, lines};
                auto lg = compare::mt_goals(spec);
                for (int l : lg.ignored) std::cerr << "line " << l << ": no statement, label ignored\n";
                if (lg.goals.empty()) throw Error("no label could be placed");
                testgen::Generator gen(lg.cfa, f, c.dom, c.limits);
                const auto r = gen.find(lg.goals, n, {}, c.budget);
                exec::TestSuite suite;
                for (const auto& t : r.tests) suite.push_back(t.test);
                if (r.tests.size() < n)
                    std::cerr << "found " << r.tests.size() << " of " << n << " (" << testgen::to_string(r.reason)
                              << ")\n";
                emit(c.out, io::format_suite(suite));
            } else {
                compare::ComparatorSpec spec{compare::Mode::MR, newer, older, f, {}};
                const auto r = compare::mr_find_witnesses(spec, c.dom, n, c.budget, c.limits);
                std::string text;
                for (const auto& w : r.witnesses) text += compare::differs_comment(w) + "\n" + io::format_test(w.test) + "\n";
                if (r.witnesses.size() < n)
                    std::cerr << "found " << r.witnesses.size() << " of " << n << " ("
                              << testgen::to_string(r.reason) << ", " << r.candidates << " candidates)\n";
                emit(c.out, text);
            }
            return 0;
        }

        if (*red) {
            const auto m = io::parse_matrix_csv(io::read_file(matrix_path));
            if (emit_ilp) {
                emit(c.out, reduce::ilp_clauses(m));
                return 0;
            }
            if (strategy_text.empty()) throw UsageError("reduce needs --strategy (or --emit-ilp)");
            const auto s = reduce::parse_strategy(strategy_text);
            exec::TestSuite suite;
            if (!suite_path.empty())
                suite = io::parse_suite(io::read_file(suite_path));
            else if (s == reduce::Strategy::FastPP)
                throw UsageError("fast++ needs --suite to encode the tests");
            reduce::require_coverable(m);
            const auto r = reduce::reduce(s, m, suite, seed, dims);
            emit(c.out, join(r.selected, ",") + "\n");
            return 0;
        }

        if (*mut) {
            if (list_ops) {
                std::string text;
                for (const auto& o : mutate::list_operators())
                    text += o.id + "\t" + mutate::to_string(o.group) + "\t" + o.description + "\n";
                emit(c.out, text);
                return 0;
            }
            if (file.empty()) throw UsageError("mutate needs a file unless --list is given");
            const auto p = load_source(file);
            const auto f = pick_function(p, fn);
            if (mutant_seed) {
                const auto m = mutate::pick_mutant(p, f, *mutant_seed);
                std::cerr << m.op << " @ " << m.line << ":" << m.col << " '" << m.original << "' -> '"
                          << m.replacement << "'\n";
                emit(c.out, mutate::header_comment(m) + "\n" + m.text);
                return 0;
            }
            if (!list_all) throw UsageError("mutate needs --list, --all or --seed");
            std::vector<std::string> dropped;
            const auto all = mutate::enumerate_mutants(p, f, &dropped);
            std::string text;
            for (const auto& m : all)
                text += m.op + " " + std::to_string(m.line) + ":" + std::to_string(m.col) + " '" + m.original +
                        "' -> '" + m.replacement + "'\n";
            for (const auto& d : dropped) std::cerr << "dropped " << d << "\n";
            emit(c.out, text);
            return 0;
        }

        pc.dom = c.dom;
        pc.budget = c.budget;
        pc.limits = c.limits;
        pc.mutants = all_mutants ? pipeline::MutantMode::All : pipeline::MutantMode::Single;
        pc.label_mutation_site = label_site;
        pc.fastpp_dims = dims;

        if (*run) {
            const auto subj = pipeline::load_subject(history_dir);
            const auto s = pipeline::parse_strategy(strategy_text);
            pc.seeds = {seed};
            const auto r = pipeline::run_experiment({subj}, {s}, pc, true);
            std::ostringstream os;
            os << "history " << subj.history.name() << " fn " << subj.fn << " strategy " << s.name() << " seed "
               << seed << "\n";
            for (const auto& rr : r.traces.front()) {
                os << "r" << rr.revision << " mutant " << (rr.mutant.empty() ? "-" : rr.mutant) << "\n";
                os << "  inherited " << rr.inherited.size() << " added " << rr.added.size() << " suite "
                   << rr.suite.size() << " selected " << rr.selected.size() << "\n";
                os << "  goals covered " << rr.covered_before.size() << " -> " << rr.covered_after.size()
                   << " detected " << rr.detected << " work " << rr.work << (rr.skipped ? " skipped" : "") << "\n";
                for (const auto& note : rr.notes) os << "  note " << note << "\n";
                for (const auto& t : rr.selected) os << "  " << io::format_test(t) << "\n";
            }
            os << "\n" << pipeline::format_metrics_csv(r.rows);
            emit(c.out, os.str());
            return 0;
        }

        if (*exp) {
            std::vector<pipeline::Subject> subjects;
            for (const auto& h : histories) subjects.push_back(pipeline::load_subject(h));
            std::vector<pipeline::Strategy> strategies;
            if (all_strategies)
                strategies = pipeline::enumerate_strategies();
            else
                for (const auto& s : strategy_names) strategies.push_back(pipeline::parse_strategy(s));
            if (strategies.empty()) throw UsageError("experiment needs --all-strategies or --strategy");
            if (!seeds.empty()) pc.seeds = seeds;
            pc.jobs = jobs;
            const auto r = pipeline::run_experiment(subjects, strategies, pc);
            emit(c.out, pipeline::format_metrics_csv(r.rows));
            return 0;
        }

        if (*rep) {
            const auto text = io::read_file(metrics_path);
            std::vector<pipeline::MetricsRecord> rows;
            try {
                rows = pipeline::parse_metrics_csv(text);
            } catch (const SyntaxError& e) {
                throw Error(metrics_path + ": row " + std::to_string(e.line()) + ": " + e.message());
            }
            emit(c.out, pipeline::report(rows));
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}
