// One line per acceptance criterion. Exit status is non-zero if any fails.

#include "regkit/compare.hpp"
#include "regkit/error.hpp"
#include "regkit/exec.hpp"
#include "regkit/pipeline.hpp"
#include "regkit/reduce.hpp"
#include "regkit/testgen.hpp"
#include "support/fixtures.hpp"
#include "support/matrices.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

using namespace regkit;

namespace {

struct Check {
    std::ostringstream why;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) why << what;
        ok = ok && cond;
    }
};

exec::ObservedOutcome run_on(const minic::SourceProgram& p, const exec::TestCase& t) {
    return exec::run(p, "find_last", t).first;
}

std::set<std::string> ids(const exec::TestSuite& s) {
    std::set<std::string> out;
    for (const auto& t : s) out.insert(t.id);
    return out;
}

// --- 1
void running_example(Check& c) {
    const auto& h = testing::find_last_history();
    c.expect(exec::to_string(run_on(h.version(0), testing::t1())) == "returned(-1)", "P0(t1) != returned(-1)");
    c.expect(exec::to_string(run_on(h.version(0), testing::t2())) == "returned(0)", "P0(t2) != returned(0)");
    c.expect(exec::to_string(run_on(h.version(3), testing::t2())) == "returned(-2)", "P3(t2) != returned(-2)");
}

// --- 2
void ilp_optimal(Check& c) {
    const auto r = reduce::reduce_ilp(testing::four_tests());
    c.expect(r.selected == std::vector<std::string>{"t1", "t3"}, "four-test example is not {t1,t3}");
    std::mt19937_64 g(2024);
    for (int i = 0; i < 200; ++i) {
        const auto m = testing::random_matrix(g, 12, 10);
        c.expect(reduce::reduce_ilp(m).selected.size() == testing::brute_min(m),
                 "random matrix " + std::to_string(i) + " not minimal");
    }
}

// --- 3
void diff_golden(Check& c) {
    const auto r = reduce::reduce_diff(testing::four_tests());
    c.expect(r.selected == std::vector<std::string>{"t3", "t1"}, "selection order is not [t3, t1]");
}

// --- 4
void fastpp_properties(Check& c) {
    const exec::TestSuite s{testing::t1(), testing::t2(), testing::t3(), testing::t4()};
    const auto alpha = reduce::value_alphabet(s);
    const std::vector<std::vector<int>> want{
        {2, 0, 0, 0, 0, 0}, {0, 0, 0, 2, 1, 2}, {0, 3, 1, 0, 0, 0}, {1, 1, 2, 0, 0, 0}};
    for (std::size_t i = 0; i < 4; ++i)
        c.expect(reduce::frequency_vector(s[i], alpha) == want[i], "frequency vector of " + s[i].id);
    std::mt19937_64 g(99);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto m = testing::random_matrix(g, 12, 10);
        const auto suite = testing::random_suite(g, m);
        const auto a = reduce::reduce_fastpp(m, suite, seed);
        const auto b = reduce::reduce_fastpp(m, suite, seed);
        c.expect(reduce::covered_goals(m, a.selected) == reduce::covered_goals(m, m.tests),
                 "coverage lost at seed " + std::to_string(seed));
        c.expect(a.selected == b.selected, "not deterministic at seed " + std::to_string(seed));
    }
}

// --- 5
void dominance(Check& c) {
    std::mt19937_64 g(7);
    for (int i = 0; i < 300; ++i) {
        const auto m = testing::random_matrix(g, 12, 10);
        const auto suite = testing::random_suite(g, m);
        const auto ilp = reduce::reduce_ilp(m);
        const auto diff = reduce::reduce_diff(m);
        const auto fpp = reduce::reduce_fastpp(m, suite, static_cast<std::uint64_t>(i));
        const auto all = reduce::covered_goals(m, m.tests);
        c.expect(ilp.selected.size() <= diff.selected.size(), "ILP larger than DIFF");
        c.expect(ilp.selected.size() <= fpp.selected.size(), "ILP larger than FAST++");
        for (const auto* r : {&ilp, &diff, &fpp})
            c.expect(reduce::covered_goals(m, r->selected) == all, "coverage lost on instance " + std::to_string(i));
    }
}

// --- 6
void mr_soundness(Check& c) {
    const auto& h = testing::find_last_history();
    const auto& p2 = h.version(2);
    const auto& p3 = h.version(3);
    compare::ComparatorSpec spec{compare::Mode::MR, p2, p3, "find_last", {}};
    const auto r = compare::mr_find_witnesses(spec, {}, 3);
    c.expect(!r.witnesses.empty(), "no witness for (P2, P3)");
    for (const auto& w : r.witnesses)
        c.expect(compare::differs_on(p2, p3, "find_last", w.test), "witness " + w.test.id + " does not differ");

    // brute force over the default domain, written without the enumerator
    const cfa::ProgramCfa c2(p2), c3(p3);
    exec::Interpreter i2(c2, "find_last"), i3(c3, "find_last");
    const testgen::InputDomain dom;
    std::uint64_t differing = 0;
    for (int len = dom.min_len; len <= dom.max_len; ++len) {
        std::vector<std::int32_t> x(static_cast<std::size_t>(len), dom.elem_lo);
        while (true) {
            for (std::int32_t y = dom.lo; y <= dom.hi; ++y) {
                const std::vector<exec::Value> in{x, y};
                if (!exec::outcomes_equal(i2.run(in), i3.run(in))) ++differing;
            }
            int k = len - 1;
            while (k >= 0 && x[static_cast<std::size_t>(k)] == dom.elem_hi) x[static_cast<std::size_t>(k--)] = dom.elem_lo;
            if (k < 0) break;
            ++x[static_cast<std::size_t>(k)];
        }
    }
    c.expect(differing > 0, "brute force found no differing input");

    compare::ComparatorSpec same{compare::Mode::MR, p3, p3, "find_last", {}};
    const auto e = compare::mr_find_witnesses(same, {}, 1);
    c.expect(e.witnesses.empty() && e.reason == testgen::Exhaustion::DomainExhausted,
             "identical programs are not domain-exhausted");
    if (c.ok) c.why << differing << " differing inputs by brute force";
}

// --- 7
void multiple_tests(Check& c) {
    cfa::ProgramCfa cf(minic::load_program(testing::single_if_text()));
    const auto goals = cfa::insert_label_goals(cf, "f", {5});
    c.expect(goals.size() == 1, "no label on the return line");
    if (!c.ok) return;
    const auto r = testgen::find_n_tests(cf, "f", goals[0], {}, 3);
    c.expect(r.tests.size() == 2, "expected exactly 2 tests, got " + std::to_string(r.tests.size()));
    if (r.tests.size() == 2) c.expect(r.tests[0].path != r.tests[1].path, "paths not distinct");
}

// --- 8
void strategy_space(Check& c) {
    const auto all = pipeline::enumerate_strategies();
    c.expect(all.size() == 144, "size " + std::to_string(all.size()));
    auto has = [&](const pipeline::Strategy& s) { return std::find(all.begin(), all.end(), s) != all.end(); };
    c.expect(has(pipeline::kBaseline1) && has(pipeline::kBaseline2), "a baseline is missing");
    for (const auto& s : all) {
        c.expect(!(s.rs == reduce::Strategy::None && s.cr == pipeline::Carry::CR), "contains " + s.name());
        c.expect(!(s.cr == pipeline::Carry::None && s.rs != reduce::Strategy::None), "contains " + s.name());
    }
}

// --- 9 and 10 share one experiment
std::vector<pipeline::Subject> corpus_subjects() {
    std::vector<pipeline::Subject> out;
    for (const char* h : {"find_last", "clamp_add", "max_index"})
        out.push_back(pipeline::load_subject(testing::corpus_dir() / h));
    return out;
}

pipeline::Config corpus_config(int jobs) {
    pipeline::Config cfg;
    cfg.seeds = {7, 8, 9};
    cfg.jobs = jobs;
    return cfg;
}

std::optional<pipeline::ExperimentResult> g_full;

bool same_row(const pipeline::MetricsRecord& a, const pipeline::MetricsRecord& b) {
    return a.strategy == b.strategy && a.n == b.n && a.effectiveness == b.effectiveness &&
           a.eff_size == b.eff_size && a.work_count == b.work_count && a.tradeoff_size == b.tradeoff_size &&
           a.skipped == b.skipped && a.mode == b.mode;
}

void pipeline_invariants(Check& c) {
    const auto subjects = corpus_subjects();
    const auto all = pipeline::enumerate_strategies();
    g_full = pipeline::run_experiment(subjects, all, corpus_config(1), true);
    const auto& a = *g_full;

    std::vector<exec::TestSuite> t0;
    for (const auto& s : subjects) {
        auto suite = testgen::cover_branches(s.history.version(0), s.fn, {}).suite;
        for (auto& t : suite) t.id = "r0" + t.id;
        t0.push_back(std::move(suite));
    }
    const std::size_t seeds = corpus_config(1).seeds.size();
    std::size_t checked = 0;
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        const auto& s = a.rows[k].strategy;
        const auto& trace = a.traces[k];
        std::size_t chain = 0;
        const exec::TestSuite* prev = nullptr;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const auto& run = trace[i];
            if (run.revision == 1) {
                if (i > 0) ++chain;
                prev = &t0[chain / seeds];
            }
            const std::string where = s.name() + " chain " + std::to_string(chain) + " r" + std::to_string(run.revision);
            c.expect(run.added.size() <= static_cast<std::size_t>(s.nrt * s.npr), where + ": too many new tests");
            if (s.rs == reduce::Strategy::None && s.cr == pipeline::Carry::NoCR) {
                const auto before = ids(*prev);
                const auto now = ids(run.suite);
                c.expect(std::includes(now.begin(), now.end(), before.begin(), before.end()),
                         where + ": suite shrank");
            }
            if (s.cr == pipeline::Carry::None) c.expect(run.inherited.empty(), where + ": inherited tests");
            if (s.rs != reduce::Strategy::None)
                c.expect(run.covered_after == run.covered_before, where + ": reduction lost coverage");
            prev = &run.suite;
            ++checked;
        }
    }

    const auto b = pipeline::run_experiment(subjects, all, corpus_config(1));
    const auto p = pipeline::run_experiment(subjects, all, corpus_config(8));
    c.expect(a.rows.size() == b.rows.size() && a.rows.size() == p.rows.size(), "row counts differ");
    for (std::size_t k = 0; k < a.rows.size() && k < b.rows.size() && k < p.rows.size(); ++k) {
        c.expect(same_row(a.rows[k], b.rows[k]), "rerun differs at " + a.rows[k].strategy.name());
        c.expect(same_row(a.rows[k], p.rows[k]), "--jobs 8 differs at " + a.rows[k].strategy.name());
    }
    if (c.ok) c.why << checked << " revision runs, 3 runs of " << a.rows.size() << " rows identical";
}

void directional(Check& c) {
    if (!g_full) {
        c.expect(false, "needs the experiment of criterion 9");
        return;
    }
    const auto& rows = g_full->rows;
    double eff[2] = {0, 0}, work[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (const auto& r : rows) {
        const int m = r.strategy.rtc == compare::Mode::MR;
        eff[m] += r.effectiveness;
        work[m] += static_cast<double>(r.work_count);
        ++cnt[m];
    }
    for (int m = 0; m < 2; ++m) {
        eff[m] /= cnt[m];
        work[m] /= cnt[m];
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "effectiveness MT %.4f MR %.4f; work MT %.0f MR %.0f", eff[0], eff[1], work[0],
                  work[1]);
    c.expect(eff[1] >= eff[0], std::string("MR less effective: ") + buf);
    c.expect(work[1] > work[0], std::string("MR cheaper in work: ") + buf);

    std::map<std::tuple<compare::Mode, int, int>, double> base;
    for (const auto& r : rows)
        if (r.strategy.rs == reduce::Strategy::None && r.strategy.cr == pipeline::Carry::NoCR)
            base[{r.strategy.rtc, r.strategy.nrt, r.strategy.npr}] = r.eff_size;
    for (auto rs : {reduce::Strategy::ILP, reduce::Strategy::FastPP, reduce::Strategy::DIFF}) {
        double reduced = 0, unreduced = 0;
        for (const auto& r : rows) {
            if (r.strategy.rs != rs) continue;
            reduced += r.eff_size;
            unreduced += base.at({r.strategy.rtc, r.strategy.nrt, r.strategy.npr});
        }
        c.expect(reduced < unreduced, std::string(reduce::to_string(rs)) + " does not shrink suites");
    }
    if (c.ok) c.why << buf;
}

// --- 11
void invalid_comparator(Check& c) {
    const auto subj = pipeline::load_subject(testing::corpus_dir() / "invalid" / "sig_change");
    const auto last = subj.history.size() - 1;
    bool threw = false;
    try {
        compare::ComparatorSpec spec{compare::Mode::MR, subj.history.version(last), subj.history.version(last - 1),
                                     subj.fn, {}};
        compare::mr_find_witnesses(spec, {}, 1);
    } catch (const InvalidComparator&) {
        threw = true;
    }
    c.expect(threw, "no InvalidComparator for the signature change");

    pipeline::Config cfg;
    const auto r = pipeline::run_experiment({subj}, pipeline::enumerate_strategies(), cfg);
    c.expect(r.rows.size() == 144, "experiment did not finish");
    const std::string tag = ":r" + std::to_string(last) + ":invalid-comparator";
    for (const auto& row : r.rows) {
        const bool mr = row.strategy.rtc == compare::Mode::MR;
        const bool skipped = std::any_of(row.skipped.begin(), row.skipped.end(),
                                         [&](const std::string& s) { return s.find(tag) != std::string::npos; });
        c.expect(skipped == mr, row.strategy.name() + (mr ? ": revision not skipped" : ": skipped"));
        c.expect(row.n == (mr ? last - 1 : last), row.strategy.name() + ": wrong revision count");
    }
}

}  // namespace

int main() {
    struct Criterion {
        const char* title;
        std::function<void(Check&)> body;
        double max_seconds;  // 0: no limit
    };
    const std::vector<Criterion> criteria{
        {"running-example outcomes", running_example, 1},
        {"ILP optimality", ilp_optimal, 30},
        {"DIFF selection order", diff_golden, 0},
        {"FAST++ encoding and properties", fastpp_properties, 0},
        {"reduction dominance and coverage", dominance, 0},
        {"MR witness soundness", mr_soundness, 10},
        {"multiple tests with distinct paths", multiple_tests, 0},
        {"strategy space", strategy_space, 0},
        {"pipeline invariants and reproducibility", pipeline_invariants, 600},
        {"directional checks", directional, 0},
        {"invalid comparator is skipped", invalid_comparator, 0},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].body(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (criteria[i].max_seconds > 0) c.expect(s < criteria[i].max_seconds, "took too long");
        failed += !c.ok;
        const auto why = c.why.str();
        std::printf("%s %2zu %s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].title, s,
                    why.empty() ? "" : ": ", why.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
