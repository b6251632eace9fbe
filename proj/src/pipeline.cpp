#include "regkit/pipeline.hpp"

#include "regkit/error.hpp"
#include "regkit/io.hpp"
#include "regkit/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

namespace regkit::pipeline {

const char* to_string(Carry c) {
    switch (c) {
        case Carry::CR: return "CR";
        case Carry::NoCR: return "No-CR";
        case Carry::None: return "None";
    }
    return "?";
}

const char* to_string(MutantMode m) { return m == MutantMode::Single ? "single" : "all"; }

std::string Strategy::name() const {
    return std::string("[") + compare::to_string(rtc) + "," + std::to_string(nrt) + "," + std::to_string(npr) + "," +
           reduce::to_string(rs) + "," + to_string(cr) + "]";
}

bool Strategy::valid() const {
    if (nrt < 1 || nrt > 3 || npr < 1 || npr > 3) return false;
    if (rs == reduce::Strategy::None && cr == Carry::CR) return false;
    if (rs != reduce::Strategy::None && cr == Carry::None) return false;
    return true;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto at = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
        if (at == std::string_view::npos) return out;
        start = at + 1;
    }
}

Carry parse_carry(std::string_view s) {
    if (s == "CR") return Carry::CR;
    if (s == "No-CR") return Carry::NoCR;
    if (s == "None") return Carry::None;
    throw Error("unknown carry mode '" + std::string(s) + "'");
}

compare::Mode parse_mode(std::string_view s) {
    if (s == "MT") return compare::Mode::MT;
    if (s == "MR") return compare::Mode::MR;
    throw Error("unknown test criterion '" + std::string(s) + "'");
}

int parse_small(std::string_view s) {
    if (s.size() != 1 || s[0] < '1' || s[0] > '3') throw Error("expected 1, 2 or 3, got '" + std::string(s) + "'");
    return s[0] - '0';
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

Strategy parse_strategy(std::string_view text) {
    text = trim(text);
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw Error("strategy must look like [MT,1,1,None,No-CR], got '" + std::string(text) + "'");
    const auto f = split(text.substr(1, text.size() - 2), ',');
    if (f.size() != 5) throw Error("strategy needs 5 fields: '" + std::string(text) + "'");
    Strategy s{parse_mode(f[0]), parse_small(f[1]), parse_small(f[2]), reduce::parse_strategy(f[3]), parse_carry(f[4])};
    if (!s.valid()) throw Error("invalid strategy combination " + s.name());
    return s;
}

std::vector<Strategy> enumerate_strategies() {
    std::vector<Strategy> out;
    for (auto rtc : {compare::Mode::MT, compare::Mode::MR})
        for (int nrt = 1; nrt <= 3; ++nrt)
            for (int npr = 1; npr <= 3; ++npr)
                for (auto rs : {reduce::Strategy::None, reduce::Strategy::ILP, reduce::Strategy::FastPP,
                                reduce::Strategy::DIFF})
                    for (auto cr : {Carry::CR, Carry::NoCR, Carry::None}) {
                        Strategy s{rtc, nrt, npr, rs, cr};
                        if (s.valid()) out.push_back(s);
                    }
    return out;
}

Subject load_subject(const std::filesystem::path& dir) {
    auto h = history::VersionHistory::load(dir);
    std::string fn;
    const auto conf = dir / "history.conf";
    if (std::filesystem::exists(conf)) {
        int lineno = 0;
        for (const auto& raw : history::split_lines(io::read_file(conf))) {
            ++lineno;
            const auto line = trim(raw);
            if (line.empty() || line.front() == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw SyntaxError(lineno, 1, "expected key = value in " + conf.string());
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (key == "function")
                fn = std::string(value);
            else
                throw SyntaxError(lineno, 1, "unknown key '" + std::string(key) + "' in " + conf.string());
        }
    }
    if (fn.empty()) {
        const auto e = minic::entry_function(h.version(0));
        if (!e) throw Error(dir.string() + ": cannot tell the function under test; set it in history.conf");
        fn = *e;
    }
    h.version(0).function(fn);
    return {std::move(h), fn};
}

int detects(const exec::TestSuite& t, const minic::SourceProgram& fixed, const minic::SourceProgram& bugged,
            std::string_view fn, exec::Limits limits) {
    if (!(minic::signature_of(fixed, fn) == minic::signature_of(bugged, fn)))
        throw SignatureMismatch(minic::to_string(minic::signature_of(fixed, fn)) + " vs " +
                                minic::to_string(minic::signature_of(bugged, fn)));
    if (t.empty()) return 0;
    const cfa::ProgramCfa cf(fixed), cb(bugged);
    exec::Interpreter a(cf, fn, limits), b(cb, fn, limits);
    for (const auto& test : t) {
        exec::check_test(fixed, fn, test);
        const auto in = test.inputs();
        if (!exec::outcomes_equal(a.run(in), b.run(in))) return 1;
    }
    return 0;
}

std::uint64_t PairJob::work_for(std::size_t n) const { return tests.size() >= n ? work_at[n - 1] : total_work; }

double PairJob::millis_for(std::size_t n) const {
    if (total_work == 0) return millis;
    return millis * static_cast<double>(work_for(n)) / static_cast<double>(total_work);
}

namespace {

std::string pair_prefix(std::size_t i, std::size_t j) { return "r" + std::to_string(i) + "p" + std::to_string(j) + "t"; }

PairJob mt_job(const Subject& s, std::size_t i, std::size_t j, const minic::SourceProgram& bugged,
               const mutate::Mutant* mutant, const Config& cfg, std::size_t n) {
    PairJob job;
    job.older = j;
    const auto t0 = std::chrono::steady_clock::now();
    auto lines = s.history.modified_since(i, j);
    if (cfg.label_mutation_site && mutant) lines.insert(mutant->line);
    if (lines.empty()) {
        job.failure = "empty-diff";
        return job;
    }
    cfa::ProgramCfa c(bugged);
    const auto goals = cfa::insert_label_goals(c, s.fn, lines);
    if (goals.empty()) {
        job.failure = "no-label";
        return job;
    }
    testgen::Generator gen(c, s.fn, cfg.dom, cfg.limits);
    auto r = gen.find(goals, n, {}, cfg.budget, pair_prefix(i, j));
    for (auto& t : r.tests) {
        job.work_at.push_back(t.work);
        job.tests.push_back(std::move(t.test));
    }
    job.total_work = r.work;
    if (job.tests.empty()) job.failure = std::string("none-found:") + testgen::to_string(r.reason);
    job.millis = ms_since(t0);
    return job;
}

PairJob mr_job(const Subject& s, std::size_t i, std::size_t j, const minic::SourceProgram& bugged,
               const Config& cfg, std::size_t n) {
    PairJob job;
    job.older = j;
    const auto t0 = std::chrono::steady_clock::now();
    compare::ComparatorSpec spec;
    spec.mode = compare::Mode::MR;
    spec.newer = bugged;
    spec.older = s.history.version(j);
    spec.fn = s.fn;
    try {
        compare::check_comparable(spec.newer, spec.older, s.fn);
    } catch (const InvalidComparator&) {
        job.failure = "invalid-comparator";
        job.millis = ms_since(t0);
        return job;
    }
    auto r = compare::mr_find_witnesses(spec, cfg.dom, n, cfg.budget, cfg.limits);
    for (std::size_t k = 0; k < r.witnesses.size(); ++k) {
        auto& w = r.witnesses[k];
        w.test.id = pair_prefix(i, j) + std::to_string(k + 1);
        job.work_at.push_back(w.work);
        job.tests.push_back(std::move(w.test));
    }
    job.total_work = r.executions;
    if (job.tests.empty()) job.failure = std::string("none-found:") + testgen::to_string(r.reason);
    job.millis = ms_since(t0);
    return job;
}

}  // namespace

RevisionContext prepare_revision(const Subject& s, std::size_t i, const mutate::Mutant* mutant, const Config& cfg,
                                 const std::vector<Strategy>& strategies) {
    RevisionContext ctx;
    ctx.revision = i;
    ctx.fixed = s.history.version(i);
    ctx.bugged = mutant ? mutant->program : ctx.fixed;
    if (mutant) ctx.mutant = mutant->op + " @ line " + std::to_string(mutant->line);
    ctx.cfa = std::make_shared<cfa::ProgramCfa>(ctx.bugged);
    ctx.goals = cfa::branch_goals(*ctx.cfa, s.fn);
    if (i > 0) {
        const auto m = history::modified_lines(s.history.patch(i));
        std::set<int> lines = m.lines;
        lines.insert(m.anchors.begin(), m.anchors.end());
        if (cfg.label_mutation_site && mutant) lines.insert(mutant->line);
        for (auto& g : cfa::insert_label_goals(*ctx.cfa, s.fn, lines)) ctx.goals.push_back(std::move(g));
    }
    if (i == 0) return ctx;

    int max_npr = 0, max_nrt = 0;
    std::set<compare::Mode> modes;
    for (const auto& st : strategies) {
        max_npr = std::max(max_npr, st.npr);
        max_nrt = std::max(max_nrt, st.nrt);
        modes.insert(st.rtc);
    }
    for (int k = 0; k < max_npr && static_cast<std::size_t>(k) < i; ++k) {
        const std::size_t j = i - 1 - static_cast<std::size_t>(k);
        for (auto mode : modes) {
            ctx.jobs[{j, static_cast<int>(mode)}] =
                mode == compare::Mode::MT
                    ? mt_job(s, i, j, ctx.bugged, mutant, cfg, static_cast<std::size_t>(max_nrt))
                    : mr_job(s, i, j, ctx.bugged, cfg, static_cast<std::size_t>(max_nrt));
        }
    }
    return ctx;
}

namespace {

std::uint64_t reduction_seed(std::uint64_t seed, const Subject& subj, const Strategy& s, std::size_t i) {
    return rng::mix(seed, rng::fnv1a(subj.history.name() + "/" + s.name()) + i);
}

struct Reduced {
    exec::TestSuite selected;
    std::vector<std::string> before, after;
    double millis = 0;
};

Reduced reduce_on(const Strategy& s, const Subject& subj, const RevisionContext& ctx, const exec::TestSuite& suite,
                  const Config& cfg, std::uint64_t seed) {
    Reduced out;
    const auto m = exec::coverage_matrix(*ctx.cfa, subj.fn, suite, ctx.goals, cfg.limits);
    std::vector<std::string> all_ids;
    for (const auto& t : suite) all_ids.push_back(t.id);
    out.before = reduce::covered_goals(m, all_ids);
    if (s.rs == reduce::Strategy::None) {
        out.selected = suite;
        out.after = out.before;
        return out;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = reduce::reduce(s.rs, reduce::drop_uncovered(m), suite,
                                  reduction_seed(seed, subj, s, ctx.revision), cfg.fastpp_dims);
    out.millis = ms_since(t0);
    for (const auto& id : r.selected)
        for (const auto& t : suite)
            if (t.id == id) out.selected.push_back(t);
    out.after = reduce::covered_goals(m, r.selected);
    return out;
}

}  // namespace

RevisionRun generate_suite(const Strategy& s, const Subject& subj, const RevisionContext& ctx,
                           const exec::TestSuite& prev, const exec::TestSuite& prev_reduced, const Config& cfg,
                           std::uint64_t seed) {
    RevisionRun run;
    run.revision = ctx.revision;
    run.mutant = ctx.mutant;
    const exec::TestSuite* start = s.cr == Carry::CR ? &prev_reduced : (s.cr == Carry::NoCR ? &prev : nullptr);
    if (start)
        for (const auto& t : *start) {
            if (!exec::matches_signature(ctx.bugged, subj.fn, t)) {
                run.notes.push_back("r" + std::to_string(ctx.revision) + ": dropped " + t.id + " (signature)");
                continue;
            }
            run.inherited.push_back(t.id);
            run.suite.push_back(t);
        }

    std::size_t pairs = 0, invalid = 0;
    for (int k = 0; k < s.npr && static_cast<std::size_t>(k) < ctx.revision; ++k) {
        const std::size_t j = ctx.revision - 1 - static_cast<std::size_t>(k);
        const auto& job = ctx.jobs.at({j, static_cast<int>(s.rtc)});
        ++pairs;
        const auto n = static_cast<std::size_t>(s.nrt);
        run.work += job.work_for(n);
        run.gen_ms += job.millis_for(n);
        if (job.tests.empty()) {
            run.notes.push_back("r" + std::to_string(ctx.revision) + "p" + std::to_string(j) + ": " + job.failure);
            if (job.failure == "invalid-comparator") ++invalid;
            continue;
        }
        for (std::size_t t = 0; t < std::min(n, job.tests.size()); ++t) {
            const auto& test = job.tests[t];
            const bool dup = std::any_of(run.suite.begin(), run.suite.end(),
                                         [&](const exec::TestCase& o) { return o.same_inputs(test); });
            if (dup) continue;
            run.added.push_back(test);
            run.suite.push_back(test);
        }
    }
    // every comparator of this revision was invalid: no suite is generated for it
    run.skipped = pairs > 0 && invalid == pairs;

    auto red = reduce_on(s, subj, ctx, run.suite, cfg, seed);
    run.selected = std::move(red.selected);
    run.covered_before = std::move(red.before);
    run.covered_after = std::move(red.after);
    run.reduce_ms = red.millis;
    run.detected = detects(run.selected, ctx.fixed, ctx.bugged, subj.fn, cfg.limits);
    return run;
}

MetricsRecord compute_metrics(const Strategy& s, const std::vector<RunSummary>& runs) {
    MetricsRecord r;
    r.strategy = s;
    r.n = runs.size();
    if (runs.empty()) return r;
    double det = 0, size = 0, cpu = 0;
    for (const auto& x : runs) {
        det += x.detected;
        size += static_cast<double>(x.size);
        cpu += x.cpu_ms;
    }
    const double n = static_cast<double>(runs.size());
    r.effectiveness = det / n;
    r.eff_size = size / n;
    r.eff_cpu_ms = cpu / n;
    if (r.eff_size > 0) r.tradeoff_size = r.effectiveness / r.eff_size;
    if (r.eff_cpu_ms > 0) r.tradeoff_cpu = r.effectiveness / (r.eff_cpu_ms / 1000.0);
    return r;
}

ExperimentResult run_experiment(const std::vector<Subject>& subjects, const std::vector<Strategy>& strategies,
                                const Config& cfg, bool keep_traces) {
    for (const auto& s : strategies)
        if (!s.valid()) throw Error("invalid strategy " + s.name());
    if (cfg.seeds.empty()) throw Error("at least one seed is needed");
    cfg.dom.validate();

    // initial suites, one per subject
    std::vector<exec::TestSuite> t0(subjects.size());
    parallel_for(subjects.size(), cfg.jobs, [&](std::size_t k) {
        auto b = testgen::cover_branches(subjects[k].history.version(0), subjects[k].fn, cfg.dom, cfg.budget,
                                         cfg.limits);
        for (auto& t : b.suite) t.id = "r0" + t.id;
        t0[k] = std::move(b.suite);
    });

    // bugged revisions: per (subject, seed, revision) the primary mutant first
    struct Task {
        std::size_t subject, seed, revision;
        std::optional<mutate::Mutant> mutant;
        std::string failure;
    };
    struct Slot {
        std::vector<std::size_t> tasks;  // into `tasks`, primary first
        std::string failure;
    };
    std::vector<Task> tasks;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Slot> slots;
    for (std::size_t k = 0; k < subjects.size(); ++k) {
        const auto& subj = subjects[k];
        tasks.push_back({k, 0, 0, std::nullopt, ""});
        slots[{k, 0, 0}].tasks.push_back(tasks.size() - 1);
        for (std::size_t sd = 0; sd < cfg.seeds.size(); ++sd)
            for (std::size_t i = 1; i < subj.history.size(); ++i) {
                auto& slot = slots[{k, sd, i}];
                const auto& pi = subj.history.version(i);
                const std::uint64_t pick_seed = rng::mix(cfg.seeds[sd], rng::fnv1a(subj.history.name()) + i);
                try {
                    auto primary = mutate::pick_mutant(pi, subj.fn, pick_seed);
                    std::vector<mutate::Mutant> rest;
                    if (cfg.mutants == MutantMode::All)
                        for (auto& m : mutate::enumerate_mutants(pi, subj.fn))
                            if (m.text != primary.text) rest.push_back(std::move(m));
                    tasks.push_back({k, sd, i, std::move(primary), ""});
                    slot.tasks.push_back(tasks.size() - 1);
                    for (auto& m : rest) {
                        tasks.push_back({k, sd, i, std::move(m), ""});
                        slot.tasks.push_back(tasks.size() - 1);
                    }
                } catch (const NoApplicableMutant&) {
                    slot.failure = "no-mutant";
                }
            }
    }
    std::vector<RevisionContext> contexts(tasks.size());
    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t t) {
        const auto& task = tasks[t];
        contexts[t] = prepare_revision(subjects[task.subject], task.revision,
                                       task.mutant ? &*task.mutant : nullptr, cfg, strategies);
    });

    // one cell per (strategy, subject, seed): the revision chain is sequential
    const std::size_t cells_per_strategy = subjects.size() * cfg.seeds.size();
    struct Cell {
        std::vector<RunSummary> runs;
        std::vector<RevisionRun> trace;
        std::vector<std::string> skipped;
        std::uint64_t work = 0;
    };
    std::vector<Cell> cells(strategies.size() * cells_per_strategy);
    parallel_for(cells.size(), cfg.jobs, [&](std::size_t c) {
        const auto& s = strategies[c / cells_per_strategy];
        const std::size_t k = (c % cells_per_strategy) / cfg.seeds.size();
        const std::size_t sd = c % cfg.seeds.size();
        const auto& subj = subjects[k];
        const std::uint64_t seed = cfg.seeds[sd];
        auto& cell = cells[c];
        const std::string where = subj.history.name() + ":" + std::to_string(seed) + ":r";

        const auto& ctx0 = contexts[slots.at({k, 0, 0}).tasks.front()];
        exec::TestSuite prev = t0[k];
        exec::TestSuite prev_reduced = reduce_on(s, subj, ctx0, prev, cfg, seed).selected;

        for (std::size_t i = 1; i < subj.history.size(); ++i) {
            const auto& slot = slots.at({k, sd, i});
            if (!slot.failure.empty()) {
                cell.skipped.push_back(where + std::to_string(i) + ":" + slot.failure);
                continue;
            }
            RevisionRun primary;
            for (std::size_t m = 0; m < slot.tasks.size(); ++m) {
                auto run = generate_suite(s, subj, contexts[slot.tasks[m]], prev, prev_reduced, cfg, seed);
                cell.work += run.work;
                if (run.skipped) {
                    cell.skipped.push_back(where + std::to_string(i) + ":invalid-comparator");
                } else {
                    cell.runs.push_back({run.detected, run.selected.size(), run.gen_ms + run.reduce_ms});
                }
                if (m == 0)
                    primary = std::move(run);
                else if (keep_traces)
                    cell.trace.push_back(std::move(run));
            }
            prev = primary.suite;
            prev_reduced = primary.selected;
            if (keep_traces) cell.trace.insert(cell.trace.end() - static_cast<std::ptrdiff_t>(slot.tasks.size() - 1),
                                               std::move(primary));
        }
    });

    ExperimentResult out;
    for (std::size_t si = 0; si < strategies.size(); ++si) {
        std::vector<RunSummary> runs;
        std::vector<std::string> skipped;
        std::uint64_t work = 0;
        std::vector<RevisionRun> trace;
        for (std::size_t c = si * cells_per_strategy; c < (si + 1) * cells_per_strategy; ++c) {
            runs.insert(runs.end(), cells[c].runs.begin(), cells[c].runs.end());
            skipped.insert(skipped.end(), cells[c].skipped.begin(), cells[c].skipped.end());
            work += cells[c].work;
            if (keep_traces)
                trace.insert(trace.end(), std::make_move_iterator(cells[c].trace.begin()),
                             std::make_move_iterator(cells[c].trace.end()));
        }
        auto rec = compute_metrics(strategies[si], runs);
        rec.work_count = work;
        rec.skipped = std::move(skipped);
        rec.mode = cfg.mutants;
        out.rows.push_back(std::move(rec));
        if (keep_traces) out.traces.push_back(std::move(trace));
    }
    // rows in strategy order, traces follow their rows
    std::vector<std::size_t> order(out.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out.rows[a].strategy < out.rows[b].strategy; });
    ExperimentResult sorted;
    for (auto i : order) {
        sorted.rows.push_back(std::move(out.rows[i]));
        if (keep_traces) sorted.traces.push_back(std::move(out.traces[i]));
    }
    return sorted;
}

namespace {

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

}  // namespace

std::string metrics_header() {
    return "strategy,rtc,nrt,npr,rs,cr,n,effectiveness,eff_size,eff_cpu_ms,work_count,tradeoff_size,tradeoff_cpu,"
           "skipped,mutant_mode";
}

std::string format_metrics_row(const MetricsRecord& r) {
    const auto& s = r.strategy;
    std::string skipped;
    for (const auto& x : r.skipped) skipped += (skipped.empty() ? "" : ";") + x;
    return "\"" + s.name() + "\"," + compare::to_string(s.rtc) + "," + std::to_string(s.nrt) + "," +
           std::to_string(s.npr) + "," + reduce::to_string(s.rs) + "," + to_string(s.cr) + "," +
           std::to_string(r.n) + "," + fmt(r.effectiveness) + "," + fmt(r.eff_size) + "," + fmt(r.eff_cpu_ms, 3) +
           "," + std::to_string(r.work_count) + "," + opt(r.tradeoff_size) + "," + opt(r.tradeoff_cpu) + "," +
           skipped + "," + to_string(r.mode);
}

std::string format_metrics_csv(const std::vector<MetricsRecord>& rows) {
    std::string out = metrics_header() + "\n";
    for (const auto& r : rows) out += format_metrics_row(r) + "\n";
    return out;
}

namespace {

std::vector<std::string> csv_fields(std::string_view line, int lineno) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw SyntaxError(lineno, static_cast<int>(line.size()), "unterminated quote");
    out.push_back(std::move(cur));
    return out;
}

double parse_double(const std::string& s, int lineno, const char* column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SyntaxError(lineno, 1, std::string("bad number in column ") + column + ": '" + s + "'");
    }
}

}  // namespace

std::vector<MetricsRecord> parse_metrics_csv(std::string_view text) {
    std::vector<MetricsRecord> rows;
    int lineno = 0;
    bool header = true;
    std::vector<std::string> columns;
    for (const auto& raw : history::split_lines(text)) {
        ++lineno;
        if (trim(raw).empty()) continue;
        auto f = csv_fields(raw, lineno);
        if (header) {
            columns = f;
            const auto want = csv_fields(metrics_header(), 0);
            // the mutant_mode column is optional
            if (!(columns == want || (columns.size() + 1 == want.size() &&
                                      std::equal(columns.begin(), columns.end(), want.begin()))))
                throw SyntaxError(lineno, 1, "unexpected header, want: " + metrics_header());
            header = false;
            continue;
        }
        if (f.size() != columns.size())
            throw SyntaxError(lineno, 1, "row has " + std::to_string(f.size()) + " fields, expected " +
                                             std::to_string(columns.size()));
        MetricsRecord r;
        try {
            r.strategy = parse_strategy(f[0]);
        } catch (const Error& e) {
            throw SyntaxError(lineno, 1, e.what());
        }
        const auto n = parse_double(f[6], lineno, "n");
        if (n < 0 || n != std::floor(n)) throw SyntaxError(lineno, 1, "bad count in column n");
        r.n = static_cast<std::size_t>(n);
        r.effectiveness = parse_double(f[7], lineno, "effectiveness");
        r.eff_size = parse_double(f[8], lineno, "eff_size");
        r.eff_cpu_ms = parse_double(f[9], lineno, "eff_cpu_ms");
        const auto w = parse_double(f[10], lineno, "work_count");
        if (w < 0) throw SyntaxError(lineno, 1, "negative work_count");
        r.work_count = static_cast<std::uint64_t>(w);
        if (f[11] != "NA") r.tradeoff_size = parse_double(f[11], lineno, "tradeoff_size");
        if (f[12] != "NA") r.tradeoff_cpu = parse_double(f[12], lineno, "tradeoff_cpu");
        if (!f[13].empty()) r.skipped = split(f[13], ';');
        if (f.size() > 14) {
            if (f[14] == "all")
                r.mode = MutantMode::All;
            else if (f[14] != "single")
                throw SyntaxError(lineno, 1, "bad mutant_mode '" + f[14] + "'");
        }
        if (r.effectiveness < 0 || r.effectiveness > 1) throw SyntaxError(lineno, 1, "effectiveness outside [0,1]");
        rows.push_back(std::move(r));
    }
    if (header) throw SyntaxError(1, 1, "empty metrics file");
    return rows;
}

std::string report(const std::vector<MetricsRecord>& rows) {
    std::string out = "strategies: " + std::to_string(rows.size()) + "\n";
    if (rows.empty()) return out;

    struct Param {
        const char* name;
        std::function<std::string(const Strategy&)> key;
        std::vector<std::string> order;
    };
    const std::vector<Param> params{
        {"RTC", [](const Strategy& s) { return std::string(compare::to_string(s.rtc)); }, {"MT", "MR"}},
        {"NRT", [](const Strategy& s) { return std::to_string(s.nrt); }, {"1", "2", "3"}},
        {"NPR", [](const Strategy& s) { return std::to_string(s.npr); }, {"1", "2", "3"}},
        {"RS", [](const Strategy& s) { return std::string(reduce::to_string(s.rs)); }, {"None", "ILP", "FAST++", "DIFF"}},
        {"CR", [](const Strategy& s) { return std::string(to_string(s.cr)); }, {"CR", "No-CR", "None"}},
    };
    char buf[256];
    for (const auto& p : params) {
        out += "\n";
        std::snprintf(buf, sizeof buf, "%-8s %5s %14s %10s %12s %14s\n", p.name, "rows", "effectiveness", "eff_size",
                      "eff_cpu_ms", "work_count");
        out += buf;
        for (const auto& v : p.order) {
            double e = 0, sz = 0, cpu = 0, w = 0;
            std::size_t n = 0;
            for (const auto& r : rows) {
                if (p.key(r.strategy) != v) continue;
                e += r.effectiveness;
                sz += r.eff_size;
                cpu += r.eff_cpu_ms;
                w += static_cast<double>(r.work_count);
                ++n;
            }
            if (n == 0) continue;
            const double d = static_cast<double>(n);
            std::snprintf(buf, sizeof buf, "%-8s %5zu %14.6f %10.4f %12.3f %14.1f\n", v.c_str(), n, e / d, sz / d,
                          cpu / d, w / d);
            out += buf;
        }
    }

    struct Metric {
        const char* name;
        std::function<std::optional<double>(const MetricsRecord&)> get;
        bool higher_better;
    };
    const std::vector<Metric> metrics{
        {"effectiveness", [](const MetricsRecord& r) { return std::optional<double>(r.effectiveness); }, true},
        {"eff_size", [](const MetricsRecord& r) { return std::optional<double>(r.eff_size); }, false},
        {"eff_cpu_ms", [](const MetricsRecord& r) { return std::optional<double>(r.eff_cpu_ms); }, false},
        {"work_count",
         [](const MetricsRecord& r) { return std::optional<double>(static_cast<double>(r.work_count)); }, false},
        {"tradeoff_size", [](const MetricsRecord& r) { return r.tradeoff_size; }, true},
        {"tradeoff_cpu", [](const MetricsRecord& r) { return r.tradeoff_cpu; }, true},
    };
    out += "\n";
    std::snprintf(buf, sizeof buf, "%-14s %-24s %14s %-24s %14s\n", "metric", "best", "value", "worst", "value");
    out += buf;
    for (const auto& m : metrics) {
        const MetricsRecord* best = nullptr;
        const MetricsRecord* worst = nullptr;
        for (const auto& r : rows) {
            const auto v = m.get(r);
            if (!v) continue;
            auto better = [&](double a, double b) { return m.higher_better ? a > b : a < b; };
            if (!best || better(*v, *m.get(*best))) best = &r;
            if (!worst || better(*m.get(*worst), *v)) worst = &r;
        }
        if (!best) {
            std::snprintf(buf, sizeof buf, "%-14s %-24s %14s %-24s %14s\n", m.name, "-", "NA", "-", "NA");
        } else {
            std::snprintf(buf, sizeof buf, "%-14s %-24s %14.6f %-24s %14.6f\n", m.name,
                          best->strategy.name().c_str(), *m.get(*best), worst->strategy.name().c_str(),
                          *m.get(*worst));
        }
        out += buf;
    }
    return out;
}

}  // namespace regkit::pipeline
