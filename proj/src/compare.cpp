#include "regkit/compare.hpp"

#include "regkit/error.hpp"

namespace regkit::compare {

const char* to_string(Mode m) { return m == Mode::MT ? "MT" : "MR"; }

LabelGoals mt_goals(const ComparatorSpec& spec) {
    if (spec.modified_lines.empty()) throw EmptyDiff();
    LabelGoals out{cfa::ProgramCfa(spec.newer), {}, {}};
    out.goals = cfa::insert_label_goals(out.cfa, spec.fn, spec.modified_lines, &out.ignored);
    return out;
}

void check_comparable(const minic::SourceProgram& newer, const minic::SourceProgram& older, std::string_view fn) {
    if (newer.find_function(fn) < 0 || older.find_function(fn) < 0)
        throw InvalidComparator("function '" + std::string(fn) + "' missing from one version");
    const auto a = minic::signature_of(newer, fn);
    const auto b = minic::signature_of(older, fn);
    if (!(a == b)) throw InvalidComparator(minic::to_string(b) + " vs " + minic::to_string(a));
}

WitnessSearch mr_find_witnesses(const ComparatorSpec& spec, const testgen::InputDomain& dom, std::size_t n,
                                std::uint64_t budget, exec::Limits limits) {
    check_comparable(spec.newer, spec.older, spec.fn);
    WitnessSearch r;
    if (n == 0) return r;
    const cfa::ProgramCfa cn(spec.newer);
    const cfa::ProgramCfa co(spec.older);
    exec::Interpreter in(cn, spec.fn, limits);
    exec::Interpreter io(co, spec.fn, limits);
    const auto& f = spec.newer.function(spec.fn);
    std::vector<minic::VarKind> kinds;
    for (const auto& p : f.params) kinds.push_back(p.kind);

    testgen::PathSet used;
    testgen::CandidateEnumerator en(kinds, dom);
    std::uint64_t spent = 0;
    while (r.witnesses.size() < n) {
        if (!en.next()) {
            r.reason = testgen::Exhaustion::DomainExhausted;
            break;
        }
        if (en.produced() > budget || spent >= limits.search_steps) {
            r.reason = testgen::Exhaustion::StepBudget;
            break;
        }
        ++r.candidates;
        const auto& on = in.run(en.current());
        ++r.executions;
        spent += in.steps();
        // a newer-version path that already produced a witness cannot produce another
        if (used.count(in.assumes())) continue;
        const auto& oo = io.run(en.current());
        ++r.executions;
        spent += io.steps();
        if (exec::outcomes_equal(on, oo)) continue;
        used.insert(in.assumes());
        DifferenceWitness w;
        w.test = exec::make_test("t" + std::to_string(r.witnesses.size() + 1), f, en.current());
        w.newer = on;
        w.older = oo;
        w.path = in.assumes();
        w.work = r.executions;
        r.witnesses.push_back(std::move(w));
    }
    return r;
}

bool differs_on(const minic::SourceProgram& pi, const minic::SourceProgram& pj, std::string_view fn,
                const exec::TestCase& t, exec::Limits limits) {
    exec::check_test(pi, fn, t);
    exec::check_test(pj, fn, t);
    if (!(minic::signature_of(pi, fn) == minic::signature_of(pj, fn)))
        throw SignatureMismatch(minic::to_string(minic::signature_of(pi, fn)) + " vs " +
                                minic::to_string(minic::signature_of(pj, fn)));
    const cfa::ProgramCfa ci(pi);
    const cfa::ProgramCfa cj(pj);
    exec::Interpreter a(ci, fn, limits);
    exec::Interpreter b(cj, fn, limits);
    const auto in = t.inputs();
    return !exec::outcomes_equal(a.run(in), b.run(in));
}

std::string differs_comment(const DifferenceWitness& w) {
    return "# differs: " + exec::to_string(w.older) + " vs " + exec::to_string(w.newer);
}

}  // namespace regkit::compare
