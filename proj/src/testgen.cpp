#include "regkit/testgen.hpp"

#include "regkit/error.hpp"

#include <algorithm>
#include <climits>
#include <functional>

namespace regkit::testgen {

void InputDomain::validate() const {
    if (lo > hi) throw Error("scalar range is empty: [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (elem_lo > elem_hi)
        throw Error("element range is empty: [" + std::to_string(elem_lo) + ", " + std::to_string(elem_hi) + "]");
    if (min_len < 0 || min_len > max_len)
        throw Error("length range is invalid: [" + std::to_string(min_len) + ", " + std::to_string(max_len) + "]");
}

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return b > UINT64_MAX - a ? UINT64_MAX : a + b; }

}  // namespace

std::uint64_t InputDomain::size(const std::vector<minic::VarKind>& params) const {
    const std::uint64_t scalar = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
    const std::uint64_t elem = static_cast<std::uint64_t>(static_cast<std::int64_t>(elem_hi) - elem_lo + 1);
    std::uint64_t arrays_total = 0;  // sum over lengths of elem^len
    std::uint64_t power = 1;
    for (int l = 0; l <= max_len; ++l) {
        if (l >= min_len) arrays_total = sat_add(arrays_total, power);
        power = sat_mul(power, elem);
    }
    std::uint64_t total = 1;
    for (auto k : params) total = sat_mul(total, k == minic::VarKind::Int ? scalar : arrays_total);
    return total;
}

std::string to_string(const InputDomain& d) {
    return "scalars [" + std::to_string(d.lo) + "," + std::to_string(d.hi) + "], lengths [" +
           std::to_string(d.min_len) + "," + std::to_string(d.max_len) + "], elements [" +
           std::to_string(d.elem_lo) + "," + std::to_string(d.elem_hi) + "]";
}

const char* to_string(Exhaustion e) {
    switch (e) {
        case Exhaustion::None: return "none";
        case Exhaustion::DomainExhausted: return "domain-exhausted";
        case Exhaustion::StepBudget: return "step-budget";
    }
    return "?";
}

CandidateEnumerator::CandidateEnumerator(std::vector<minic::VarKind> params, const InputDomain& dom)
    : params_(std::move(params)), dom_(dom) {
    dom_.validate();
    std::size_t arrays = 0;
    for (auto k : params_)
        if (k == minic::VarKind::IntArray) ++arrays;
    // every length vector, then sort by (sum, lexicographic)
    std::vector<int> cur(arrays, dom_.min_len);
    std::function<void(std::size_t)> fill = [&](std::size_t k) {
        if (k == arrays) {
            length_vectors_.push_back(cur);
            return;
        }
        for (int l = dom_.min_len; l <= dom_.max_len; ++l) {
            cur[k] = l;
            fill(k + 1);
        }
    };
    fill(0);
    std::stable_sort(length_vectors_.begin(), length_vectors_.end(), [](const auto& a, const auto& b) {
        int sa = 0, sb = 0;
        for (int v : a) sa += v;
        for (int v : b) sb += v;
        if (sa != sb) return sa < sb;
        return a < b;
    });
    values_.resize(params_.size());
}

void CandidateEnumerator::load_lengths() {
    const auto& lens = length_vectors_[length_index_];
    positions_.clear();
    std::size_t a = 0;
    for (std::size_t p = 0; p < params_.size(); ++p) {
        if (params_[p] == minic::VarKind::Int) {
            positions_.push_back({p, 0, dom_.lo, dom_.hi});
            values_[p] = dom_.lo;
        } else {
            const int len = lens[a++];
            values_[p] = exec::IntArray(static_cast<std::size_t>(len), dom_.elem_lo);
            for (int e = 0; e < len; ++e)
                positions_.push_back({p, static_cast<std::size_t>(e), dom_.elem_lo, dom_.elem_hi});
        }
    }
}

bool CandidateEnumerator::next() {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        length_index_ = 0;
        load_lengths();
        ++produced_;
        return true;
    }
    // odometer, last position least significant
    for (std::size_t k = positions_.size(); k > 0; --k) {
        const Position& pos = positions_[k - 1];
        std::int32_t* cell = params_[pos.param] == minic::VarKind::Int
                                 ? &std::get<std::int32_t>(values_[pos.param])
                                 : &std::get<exec::IntArray>(values_[pos.param])[pos.element];
        if (*cell < pos.hi) {
            ++*cell;
            ++produced_;
            return true;
        }
        *cell = pos.lo;
    }
    if (++length_index_ >= length_vectors_.size()) {
        done_ = true;
        return false;
    }
    load_lengths();
    ++produced_;
    return true;
}

namespace {

std::vector<minic::VarKind> kinds_of(const minic::FunctionDef& f) {
    std::vector<minic::VarKind> k;
    for (const auto& p : f.params) k.push_back(p.kind);
    return k;
}

}  // namespace

Generator::Generator(const cfa::ProgramCfa& c, std::string_view fn, const InputDomain& dom, exec::Limits limits)
    : cfa_(c), fn_(c.program().function(fn)), dom_(dom), interp_(c, fn, limits) {
    dom_.validate();
}

SearchResult Generator::find(const std::vector<cfa::TestGoal>& targets, std::size_t n, const PathSet& blocked,
                             std::uint64_t budget, const std::string& id_prefix) {
    SearchResult r;
    if (n == 0) return r;
    PathSet used = blocked;
    CandidateEnumerator en(kinds_of(fn_), dom_);
    std::uint64_t spent = 0;
    while (r.tests.size() < n) {
        if (!en.next()) {
            r.reason = Exhaustion::DomainExhausted;
            break;
        }
        if (en.produced() > budget || spent >= interp_.limits().search_steps) {
            r.reason = Exhaustion::StepBudget;
            break;
        }
        interp_.run(en.current());
        spent += interp_.steps();
        int cut = INT_MAX;
        for (const auto& g : targets)
            if (interp_.visited(g.edge)) cut = std::min(cut, interp_.first_visit(g.edge));
        if (cut == INT_MAX) continue;
        const auto& seq = interp_.assumes();
        std::vector<int> path(seq.begin(), seq.begin() + cut);
        if (!used.insert(path).second) continue;
        GeneratedTest t;
        t.test = exec::make_test(id_prefix + std::to_string(r.tests.size() + 1), fn_, en.current());
        t.path = std::move(path);
        t.work = en.produced();
        r.tests.push_back(std::move(t));
    }
    r.work = r.reason == Exhaustion::StepBudget ? en.produced() - 1 : en.produced();
    return r;
}

SearchResult find_test(const cfa::ProgramCfa& c, std::string_view fn, const cfa::TestGoal& goal,
                       const InputDomain& dom, const PathSet& blocked, std::uint64_t budget, exec::Limits limits) {
    Generator g(c, fn, dom, limits);
    return g.find({goal}, 1, blocked, budget);
}

SearchResult find_n_tests(const cfa::ProgramCfa& c, std::string_view fn, const cfa::TestGoal& goal,
                          const InputDomain& dom, std::size_t n, std::uint64_t budget, exec::Limits limits) {
    if (n == 0) throw Error("find_n_tests needs n >= 1");
    Generator g(c, fn, dom, limits);
    return g.find({goal}, n, {}, budget);
}

BranchSuite cover_branches(const cfa::ProgramCfa& c, std::string_view fn, const InputDomain& dom,
                           std::uint64_t budget, exec::Limits limits) {
    BranchSuite out;
    const auto goals = cfa::branch_goals(c, fn);
    Generator gen(c, fn, dom, limits);
    const auto& f = c.program().function(fn);

    if (goals.empty()) {
        CandidateEnumerator en(kinds_of(f), dom);
        auto& interp = gen.interpreter();
        while (en.next() && en.produced() <= budget) {
            const auto kind = interp.run(en.current()).kind;
            if (kind == exec::OutcomeKind::Returned || kind == exec::OutcomeKind::VoidReturned) {
                out.suite.push_back(exec::make_test("t1", f, en.current()));
                break;
            }
        }
        out.work = std::min(en.produced(), budget);
        out.matrix = exec::coverage_matrix(c, fn, out.suite, goals, limits);
        return out;
    }

    std::vector<bool> covered(goals.size(), false);
    for (std::size_t g = 0; g < goals.size(); ++g) {
        if (covered[g] || out.uncovered.count(goals[g].id)) continue;
        SearchResult r = gen.find({goals[g]}, 1, {}, budget);
        out.work += r.work;
        if (r.tests.empty()) {
            out.uncovered[goals[g].id] = r.reason;
            continue;
        }
        exec::TestCase t = std::move(r.tests.front().test);
        t.id = "t" + std::to_string(out.suite.size() + 1);
        auto& interp = gen.interpreter();
        interp.run(t.inputs());
        for (std::size_t k = 0; k < goals.size(); ++k)
            if (interp.visited(goals[k].edge)) covered[k] = true;
        out.suite.push_back(std::move(t));
    }
    out.matrix = exec::coverage_matrix(c, fn, out.suite, goals, limits);
    return out;
}

BranchSuite cover_branches(const minic::SourceProgram& p, std::string_view fn, const InputDomain& dom,
                           std::uint64_t budget, exec::Limits limits) {
    const cfa::ProgramCfa c(p);
    return cover_branches(c, fn, dom, budget, limits);
}

}  // namespace regkit::testgen
