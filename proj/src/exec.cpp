#include "regkit/exec.hpp"

#include "regkit/error.hpp"

#include <algorithm>
#include <map>

namespace regkit::exec {

using cfa::EdgeKind;
using minic::BinaryOp;
using minic::Expr;
using minic::ExprKind;

std::vector<Value> TestCase::inputs() const {
    std::vector<Value> v;
    v.reserve(bindings.size());
    for (const auto& b : bindings) v.push_back(b.value);
    return v;
}

bool TestCase::same_inputs(const TestCase& other) const {
    if (bindings.size() != other.bindings.size()) return false;
    for (std::size_t i = 0; i < bindings.size(); ++i)
        if (bindings[i].value != other.bindings[i].value) return false;
    return true;
}

std::string format_bindings(const std::vector<Binding>& bs) {
    std::string out;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        if (i) out += "; ";
        out += bs[i].name + "=";
        if (const auto* n = std::get_if<std::int32_t>(&bs[i].value)) {
            out += std::to_string(*n);
        } else {
            const auto& a = std::get<IntArray>(bs[i].value);
            out += "[";
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (k) out += ",";
                out += std::to_string(a[k]);
            }
            out += "]";
        }
    }
    return out;
}

TestCase make_test(std::string id, const minic::FunctionDef& f, const std::vector<Value>& values) {
    TestCase t;
    t.id = std::move(id);
    for (std::size_t i = 0; i < values.size() && i < f.params.size(); ++i)
        t.bindings.push_back({f.params[i].name, values[i]});
    return t;
}

bool outcomes_equal(const ObservedOutcome& a, const ObservedOutcome& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == OutcomeKind::Returned && a.value != b.value) return false;
    if (a.kind == OutcomeKind::RuntimeError && a.error != b.error) return false;
    if (a.globals.size() != b.globals.size()) return false;
    if (a.globals == b.globals) return true;
    std::map<std::string, std::int32_t> ga(a.globals.begin(), a.globals.end());
    std::map<std::string, std::int32_t> gb(b.globals.begin(), b.globals.end());
    return ga == gb;
}

std::string to_string(const ObservedOutcome& o) {
    std::string s;
    switch (o.kind) {
        case OutcomeKind::Returned: s = "returned(" + std::to_string(o.value) + ")"; break;
        case OutcomeKind::VoidReturned: s = "void-returned"; break;
        case OutcomeKind::StepLimitExceeded: s = "step-limit-exceeded"; break;
        case OutcomeKind::RuntimeError:
            switch (o.error) {
                case ErrorClass::IndexOutOfBounds: s = "runtime-error(index-out-of-bounds)"; break;
                case ErrorClass::DivByZero: s = "runtime-error(div-by-zero)"; break;
                case ErrorClass::RecursionLimit: s = "runtime-error(recursion-limit)"; break;
                case ErrorClass::None: s = "runtime-error"; break;
            }
            break;
    }
    if (!o.globals.empty()) {
        s += " {";
        for (std::size_t i = 0; i < o.globals.size(); ++i) {
            if (i) s += ", ";
            s += o.globals[i].first + "=" + std::to_string(o.globals[i].second);
        }
        s += "}";
    }
    return s;
}

namespace {

std::int32_t wrap(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

}  // namespace

Interpreter::Interpreter(const cfa::ProgramCfa& program, std::string_view fn, Limits limits)
    : cfa_(&program), limits_(limits) {
    fn_ = program.program().find_function(fn);
    if (fn_ < 0) throw UnknownFunction(std::string(fn));
    std::size_t max_locals = 1;
    for (const auto& f : program.program().functions()) max_locals = std::max(max_locals, f.local_names.size());
    stack_.resize(max_locals * (static_cast<std::size_t>(std::max(limits_.recursion, 1)) + 2));
    const auto& f = program.program().functions()[static_cast<std::size_t>(fn_)];
    std::size_t arrays = 0;
    for (const auto& p : f.params)
        if (p.kind == minic::VarKind::IntArray) ++arrays;
    args_.resize(arrays);
    globals_.resize(program.program().globals().size());
    epoch_.assign(program.edges().size(), 0);
    first_.assign(program.edges().size(), -1);
    assumes_.reserve(256);
}

void Interpreter::fail(ErrorClass c) {
    if (error_) return;
    error_ = true;
    outcome_.kind = OutcomeKind::RuntimeError;
    outcome_.error = c;
}

bool Interpreter::traverse(int edge) {
    const auto& e = cfa_->edges()[static_cast<std::size_t>(edge)];
    if (e.kind != EdgeKind::Label) {
        if (++steps_ > limits_.steps) {
            error_ = true;
            outcome_.kind = OutcomeKind::StepLimitExceeded;
            steps_ = limits_.steps;
            return false;
        }
    }
    if (e.kind == EdgeKind::Assume) assumes_.push_back(edge);
    auto& ep = epoch_[static_cast<std::size_t>(edge)];
    if (ep != current_) {
        ep = current_;
        first_[static_cast<std::size_t>(edge)] = static_cast<int>(assumes_.size());
    }
    return true;
}

Interpreter::Slot* Interpreter::var(const minic::VarRef& r, Slot* frame) {
    if (r.scope == minic::VarRef::Scope::Global) return &globals_[static_cast<std::size_t>(r.slot)];
    return &frame[r.slot];
}

std::int32_t Interpreter::eval(const Expr& e, Slot* frame, int depth) {
    switch (e.kind) {
        case ExprKind::IntLit: return wrap(e.value);
        case ExprKind::Var: return var(e.ref, frame)->v;
        case ExprKind::Index: {
            const IntArray* arr = var(e.ref, frame)->arr;
            const std::int32_t i = eval(e.operands[0], frame, depth);
            if (error_) return 0;
            if (!arr || i < 0 || static_cast<std::size_t>(i) >= arr->size()) {
                fail(ErrorClass::IndexOutOfBounds);
                return 0;
            }
            return (*arr)[static_cast<std::size_t>(i)];
        }
        case ExprKind::Unary: {
            const std::int32_t v = eval(e.operands[0], frame, depth);
            if (e.unary == minic::UnaryOp::Neg) return wrap(-static_cast<std::int64_t>(v));
            return v == 0 ? 1 : 0;
        }
        case ExprKind::Binary: {
            const std::int32_t l = eval(e.operands[0], frame, depth);
            if (error_) return 0;
            if (e.binary == BinaryOp::And) {
                if (l == 0) return 0;
                return eval(e.operands[1], frame, depth) != 0 ? 1 : 0;
            }
            if (e.binary == BinaryOp::Or) {
                if (l != 0) return 1;
                return eval(e.operands[1], frame, depth) != 0 ? 1 : 0;
            }
            const std::int32_t r = eval(e.operands[1], frame, depth);
            if (error_) return 0;
            const std::int64_t a = l, b = r;
            switch (e.binary) {
                case BinaryOp::Add: return wrap(a + b);
                case BinaryOp::Sub: return wrap(a - b);
                case BinaryOp::Mul: return wrap(a * b);
                case BinaryOp::Div:
                    if (b == 0) { fail(ErrorClass::DivByZero); return 0; }
                    return wrap(a / b);
                case BinaryOp::Mod:
                    if (b == 0) { fail(ErrorClass::DivByZero); return 0; }
                    return wrap(a % b);
                case BinaryOp::Lt: return l < r;
                case BinaryOp::Le: return l <= r;
                case BinaryOp::Gt: return l > r;
                case BinaryOp::Ge: return l >= r;
                case BinaryOp::Eq: return l == r;
                case BinaryOp::Ne: return l != r;
                default: return 0;
            }
        }
        case ExprKind::Call: {
            if (depth + 1 > limits_.recursion) {
                fail(ErrorClass::RecursionLimit);
                return 0;
            }
            const auto& callee = cfa_->program().functions()[static_cast<std::size_t>(e.callee)];
            const std::size_t n = callee.local_names.size();
            if (sp_ + n > stack_.size()) {
                fail(ErrorClass::RecursionLimit);
                return 0;
            }
            // nested calls in the arguments use the stack too, so buffer the values first
            Slot small[8];
            std::vector<Slot> big;
            Slot* vals = small;
            if (e.operands.size() > 8) {
                big.resize(e.operands.size());
                vals = big.data();
            }
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                const Expr& arg = e.operands[i];
                if (callee.params[i].kind == minic::VarKind::IntArray) vals[i].arr = var(arg.ref, frame)->arr;
                else vals[i].v = eval(arg, frame, depth);
                if (error_) return 0;
            }
            Slot* callee_frame = stack_.data() + sp_;
            for (std::size_t i = 0; i < n; ++i) callee_frame[i] = i < e.operands.size() ? vals[i] : Slot{};
            sp_ += n;
            std::int32_t result = 0;
            call(e.callee, callee_frame, depth + 1, result);
            sp_ -= n;
            return result;
        }
    }
    return 0;
}

bool Interpreter::call(int fn, Slot* frame, int depth, std::int32_t& result) {
    const cfa::Cfa& c = cfa_->function(fn);
    const auto& edges = cfa_->edges();
    int node = c.entry;
    result = 0;
    while (node != c.exit) {
        const auto& out = cfa_->out_edges(node);
        int id = out[0];
        if (out.size() == 2) {
            const bool taken = eval(*edges[static_cast<std::size_t>(out[0])].expr, frame, depth) != 0;
            if (error_) return false;
            id = taken ? out[0] : out[1];
        }
        if (!traverse(id)) return false;
        const cfa::Edge& e = edges[static_cast<std::size_t>(id)];
        switch (e.kind) {
            case EdgeKind::Declare:
            case EdgeKind::Assign: {
                const minic::Stmt& s = *e.stmt;
                Slot* target = var(s.target, frame);
                std::int32_t* cell = &target->v;
                if (s.index) {
                    const std::int32_t i = eval(*s.index, frame, depth);
                    if (error_) return false;
                    if (!target->arr || i < 0 || static_cast<std::size_t>(i) >= target->arr->size()) {
                        fail(ErrorClass::IndexOutOfBounds);
                        return false;
                    }
                    cell = &(*target->arr)[static_cast<std::size_t>(i)];
                }
                switch (s.op) {
                    case minic::AssignOp::Set: {
                        const std::int32_t v = eval(*s.value, frame, depth);
                        if (error_) return false;
                        *cell = v;
                        break;
                    }
                    case minic::AssignOp::AddSet:
                    case minic::AssignOp::SubSet: {
                        const std::int32_t v = eval(*s.value, frame, depth);
                        if (error_) return false;
                        const std::int64_t cur = *cell;
                        *cell = wrap(s.op == minic::AssignOp::AddSet ? cur + v : cur - v);
                        break;
                    }
                    case minic::AssignOp::Inc: *cell = wrap(static_cast<std::int64_t>(*cell) + 1); break;
                    case minic::AssignOp::Dec: *cell = wrap(static_cast<std::int64_t>(*cell) - 1); break;
                }
                break;
            }
            case EdgeKind::Return:
                if (e.expr) {
                    result = eval(*e.expr, frame, depth);
                    if (error_) return false;
                }
                break;
            case EdgeKind::Call:
                eval(*e.expr, frame, depth);
                if (error_) return false;
                break;
            case EdgeKind::Assume:
            case EdgeKind::Label:
            case EdgeKind::Skip: break;
        }
        node = e.to;
    }
    return true;
}

const ObservedOutcome& Interpreter::run(const std::vector<Value>& inputs) {
    if (++current_ == 0) {
        std::fill(epoch_.begin(), epoch_.end(), 0);
        current_ = 1;
    }
    assumes_.clear();
    steps_ = 0;
    error_ = false;
    sp_ = 0;
    outcome_.kind = OutcomeKind::VoidReturned;
    outcome_.value = 0;
    outcome_.error = ErrorClass::None;

    const auto& prog = cfa_->program();
    for (std::size_t g = 0; g < globals_.size(); ++g) globals_[g].v = prog.globals()[g].init;

    const auto& f = prog.functions()[static_cast<std::size_t>(fn_)];
    if (inputs.size() != f.params.size())
        throw SignatureMismatch(f.name + " expects " + std::to_string(f.params.size()) + " inputs, got " +
                                std::to_string(inputs.size()));
    Slot* frame = stack_.data();
    const std::size_t n = f.local_names.size();
    std::size_t next_array = 0;
    for (std::size_t i = 0; i < n; ++i) frame[i] = Slot{};
    for (std::size_t i = 0; i < f.params.size(); ++i) {
        if (f.params[i].kind == minic::VarKind::IntArray) {
            const auto* a = std::get_if<IntArray>(&inputs[i]);
            if (!a) throw SignatureMismatch("parameter '" + f.params[i].name + "' expects an array");
            IntArray& dst = args_[next_array++];
            dst.assign(a->begin(), a->end());
            frame[i].arr = &dst;
        } else {
            const auto* v = std::get_if<std::int32_t>(&inputs[i]);
            if (!v) throw SignatureMismatch("parameter '" + f.params[i].name + "' expects an int");
            frame[i].v = *v;
        }
    }
    sp_ = n;

    std::int32_t result = 0;
    if (call(fn_, frame, 1, result)) {
        if (f.ret == minic::ReturnKind::Int) {
            outcome_.kind = OutcomeKind::Returned;
            outcome_.value = result;
        } else {
            outcome_.kind = OutcomeKind::VoidReturned;
        }
    }
    outcome_.globals.resize(globals_.size());
    for (std::size_t g = 0; g < globals_.size(); ++g) outcome_.globals[g] = {prog.globals()[g].name, globals_[g].v};
    return outcome_;
}

ExecutionTrace Interpreter::trace() const {
    ExecutionTrace t;
    t.assumes = assumes_;
    t.steps = steps_;
    for (std::size_t e = 0; e < epoch_.size(); ++e)
        if (epoch_[e] == current_) t.edges.insert(static_cast<int>(e));
    return t;
}

void check_test(const minic::SourceProgram& p, std::string_view fn, const TestCase& t) {
    const auto& f = p.function(fn);
    if (t.bindings.size() != f.params.size())
        throw SignatureMismatch("test " + t.id + " binds " + std::to_string(t.bindings.size()) + " values, " +
                                f.name + " takes " + std::to_string(f.params.size()));
    for (std::size_t i = 0; i < f.params.size(); ++i) {
        const bool is_array = std::holds_alternative<IntArray>(t.bindings[i].value);
        if (is_array != (f.params[i].kind == minic::VarKind::IntArray))
            throw SignatureMismatch("test " + t.id + ": parameter " + std::to_string(i + 1) + " ('" +
                                    f.params[i].name + "') has the wrong kind");
    }
}

bool matches_signature(const minic::SourceProgram& p, std::string_view fn, const TestCase& t) {
    try {
        check_test(p, fn, t);
        return true;
    } catch (const SignatureMismatch&) {
        return false;
    }
}

std::pair<ObservedOutcome, ExecutionTrace> run(const cfa::ProgramCfa& c, std::string_view fn, const TestCase& t,
                                               Limits limits) {
    check_test(c.program(), fn, t);
    Interpreter interp(c, fn, limits);
    interp.run(t.inputs());
    ExecutionTrace trace = interp.trace();
    for (const auto& g : cfa::branch_goals(c, fn))
        if (interp.visited(g.edge)) trace.covered.insert(g.id);
    for (const auto& g : c.label_goals())
        if (interp.visited(g.edge)) trace.covered.insert(g.id);
    return {interp.outcome(), std::move(trace)};
}

std::pair<ObservedOutcome, ExecutionTrace> run(const minic::SourceProgram& p, std::string_view fn,
                                               const TestCase& t, Limits limits) {
    const cfa::ProgramCfa c(p);
    return run(c, fn, t, limits);
}

void CoverageMatrix::flag_uncoverable() {
    uncoverable.clear();
    for (std::size_t g = 0; g < goals.size(); ++g) {
        bool any = false;
        for (const auto& row : relation)
            if (row[g]) {
                any = true;
                break;
            }
        if (!any) uncoverable.push_back(goals[g]);
    }
}

CoverageMatrix coverage_matrix(const cfa::ProgramCfa& c, std::string_view fn, const TestSuite& suite,
                               const std::vector<cfa::TestGoal>& goals, Limits limits) {
    CoverageMatrix m;
    for (const auto& g : goals) m.goals.push_back(g.id);
    Interpreter interp(c, fn, limits);
    for (const auto& t : suite) {
        check_test(c.program(), fn, t);
        interp.run(t.inputs());
        std::vector<std::uint8_t> row(goals.size(), 0);
        for (std::size_t g = 0; g < goals.size(); ++g) row[g] = interp.visited(goals[g].edge) ? 1 : 0;
        m.tests.push_back(t.id);
        m.relation.push_back(std::move(row));
    }
    m.flag_uncoverable();
    return m;
}

}  // namespace regkit::exec
