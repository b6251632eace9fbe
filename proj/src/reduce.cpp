#include "regkit/reduce.hpp"

#include "regkit/error.hpp"
#include "regkit/rng.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

namespace regkit::reduce {

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::None: return "None";
        case Strategy::ILP: return "ILP";
        case Strategy::FastPP: return "FAST++";
        case Strategy::DIFF: return "DIFF";
    }
    return "?";
}

Strategy parse_strategy(std::string_view s) {
    std::string l;
    for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l == "none") return Strategy::None;
    if (l == "ilp") return Strategy::ILP;
    if (l == "fast++" || l == "fastpp") return Strategy::FastPP;
    if (l == "diff") return Strategy::DIFF;
    throw Error("unknown reduction strategy '" + std::string(s) + "'");
}

namespace {

struct Bits {
    std::vector<std::uint64_t> w;

    explicit Bits(std::size_t n = 0) : w((n + 63) / 64, 0) {}
    void set(std::size_t i) { w[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (w[i / 64] >> (i % 64)) & 1; }
    bool none() const {
        for (auto x : w)
            if (x) return false;
        return true;
    }
    int count() const {
        int c = 0;
        for (auto x : w) c += std::popcount(x);
        return c;
    }
    int count_and(const Bits& o) const {
        int c = 0;
        for (std::size_t k = 0; k < w.size(); ++k) c += std::popcount(w[k] & o.w[k]);
        return c;
    }
    Bits minus(const Bits& o) const {
        Bits r = *this;
        for (std::size_t k = 0; k < w.size(); ++k) r.w[k] &= ~o.w[k];
        return r;
    }
    friend bool operator==(const Bits&, const Bits&) = default;
};

std::vector<Bits> rows_of(const exec::CoverageMatrix& m) {
    std::vector<Bits> rows;
    for (const auto& r : m.relation) {
        Bits b(m.goals.size());
        for (std::size_t g = 0; g < r.size(); ++g)
            if (r[g]) b.set(g);
        rows.push_back(std::move(b));
    }
    return rows;
}

Bits all_goals(std::size_t n) {
    Bits b(n);
    for (std::size_t g = 0; g < n; ++g) b.set(g);
    return b;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

class CoverSearch {
public:
    CoverSearch(std::vector<Bits> rows, std::size_t goals) : rows_(std::move(rows)), goals_(goals) {
        last_.assign(goals, -1);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (std::size_t g = 0; g < goals; ++g)
                if (rows_[i].test(g)) last_[g] = static_cast<int>(i);
        // max coverage of any row at or after i, for the counting bound
        suffix_max_.assign(rows_.size() + 1, 0);
        for (std::size_t i = rows_.size(); i-- > 0;)
            suffix_max_[i] = std::max(suffix_max_[i + 1], rows_[i].count());
    }

    bool find(int k) {
        chosen_.clear();
        return dfs(0, k, all_goals(goals_));
    }

    const std::vector<int>& chosen() const { return chosen_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    bool dfs(int start, int left, const Bits& uncovered) {
        ++nodes_;
        if (uncovered.none()) return true;
        if (left == 0) return false;
        const int need = uncovered.count();
        if (suffix_max_[static_cast<std::size_t>(start)] * left < need) return false;
        // the uncovered goal whose last covering row comes first bounds the next pick
        int limit = static_cast<int>(rows_.size()) - 1;
        for (std::size_t g = 0; g < goals_; ++g)
            if (uncovered.test(g)) limit = std::min(limit, last_[g]);
        if (limit < start) return false;
        for (int i = start; i <= limit; ++i) {
            if (rows_[static_cast<std::size_t>(i)].count_and(uncovered) == 0) continue;
            chosen_.push_back(i);
            if (dfs(i + 1, left - 1, uncovered.minus(rows_[static_cast<std::size_t>(i)]))) return true;
            chosen_.pop_back();
        }
        return false;
    }

    std::vector<Bits> rows_;
    std::size_t goals_;
    std::vector<int> last_;
    std::vector<int> suffix_max_;
    std::vector<int> chosen_;
    std::uint64_t nodes_ = 0;
};

}  // namespace

void require_coverable(const exec::CoverageMatrix& m) {
    std::vector<std::string> missing;
    for (std::size_t g = 0; g < m.goals.size(); ++g) {
        bool any = false;
        for (std::size_t t = 0; t < m.tests.size() && !any; ++t) any = m.covers(t, g);
        if (!any) missing.push_back(m.goals[g]);
    }
    if (!missing.empty()) throw UncoverableGoal(missing);
}

exec::CoverageMatrix drop_uncovered(const exec::CoverageMatrix& m, std::vector<std::string>* dropped) {
    std::vector<std::size_t> keep;
    for (std::size_t g = 0; g < m.goals.size(); ++g) {
        bool any = false;
        for (std::size_t t = 0; t < m.tests.size() && !any; ++t) any = m.covers(t, g);
        if (any)
            keep.push_back(g);
        else if (dropped)
            dropped->push_back(m.goals[g]);
    }
    exec::CoverageMatrix out;
    out.tests = m.tests;
    for (auto g : keep) out.goals.push_back(m.goals[g]);
    for (const auto& r : m.relation) {
        std::vector<std::uint8_t> row;
        for (auto g : keep) row.push_back(r[g]);
        out.relation.push_back(std::move(row));
    }
    return out;
}

ReductionResult reduce_ilp(const exec::CoverageMatrix& m) {
    const auto t0 = std::chrono::steady_clock::now();
    require_coverable(m);
    ReductionResult r;
    r.strategy = Strategy::ILP;
    if (m.goals.empty()) {
        r.millis = elapsed_ms(t0);
        return r;
    }
    // identical rows: only the first can be part of the lexicographically smallest cover
    const auto all = rows_of(m);
    std::vector<Bits> rows;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].none()) continue;
        if (std::find(rows.begin(), rows.end(), all[i]) != rows.end()) continue;
        rows.push_back(all[i]);
        origin.push_back(i);
    }
    CoverSearch search(rows, m.goals.size());
    for (int k = 1; k <= static_cast<int>(rows.size()); ++k) {
        if (search.find(k)) {
            for (int i : search.chosen()) r.selected.push_back(m.tests[origin[static_cast<std::size_t>(i)]]);
            break;
        }
    }
    r.candidates = search.nodes();
    r.millis = elapsed_ms(t0);
    return r;
}

std::string ilp_clauses(const exec::CoverageMatrix& m) {
    auto var = [&](std::size_t t) { return "x_" + m.tests[t]; };
    std::string out = "min:";
    for (std::size_t t = 0; t < m.tests.size(); ++t) out += (t ? " + " : " ") + var(t);
    out += "\n";
    for (std::size_t g = 0; g < m.goals.size(); ++g) {
        out += m.goals[g] + ":";
        bool first = true;
        for (std::size_t t = 0; t < m.tests.size(); ++t) {
            if (!m.covers(t, g)) continue;
            out += (first ? " " : " + ") + var(t);
            first = false;
        }
        if (first) out += " 0";
        out += " >= 1\n";
    }
    out += "binary:";
    for (std::size_t t = 0; t < m.tests.size(); ++t) out += " " + var(t);
    out += "\n";
    return out;
}

std::vector<std::int32_t> value_alphabet(const exec::TestSuite& suite) {
    std::vector<std::int32_t> v;
    for (const auto& t : suite)
        for (const auto& b : t.bindings) {
            if (const auto* i = std::get_if<std::int32_t>(&b.value))
                v.push_back(*i);
            else
                for (auto e : std::get<exec::IntArray>(b.value)) v.push_back(e);
        }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<int> frequency_vector(const exec::TestCase& t, const std::vector<std::int32_t>& alphabet) {
    std::vector<int> f(alphabet.size(), 0);
    auto bump = [&](std::int32_t x) {
        const auto it = std::lower_bound(alphabet.begin(), alphabet.end(), x);
        if (it != alphabet.end() && *it == x) ++f[static_cast<std::size_t>(it - alphabet.begin())];
    };
    for (const auto& b : t.bindings) {
        if (const auto* i = std::get_if<std::int32_t>(&b.value))
            bump(*i);
        else
            for (auto e : std::get<exec::IntArray>(b.value)) bump(e);
    }
    return f;
}

ReductionResult reduce_fastpp(const exec::CoverageMatrix& m, const exec::TestSuite& suite, std::uint64_t seed,
                              int dims) {
    const auto t0 = std::chrono::steady_clock::now();
    if (dims < 1) throw Error("projection dimension must be >= 1");
    require_coverable(m);
    ReductionResult r;
    r.strategy = Strategy::FastPP;
    const std::size_t n = m.tests.size();
    if (m.goals.empty() || n == 0) {
        r.millis = elapsed_ms(t0);
        return r;
    }

    std::map<std::string, const exec::TestCase*> by_id;
    for (const auto& t : suite) by_id.emplace(t.id, &t);
    exec::TestSuite rows;
    for (const auto& id : m.tests) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw Error("no inputs for test '" + id + "'");
        rows.push_back(*it->second);
    }

    std::mt19937_64 g(seed);
    const auto alphabet = value_alphabet(rows);
    const auto d = static_cast<std::size_t>(dims);
    std::vector<int> proj(alphabet.size() * d);
    for (auto& p : proj) {
        const double u = rng::uniform_unit(g);
        p = u < 1.0 / 6 ? -1 : (u < 5.0 / 6 ? 0 : 1);
    }
    std::vector<std::vector<double>> pts(n, std::vector<double>(d, 0.0));
    for (std::size_t t = 0; t < n; ++t) {
        const auto f = frequency_vector(rows[t], alphabet);
        for (std::size_t a = 0; a < alphabet.size(); ++a)
            for (std::size_t k = 0; k < d; ++k) pts[t][k] += f[a] * proj[a * d + k];
    }

    const auto cover = rows_of(m);
    Bits uncovered = all_goals(m.goals.size());
    std::vector<bool> taken(n, false);
    std::vector<double> mind(n, INFINITY);
    auto take = [&](std::size_t t) {
        taken[t] = true;
        r.selected.push_back(m.tests[t]);
        uncovered = uncovered.minus(cover[t]);
        for (std::size_t o = 0; o < n; ++o) {
            double s = 0;
            for (std::size_t k = 0; k < d; ++k) s += (pts[o][k] - pts[t][k]) * (pts[o][k] - pts[t][k]);
            mind[o] = std::min(mind[o], std::sqrt(s));
        }
    };

    take(rng::uniform_below(g, n));
    ++r.candidates;
    while (!uncovered.none()) {
        double total = 0;
        std::size_t open = 0;
        for (std::size_t t = 0; t < n; ++t)
            if (!taken[t]) {
                total += mind[t];
                ++open;
            }
        std::size_t pick = n;
        if (total > 0) {
            const double x = rng::uniform_unit(g) * total;
            double acc = 0;
            for (std::size_t t = 0; t < n; ++t) {
                if (taken[t] || mind[t] == 0) continue;
                acc += mind[t];
                pick = t;
                if (x < acc) break;
            }
        } else {
            std::uint64_t k = rng::uniform_below(g, open);
            for (std::size_t t = 0; t < n; ++t)
                if (!taken[t] && k-- == 0) {
                    pick = t;
                    break;
                }
        }
        take(pick);
        ++r.candidates;
    }
    r.millis = elapsed_ms(t0);
    return r;
}

ReductionResult reduce_diff(const exec::CoverageMatrix& m) {
    const auto t0 = std::chrono::steady_clock::now();
    require_coverable(m);
    ReductionResult r;
    r.strategy = Strategy::DIFF;
    const auto cover = rows_of(m);
    Bits uncovered = all_goals(m.goals.size());
    std::vector<bool> taken(m.tests.size(), false);
    while (!uncovered.none()) {
        ++r.candidates;
        int best = 0;
        std::size_t pick = 0;
        for (std::size_t t = 0; t < m.tests.size(); ++t) {
            if (taken[t]) continue;
            const int gain = cover[t].count_and(uncovered);
            if (gain > best) {
                best = gain;
                pick = t;
            }
        }
        taken[pick] = true;
        r.selected.push_back(m.tests[pick]);
        uncovered = uncovered.minus(cover[pick]);
    }
    r.millis = elapsed_ms(t0);
    return r;
}

ReductionResult reduce(Strategy s, const exec::CoverageMatrix& m, const exec::TestSuite& suite, std::uint64_t seed,
                       int dims) {
    switch (s) {
        case Strategy::ILP: return reduce_ilp(m);
        case Strategy::FastPP: return reduce_fastpp(m, suite, seed, dims);
        case Strategy::DIFF: return reduce_diff(m);
        case Strategy::None: break;
    }
    ReductionResult r;
    r.selected = m.tests;
    return r;
}

std::vector<std::string> covered_goals(const exec::CoverageMatrix& m, const std::vector<std::string>& tests) {
    std::vector<std::string> out;
    for (std::size_t g = 0; g < m.goals.size(); ++g) {
        for (std::size_t t = 0; t < m.tests.size(); ++t) {
            if (!m.covers(t, g)) continue;
            if (std::find(tests.begin(), tests.end(), m.tests[t]) == tests.end()) continue;
            out.push_back(m.goals[g]);
            break;
        }
    }
    return out;
}

}  // namespace regkit::reduce
