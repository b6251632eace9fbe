#pragma once

// Random, well-formed MiniC programs for property tests. Every function
// ends in a return, loop counters are never written by loop bodies, and
// expressions stay within declared variables, so every output loads.

#include "regkit/rng.hpp"

#include <random>
#include <string>
#include <vector>

namespace regkit::testing {

struct RandomProgramOptions {
    int max_depth = 3;
    int max_stmts = 4;
    bool allow_dead_code = false;  // statements after a return in the same block
    bool allow_calls = true;
};

class RandomProgram {
public:
    explicit RandomProgram(std::uint64_t seed, RandomProgramOptions opt = {}) : g_(seed), opt_(opt) {}

    /// Text of a program whose entry point is `int f(int a, int b[])`.
    std::string generate() {
        out_.clear();
        globals_.clear();
        const int nglobals = pick(3);
        for (int i = 0; i < nglobals; ++i) {
            const std::string name = "g" + std::to_string(i);
            line("int " + name + " = " + std::to_string(pick(7) - 3) + ";");
            globals_.push_back(name);
        }
        has_helper_ = opt_.allow_calls && pick(2) == 1;
        if (has_helper_) {
            line("int h(int p) {");
            ints_ = {"p"};
            arrays_.clear();
            counters_.clear();
            indent_ = 1;
            in_helper_ = true;
            if (!block_body(1)) line("return " + expr(2) + ";");
            indent_ = 0;
            in_helper_ = false;
            line("}");
        }
        line("int f(int a, int b[]) {");
        ints_ = {"a"};
        arrays_ = {"b"};
        counters_.clear();
        indent_ = 1;
        if (!block_body(0)) line("return " + expr(2) + ";");
        indent_ = 0;
        line("}");
        return out_;
    }

private:
    int pick(int n) { return static_cast<int>(rng::uniform_below(g_, static_cast<std::uint64_t>(n))); }

    void line(const std::string& s) { out_ += std::string(static_cast<std::size_t>(indent_) * 2, ' ') + s + "\n"; }

    std::string fresh(const char* prefix) { return prefix + std::to_string(counter_++); }

    std::string int_var() {
        std::vector<std::string> all = ints_;
        all.insert(all.end(), counters_.begin(), counters_.end());
        all.insert(all.end(), globals_.begin(), globals_.end());
        return all[static_cast<std::size_t>(pick(static_cast<int>(all.size())))];
    }

    std::string writable_var() {
        std::vector<std::string> all = ints_;
        all.insert(all.end(), globals_.begin(), globals_.end());
        return all[static_cast<std::size_t>(pick(static_cast<int>(all.size())))];
    }

    std::string expr(int depth) {
        const int choice = depth <= 0 ? pick(3) : pick(10);
        switch (choice) {
            case 0: return std::to_string(pick(9));
            case 1: return int_var();
            case 2:
                if (!arrays_.empty()) return arrays_[0] + "[" + std::to_string(pick(3)) + "]";
                return int_var();
            case 3: return "-(" + expr(depth - 1) + ")";
            case 4: return "!(" + expr(depth - 1) + ")";
            case 5:
                if (has_helper_ && !in_helper_) return "h(" + expr(depth - 1) + ")";
                return int_var();
            case 6: {
                static const char* rel[] = {"<", "<=", ">", ">=", "==", "!="};
                return expr(depth - 1) + " " + rel[pick(6)] + " " + expr(depth - 1);
            }
            case 7: {
                static const char* logic[] = {"&&", "||"};
                return atom(depth - 1) + " " + logic[pick(2)] + " " + atom(depth - 1);
            }
            case 8: {
                static const char* arith[] = {"+", "-", "*", "/", "%"};
                return expr(depth - 1) + " " + arith[pick(5)] + " " + expr(depth - 1);
            }
            default: return "(" + expr(depth - 1) + ")";
        }
    }

    std::string atom(int depth) {
        const std::string e = expr(depth);
        for (char c : e)
            if (c == ' ') return "(" + e + ")";
        return e;
    }

    // Returns true if the block ends in a return.
    bool block_body(int depth) {
        const int n = 1 + pick(opt_.max_stmts);
        const std::size_t saved = ints_.size();
        const std::size_t saved_counters = counters_.size();
        bool returned = false;
        for (int i = 0; i < n; ++i) {
            returned = statement(depth);
            if (returned && !opt_.allow_dead_code) break;
        }
        ints_.resize(saved);
        counters_.resize(saved_counters);
        return returned;
    }

    // Returns true if the statement was a return.
    bool statement(int depth) {
        const int choice = depth >= opt_.max_depth ? pick(4) : pick(8);
        switch (choice) {
            case 0: {
                const std::string v = fresh("v");
                line("int " + v + " = " + expr(2) + ";");
                ints_.push_back(v);
                return false;
            }
            case 1: {
                static const char* ops[] = {" = ", " += ", " -= "};
                line(writable_var() + ops[pick(3)] + expr(2) + ";");
                return false;
            }
            case 2:
                if (!arrays_.empty() && pick(2) == 0) {
                    line(arrays_[0] + "[" + std::to_string(pick(3)) + "] = " + expr(1) + ";");
                } else {
                    line(writable_var() + (pick(2) ? "++;" : "--;"));
                }
                return false;
            case 3:
                if (pick(3) == 0) {
                    line("return " + expr(2) + ";");
                    return true;
                }
                line("lab" + std::to_string(counter_++) + ":");
                return false;
            case 4: case 5: {
                line("if (" + expr(2) + ") {");
                ++indent_;
                const bool then_returns = block_body(depth + 1);
                --indent_;
                bool else_returns = false;
                if (pick(2)) {
                    line("} else {");
                    ++indent_;
                    else_returns = block_body(depth + 1);
                    --indent_;
                }
                line("}");
                return then_returns && else_returns;
            }
            case 6: {
                const std::string c = fresh("i");
                line("for (int " + c + " = 0; " + c + " < " + std::to_string(1 + pick(3)) + "; " + c + "++) {");
                ++indent_;
                counters_.push_back(c);
                block_body(depth + 1);
                counters_.pop_back();
                --indent_;
                line("}");
                return false;
            }
            default: {
                const std::string c = fresh("w");
                line("int " + c + " = 0;");
                line("while (" + c + " < " + std::to_string(1 + pick(3)) + ") {");
                ++indent_;
                counters_.push_back(c);
                line(c + "++;");
                block_body(depth + 1);
                counters_.pop_back();
                --indent_;
                line("}");
                return false;
            }
        }
    }

    std::mt19937_64 g_;
    RandomProgramOptions opt_;
    std::string out_;
    std::vector<std::string> globals_, ints_, arrays_, counters_;
    int indent_ = 0;
    int counter_ = 0;
    bool has_helper_ = false;
    bool in_helper_ = false;
};

}  // namespace regkit::testing
