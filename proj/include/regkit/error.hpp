#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace regkit {

/// Base class of every domain error raised by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, int col, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + message),
          line_(line), col_(col), message_(message) {}

    int line() const noexcept { return line_; }
    int col() const noexcept { return col_; }
    const std::string& message() const noexcept { return message_; }

private:
    int line_;
    int col_;
    std::string message_;
};

class ScopeError : public Error {
public:
    ScopeError(std::string identifier, int line, const std::string& reason = "undeclared identifier")
        : Error(std::to_string(line) + ": " + reason + " '" + identifier + "'"),
          identifier_(std::move(identifier)), line_(line) {}

    const std::string& identifier() const noexcept { return identifier_; }
    int line() const noexcept { return line_; }

private:
    std::string identifier_;
    int line_;
};

class SemanticError : public Error {
public:
    SemanticError(int line, const std::string& message)
        : Error(std::to_string(line) + ": " + message), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class UnknownFunction : public Error {
public:
    explicit UnknownFunction(const std::string& name)
        : Error("unknown function '" + name + "'") {}
};

class PatchMismatch : public Error {
public:
    PatchMismatch(std::size_t hunk, std::string expected, std::string actual, int line)
        : Error("hunk " + std::to_string(hunk) + " does not apply at line " + std::to_string(line) +
                ": expected '" + expected + "', found '" + actual + "'"),
          hunk_(hunk), expected_(std::move(expected)), actual_(std::move(actual)) {}

    std::size_t hunk() const noexcept { return hunk_; }
    const std::string& expected() const noexcept { return expected_; }
    const std::string& actual() const noexcept { return actual_; }

private:
    std::size_t hunk_;
    std::string expected_;
    std::string actual_;
};

class InvalidComparator : public Error {
public:
    explicit InvalidComparator(const std::string& detail)
        : Error("invalid comparator: " + detail) {}
};

class SignatureMismatch : public Error {
public:
    explicit SignatureMismatch(const std::string& detail)
        : Error("signature mismatch: " + detail) {}
};

class UncoverableGoal : public Error {
public:
    explicit UncoverableGoal(std::vector<std::string> goals)
        : Error(describe(goals)), goals_(std::move(goals)) {}

    const std::vector<std::string>& goals() const noexcept { return goals_; }

private:
    static std::string describe(const std::vector<std::string>& goals) {
        std::string s = "goals covered by no test:";
        for (const auto& g : goals) s += " " + g;
        return s;
    }
    std::vector<std::string> goals_;
};

class NoApplicableMutant : public Error {
public:
    NoApplicableMutant() : Error("no applicable mutant") {}
};

class EmptyDiff : public Error {
public:
    EmptyDiff() : Error("patch modifies no lines") {}
};

}  // namespace regkit
