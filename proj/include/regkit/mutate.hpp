#pragma once

#include "regkit/minic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace regkit::mutate {

enum class Group { ValueReplacement, OperatorReplacement, ReferenceReplacement };
const char* to_string(Group g);

struct Operator {
    std::string id;  // e.g. ROR-le-eq
    Group group;
    std::string description;
};

/// The built-in catalog in a fixed order.
const std::vector<Operator>& list_operators();

struct Mutant {
    std::string op;
    int line = 0;
    int col = 0;
    int ordinal = 1;  // 1-based among the mutation sites on this line
    std::string original;     // replaced source fragment
    std::string replacement;  // new fragment
    std::string text;         // full mutated source
    minic::SourceProgram program;
};

/// Every valid single-site mutant inside fn and the functions it calls,
/// ordered by (line, column, operator id, replacement). Candidates that
/// fail to parse or check are skipped and described in `dropped`.
std::vector<Mutant> enumerate_mutants(const minic::SourceProgram& p, std::string_view fn,
                                      std::vector<std::string>* dropped = nullptr);

/// Seeded uniform choice from enumerate_mutants. Throws NoApplicableMutant.
Mutant pick_mutant(const minic::SourceProgram& p, std::string_view fn, std::uint64_t seed);

/// `// mutant: <op> @ line L`
std::string header_comment(const Mutant& m);

}  // namespace regkit::mutate
