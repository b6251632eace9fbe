#pragma once

#include "regkit/minic.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace regkit::history {

struct Hunk {
    int old_line = 1;  // 1-based; for pure insertions, the line the new text goes in front of
    std::vector<std::string> removed;
    std::vector<std::string> added;

    friend bool operator==(const Hunk&, const Hunk&) = default;
};

/// Line-level, multi-hunk, invertible patch. Hunks are sorted by old_line
/// and do not overlap.
struct Patch {
    std::vector<Hunk> hunks;

    bool empty() const { return hunks.empty(); }
    friend bool operator==(const Patch&, const Patch&) = default;
};

/// Parses the textual patch format:
///
///     @ <old_line_no>
///     -- <exact old line>
///     ++ <new line>
///
/// Blank lines and lines starting with '#' between hunks are ignored.
Patch parse_patch(std::string_view text);
std::string format_patch(const Patch& p);

/// Throws regkit::Error on unsorted or overlapping hunks.
void validate(const Patch& p);

std::vector<std::string> split_lines(std::string_view text, bool* trailing_newline = nullptr);

/// Applies p to text. Throws PatchMismatch if a removed line does not match.
std::string apply_patch(std::string_view text, const Patch& p);

Patch invert_patch(const Patch& p);

struct ModifiedLines {
    std::set<int> lines;    // added lines, new-version coordinates
    std::set<int> anchors;  // successor line of each pure deletion, new-version coordinates
};

ModifiedLines modified_lines(const Patch& p);

/// Maps an old-version line through p; nullopt if the line was removed.
std::optional<int> map_line(const Patch& p, int old_line);

/// P_0 plus Patch_1..Patch_k with every version materialized and parsed.
class VersionHistory {
public:
    /// Throws if any version fails to apply, parse or check.
    VersionHistory(std::string name, std::string base_text, std::vector<Patch> patches);

    /// Loads `p0.mc`, `patch1.diff`, `patch2.diff`, ... from a directory.
    static VersionHistory load(const std::filesystem::path& dir);

    const std::string& name() const { return name_; }
    std::size_t size() const { return versions_.size(); }  // k + 1
    std::size_t patch_count() const { return patches_.size(); }

    const minic::SourceProgram& version(std::size_t i) const { return versions_.at(i); }
    const std::string& text(std::size_t i) const { return texts_.at(i); }
    /// Patch_i turns version i-1 into version i (1-based).
    const Patch& patch(std::size_t i) const { return patches_.at(i - 1); }

    /// Rebuilds version j from version i by applying inverse patches i, i-1, ..., j+1.
    std::string reconstruct(std::size_t i, std::size_t j) const;

    /// Lines of version i modified since version j (j < i), in version-i
    /// coordinates: each later patch's modified lines plus earlier ones
    /// carried forward through the intermediate line maps.
    std::set<int> modified_since(std::size_t i, std::size_t j) const;

private:
    std::string name_;
    std::vector<Patch> patches_;
    std::vector<std::string> texts_;
    std::vector<minic::SourceProgram> versions_;
};

}  // namespace regkit::history
