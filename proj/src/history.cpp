#include "regkit/history.hpp"

#include "regkit/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace regkit::history {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string join_lines(const std::vector<std::string>& lines, bool trailing_newline) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    if (trailing_newline && !lines.empty()) out += '\n';
    return out;
}

// Line payload after a two-character marker: "-- text" or "--" for an empty line.
std::string payload(std::string_view line) {
    if (line.size() <= 2) return {};
    if (line[2] == ' ') return std::string(line.substr(3));
    return std::string(line.substr(2));
}

}  // namespace

std::vector<std::string> split_lines(std::string_view text, bool* trailing_newline) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (trailing_newline) *trailing_newline = !text.empty() && text.back() == '\n';
    return lines;
}

void validate(const Patch& p) {
    for (std::size_t h = 0; h < p.hunks.size(); ++h) {
        const Hunk& cur = p.hunks[h];
        if (cur.old_line < 1) throw Error("hunk " + std::to_string(h + 1) + ": line numbers start at 1");
        if (cur.removed.empty() && cur.added.empty())
            throw Error("hunk " + std::to_string(h + 1) + " is empty");
        if (h == 0) continue;
        const Hunk& prev = p.hunks[h - 1];
        // a pure insertion occupies no old line, so the next hunk may start right there
        const int prev_end = prev.old_line + static_cast<int>(prev.removed.size());
        if (cur.old_line < prev_end)
            throw Error("hunk " + std::to_string(h + 1) + " overlaps or precedes hunk " + std::to_string(h));
    }
}

Patch parse_patch(std::string_view text) {
    Patch p;
    int lineno = 0;
    for (const auto& raw : split_lines(text)) {
        ++lineno;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.rfind("@", 0) == 0) {
            Hunk h;
            std::string_view num = line.substr(1);
            while (!num.empty() && num.front() == ' ') num.remove_prefix(1);
            while (!num.empty() && num.back() == ' ') num.remove_suffix(1);
            auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), h.old_line);
            if (ec != std::errc() || ptr != num.data() + num.size())
                throw SyntaxError(lineno, 1, "malformed hunk header");
            p.hunks.push_back(std::move(h));
        } else if (line.rfind("--", 0) == 0) {
            if (p.hunks.empty()) throw SyntaxError(lineno, 1, "removed line outside a hunk");
            if (!p.hunks.back().added.empty())
                throw SyntaxError(lineno, 1, "removed lines must precede added lines");
            p.hunks.back().removed.push_back(payload(line));
        } else if (line.rfind("++", 0) == 0) {
            if (p.hunks.empty()) throw SyntaxError(lineno, 1, "added line outside a hunk");
            p.hunks.back().added.push_back(payload(line));
        } else if (line.empty() || line.front() == '#') {
            continue;
        } else {
            throw SyntaxError(lineno, 1, "unrecognized patch line");
        }
    }
    validate(p);
    return p;
}

std::string format_patch(const Patch& p) {
    std::string out;
    for (const auto& h : p.hunks) {
        out += "@ " + std::to_string(h.old_line) + "\n";
        for (const auto& r : h.removed) out += "-- " + r + "\n";
        for (const auto& a : h.added) out += "++ " + a + "\n";
    }
    return out;
}

std::string apply_patch(std::string_view text, const Patch& p) {
    validate(p);
    bool trailing = false;
    std::vector<std::string> old_lines = split_lines(text, &trailing);
    if (old_lines.empty()) trailing = true;
    std::vector<std::string> out;
    out.reserve(old_lines.size());
    std::size_t next = 0;  // 0-based index of the next old line to copy
    for (std::size_t h = 0; h < p.hunks.size(); ++h) {
        const Hunk& hunk = p.hunks[h];
        const std::size_t at = static_cast<std::size_t>(hunk.old_line - 1);
        if (at > old_lines.size())
            throw PatchMismatch(h + 1, hunk.removed.empty() ? "" : hunk.removed.front(), "<end of file>",
                                hunk.old_line);
        while (next < at) out.push_back(old_lines[next++]);
        for (std::size_t r = 0; r < hunk.removed.size(); ++r) {
            const std::size_t idx = at + r;
            const std::string actual = idx < old_lines.size() ? old_lines[idx] : std::string("<end of file>");
            if (idx >= old_lines.size() || old_lines[idx] != hunk.removed[r])
                throw PatchMismatch(h + 1, hunk.removed[r], actual, static_cast<int>(idx) + 1);
        }
        next = at + hunk.removed.size();
        for (const auto& a : hunk.added) out.push_back(a);
    }
    while (next < old_lines.size()) out.push_back(old_lines[next++]);
    return join_lines(out, trailing);
}

Patch invert_patch(const Patch& p) {
    Patch inv;
    int offset = 0;
    for (const auto& h : p.hunks) {
        Hunk r;
        r.old_line = h.old_line + offset;
        r.removed = h.added;
        r.added = h.removed;
        offset += static_cast<int>(h.added.size()) - static_cast<int>(h.removed.size());
        inv.hunks.push_back(std::move(r));
    }
    return inv;
}

ModifiedLines modified_lines(const Patch& p) {
    ModifiedLines m;
    int offset = 0;
    for (const auto& h : p.hunks) {
        const int new_start = h.old_line + offset;
        for (std::size_t a = 0; a < h.added.size(); ++a) m.lines.insert(new_start + static_cast<int>(a));
        if (h.added.empty()) m.anchors.insert(new_start);
        offset += static_cast<int>(h.added.size()) - static_cast<int>(h.removed.size());
    }
    return m;
}

std::optional<int> map_line(const Patch& p, int old_line) {
    int offset = 0;
    for (const auto& h : p.hunks) {
        const int removed_end = h.old_line + static_cast<int>(h.removed.size());
        if (old_line < h.old_line) break;
        if (old_line < removed_end) return std::nullopt;
        offset += static_cast<int>(h.added.size()) - static_cast<int>(h.removed.size());
    }
    return old_line + offset;
}

VersionHistory::VersionHistory(std::string name, std::string base_text, std::vector<Patch> patches)
    : name_(std::move(name)), patches_(std::move(patches)) {
    texts_.push_back(std::move(base_text));
    for (std::size_t i = 0; i < patches_.size(); ++i) {
        try {
            texts_.push_back(apply_patch(texts_.back(), patches_[i]));
        } catch (const Error& e) {
            throw Error(name_ + ": patch" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    for (std::size_t i = 0; i < texts_.size(); ++i) {
        try {
            versions_.push_back(minic::load_program(texts_[i]));
        } catch (const Error& e) {
            throw Error(name_ + ": version " + std::to_string(i) + ": " + e.what());
        }
    }
}

VersionHistory VersionHistory::load(const std::filesystem::path& dir) {
    const auto base = dir / "p0.mc";
    if (!std::filesystem::exists(base)) throw Error("history " + dir.string() + " has no p0.mc");
    std::vector<Patch> patches;
    for (int i = 1;; ++i) {
        const auto path = dir / ("patch" + std::to_string(i) + ".diff");
        if (!std::filesystem::exists(path)) break;
        try {
            patches.push_back(parse_patch(read_file(path)));
        } catch (const SyntaxError& e) {
            throw Error(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
        } catch (const Error& e) {
            throw Error(path.string() + ": " + e.what());
        }
    }
    auto name = dir.filename().string();
    if (name.empty()) name = dir.parent_path().filename().string();
    return VersionHistory(name, read_file(base), std::move(patches));
}

std::string VersionHistory::reconstruct(std::size_t i, std::size_t j) const {
    if (j > i || i >= texts_.size()) throw Error("cannot reconstruct version " + std::to_string(j) +
                                                 " from version " + std::to_string(i));
    std::string text = texts_[i];
    for (std::size_t k = i; k > j; --k) text = apply_patch(text, invert_patch(patches_[k - 1]));
    return text;
}

std::set<int> VersionHistory::modified_since(std::size_t i, std::size_t j) const {
    std::set<int> lines;
    for (std::size_t k = j + 1; k <= i; ++k) {
        const ModifiedLines m = modified_lines(patches_[k - 1]);
        std::set<int> carried;
        for (int l : lines)
            if (auto mapped = map_line(patches_[k - 1], l)) carried.insert(*mapped);
        carried.insert(m.lines.begin(), m.lines.end());
        carried.insert(m.anchors.begin(), m.anchors.end());
        lines = std::move(carried);
    }
    return lines;
}

}  // namespace regkit::history
