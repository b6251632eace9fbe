#include "regkit/io.hpp"

#include "regkit/error.hpp"
#include "regkit/history.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace regkit::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::int32_t parse_int(std::string_view s, int line, int col) {
    s = trim(s);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || v < INT32_MIN || v > INT32_MAX)
        throw SyntaxError(line, col, "bad integer '" + std::string(s) + "'");
    return static_cast<std::int32_t>(v);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto at = s.find(sep, start);
        if (at == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, at - start));
        start = at + 1;
    }
}

}  // namespace

exec::TestSuite parse_suite(std::string_view text) {
    exec::TestSuite suite;
    int lineno = 0;
    for (const auto& raw : history::split_lines(text)) {
        ++lineno;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.rfind("test ", 0) != 0) throw SyntaxError(lineno, 1, "expected 'test <id>: ...'");
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) throw SyntaxError(lineno, 1, "missing ':' after test id");
        exec::TestCase t;
        t.id = std::string(trim(line.substr(5, colon - 5)));
        if (t.id.empty()) throw SyntaxError(lineno, 6, "empty test id");
        const std::string_view rest = trim(line.substr(colon + 1));
        if (!rest.empty()) {
            for (auto part : split(rest, ';')) {
                part = trim(part);
                if (part.empty()) continue;
                const int col = static_cast<int>(part.data() - raw.data()) + 1;
                const auto eq = part.find('=');
                if (eq == std::string_view::npos) throw SyntaxError(lineno, col, "expected <param>=<value>");
                exec::Binding b;
                b.name = std::string(trim(part.substr(0, eq)));
                const std::string_view value = trim(part.substr(eq + 1));
                if (!value.empty() && value.front() == '[') {
                    if (value.back() != ']') throw SyntaxError(lineno, col, "unterminated array");
                    exec::IntArray arr;
                    const std::string_view inner = trim(value.substr(1, value.size() - 2));
                    if (!inner.empty())
                        for (auto v : split(inner, ',')) arr.push_back(parse_int(v, lineno, col));
                    b.value = std::move(arr);
                } else {
                    b.value = parse_int(value, lineno, col);
                }
                t.bindings.push_back(std::move(b));
            }
        }
        suite.push_back(std::move(t));
    }
    return suite;
}

std::string format_test(const exec::TestCase& t) { return "test " + t.id + ": " + exec::format_bindings(t.bindings); }

std::string format_suite(const exec::TestSuite& suite) {
    std::string out;
    for (const auto& t : suite) out += format_test(t) + "\n";
    return out;
}

exec::CoverageMatrix parse_matrix_csv(std::string_view text) {
    exec::CoverageMatrix m;
    int lineno = 0;
    bool header = true;
    for (const auto& raw : history::split_lines(text)) {
        ++lineno;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (header) {
            if (trim(cells[0]) != "test") throw SyntaxError(lineno, 1, "header must start with 'test'");
            for (std::size_t i = 1; i < cells.size(); ++i) m.goals.emplace_back(trim(cells[i]));
            header = false;
            continue;
        }
        if (cells.size() != m.goals.size() + 1)
            throw SyntaxError(lineno, 1,
                              "row has " + std::to_string(cells.size() - 1) + " cells, expected " +
                                  std::to_string(m.goals.size()));
        m.tests.emplace_back(trim(cells[0]));
        std::vector<std::uint8_t> row;
        for (std::size_t i = 1; i < cells.size(); ++i) {
            const auto c = trim(cells[i]);
            if (c != "0" && c != "1") throw SyntaxError(lineno, 1, "cell must be 0 or 1");
            row.push_back(c == "1" ? 1 : 0);
        }
        m.relation.push_back(std::move(row));
    }
    if (header) throw SyntaxError(1, 1, "empty matrix");
    m.flag_uncoverable();
    return m;
}

std::string format_matrix_csv(const exec::CoverageMatrix& m) {
    std::string out = "test";
    for (const auto& g : m.goals) out += "," + g;
    out += "\n";
    for (std::size_t t = 0; t < m.tests.size(); ++t) {
        out += m.tests[t];
        for (auto c : m.relation[t]) out += c ? ",1" : ",0";
        out += "\n";
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace regkit::io
