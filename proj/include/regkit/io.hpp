#pragma once

#include "regkit/exec.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace regkit::io {

/// Suite files: one `test <id>: <param>=<int | [int,...]>; ...` per line.
/// Blank lines and `#` comments are skipped. Throws SyntaxError.
exec::TestSuite parse_suite(std::string_view text);
std::string format_test(const exec::TestCase& t);
std::string format_suite(const exec::TestSuite& suite);

/// Coverage matrix CSV: header `test,<goal>,...`, then one 0/1 row per test.
exec::CoverageMatrix parse_matrix_csv(std::string_view text);
std::string format_matrix_csv(const exec::CoverageMatrix& m);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace regkit::io
