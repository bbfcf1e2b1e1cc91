#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "prefsel/performance_table.hpp"
#include "prefsel/value_function.hpp"

namespace prefsel {

/// Parses a performance table. The header row starts with a label cell
/// followed by one token per criterion, `id[:cost|:benefit][@low:high]`.
/// Undeclared scales span the column's data. Each further row is an
/// alternative id and its scores. Cost columns are reflected. `source`
/// prefixes error messages.
PerformanceTable parse_performance_csv(std::string_view text, std::string_view source = "<table>",
                                       int subintervals = 1);
PerformanceTable load_performance_csv(const std::filesystem::path& path, int subintervals = 1);

/// Inverse of parse_performance_csv: declared scales, cost columns written
/// back in their original orientation.
std::string write_performance_csv(const PerformanceTable& table);

/// One statement per line, `<id> > <id>` or `<id> ~ <id>`. Blank lines and
/// `#` comments are skipped. When `table` is given, ids are checked against
/// it. Errors carry the line number.
std::vector<PreferenceStatement> parse_preferences(std::string_view text, const PerformanceTable* table = nullptr,
                                                   std::string_view source = "<preferences>");
std::vector<PreferenceStatement> load_preferences(const std::filesystem::path& path,
                                                  const PerformanceTable* table = nullptr);
PreferenceStatement parse_statement(std::string_view line, const PerformanceTable* table = nullptr);

std::string write_preferences(std::span<const PreferenceStatement> statements);

/// Reads the `value_function` of a report, or a bare value function object,
/// and matches its criteria to the table by id. Criteria missing from the
/// document are unselected with zero differences.
ValueFunctionModel parse_value_function(std::string_view json_text, const PerformanceTable& table);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace prefsel
