#include "prefsel/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "prefsel/error.hpp"

namespace prefsel {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

bool valid_id(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

struct ColumnHeader {
  CriterionId id;
  Direction direction = Direction::benefit;
  std::optional<std::pair<double, double>> scale;
};

ColumnHeader parse_header_token(std::string_view token, std::string_view source, std::size_t column) {
  ColumnHeader h;
  std::string_view name = token;
  if (const auto at = token.find('@'); at != std::string_view::npos) {
    name = trim(token.substr(0, at));
    const auto range = split(token.substr(at + 1), ':');
    std::optional<double> lo, hi;
    if (range.size() == 2) {
      lo = to_number(range[0]);
      hi = to_number(range[1]);
    }
    if (!lo || !hi)
      throw InputError(fmt::format("{}:1: column {}: scale must be written @low:high, got '{}'", source, column + 1,
                                   token));
    h.scale = std::make_pair(*lo, *hi);
  }
  if (const auto colon = name.find(':'); colon != std::string_view::npos) {
    const auto kind = trim(name.substr(colon + 1));
    name = trim(name.substr(0, colon));
    if (kind == "cost")
      h.direction = Direction::cost;
    else if (kind != "benefit")
      throw InputError(fmt::format("{}:1: column {}: unknown direction '{}'", source, column + 1, kind));
  }
  if (!valid_id(name))
    throw InputError(fmt::format("{}:1: column {}: invalid criterion id '{}'", source, column + 1, name));
  h.id = CriterionId(std::string(name));
  return h;
}

std::string format_number(double v) { return fmt::format("{}", v); }

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PerformanceTable parse_performance_csv(std::string_view text, std::string_view source, int subintervals) {
  std::vector<std::pair<std::size_t, std::string_view>> rows;
  const auto lines = lines_of(text);
  for (std::size_t k = 0; k < lines.size(); ++k)
    if (!trim(lines[k]).empty()) rows.emplace_back(k + 1, lines[k]);
  if (rows.empty()) throw InputError(fmt::format("{}: no alternatives", source));

  const auto header = split(rows.front().second, ',');
  if (header.size() < 2) throw InputError(fmt::format("{}:{}: header names no criteria", source, rows.front().first));
  std::vector<ColumnHeader> columns;
  for (std::size_t c = 1; c < header.size(); ++c) columns.push_back(parse_header_token(header[c], source, c));
  if (rows.size() == 1) throw InputError(fmt::format("{}: no alternatives", source));

  std::vector<AlternativeId> alternatives;
  std::vector<std::vector<double>> raw;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto [line, content] = rows[r];
    const auto cells = split(content, ',');
    if (cells.size() != header.size())
      throw InputError(fmt::format("{}:{}: expected {} cells, found {}", source, line, header.size(), cells.size()));
    if (!valid_id(cells[0]))
      throw InputError(fmt::format("{}:{}: invalid alternative id '{}'", source, line, cells[0]));
    alternatives.emplace_back(std::string(cells[0]));
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto v = to_number(cells[c]);
      if (!v)
        throw InputError(fmt::format("{}:{}: cell ({}, {}) is not a number: '{}'", source, line, cells[0],
                                     columns[c - 1].id.str(), cells[c]));
      row.push_back(*v);
    }
    raw.push_back(std::move(row));
  }

  std::vector<CriterionSpec> criteria;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    CriterionSpec spec;
    spec.id = columns[j].id;
    spec.name = columns[j].id.str();
    spec.direction = columns[j].direction;
    spec.subintervals = subintervals;
    if (columns[j].scale) {
      std::tie(spec.scale_low, spec.scale_high) = *columns[j].scale;
    } else {
      spec.scale_low = std::numeric_limits<double>::infinity();
      spec.scale_high = -std::numeric_limits<double>::infinity();
      for (const auto& row : raw) {
        spec.scale_low = std::min(spec.scale_low, row[j]);
        spec.scale_high = std::max(spec.scale_high, row[j]);
      }
    }
    if (!(spec.scale_low < spec.scale_high))
      throw InputError(fmt::format("{}: criterion {} has an empty scale [{}, {}]", source, spec.id.str(),
                                   spec.scale_low, spec.scale_high));
    for (std::size_t i = 0; i < raw.size(); ++i) {
      double& v = raw[i][j];
      if (v < spec.scale_low - kScaleTolerance || v > spec.scale_high + kScaleTolerance)
        throw DomainError(fmt::format("{}:{}: score of {} on {} is {}, outside scale [{}, {}]", source,
                                      rows[i + 1].first, alternatives[i].str(), spec.id.str(), v, spec.scale_low,
                                      spec.scale_high));
      if (spec.direction == Direction::cost) v = ingest_cost_criterion(spec, v);
    }
    criteria.push_back(std::move(spec));
  }
  return PerformanceTable(std::move(criteria), std::move(alternatives), std::move(raw));
}

PerformanceTable load_performance_csv(const std::filesystem::path& path, int subintervals) {
  return parse_performance_csv(read_text_file(path), path.string(), subintervals);
}

std::string write_performance_csv(const PerformanceTable& table) {
  std::string out = "alternative";
  for (const auto& c : table.criteria()) {
    out += "," + c.id.str();
    if (c.direction == Direction::cost) out += ":cost";
    out += "@" + format_number(c.scale_low) + ":" + format_number(c.scale_high);
  }
  out += "\n";
  for (std::size_t i = 0; i < table.num_alternatives(); ++i) {
    out += table.alternative(i).str();
    for (std::size_t j = 0; j < table.num_criteria(); ++j) {
      const auto& c = table.criterion(j);
      const double v = c.direction == Direction::cost ? ingest_cost_criterion(c, table.score(i, j)) : table.score(i, j);
      out += "," + format_number(v);
    }
    out += "\n";
  }
  return out;
}

PreferenceStatement parse_statement(std::string_view line, const PerformanceTable* table) {
  const auto body = trim(line.substr(0, line.find('#')));
  const auto op = body.find_first_of(">~");
  const std::string_view expected = "expected '<id> > <id>' or '<id> ~ <id>'";
  if (op == std::string_view::npos) throw InputError(fmt::format("{}, got '{}'", expected, body));
  const auto left = trim(body.substr(0, op));
  const auto right = trim(body.substr(op + 1));
  if (!valid_id(left) || !valid_id(right)) throw InputError(fmt::format("{}, got '{}'", expected, body));
  PreferenceStatement st{AlternativeId(std::string(left)), AlternativeId(std::string(right)),
                         body[op] == '>' ? Relation::strict : Relation::indifferent};
  if (table) {
    for (const auto& id : {st.better, st.other})
      if (!table->find_alternative(id)) throw InputError(fmt::format("unknown alternative {}", id.str()));
  }
  if (st.relation == Relation::strict && st.better == st.other)
    throw InputError(fmt::format("{} cannot be strictly preferred to itself", st.better.str()));
  return st;
}

std::vector<PreferenceStatement> parse_preferences(std::string_view text, const PerformanceTable* table,
                                                   std::string_view source) {
  std::vector<PreferenceStatement> out;
  const auto lines = lines_of(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto body = trim(lines[k].substr(0, lines[k].find('#')));
    if (body.empty()) continue;
    try {
      out.push_back(parse_statement(body, table));
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}:{}: {}", source, k + 1, e.what()));
    }
  }
  return out;
}

std::vector<PreferenceStatement> load_preferences(const std::filesystem::path& path, const PerformanceTable* table) {
  return parse_preferences(read_text_file(path), table, path.string());
}

std::string write_preferences(std::span<const PreferenceStatement> statements) {
  std::string out;
  for (const auto& st : statements) out += to_string(st) + "\n";
  return out;
}

ValueFunctionModel parse_value_function(std::string_view json_text, const PerformanceTable& table) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("value function is not valid JSON: {}", e.what()));
  }
  if (doc.is_object() && doc.contains("value_function")) doc = doc["value_function"];
  if (!doc.is_object() || !doc.contains("criteria") || !doc["criteria"].is_array())
    throw InputError("value function document needs a 'criteria' array");

  std::vector<MarginalFunction> marginals;
  for (const auto& c : table.criteria())
    marginals.push_back({false, std::vector<double>(static_cast<std::size_t>(c.subintervals), 0.0)});
  try {
    for (const auto& entry : doc["criteria"]) {
      const auto id = entry.at("id").get<std::string>();
      const auto j = table.find_criterion(CriterionId(id));
      if (!j) throw InputError(fmt::format("value function names unknown criterion {}", id));
      MarginalFunction m;
      m.selected = entry.value("selected", true);
      m.deltas = entry.at("deltas").get<std::vector<double>>();
      marginals[*j] = std::move(m);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("malformed value function: {}", e.what()));
  }
  const double epsilon = doc.value("epsilon_used", 0.0);
  ValueFunctionModel vfm(std::move(marginals), epsilon);
  return vfm;
}

}  // namespace prefsel
