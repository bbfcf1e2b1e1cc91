#include "prefsel/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "json.hpp"
#include "prefsel/error.hpp"

namespace prefsel {

using nlohmann::json;

namespace {

struct ModeName {
  Mode mode;
  const char* name;
};

constexpr ModeName kModes[] = {
    {Mode::consistency, "consistency"},
    {Mode::uta, "uta"},
    {Mode::select_consistent, "select-consistent"},
    {Mode::select_inconsistent, "select-inconsistent"},
    {Mode::representative, "representative"},
    {Mode::enumerate, "enumerate"},
    {Mode::relevance, "relevance"},
    {Mode::rank, "rank"},
};

template <class E>
[[noreturn]] void rethrow_in(const E& e, Mode mode) {
  throw E(fmt::format("{}: {}", to_string(mode), e.what()));
}

std::string fixed4(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  const auto s = fmt::format("{:.4f}", v);
  return s == "-0.0000" ? "0.0000" : s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<CriterionId> ids_of(const PerformanceTable& table, const std::vector<std::size_t>& idx) {
  return criterion_ids(table, idx);
}

std::string format_index_set(const PerformanceTable& table, const std::vector<std::size_t>& idx) {
  const auto ids = ids_of(table, idx);
  return ids.empty() ? "{}" : format_set(ids);
}

json vfm_json(const ValueFunctionModel& vfm, const PerformanceTable& table) {
  json criteria = json::array();
  for (std::size_t j = 0; j < vfm.size(); ++j) {
    const auto& m = vfm.marginal(j);
    json points = json::array();
    for (const auto& p : marginal_points(table.criterion(j), m.deltas))
      points.push_back({{"score", p.score}, {"value", p.value}});
    criteria.push_back({{"id", table.criterion(j).id.str()},
                        {"selected", m.selected},
                        {"weight", m.weight()},
                        {"deltas", m.deltas},
                        {"points", std::move(points)}});
  }
  return {{"epsilon_used", vfm.epsilon_used()}, {"criteria", std::move(criteria)}};
}

json errors_json(const std::map<AlternativeId, AlternativeError>& errors) {
  json out = json::object();
  for (const auto& [id, e] : errors) out[id.str()] = {{"over", e.over}, {"under", e.under}};
  return out;
}

json params_json(const Report& r) {
  json p = {{"p", r.params.p}, {"C", r.params.C}, {"epsilon", r.params.epsilon}, {"rho", r.params.rho}};
  p["gamma"] = r.params.gamma ? json(*r.params.gamma) : json(nullptr);
  json per = json::object();
  for (const auto& [id, g] : r.params.gamma_by_criterion) per[id.str()] = g;
  p["gamma_by_criterion"] = std::move(per);
  p["max_selected"] = r.params.max_selected ? json(*r.params.max_selected) : json(nullptr);
  if (r.mode == Mode::representative) p["epsilon_as_variable"] = r.epsilon_as_variable;
  return p;
}

std::vector<std::string> id_strings(std::span<const CriterionId> ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string md_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = md_row(header);
  out += "|";
  for (std::size_t k = 0; k < header.size(); ++k) out += "---|";
  out += "\n";
  for (const auto& r : rows) out += md_row(r);
  return out;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) out += ",";
    const bool quote = cells[k].find_first_of(",\"") != std::string::npos;
    if (!quote) {
      out += cells[k];
      continue;
    }
    out += '"';
    for (char c : cells[k]) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    out += '"';
  }
  return out + "\n";
}

}  // namespace

Mode parse_mode(std::string_view name) {
  for (const auto& m : kModes)
    if (name == m.name) return m.mode;
  throw InputError(fmt::format("unknown mode '{}'", name));
}

std::string to_string(Mode mode) {
  for (const auto& m : kModes)
    if (m.mode == mode) return m.name;
  return "unknown";
}

Format parse_format(std::string_view name) {
  if (name == "json") return Format::json;
  if (name == "markdown" || name == "md") return Format::markdown;
  if (name == "csv") return Format::csv;
  throw InputError(fmt::format("unknown format '{}'", name));
}

std::string to_string(Format format) {
  switch (format) {
    case Format::json: return "json";
    case Format::markdown: return "markdown";
    case Format::csv: return "csv";
  }
  return "json";
}

bool requires_consistency(Mode mode) {
  return mode == Mode::select_consistent || mode == Mode::representative || mode == Mode::enumerate ||
         mode == Mode::relevance;
}

SolveParams ProjectConfig::default_params() {
  SolveParams p;
  p.gamma = 5;
  return p;
}

void ProjectConfig::validate() const { params.validate(); }

std::string format_set(std::span<const CriterionId> ids) {
  std::string out = "{";
  for (std::size_t k = 0; k < ids.size(); ++k) out += (k ? "," : "") + ids[k].str();
  return out + "}";
}

Report run(const ProjectConfig& config, const PerformanceTable& input,
           std::span<const PreferenceStatement> statements, const SupportProgress& progress) {
  Report r;
  r.mode = config.mode;
  r.params = config.params;
  r.epsilon_as_variable = config.epsilon_as_variable;
  r.statements.assign(statements.begin(), statements.end());
  try {
    config.validate();
    if (config.mode == Mode::rank) {
      if (!config.vfm || config.vfm->empty()) throw InputError("rank needs a non-empty value function");
      // The value function fixes the subinterval counts.
      r.params.gamma.reset();
      r.params.gamma_by_criterion.clear();
      for (std::size_t j = 0; j < input.num_criteria() && j < config.vfm->size(); ++j)
        r.params.gamma_by_criterion[input.criterion(j).id] = static_cast<int>(config.vfm->marginal(j).deltas.size());
    }
    r.table = apply_breakpoints(input, r.params);
    validate_statements(r.table, statements);
    const double eps = r.params.epsilon;

    switch (config.mode) {
      case Mode::consistency:
        r.consistency = check_consistency(r.table, statements, eps, config.solver);
        break;
      case Mode::uta:
        r.uta = solve_uta(r.table, statements, eps, config.solver);
        r.consistency = ConsistencyResult{r.uta->feasible && r.uta->f_star <= kConsistencyTolerance, r.uta->f_star};
        if (r.uta->feasible) r.vfm = r.uta->vfm;
        break;
      case Mode::select_consistent:
      case Mode::select_inconsistent: {
        const auto mode = config.mode == Mode::select_consistent ? SelectionMode::consistent
                                                                  : SelectionMode::inconsistent;
        r.selection = solve_selection(build_selection(r.table, statements, r.params, mode), config.solver);
        r.vfm = r.selection->vfm;
        break;
      }
      case Mode::representative:
        r.representative = fit_representative(r.table, statements, config.epsilon_as_variable, eps, config.solver);
        r.vfm = r.representative->vfm;
        break;
      case Mode::enumerate:
      case Mode::relevance: {
        EnumerationOptions options;
        options.solver = config.solver;
        options.on_set = progress;
        r.supports = enumerate_streamlined_supports(r.table, statements, r.params, options);
        if (config.mode == Mode::relevance) r.relevance = relevance_report(*r.supports);
        break;
      }
      case Mode::rank:
        config.vfm->check_dimensions(r.table);
        r.vfm = *config.vfm;
        break;
    }
    if (r.vfm) r.ranking = rank(*r.vfm, r.table);
  } catch (const DomainError& e) {
    rethrow_in(e, config.mode);
  } catch (const InputError& e) {
    rethrow_in(e, config.mode);
  } catch (const InfeasibleError& e) {
    rethrow_in(e, config.mode);
  } catch (const ResourceError& e) {
    rethrow_in(e, config.mode);
  } catch (const NumericalError& e) {
    rethrow_in(e, config.mode);
  }
  return r;
}

std::string render(const Report& report, Format format) {
  switch (format) {
    case Format::json: return render_json(report);
    case Format::markdown: return render_markdown(report);
    case Format::csv: return render_csv(report);
  }
  return render_json(report);
}

std::string render_json(const Report& r) {
  json doc = {{"mode", to_string(r.mode)}, {"params", params_json(r)}};
  json statements = json::array();
  for (const auto& st : r.statements) statements.push_back(to_string(st));
  doc["statements"] = std::move(statements);
  if (r.consistency)
    doc["consistency"] = {{"consistent", r.consistency->consistent}, {"f_star", number_or_null(r.consistency->f_star)}};
  if (r.uta && r.uta->feasible) doc["uta"] = {{"f_star", r.uta->f_star}, {"errors", errors_json(r.uta->errors)}};
  if (r.selection) {
    const auto& s = *r.selection;
    doc["selection"] = {{"mode", r.mode == Mode::select_consistent ? "consistent" : "inconsistent"},
                        {"selected", id_strings(s.selected)},
                        {"sum_delta", s.selected.size()},
                        {"phi", s.phi},
                        {"empirical_error", s.empirical_error},
                        {"objective", s.objective},
                        {"errors", errors_json(s.per_alternative_errors)},
                        {"z_values", s.z_values},
                        {"nodes_explored", s.nodes_explored}};
  }
  if (r.representative) doc["representative"] = {{"margin", r.representative->margin}};
  if (r.vfm) doc["value_function"] = vfm_json(*r.vfm, r.table);
  if (r.ranking) {
    json scores = json::array();
    for (std::size_t i = 0; i < r.ranking->alternatives.size(); ++i)
      scores.push_back({{"id", r.ranking->alternatives[i].str()}, {"score", r.ranking->scores[i]}});
    doc["scores"] = std::move(scores);
    json groups = json::array();
    for (const auto& g : r.ranking->groups) {
      json members = json::array();
      for (const auto& a : g) members.push_back(a.str());
      groups.push_back(std::move(members));
    }
    doc["ranking"] = {{"groups", std::move(groups)}, {"text", to_string(*r.ranking)}};
  }
  if (r.supports) {
    const auto& a = *r.supports;
    json sets = json::array();
    for (std::size_t k = 0; k < a.family.size(); ++k)
      sets.push_back({{"criteria", id_strings(ids_of(r.table, a.family[k]))},
                      {"size", a.family[k].size()},
                      {"phi", number_or_null(a.phi[k])}});
    doc["supports"] = {{"gamma", a.gamma_used},
                       {"epsilon", a.epsilon_used},
                       {"count", a.family.size()},
                       {"sets", std::move(sets)}};
  }
  if (r.relevance) {
    const auto& rel = *r.relevance;
    json per = json::array();
    for (std::size_t j = 0; j < rel.criteria.size(); ++j)
      per.push_back({{"id", rel.criteria[j].str()}, {"relevance", rel.relevance[j]}});
    doc["relevance"] = {{"criteria", std::move(per)},
                        {"core", id_strings(ids_of(r.table, rel.core))},
                        {"redundant", id_strings(ids_of(r.table, rel.redundant))},
                        {"best_members", rel.best_members},
                        {"best_score", rel.best_score}};
  }
  return doc.dump(2) + "\n";
}

std::string render_markdown(const Report& r) {
  std::string out = fmt::format("# {} report\n\n", to_string(r.mode));
  out += fmt::format("Parameters: gamma={}, p={}, C={}, epsilon={}", r.params.gamma ? std::to_string(*r.params.gamma) : "per criterion",
                     r.params.p, r.params.C, r.params.epsilon);
  if (r.params.max_selected) out += fmt::format(", max_selected={}", *r.params.max_selected);
  out += "\n\n";

  if (r.consistency) {
    out += "## Consistency\n\n";
    out += md_table({"consistent", "F*"}, {{r.consistency->consistent ? "yes" : "no", fixed4(r.consistency->f_star)}});
    out += "\n";
  }
  if (r.selection) {
    const auto& s = *r.selection;
    out += "## Selected criteria\n\n";
    out += md_table({"selected criteria", "sum delta", "phi", "empirical error", "objective"},
                    {{format_set(s.selected), std::to_string(s.selected.size()), fixed4(s.phi),
                      fixed4(s.empirical_error), fixed4(s.objective)}});
    out += "\n";
  }
  if (r.representative) out += fmt::format("Maximal margin: {}\n\n", fixed4(r.representative->margin));
  if (r.vfm) {
    const auto& vfm = *r.vfm;
    std::size_t width = 0;
    for (const auto& m : vfm.marginals()) width = std::max(width, m.deltas.size());
    std::vector<std::string> header = {"criterion", "weight"};
    for (std::size_t s = 1; s <= width; ++s) header.push_back(fmt::format("du{}", s));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < vfm.size(); ++j) {
      const auto& m = vfm.marginal(j);
      if (!m.selected) continue;
      std::vector<std::string> row = {r.table.criterion(j).id.str(), fixed4(m.weight())};
      for (std::size_t s = 0; s < width; ++s) row.push_back(s < m.deltas.size() ? fixed4(m.deltas[s]) : "");
      rows.push_back(std::move(row));
    }
    out += "## Value function\n\n" + md_table(header, rows) + "\n";
  }
  if (r.ranking) {
    std::vector<std::string> header;
    std::vector<std::string> values;
    for (std::size_t i = 0; i < r.ranking->alternatives.size(); ++i) {
      header.push_back(r.ranking->alternatives[i].str());
      values.push_back(fixed4(r.ranking->scores[i]));
    }
    out += "## Scores\n\n" + md_table(header, {values}) + "\n";
    out += "## Ranking\n\n" + to_string(*r.ranking) + "\n\n";
  }
  if (r.supports) {
    const auto& a = *r.supports;
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < a.family.size(); ++k)
      rows.push_back({std::to_string(k + 1), format_index_set(r.table, a.family[k]), std::to_string(a.family[k].size()),
                      std::isfinite(a.phi[k]) ? fixed4(a.phi[k]) : "-"});
    out += fmt::format("## Streamlined supporting criteria sets ({} sets, gamma={})\n\n", a.family.size(),
                       a.gamma_used);
    out += md_table({"#", "criteria", "size", "phi"}, rows) + "\n";
  }
  if (r.relevance) {
    const auto& rel = *r.relevance;
    std::vector<std::string> header = {"criterion"};
    std::vector<std::string> values = {"relevance"};
    for (std::size_t j = 0; j < rel.criteria.size(); ++j) {
      header.push_back(rel.criteria[j].str());
      values.push_back(std::to_string(rel.relevance[j]));
    }
    out += "## Relevance\n\n" + md_table(header, {values}) + "\n";
    out += "Core: " + format_index_set(r.table, rel.core) + "\n";
    out += "Redundant: " + format_index_set(r.table, rel.redundant) + "\n";
    std::string best;
    for (std::size_t k : rel.best_members)
      best += (best.empty() ? "" : " ") + format_index_set(r.table, r.supports->family[k]);
    out += fmt::format("Highest summed relevance ({}): {}\n", rel.best_score, best);
  }
  return out;
}

std::string render_csv(const Report& r) {
  std::string out;
  auto section = [&](const std::string& name) {
    if (!out.empty()) out += "\n";
    out += "# " + name + "\n";
  };
  if (r.consistency) {
    section("consistency");
    out += csv_row({"consistent", "f_star"});
    out += csv_row({r.consistency->consistent ? "true" : "false", fixed4(r.consistency->f_star)});
  }
  if (r.selection) {
    const auto& s = *r.selection;
    section("selection");
    out += csv_row({"selected", "sum_delta", "phi", "empirical_error", "objective"});
    out += csv_row({format_set(s.selected), std::to_string(s.selected.size()), fixed4(s.phi), fixed4(s.empirical_error),
                    fixed4(s.objective)});
  }
  if (r.representative) {
    section("representative");
    out += csv_row({"margin"});
    out += csv_row({fixed4(r.representative->margin)});
  }
  if (r.vfm) {
    section("value_function");
    out += csv_row({"criterion", "selected", "score", "value"});
    for (std::size_t j = 0; j < r.vfm->size(); ++j) {
      const auto& m = r.vfm->marginal(j);
      for (const auto& p : marginal_points(r.table.criterion(j), m.deltas))
        out += csv_row({r.table.criterion(j).id.str(), m.selected ? "true" : "false", fixed4(p.score), fixed4(p.value)});
    }
  }
  if (r.ranking) {
    section("scores");
    out += csv_row({"alternative", "score", "rank"});
    std::vector<std::size_t> position(r.ranking->alternatives.size());
    for (std::size_t g = 0; g < r.ranking->groups.size(); ++g)
      for (const auto& a : r.ranking->groups[g]) position[r.table.alternative_index(a)] = g + 1;
    for (std::size_t i = 0; i < r.ranking->alternatives.size(); ++i)
      out += csv_row({r.ranking->alternatives[i].str(), fixed4(r.ranking->scores[i]), std::to_string(position[i])});
  }
  if (r.supports) {
    section("supports");
    out += csv_row({"index", "criteria", "size", "phi"});
    for (std::size_t k = 0; k < r.supports->family.size(); ++k)
      out += csv_row({std::to_string(k + 1), format_index_set(r.table, r.supports->family[k]),
                      std::to_string(r.supports->family[k].size()),
                      std::isfinite(r.supports->phi[k]) ? fixed4(r.supports->phi[k]) : ""});
  }
  if (r.relevance) {
    section("relevance");
    out += csv_row({"criterion", "relevance", "core", "redundant"});
    const auto& rel = *r.relevance;
    for (std::size_t j = 0; j < rel.criteria.size(); ++j) {
      const bool core = std::find(rel.core.begin(), rel.core.end(), j) != rel.core.end();
      const bool redundant = std::find(rel.redundant.begin(), rel.redundant.end(), j) != rel.redundant.end();
      out += csv_row({rel.criteria[j].str(), std::to_string(rel.relevance[j]), core ? "true" : "false",
                      redundant ? "true" : "false"});
    }
  }
  return out;
}

}  // namespace prefsel
