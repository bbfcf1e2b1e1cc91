// prefsel: criteria selection and value-function inference from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "prefsel/error.hpp"
#include "prefsel/io.hpp"
#include "prefsel/report.hpp"

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kInfeasible = 2, kResource = 3 };

// "5" sets every criterion; "g1=4,g2=6" sets individual ones; both may mix.
void apply_gamma(const std::string& text, prefsel::SolveParams& params) {
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const auto item = text.substr(start, end - start);
    const auto eq = item.find('=');
    try {
      std::size_t used = 0;
      if (eq == std::string::npos) {
        params.gamma = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } else {
        const auto value = item.substr(eq + 1);
        params.gamma_by_criterion[prefsel::CriterionId(item.substr(0, eq))] = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(item);
      }
    } catch (const std::logic_error&) {
      throw prefsel::InputError(fmt::format("--gamma: cannot read '{}'", item));
    }
    start = end + 1;
  }
}

void dump_lp(const prefsel::ProjectConfig& config, const prefsel::PerformanceTable& table,
             const std::vector<prefsel::PreferenceStatement>& statements, const std::string& path) {
  using namespace prefsel;
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path));
  const auto solved = apply_breakpoints(table, config.params);
  switch (config.mode) {
    case Mode::select_consistent:
      milp::write_lp(build_selection_consistent(solved, statements, config.params).problem, out);
      break;
    case Mode::select_inconsistent:
      milp::write_lp(build_selection_inconsistent(solved, statements, config.params).problem, out);
      break;
    case Mode::enumerate:
    case Mode::relevance: {
      auto params = config.params;
      params.p = 0.0;
      milp::write_lp(build_selection_consistent(solved, statements, params).problem, out);
      break;
    }
    default:
      milp::write_lp(build_uta(solved, statements, config.params.epsilon).problem, out);
      break;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Infer the criteria a decision maker relies on and a piecewise-linear value function"};
  std::string mode_name, table_path, prefs_path, vfm_path, out_path, lp_path, gamma_text;
  std::string format_name = "json";
  prefsel::ProjectConfig config;
  bool sum_margin = false;

  app.add_option("mode", mode_name,
                 "consistency | uta | select-consistent | select-inconsistent | representative | enumerate | "
                 "relevance | rank")
      ->required();
  app.add_option("--table", table_path, "performance table (CSV)")->required();
  app.add_option("--prefs", prefs_path, "preference statements, one per line");
  app.add_option("--gamma", gamma_text, "subintervals: N, or id=N[,id=N...]");
  app.add_option("--p", config.params.p, "weight of the slope-deviation bound");
  app.add_option("--C", config.params.C, "weight of the empirical error");
  app.add_option("--epsilon", config.params.epsilon, "strict preference margin");
  app.add_option("--max-selected", config.params.max_selected, "cap on the number of selected criteria");
  app.add_option("--format", format_name, "json | markdown | csv");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--vfm", vfm_path, "value function (report JSON) for rank mode");
  app.add_option("--dump-lp", lp_path, "write the model in LP format");
  app.add_flag("--sum-margin", sum_margin, "representative mode: fix epsilon and maximize the summed differences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    config.mode = prefsel::parse_mode(mode_name);
    config.format = prefsel::parse_format(format_name);
    config.epsilon_as_variable = !sum_margin;
    config.solver = prefsel::milp::options_from_environment();
    if (!gamma_text.empty()) apply_gamma(gamma_text, config.params);

    const auto table = prefsel::load_performance_csv(table_path);
    std::vector<prefsel::PreferenceStatement> statements;
    if (!prefs_path.empty()) statements = prefsel::load_preferences(prefs_path, &table);
    if (!vfm_path.empty()) config.vfm = prefsel::parse_value_function(prefsel::read_text_file(vfm_path), table);
    if (!lp_path.empty()) dump_lp(config, table, statements, lp_path);

    const auto report = prefsel::run(config, table, statements);
    const auto text = prefsel::render(report, config.format);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      if (!out) throw prefsel::InputError(fmt::format("cannot write {}", out_path));
      out << text;
    }
    if (report.consistency && !report.consistency->consistent) return kInfeasible;
    return kOk;
  } catch (const prefsel::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const prefsel::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const prefsel::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const prefsel::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kResource;
  }
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
