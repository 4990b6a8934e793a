#include "tamed/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tamed/errors.hpp"
#include "tamed/harness.hpp"

namespace tamed {
namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

std::vector<int> parse_levels(const std::string& text) {
  const auto colon = text.find(':');
  int first = 0, last = 0;
  try {
    std::size_t used = 0;
    if (colon == std::string::npos) {
      first = last = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
      first = std::stoi(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      last = std::stoi(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
    }
  } catch (const std::logic_error&) {
    throw ConfigError("--levels expects a:b (inclusive), got '" + text + "'");
  }
  if (last < first) throw ConfigError("--levels a:b needs a <= b, got '" + text + "'");
  std::vector<int> levels;
  for (int l = first; l <= last; ++l) levels.push_back(l);
  return levels;
}

// Writes to --out when given, otherwise to `fallback`.
template <class Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + path + "'");
  write(file);
  if (!file) throw ConfigError("failed writing output file '" + path + "'");
}

struct Options {
  std::string problem;
  std::string levels = "5:10";
  int ref_level = 15;
  std::int64_t paths = 1000;
  std::uint64_t seed = 42;
  double theta = 0.5;
  std::string metric = "terminal";
  std::string out;
  unsigned workers = 0;
  std::int64_t n = 1024;
  std::uint64_t path_index = 0;
  bool untamed = false;
};

ExperimentConfig experiment(const Options& o) {
  ExperimentConfig config;
  config.problem = o.problem;
  config.levels = parse_levels(o.levels);
  config.ref_level = o.ref_level;
  config.paths = o.paths;
  config.base_seed = o.seed;
  config.theta = o.theta;
  config.error_time = o.metric == "sup" ? ErrorTime::running_max : ErrorTime::terminal;
  config.workers = o.workers;
  return config;
}

void print_rate(std::ostream& os, const char* label, const std::optional<double>& rate) {
  os << label << (rate ? format_real(*rate) : std::string("n/a")) << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tamed Euler schemes for jump-diffusion and delay SDEs", "tamed-euler"};
  app.require_subcommand(1);
  Options o;

  auto* list = app.add_subcommand("list-problems", "List the built-in problems");

  auto* sim = app.add_subcommand("simulate", "Dump one trajectory as CSV (t,x0,...)");
  sim->add_option("--problem", o.problem, "Built-in problem name")->required();
  sim->add_option("--n", o.n, "Steps per unit time")->check(CLI::PositiveNumber);
  sim->add_option("--seed", o.seed, "Base seed");
  sim->add_option("--path", o.path_index, "Monte Carlo path index");
  sim->add_option("--theta", o.theta, "Taming exponent in (0, 1/2]");
  sim->add_flag("--untamed", o.untamed, "Use the plain explicit Euler scheme");
  sim->add_option("--out", o.out, "Output CSV (default: stdout)");

  auto add_experiment = [&](CLI::App* sub) {
    sub->add_option("--problem", o.problem, "Built-in problem name")->required();
    sub->add_option("--levels", o.levels, "Inclusive level range a:b, n = 2^level");
    sub->add_option("--paths", o.paths, "Monte Carlo paths");
    sub->add_option("--seed", o.seed, "Base seed");
    sub->add_option("--theta", o.theta, "Taming exponent in (0, 1/2]");
    sub->add_option("--out", o.out, "Output CSV (default: stdout)");
    sub->add_option("--workers", o.workers, "Worker threads (default: all cores)");
  };
  auto* conv = app.add_subcommand("convergence", "Coupled strong-error experiment");
  add_experiment(conv);
  conv->add_option("--ref-level", o.ref_level, "Reference level (n = 2^k)");
  conv->add_option("--metric", o.metric, "terminal | sup")
      ->check(CLI::IsMember({"terminal", "sup"}));

  auto* cmp = app.add_subcommand("compare-untamed", "Tamed vs untamed moments and divergence");
  add_experiment(cmp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& entry : builtin_names()) out << entry.name << "\t" << entry.description << '\n';
    } else if (sim->parsed()) {
      const AnyProblem problem = builtin(o.problem);
      const SchemeConfig scheme{o.n, o.theta, o.untamed ? Taming::untamed : Taming::tamed};
      const Trajectory trajectory = simulate_path(problem, scheme, o.seed, o.path_index);
      emit(o.out, out, [&](std::ostream& os) { write_trajectory_csv(trajectory, os); });
      if (!trajectory.finite()) {
        err << "warning: trajectory became non-finite at step " << *trajectory.first_non_finite
            << '\n';
      }
    } else if (conv->parsed()) {
      const ErrorReport report = strong_error(experiment(o));
      emit(o.out, out, [&](std::ostream& os) { write_error_csv(report, os); });
      std::ostream& summary = o.out.empty() ? err : out;
      print_rate(summary, "fitted_rate_l2: ", report.fitted_rate_l2);
      print_rate(summary, "fitted_rate_l1: ", report.fitted_rate_l1);
      summary << "wall_seconds: " << format_real(report.wall_seconds) << '\n';
    } else if (cmp->parsed()) {
      ExperimentConfig config = experiment(o);
      config.ref_level = config.levels.back();
      const auto rows = compare_untamed(config);
      emit(o.out, out, [&](std::ostream& os) { write_moment_csv(rows, os); });
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}

}  // namespace tamed
