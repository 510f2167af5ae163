// exactrd: build, verify and cross-validate exact solutions from a scenario
// config.
//
//   exactrd list <config>
//   exactrd run <config> [--only=<name>]... [--no-mol] [--tol-residual=<v>]
//                        [--out=<dir>] [--report=<path>] [--jobs=<n>]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 config or usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <set>
#include <thread>

#include "exactrd/error.hpp"
#include "exactrd/report_json.hpp"
#include "exactrd/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

int cmd_list(const std::string& path) {
  exactrd::Config cfg = exactrd::load_config(path);
  for (const auto& s : cfg.scenarios) {
    std::cout << s.name << '\t' << s.family << '\t' << s.reference << '\n';
  }
  return kOk;
}

std::string fmt_residual(const std::optional<exactrd::ResidualReport>& r) {
  if (!r) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", r->max_residual());
  return buf;
}

struct RunArgs {
  std::string config;
  std::vector<std::string> only;
  bool no_mol = false;
  std::optional<double> tol_residual;
  std::string out;
  std::string report;
  int jobs = 0;
};

int cmd_run(const RunArgs& a) {
  exactrd::Config cfg = exactrd::load_config(a.config);
  std::vector<exactrd::Scenario> selected;
  if (a.only.empty()) {
    selected = cfg.scenarios;
  } else {
    std::set<std::string> want(a.only.begin(), a.only.end());
    for (const auto& s : cfg.scenarios) {
      if (want.erase(s.name)) selected.push_back(s);
    }
    if (!want.empty()) throw exactrd::ConfigError("--only: no scenario named '" + *want.begin() + "'");
  }
  if (a.tol_residual && !(*a.tol_residual > 0.0)) {
    throw exactrd::ConfigError("--tol-residual must be positive");
  }

  exactrd::RunOptions opts;
  opts.mol = !a.no_mol;
  opts.tol_residual = a.tol_residual;
  opts.out = a.out;
  int jobs = a.jobs > 0 ? a.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto reports = exactrd::run_all(selected, opts, jobs);
  bool ok = true;
  for (const auto& r : reports) {
    ok = ok && r.pass;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  riccati "
              << fmt_residual(r.riccati) << "  classical " << fmt_residual(r.classical)
              << "  generalized " << fmt_residual(r.generalized);
    if (r.mol && r.mol->study.order) std::cout << "  mol order " << *r.mol->study.order;
    if (!r.error.empty()) std::cout << "  error: " << r.error;
    std::cout << '\n';
  }
  if (!a.report.empty()) {
    std::filesystem::path p(a.report);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    exactrd::write_file_atomic(p, exactrd::dump_report(exactrd::run_report(reports, opts)));
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solutions of variable-coefficient reaction-diffusion systems"};
  app.require_subcommand(1);

  std::string list_config;
  auto* list = app.add_subcommand("list", "List the scenarios of a config");
  list->add_option("config", list_config, "Scenario config (JSON)")->required();

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Build, verify and cross-validate scenarios");
  run->add_option("config", ra.config, "Scenario config (JSON)")->required();
  run->add_option("--only", ra.only, "Run only the named scenario (repeatable)");
  run->add_flag("--no-mol", ra.no_mol, "Skip the method-of-lines cross-check");
  run->add_option("--tol-residual", ra.tol_residual, "Residual tolerance for the generalized system");
  run->add_option("--out", ra.out, "Directory for CSV field dumps");
  run->add_option("--report", ra.report, "Path of the JSON report");
  run->add_option("--jobs", ra.jobs, "Scenarios run concurrently (default: hardware threads)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*list) return cmd_list(list_config);
    return cmd_run(ra);
  } catch (const exactrd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}
