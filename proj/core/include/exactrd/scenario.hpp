#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "exactrd/classical.hpp"
#include "exactrd/coeffs.hpp"
#include "exactrd/numsolve.hpp"
#include "exactrd/report.hpp"
#include "exactrd/riccati.hpp"
#include "exactrd/transform.hpp"
#include "exactrd/verify.hpp"

namespace exactrd {

struct MolSpec {
  double x_lo = -1.0, x_hi = 1.0;
  double t0 = 0.0, t1 = 1.0;
  std::vector<int> nx{101, 201, 401};
  /// Bound on the L-infinity error of the finest grid, absolute or relative
  /// to max |exact| there.
  double linf_tol = 5e-4;
  bool relative = false;
  double order = 2.0;
  double order_tol = 0.3;
};

/// Large-time check of a dlv2 exclusion wave: u = psi / P and v = phi / P
/// (P the similarity prefactor) against the limit state at time `t`.
struct AsymptoticSpec {
  double t = 40.0;
  double x_lo = -10.0, x_hi = 10.0;
  int nx = 101;
  double tol = 1e-3;
};

struct Scenario {
  std::string name;
  /// linear_rd, exponential, dlv2, dlv3, gray_scott or burgers
  std::string family;
  std::string reference;
  /// a, b, c, d, f, g as written in the config
  std::array<std::string, 6> coefficient_text;
  CoeffSet coeffs;
  Interval interval;
  RiccatiInit init;
  /// Empty for the exponential family.
  std::optional<ClassicalSolution> classical;
  std::string h_text;
  std::optional<Expr> h;
  double kappa2_0 = 0.0;
  double y = 0.0;
  Grid grid;
  double tol_residual = 1e-5;
  std::optional<MolSpec> mol;
  std::optional<AsymptoticSpec> asymptotic;
  std::string output_dir;
};

struct Config {
  std::vector<Scenario> scenarios;
};

/// Both throw ConfigError with the offending scenario and field in the
/// message. Classical parameters are validated by constructing the solution.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);

struct RunOptions {
  bool mol = true;
  std::optional<double> tol_residual;
  /// Directory for CSV field dumps; empty disables them unless the scenario
  /// names its own output directory.
  std::filesystem::path out;
  double riccati_tol = 1e-6;
  int riccati_nodes = 200;
  double classical_tol = 1e-6;
  double corruption = 1.01;
};

struct MolOutcome {
  MolSpec spec;
  ConvergenceStudy study;
  bool pass = false;
};

struct AsymptoticOutcome {
  AsymptoticSpec spec;
  std::string regime;
  double u_limit = 0.0, v_limit = 0.0;
  double max_dev_u = 0.0, max_dev_v = 0.0;
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  std::string family;
  std::string reference;
  bool pass = false;
  /// Message of the exception that stopped the scenario, if any.
  std::string error;
  std::optional<ResidualReport> riccati;
  std::optional<ResidualReport> classical;
  std::optional<ResidualReport> generalized;
  /// Residual after scaling a(t) in the system; must fail.
  std::optional<ResidualReport> corrupted;
  std::optional<MolOutcome> mol;
  std::optional<AsymptoticOutcome> asymptotic;
  std::string csv;
};

/// Riccati state, with kappa2 attached for the exponential family.
RiccatiState scenario_state(const Scenario& s);
GeneralizedSolution scenario_solution(const Scenario& s, const RiccatiState& state);

ScenarioReport run_scenario(const Scenario& s, const RunOptions& opts = {});

/// Runs the scenarios on up to `jobs` threads; reports are sorted by name.
std::vector<ScenarioReport> run_all(const std::vector<Scenario>& scenarios, const RunOptions& opts,
                                    int jobs = 1);

/// Long-form CSV with header x,t,psi,phi[,phi3], t-major, 17 significant
/// digits. Written to a temporary file and renamed into place.
void write_fields_csv(const std::filesystem::path& path, const GeneralizedSolution& sol,
                      const Grid& grid);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

/// Writes `text` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace exactrd
