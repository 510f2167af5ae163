#include "exactrd/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "exactrd/error.hpp"

namespace exactrd {

using nlohmann::json;

namespace {

class Ctx {
 public:
  explicit Ctx(std::string where) : where_(std::move(where)) {}
  Ctx sub(const std::string& key) const { return Ctx(where_ + "." + key); }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(where_ + ": " + msg);
  }
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

void allow_keys(const json& j, const Ctx& c, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
    if (!ok) c.fail("unknown key '" + it.key() + "'");
  }
}

const json& object_at(const json& j, const char* key, const Ctx& c) {
  if (!j.contains(key)) c.fail(std::string("missing '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_object()) c.sub(key).fail("expected an object");
  return v;
}

std::string string_at(const json& j, const char* key, const Ctx& c, bool required = true) {
  if (!j.contains(key)) {
    if (required) c.fail(std::string("missing '") + key + "'");
    return {};
  }
  const json& v = j.at(key);
  if (!v.is_string()) c.sub(key).fail("expected a string");
  return v.get<std::string>();
}

// Numbers may also be given as constant expressions, e.g. "sqrt(2)".
double to_number(const json& v, const Ctx& c) {
  double out = 0.0;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_string()) {
    const std::string text = v.get<std::string>();
    try {
      Expr e = parse(text);
      out = e.eval(0.0);
      if (e.eval(1.0) != out) c.fail("'" + text + "' depends on t");
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      c.fail(std::string("bad number expression: ") + e.what());
    }
  } else {
    c.fail("expected a number");
  }
  if (!std::isfinite(out)) c.fail("number must be finite");
  return out;
}

double number_at(const json& j, const char* key, const Ctx& c, std::optional<double> dflt = {}) {
  if (!j.contains(key)) {
    if (!dflt) c.fail(std::string("missing '") + key + "'");
    return *dflt;
  }
  return to_number(j.at(key), c.sub(key));
}

int int_at(const json& j, const char* key, const Ctx& c, std::optional<int> dflt = {}) {
  if (!j.contains(key)) {
    if (!dflt) c.fail(std::string("missing '") + key + "'");
    return *dflt;
  }
  const json& v = j.at(key);
  if (!v.is_number_integer()) c.sub(key).fail("expected an integer");
  return v.get<int>();
}

std::pair<double, double> range_at(const json& j, const char* key, const Ctx& c) {
  if (!j.contains(key)) c.fail(std::string("missing '") + key + "'");
  const json& v = j.at(key);
  Ctx k = c.sub(key);
  if (!v.is_array() || v.size() != 2) k.fail("expected [lo, hi]");
  double lo = to_number(v[0], k), hi = to_number(v[1], k);
  if (!(lo < hi)) k.fail("expected lo < hi");
  return {lo, hi};
}

Expr parse_expr(const std::string& text, const Ctx& c) {
  try {
    return parse(text);
  } catch (const Error& e) {
    c.fail(std::string("cannot parse '") + text + "': " + e.what());
  }
}

bool inside(const Interval& iv, double lo, double hi) { return iv.contains(lo) && iv.contains(hi); }

ClassicalSolution parse_classical(const std::string& family, const json& j, const Ctx& c) {
  try {
    if (family == "linear_rd") {
      allow_keys(j, c, {"a1", "b1", "b2"});
      return linear_rd(number_at(j, "a1", c, 1.0), number_at(j, "b1", c), number_at(j, "b2", c));
    }
    if (family == "dlv2") {
      allow_keys(j, c, {"a1", "a2", "b1", "b2", "c1", "c2", "branch"});
      std::string br = string_at(j, "branch", c);
      Dlv2Branch b;
      if (br == "nu_ratio") b = Dlv2Branch::NuRatio;
      else if (br == "nu_zero") b = Dlv2Branch::NuZero;
      else c.sub("branch").fail("expected 'nu_ratio' or 'nu_zero'");
      return dlv2(number_at(j, "a1", c), number_at(j, "a2", c), number_at(j, "b1", c),
                  number_at(j, "b2", c), number_at(j, "c1", c), number_at(j, "c2", c), b);
    }
    if (family == "dlv3") {
      allow_keys(j, c, {"a1", "theta"});
      return dlv3(number_at(j, "a1", c), number_at(j, "theta", c));
    }
    if (family == "gray_scott") {
      allow_keys(j, c, {"b1", "b2"});
      return gray_scott(number_at(j, "b1", c), number_at(j, "b2", c, 0.0));
    }
    if (family == "burgers") {
      allow_keys(j, c, {"b1", "b2", "c1", "c2", "mode", "A", "B", "K"});
      BurgersOptions o;
      std::string mode = string_at(j, "mode", c, false);
      if (mode.empty() || mode == "printed") o.mode = BurgersMode::Printed;
      else if (mode == "exact") o.mode = BurgersMode::Exact;
      else c.sub("mode").fail("expected 'printed' or 'exact'");
      o.B = number_at(j, "B", c, 1.0);
      if (j.contains("A")) o.A = number_at(j, "A", c);
      if (j.contains("K")) o.K = number_at(j, "K", c);
      return burgers(number_at(j, "b1", c), number_at(j, "b2", c), number_at(j, "c1", c),
                     number_at(j, "c2", c), o);
    }
  } catch (const PreconditionError& e) {
    c.fail(e.what());
  }
  c.fail("unknown family '" + family + "'");
}

Scenario parse_scenario(const json& j, const Ctx& c0) {
  if (!j.is_object()) c0.fail("expected an object");
  Scenario s;
  s.name = string_at(j, "name", c0);
  if (s.name.empty() || !std::all_of(s.name.begin(), s.name.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
      })) {
    c0.sub("name").fail("names use letters, digits, '_', '-' and '.' only");
  }
  const Ctx c("scenario '" + s.name + "'");
  allow_keys(j, c,
             {"name", "family", "reference", "coefficients", "interval", "riccati", "classical",
              "modified", "y", "grid", "tol_residual", "mol", "asymptotic", "output_dir"});
  s.family = string_at(j, "family", c);
  s.reference = string_at(j, "reference", c, false);
  s.output_dir = string_at(j, "output_dir", c, false);
  const bool exponential = s.family == "exponential";

  const json& co = object_at(j, "coefficients", c);
  Ctx cc = c.sub("coefficients");
  allow_keys(co, cc, {"a", "b", "c", "d", "f", "g"});
  const char* names[] = {"a", "b", "c", "d", "f", "g"};
  Expr* slots[] = {&s.coeffs.a, &s.coeffs.b, &s.coeffs.c, &s.coeffs.d, &s.coeffs.f, &s.coeffs.g};
  for (int i = 0; i < 6; ++i) {
    std::string text = string_at(co, names[i], cc, i == 0);
    s.coefficient_text[i] = text;
    *slots[i] = text.empty() ? Expr() : parse_expr(text, cc.sub(names[i]));
  }

  auto [lo, hi] = range_at(j, "interval", c);
  s.interval = {lo, hi};
  try {
    s.coeffs.check_a_nonzero(s.interval);
  } catch (const Error& e) {
    cc.sub("a").fail(e.what());
  }

  if (j.contains("riccati")) {
    const json& r = object_at(j, "riccati", c);
    Ctx rc = c.sub("riccati");
    allow_keys(r, rc, {"t0", "mu", "alpha", "beta", "gamma", "delta", "epsilon", "kappa"});
    RiccatiInit& in = s.init;
    in.t0 = number_at(r, "t0", rc, 0.0);
    in.mu = number_at(r, "mu", rc, 1.0);
    in.alpha = number_at(r, "alpha", rc, 0.0);
    in.beta = number_at(r, "beta", rc, 1.0);
    in.gamma = number_at(r, "gamma", rc, 0.0);
    in.delta = number_at(r, "delta", rc, 0.0);
    in.epsilon = number_at(r, "epsilon", rc, 0.0);
    in.kappa = number_at(r, "kappa", rc, 0.0);
  }
  if (!s.interval.contains(s.init.t0)) c.sub("riccati.t0").fail("t0 lies outside the interval");

  if (exponential) {
    if (j.contains("classical")) c.fail("the exponential family takes no 'classical' block");
    if (!j.contains("modified")) c.fail("the exponential family needs a 'modified' block");
  } else {
    if (!j.contains("classical")) c.fail("missing 'classical'");
    if (j.contains("modified")) c.fail("'modified' only applies to the exponential family");
    if (j.contains("y")) c.fail("'y' only applies to the exponential family");
    s.classical = parse_classical(s.family, object_at(j, "classical", c), c.sub("classical"));
  }
  if (exponential) {
    const json& m = object_at(j, "modified", c);
    Ctx mc = c.sub("modified");
    allow_keys(m, mc, {"h", "kappa2_0"});
    s.h_text = string_at(m, "h", mc);
    s.h = parse_expr(s.h_text, mc.sub("h"));
    s.kappa2_0 = number_at(m, "kappa2_0", mc, 0.0);
    s.init.kappa2 = s.kappa2_0;
    s.y = number_at(j, "y", c, 0.0);
  }
  try {
    s.init.validate();
  } catch (const PreconditionError& e) {
    c.sub("riccati").fail(e.what());
  }

  const json& g = object_at(j, "grid", c);
  Ctx gc = c.sub("grid");
  allow_keys(g, gc, {"x", "t", "nx", "nt"});
  std::tie(s.grid.x_lo, s.grid.x_hi) = range_at(g, "x", gc);
  std::tie(s.grid.t_lo, s.grid.t_hi) = range_at(g, "t", gc);
  s.grid.nx = int_at(g, "nx", gc, 81);
  s.grid.nt = int_at(g, "nt", gc, 81);
  if (s.grid.nx < 3 || s.grid.nt < 3) gc.fail("nx and nt must be at least 3");
  if (!inside(s.interval, s.grid.t_lo, s.grid.t_hi)) gc.sub("t").fail("outside the interval");

  s.tol_residual = number_at(j, "tol_residual", c, 1e-5);
  if (!(s.tol_residual > 0)) c.sub("tol_residual").fail("must be positive");

  if (j.contains("mol")) {
    const json& m = object_at(j, "mol", c);
    Ctx mc = c.sub("mol");
    allow_keys(m, mc, {"x", "t", "nx", "linf_tol", "rel_tol", "order", "order_tol"});
    MolSpec ms;
    std::tie(ms.x_lo, ms.x_hi) = range_at(m, "x", mc);
    std::tie(ms.t0, ms.t1) = range_at(m, "t", mc);
    if (!inside(s.interval, ms.t0, ms.t1)) mc.sub("t").fail("outside the interval");
    if (m.contains("nx")) {
      const json& n = m.at("nx");
      if (!n.is_array() || n.size() < 3) mc.sub("nx").fail("expected at least 3 grid sizes");
      ms.nx.clear();
      for (const json& v : n) {
        if (!v.is_number_integer() || v.get<int>() < 11) mc.sub("nx").fail("sizes must be integers >= 11");
        if (!ms.nx.empty() && v.get<int>() <= ms.nx.back()) mc.sub("nx").fail("sizes must increase");
        ms.nx.push_back(v.get<int>());
      }
    }
    if (m.contains("linf_tol") && m.contains("rel_tol")) mc.fail("give linf_tol or rel_tol, not both");
    if (m.contains("rel_tol")) {
      ms.relative = true;
      ms.linf_tol = number_at(m, "rel_tol", mc);
    } else {
      ms.linf_tol = number_at(m, "linf_tol", mc, ms.linf_tol);
    }
    if (!(ms.linf_tol > 0)) mc.fail("error bound must be positive");
    ms.order = number_at(m, "order", mc, ms.order);
    ms.order_tol = number_at(m, "order_tol", mc, ms.order_tol);
    s.mol = ms;
  }

  if (j.contains("asymptotic")) {
    const json& a = object_at(j, "asymptotic", c);
    Ctx ac = c.sub("asymptotic");
    allow_keys(a, ac, {"t", "x", "nx", "tol"});
    if (s.family != "dlv2") ac.fail("only dlv2 scenarios carry an asymptotic check");
    if (s.classical->asymptotic()->regime == AsymptoticRegime::Unknown) {
      ac.fail("the dlv2 parameters satisfy neither order condition");
    }
    AsymptoticSpec as;
    as.t = number_at(a, "t", ac, as.t);
    if (!(as.t > s.init.t0)) ac.sub("t").fail("must lie after riccati.t0");
    std::tie(as.x_lo, as.x_hi) = range_at(a, "x", ac);
    as.nx = int_at(a, "nx", ac, as.nx);
    if (as.nx < 2) ac.sub("nx").fail("must be at least 2");
    as.tol = number_at(a, "tol", ac, as.tol);
    s.asymptotic = as;
  }
  return s;
}

ResidualReport generalized_residual(const PdeSystem& sys, const GeneralizedSolution& sol,
                                    const Grid& g, double tol) {
  ResidualOptions o;
  o.t_domain = sol.state().valid_interval();
  return residual(sys, sol.fields(), g, tol, o);
}

MolOutcome run_mol(const MolSpec& m, const GeneralizedSolution& sol) {
  MolOutcome out;
  out.spec = m;
  MolProblem p = MolProblem::from_solution(sol, m.x_lo, m.x_hi, m.nx.front(), m.t0, m.t1);
  out.study = convergence_study(p, m.nx);
  if (out.study.floor) {
    out.pass = true;
  } else {
    const ConvergenceRow& fine = out.study.rows.back();
    const double err = m.relative ? fine.linf / fine.max_abs_exact : fine.linf;
    out.pass = std::abs(*out.study.order - m.order) <= m.order_tol && err <= m.linf_tol;
  }
  return out;
}

AsymptoticOutcome run_asymptotic(const AsymptoticSpec& a, const Scenario& s) {
  AsymptoticOutcome out;
  out.spec = a;
  const AsymptoticState& lim = *s.classical->asymptotic();
  out.regime = std::string(regime_name(lim.regime));
  out.u_limit = lim.u;
  out.v_limit = lim.v;
  RiccatiState st = solve_riccati(s.coeffs, {std::min(s.interval.lo, s.init.t0), a.t}, s.init);
  GeneralizedSolution g = build_dlv2(st, *s.classical);
  std::vector<double> f(2);
  for (double x : linspace(a.x_lo, a.x_hi, a.nx)) {
    g.eval(x, a.t, f);
    double p = similarity_map(st, x, a.t).prefactor;
    out.max_dev_u = std::max(out.max_dev_u, std::abs(f[0] / p - lim.u));
    out.max_dev_v = std::max(out.max_dev_v, std::abs(f[1] / p - lim.v));
  }
  out.pass = out.max_dev_u <= a.tol && out.max_dev_v <= a.tol;
  return out;
}

void append_number(std::string& line, double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  line.append(buf, r.ptr);
}

}  // namespace

Config parse_config(const json& j) {
  const Ctx c("config");
  if (!j.is_object()) c.fail("expected a JSON object");
  allow_keys(j, c, {"scenarios", "description"});
  if (!j.contains("scenarios") || !j.at("scenarios").is_array()) c.fail("missing 'scenarios' array");
  Config cfg;
  std::set<std::string> seen;
  std::size_t i = 0;
  for (const json& sj : j.at("scenarios")) {
    Scenario s = parse_scenario(sj, c.sub("scenarios[" + std::to_string(i++) + "]"));
    if (!seen.insert(s.name).second) c.fail("duplicate scenario name '" + s.name + "'");
    cfg.scenarios.push_back(std::move(s));
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  return parse_config(j);
}

RiccatiState scenario_state(const Scenario& s) {
  RiccatiState st = solve_riccati(s.coeffs, s.interval, s.init);
  if (s.h) return st.with_modified(*s.h, s.kappa2_0);
  return st;
}

GeneralizedSolution scenario_solution(const Scenario& s, const RiccatiState& state) {
  if (s.family == "exponential") return build_exponential(state, s.y);
  return build_generalized(state, *s.classical);
}

ScenarioReport run_scenario(const Scenario& s, const RunOptions& opts) {
  ScenarioReport r;
  r.name = s.name;
  r.family = s.family;
  r.reference = s.reference;
  try {
    RiccatiState st = scenario_state(s);
    const Interval v = st.valid_interval();
    r.riccati = verify_riccati(st, linspace(v.lo, v.hi, opts.riccati_nodes), opts.riccati_tol);

    if (s.classical) r.classical = residual_constant_system(*s.classical, opts.classical_tol);

    GeneralizedSolution sol = scenario_solution(s, st);
    const double tol = opts.tol_residual.value_or(s.tol_residual);
    r.generalized = generalized_residual(sol.system(), sol, s.grid, tol);
    GeneralizedSystem bad = sol.system().with_base_coeffs(st.coeffs().with_scaled_a(opts.corruption));
    r.corrupted = generalized_residual(bad, sol, s.grid, tol);

    if (opts.mol && s.mol) r.mol = run_mol(*s.mol, sol);
    if (s.asymptotic) r.asymptotic = run_asymptotic(*s.asymptotic, s);

    std::filesystem::path dir = opts.out.empty() ? std::filesystem::path(s.output_dir) : opts.out;
    if (!dir.empty()) {
      std::filesystem::create_directories(dir);
      r.csv = s.name + ".csv";
      write_fields_csv(dir / r.csv, sol, s.grid);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.pass = r.error.empty() && r.riccati && r.riccati->pass && (!r.classical || r.classical->pass) &&
           r.generalized && r.generalized->pass && r.corrupted && !r.corrupted->pass &&
           (!r.mol || r.mol->pass) && (!r.asymptotic || r.asymptotic->pass);
  return r;
}

std::vector<ScenarioReport> run_all(const std::vector<Scenario>& scenarios, const RunOptions& opts,
                                    int jobs) {
  std::vector<ScenarioReport> out(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < scenarios.size();) out[i] = run_scenario(scenarios[i], opts);
  };
  const int w = std::clamp(jobs, 1, std::max(1, static_cast<int>(scenarios.size())));
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::sort(out.begin(), out.end(),
            [](const ScenarioReport& a, const ScenarioReport& b) { return a.name < b.name; });
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw Error("cannot write " + tmp.string());
    o.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!o) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_fields_csv(const std::filesystem::path& path, const GeneralizedSolution& sol,
                      const Grid& grid) {
  grid.validate();
  const int n = sol.arity();
  std::string text = n == 3 ? "x,t,psi,phi,phi3\n" : "x,t,psi,phi\n";
  std::vector<double> f(n);
  std::string line;
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.t(j);
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      sol.eval(x, t, f);
      line.clear();
      append_number(line, x);
      line += ',';
      append_number(line, t);
      for (double v : f) {
        line += ',';
        append_number(line, v);
      }
      line += '\n';
      text += line;
    }
  }
  write_file_atomic(path, text);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    return out;
  };
  if (!std::getline(in, line)) return t;
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split(line)) {
      double v = 0.0;
      auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) {
        throw Error("bad CSV cell '" + cell + "' in " + path.string());
      }
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw Error("ragged CSV row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace exactrd
