#include "exactrd/report_json.hpp"

#include <cmath>

namespace exactrd {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const MolOutcome& m) {
  json nx = json::array();
  for (int n : m.spec.nx) nx.push_back(n);
  return {{"x", {m.spec.x_lo, m.spec.x_hi}},
          {"t", {m.spec.t0, m.spec.t1}},
          {"nx", nx},
          {m.spec.relative ? "rel_tol" : "linf_tol", m.spec.linf_tol},
          {"order_target", m.spec.order},
          {"order_tol", m.spec.order_tol},
          {"study", to_json(m.study)},
          {"pass", m.pass}};
}

json to_json(const AsymptoticOutcome& a) {
  return {{"t", a.spec.t},
          {"x", {a.spec.x_lo, a.spec.x_hi}},
          {"nx", a.spec.nx},
          {"tol", a.spec.tol},
          {"regime", a.regime},
          {"u_limit", num(a.u_limit)},
          {"v_limit", num(a.v_limit)},
          {"max_dev_u", num(a.max_dev_u)},
          {"max_dev_v", num(a.max_dev_v)},
          {"pass", a.pass}};
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? to_json(*v) : json(nullptr);
}

}  // namespace

json to_json(const ResidualReport& r) {
  json eqs = json::array();
  for (const auto& e : r.equations) {
    eqs.push_back({{"name", e.name},
                   {"max_abs", num(e.max_abs)},
                   {"mean_abs", num(e.mean_abs)},
                   {"x_at_max", num(e.x_at_max)},
                   {"t_at_max", num(e.t_at_max)}});
  }
  return {{"equations", eqs},
          {"max_residual", num(r.max_residual())},
          {"tolerance", r.tolerance},
          {"nodes", r.nodes},
          {"domain_failures", r.domain_failures},
          {"pass", r.pass}};
}

json to_json(const ConvergenceStudy& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"nx", r.nx}, {"dx", num(r.dx)}, {"linf", num(r.linf)}, {"l2", num(r.l2)},
                    {"max_abs_exact", num(r.max_abs_exact)}});
  }
  return {{"rows", rows}, {"order", s.order ? num(*s.order) : json(nullptr)}, {"floor", s.floor}};
}

json to_json(const MolResult& r) {
  return {{"t1", r.t1},
          {"nx", r.x.size()},
          {"linf", num(r.linf)},
          {"linf_component", r.linf_component},
          {"l2", num(r.l2)},
          {"max_abs_exact", num(r.max_abs_exact)},
          {"steps_accepted", r.stats.accepted},
          {"steps_rejected", r.stats.rejected}};
}

json to_json(const ScenarioReport& r) {
  return {{"name", r.name},
          {"family", r.family},
          {"reference", r.reference},
          {"pass", r.pass},
          {"error", r.error.empty() ? json(nullptr) : json(r.error)},
          {"riccati", opt(r.riccati)},
          {"classical", opt(r.classical)},
          {"generalized", opt(r.generalized)},
          {"corrupted", opt(r.corrupted)},
          {"sensitivity_flipped", r.corrupted ? json(!r.corrupted->pass) : json(nullptr)},
          {"mol", opt(r.mol)},
          {"asymptotic", opt(r.asymptotic)},
          {"csv", r.csv.empty() ? json(nullptr) : json(r.csv)}};
}

json run_report(const std::vector<ScenarioReport>& reports, const RunOptions& opts) {
  json list = json::array();
  std::size_t passed = 0;
  for (const auto& r : reports) {
    list.push_back(to_json(r));
    passed += r.pass ? 1 : 0;
  }
  return {{"pass", passed == reports.size()},
          {"total", reports.size()},
          {"passed", passed},
          {"failed", reports.size() - passed},
          {"options",
           {{"mol", opts.mol},
            {"tol_residual", opts.tol_residual ? json(*opts.tol_residual) : json(nullptr)},
            {"riccati_tol", opts.riccati_tol},
            {"riccati_nodes", opts.riccati_nodes},
            {"classical_tol", opts.classical_tol},
            {"corruption", opts.corruption}}},
          {"scenarios", list}};
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace exactrd
