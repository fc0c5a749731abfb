#include "orderest/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "orderest/vector_projector.hpp"

#ifndef ORDEREST_VERSION
#define ORDEREST_VERSION "0.0.0"
#endif

namespace orderest::report {

namespace {

const char* axis_name(Axis a) { return a == Axis::Columns ? "columns" : "rows"; }

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

std::string fixed(double x, int digits) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

Json violations(const Matrix& x, const MatrixOrderSpec& spec, double tol) {
  Json out = Json::array();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    if (const auto v = verify_feasible(row, spec.row_restriction(), tol))
      out.push_back({{"axis", "row"}, {"index", i}, {"low", v->low}, {"high", v->high}});
  }
  for (std::size_t j = 0; j < x.cols(); ++j)
    if (const auto v = verify_feasible(x.col(j), spec.col_restriction(), tol))
      out.push_back({{"axis", "column"}, {"index", j}, {"low", v->low}, {"high", v->high}});
  return out;
}

}  // namespace

std::string version() { return ORDEREST_VERSION; }

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json matrix(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (double x : m.row(i)) row.push_back(number(x));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json header(const std::string& command, std::uint64_t seed, Json config) {
  Json j;
  j["spec"] = kSchemaVersion;
  j["version"] = version();
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = std::move(config);
  return j;
}

Json estimate(const MatrixEstimate& e, const MatrixOrderSpec& spec, double feasibility_tol) {
  Json j;
  j["theta_tilde_1"] = matrix(e.theta_tilde_1);
  j["theta_tilde_2"] = matrix(e.theta_tilde_2);
  j["final"] = matrix(e.final);
  j["cycles"] = {{"direction_1", e.iterations_1}, {"direction_2", e.iterations_2}};
  j["converged"] = e.converged;
  j["final_delta"] = {{"direction_1", number(e.final_delta_1)}, {"direction_2", number(e.final_delta_2)}};
  Json feas;
  feas["tolerance"] = feasibility_tol;
  feas["theta_tilde_1"] = violations(e.theta_tilde_1, spec, feasibility_tol);
  feas["theta_tilde_2"] = violations(e.theta_tilde_2, spec, feasibility_tol);
  feas["final"] = violations(e.final, spec, feasibility_tol);
  feas["feasible"] = feas["final"].empty();
  j["feasibility"] = std::move(feas);
  return j;
}

Json test_result(const TestResult& r, const MatrixOrderSpec& spec) {
  Json j;
  j["statistic"] = number(r.statistic);
  j["t1"] = number(r.t1);
  j["t2"] = number(r.t2);
  j["p_value"] = r.p_value;
  j["p_adjusted"] = optional_number(r.p_adjusted);
  j["replicates"] = r.replicates;
  j["exceedances"] = r.exceedances;
  j["seed"] = r.seed;
  Json subs = Json::array();
  for (const auto& c : r.per_subgraph) {
    const auto& restriction = c.axis == Axis::Columns ? spec.col_restriction() : spec.row_restriction();
    Json s;
    s["axis"] = axis_name(c.axis);
    s["index"] = c.index;
    s["chain"] = restriction.subgraphs().at(c.subgraph).chain();
    s["low"] = c.low;
    s["high"] = c.high;
    s["diff"] = number(c.diff);
    s["se"] = number(c.se);
    s["z"] = number(c.z);
    subs.push_back(std::move(s));
  }
  j["per_subgraph"] = std::move(subs);
  return j;
}

Json estimation_sim(const EstimationSimReport& r) {
  Json j;
  j["I"] = r.config.rows;
  j["J"] = r.config.cols;
  j["runs"] = r.config.runs;
  j["bias"] = {{"restricted", number(r.restricted_bias)},
               {"restricted_se", number(r.restricted_bias_se)},
               {"unrestricted", number(r.unrestricted_bias)},
               {"unrestricted_se", number(r.unrestricted_bias_se)}};
  j["loss_reduction"] = {{"quadratic", optional_number(r.quadratic_reduction)},
                         {"quadratic_se", number(r.quadratic_reduction_se)},
                         {"quartic", optional_number(r.quartic_reduction)},
                         {"quartic_se", number(r.quartic_reduction_se)}};
  j["weights_rank1"] = r.weights_rank1;
  j["one_cycle_fits"] = r.one_cycle_fits;
  j["nonconverged_fits"] = r.nonconverged_fits;
  return j;
}

Json power_sim(const PowerSimReport& r) {
  Json j;
  j["scenario"] = r.config.scenario.id;
  j["null"] = r.config.scenario.null;
  j["normalized"] = r.config.scenario.normalized;
  j["pi"] = r.config.scenario.pi;
  j["n"] = r.config.n;
  j["sims"] = r.config.sims;
  j["replicates"] = r.config.replicates;
  j["alpha"] = r.config.alpha;
  j["strict_exceedance"] = r.config.strict_exceedance;
  j["t1"] = {{"rate", r.t1_rate}, {"se", r.t1_se}, {"rejections", r.t1_rejections}};
  if (r.ks_rate) {
    j["ks"] = {{"rate", *r.ks_rate}, {"se", *r.ks_se}, {"rejections", r.ks_rejections}};
    j["paired"] = {{"t1_only", r.t1_only}, {"ks_only", r.ks_only}};
  } else {
    j["ks"] = nullptr;
  }
  return j;
}

std::string estimation_table(const std::vector<EstimationSimReport>& rows) {
  auto opt = [](const std::optional<double>& x) { return x ? fixed(*x, 2) : std::string("n/a"); };
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%3s %3s %12s %12s %10s %10s\n", "I", "J", "bias(restr)", "bias(umle)",
                "quad(%)", "quart(%)");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%3zu %3zu %12s %12s %10s %10s\n", r.config.rows, r.config.cols,
                  fixed(r.restricted_bias, 4).c_str(), fixed(r.unrestricted_bias, 4).c_str(),
                  opt(r.quadratic_reduction).c_str(), opt(r.quartic_reduction).c_str());
    out << line;
  }
  return out.str();
}

std::string power_csv(const std::vector<PowerSimReport>& rows) {
  std::ostringstream out;
  out << "scenario,null,groups,categories,n,method,rate,se\n";
  for (const auto& r : rows) {
    const auto& sc = r.config.scenario;
    const std::string prefix = sc.id + ',' + (sc.null ? "1" : "0") + ',' + std::to_string(sc.groups()) + ',' +
                               std::to_string(sc.categories()) + ',' + std::to_string(r.config.n) + ',';
    out << prefix << "T1," << fixed(r.t1_rate, 4) << ',' << fixed(r.t1_se, 4) << '\n';
    if (r.ks_rate) out << prefix << "KS," << fixed(*r.ks_rate, 4) << ',' << fixed(*r.ks_se, 4) << '\n';
  }
  return out.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace orderest::report
