#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "orderest/demo_data.hpp"
#include "orderest/error.hpp"
#include "orderest/matrix_estimator.hpp"
#include "orderest/ordinal.hpp"
#include "orderest/report.hpp"
#include "orderest/sim.hpp"
#include "orderest/vector_projector.hpp"

namespace py = pybind11;
using namespace orderest;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using CountArray = py::array_t<long long, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-d array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
  Matrix m(a.shape(0), a.shape(1));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    for (py::ssize_t j = 0; j < r.shape(1); ++j) m(i, j) = r(i, j);
  return m;
}

Array to_array(const Matrix& m) {
  Array out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
  return out;
}

OrdinalCounts to_counts(const CountArray& a) {
  if (a.ndim() != 2) throw DimensionError("counts must be a 2-d array (groups x categories)");
  std::vector<std::vector<long long>> rows(a.shape(0), std::vector<long long>(a.shape(1)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    for (py::ssize_t j = 0; j < r.shape(1); ++j) rows[i][j] = r(i, j);
  return OrdinalCounts(std::move(rows));
}

WeightedVector weighted(const Array& values, const std::optional<Array>& weights) {
  if (!weights) return WeightedVector(to_vector(values));
  return WeightedVector(to_vector(values), to_vector(*weights));
}

WeightMatrix weight_matrix(const std::optional<Array>& w, std::size_t rows, std::size_t cols) {
  if (!w) return WeightMatrix::ones(rows, cols);
  return WeightMatrix(to_matrix(*w));
}

py::object to_python(const report::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Hypothesis hypothesis(const std::string& h) {
  if (h == "columns") return Hypothesis::Columns;
  if (h == "rows") return Hypothesis::Rows;
  if (h == "both") return Hypothesis::Both;
  throw DomainError("hypothesis must be columns, rows or both");
}

const char* kind_name(OrderKind k) {
  switch (k) {
    case OrderKind::Trivial: return "trivial";
    case OrderKind::SimpleOrder: return "simple";
    case OrderKind::Umbrella: return "umbrella";
    case OrderKind::SimpleTree: return "tree";
    case OrderKind::Custom: return "custom";
  }
  return "custom";
}

}  // namespace

PYBIND11_MODULE(_orderest, m) {
  m.doc() = "Order-restricted estimation and testing for matrices of parameters";
  m.attr("__version__") = report::version();

  static py::exception<Error> error(m, "OrderestError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      std::string msg = e.what();
      if (e.line()) msg = "line " + std::to_string(e.line()) + ", column " + std::to_string(e.column()) + ": " + msg;
      py::set_error(error, msg.c_str());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<OrderRestriction>(m, "Restriction")
      .def_static("trivial", &OrderRestriction::trivial, py::arg("p"))
      .def_static("simple_order", &OrderRestriction::simple_order, py::arg("p"))
      .def_static("umbrella", &OrderRestriction::umbrella, py::arg("p"), py::arg("peak"))
      .def_static("simple_tree", &OrderRestriction::simple_tree, py::arg("p"), py::arg("root"))
      .def_static("custom", &OrderRestriction::custom, py::arg("p"), py::arg("chains"))
      .def_static("parse", [](const std::string& text, std::size_t p) { return OrderRestriction::parse(text, p); },
                  py::arg("text"), py::arg("p"))
      .def_property_readonly("size", &OrderRestriction::size)
      .def_property_readonly("kind", [](const OrderRestriction& r) { return kind_name(r.kind()); })
      .def_property_readonly("parameter", &OrderRestriction::parameter)
      .def_property_readonly("chains",
                             [](const OrderRestriction& r) {
                               std::vector<Chain> out;
                               for (const auto& g : r.subgraphs()) out.push_back(g.chain());
                               return out;
                             })
      .def("precedes", &OrderRestriction::precedes, py::arg("i"), py::arg("j"))
      .def("nodal_indices", [](const OrderRestriction& r) { return nodal_indices(r); })
      .def("to_config", &OrderRestriction::to_config)
      .def("__eq__", [](const OrderRestriction& a, const OrderRestriction& b) { return a == b; })
      .def("__repr__", [](const OrderRestriction& r) {
        return "Restriction(" + std::to_string(r.size()) + ", '" + r.to_config() + "')";
      });

  m.def(
      "pava",
      [](const Array& values, const std::optional<Array>& weights) {
        return to_array(project_simple_order_pava(weighted(values, weights)));
      },
      py::arg("values"), py::arg("weights") = py::none(), "Weighted simple-order projection by pooling.");
  m.def(
      "minmax",
      [](const Array& values, const std::optional<Array>& weights) {
        return to_array(project_simple_order_minmax(weighted(values, weights)));
      },
      py::arg("values"), py::arg("weights") = py::none(), "Weighted simple-order projection, max-min formula.");
  m.def(
      "hp_estimate",
      [](const Array& values, const OrderRestriction& r, const std::optional<Array>& weights, double pin_factor) {
        HpOptions o;
        o.pin_factor = pin_factor;
        return to_array(hp_estimate(weighted(values, weights), r, o).values);
      },
      py::arg("values"), py::arg("restriction"), py::arg("weights") = py::none(), py::arg("pin_factor") = 1e12);
  m.def(
      "is_feasible",
      [](const Array& values, const OrderRestriction& r, double tol) {
        const auto v = to_vector(values);
        return !verify_feasible(v, r, tol).has_value();
      },
      py::arg("values"), py::arg("restriction"), py::arg("tol") = 1e-9);

  m.def(
      "check_rank1",
      [](const Array& w) -> py::object {
        const auto c = check_rank1(to_matrix(w));
        if (!c) return py::none();
        return py::make_tuple(to_array(c->u), to_array(c->v));
      },
      py::arg("weights"));

  m.def(
      "estimate",
      [](const Array& theta_hat, const OrderRestriction& row_order, const OrderRestriction& col_order,
         const std::optional<Array>& row_weights, const std::optional<Array>& col_weights, double tol,
         int max_cycles) {
        const Matrix x = to_matrix(theta_hat);
        const MatrixOrderSpec spec(x.rows(), x.cols(), row_order, col_order);
        const auto wr = weight_matrix(row_weights, x.rows(), x.cols());
        const auto wc = weight_matrix(col_weights, x.rows(), x.cols());
        EstimateOptions o;
        o.tol = tol;
        o.max_cycles = max_cycles;
        MatrixEstimate e = [&] {
          py::gil_scoped_release release;
          return orderest::estimate(x, spec, wr, wc, o);
        }();
        py::dict d;
        d["theta_tilde_1"] = to_array(e.theta_tilde_1);
        d["theta_tilde_2"] = to_array(e.theta_tilde_2);
        d["final"] = to_array(e.final);
        d["cycles"] = py::make_tuple(e.iterations_1, e.iterations_2);
        d["converged"] = e.converged;
        d["final_delta"] = py::make_tuple(e.final_delta_1, e.final_delta_2);
        d["feasible"] = in_parameter_space(e.final, spec, o.feasibility_tol);
        d["one_cycle"] = one_cycle_applicable(spec, wr, wc);
        return d;
      },
      py::arg("theta_hat"), py::arg("row_order"), py::arg("col_order"), py::arg("row_weights") = py::none(),
      py::arg("col_weights") = py::none(), py::arg("tol") = 1e-10, py::arg("max_cycles") = 1000);

  m.def("cumulative_umle", [](const CountArray& c) { return to_array(cumulative_umle(to_counts(c))); },
        py::arg("counts"));
  m.def("pooled_pi", [](const CountArray& c) { return to_array(pooled_smoothed_pi(to_counts(c))); },
        py::arg("counts"));
  m.def("ks_one_sided", [](const CountArray& c) { return ks_one_sided(to_counts(c)); }, py::arg("counts"));
  m.def(
      "statistic",
      [](const CountArray& c, const std::string& h, const OrderRestriction& row_order,
         const OrderRestriction& col_order) {
        const auto d = to_counts(c);
        const MatrixOrderSpec spec(d.groups(), d.categories(), row_order, col_order);
        const Hypothesis hyp = hypothesis(h);
        const auto s = ordinal_statistic(d, spec, hyp);
        TestResult r;
        r.statistic = s.value;
        r.per_subgraph = s.contributions;
        if (hyp != Hypothesis::Rows) r.t1 = ordinal_statistic(d, spec, Hypothesis::Columns).value;
        if (hyp != Hypothesis::Columns) r.t2 = ordinal_statistic(d, spec, Hypothesis::Rows).value;
        return to_python(report::test_result(r, spec));
      },
      py::arg("counts"), py::arg("hypothesis"), py::arg("row_order"), py::arg("col_order"));
  m.def(
      "test",
      [](const CountArray& c, const std::string& h, const OrderRestriction& row_order,
         const OrderRestriction& col_order, std::size_t replicates, std::uint64_t seed, bool strict,
         unsigned threads) {
        const auto d = to_counts(c);
        const MatrixOrderSpec spec(d.groups(), d.categories(), row_order, col_order);
        BootstrapOptions o;
        o.replicates = replicates;
        o.seed = seed;
        o.strict_exceedance = strict;
        o.threads = threads;
        const Hypothesis hyp = hypothesis(h);
        TestResult r = [&] {
          py::gil_scoped_release release;
          return bootstrap_pvalue(d, hyp, spec, o);
        }();
        return to_python(report::test_result(r, spec));
      },
      py::arg("counts"), py::arg("hypothesis"), py::arg("row_order"), py::arg("col_order"),
      py::arg("replicates") = 10000, py::arg("seed") = 1, py::arg("strict") = true, py::arg("threads") = 1);

  m.def(
      "simulate_estimation",
      [](std::size_t rows, std::size_t cols, std::size_t runs, std::uint64_t seed, double noise_scale) {
        EstimationSimConfig c;
        c.rows = rows;
        c.cols = cols;
        c.runs = runs;
        c.seed = seed;
        c.noise_scale = noise_scale;
        EstimationSimReport r = [&] {
          py::gil_scoped_release release;
          return run_estimation_sim(c);
        }();
        return to_python(report::estimation_sim(r));
      },
      py::arg("rows"), py::arg("cols"), py::arg("runs") = 2000, py::arg("seed") = 1, py::arg("noise_scale") = 1.0);

  m.def("scenarios", [] {
    py::list out;
    for (const auto& s : table3_scenarios()) {
      py::dict d;
      d["id"] = s.id;
      d["null"] = s.null;
      d["normalized"] = s.normalized;
      d["pi"] = s.pi;
      out.append(d);
    }
    return out;
  });
  m.def(
      "simulate_power",
      [](const std::string& scenario, long long n, std::size_t sims, std::size_t replicates, double alpha, bool ks,
         std::uint64_t seed, bool strict, unsigned threads) {
        PowerSimConfig c;
        c.scenario = find_scenario(scenario);
        c.n = n;
        c.sims = sims;
        c.replicates = replicates;
        c.alpha = alpha;
        c.ks = ks;
        c.seed = seed;
        c.strict_exceedance = strict;
        c.threads = threads;
        PowerSimReport r = [&] {
          py::gil_scoped_release release;
          return run_power_sim(c);
        }();
        return to_python(report::power_sim(r));
      },
      py::arg("scenario"), py::arg("n") = 20, py::arg("sims") = 2000, py::arg("replicates") = 500,
      py::arg("alpha") = 0.05, py::arg("ks") = true, py::arg("seed") = 1, py::arg("strict") = true,
      py::arg("threads") = 1);

  auto demo = m.def_submodule("demo", "Bundled skin injury data set");
  demo.def("genotypes", &demo::genotypes);
  demo.def("variables", &demo::variables);
  demo.def("levels", &demo::levels);
  demo.def("published_p_values", &demo::published_p_values);
  demo.def(
      "counts",
      [](std::size_t v) {
        const auto c = demo::counts(v);
        py::array_t<long long> out({static_cast<py::ssize_t>(c.groups()), static_cast<py::ssize_t>(c.categories())});
        auto w = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < c.groups(); ++i)
          for (std::size_t j = 0; j < c.categories(); ++j) w(i, j) = c.count(i, j);
        return out;
      },
      py::arg("variable"));
  demo.def(
      "analyze",
      [](std::size_t replicates, std::uint64_t seed, bool strict, unsigned threads) {
        const auto data = demo::dataset();
        std::vector<std::size_t> vars;
        std::vector<MatrixOrderSpec> specs;
        for (std::size_t v = 0; v < data.variables(); ++v) {
          vars.push_back(v);
          specs.push_back(ordinal_simple_spec(data.groups(), data.categories(v)));
        }
        BootstrapOptions o;
        o.replicates = replicates;
        o.seed = seed;
        o.strict_exceedance = strict;
        o.threads = threads;
        std::vector<TestResult> res = [&] {
          py::gil_scoped_release release;
          return bootstrap_pvalues(data, vars, Hypothesis::Columns, specs, o);
        }();
        py::list out;
        for (std::size_t k = 0; k < res.size(); ++k) {
          res[k].p_adjusted = bonferroni(res[k].p_value, res.size());
          py::dict d = to_python(report::test_result(res[k], specs[k]));
          d["variable"] = demo::variables()[k];
          out.append(d);
        }
        return out;
      },
      py::arg("replicates") = 50000, py::arg("seed") = 1, py::arg("strict") = true, py::arg("threads") = 1);
}
