#include "pwacut/benchmarks.hpp"
#include "pwacut/cli.hpp"
#include "pwacut/expr.hpp"
#include "pwacut/model.hpp"
#include "pwacut/partition.hpp"
#include "pwacut/search.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace pwacut;

namespace {

struct Options {
  double tol = 0.05;
  bool continuity = false;
  std::uint64_t seed = 42;
  std::size_t max_iter = 12;
  std::size_t population = 50;
  std::size_t generations = 60;
  std::size_t samples = 5000;
  double lam = 1e-3;
  std::string metric = "max";
  std::size_t threads = 0;
};

SearchConfig to_config(const Options& o) {
  SearchConfig c;
  c.tol_err = o.tol;
  c.continuity = o.continuity;
  c.seed = o.seed;
  c.max_iter = o.max_iter;
  c.population = o.population;
  c.generations = o.generations;
  c.samples_n = o.samples;
  c.lambda = o.lam;
  c.threads = o.threads;
  if (o.metric == "max")
    c.metric = StopMetric::MaxRelErr;
  else if (o.metric == "gamma")
    c.metric = StopMetric::Gamma;
  else
    throw py::value_error("metric must be 'max' or 'gamma'");
  return c;
}

Domain to_domain(const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size()) throw py::value_error("lower and upper differ in length");
  return Domain(lower, upper);
}

// Python callables may return a float or any sequence of floats.
VectorFunction wrap_callable(py::function fn) {
  return [fn](const Vec& x) -> Vec {
    py::object r = fn(x);
    if (py::isinstance<py::float_>(r) || py::isinstance<py::int_>(r)) return Vec::Constant(1, r.cast<double>());
    return r.cast<Vec>();
  };
}

SearchOutcome run_search(const VectorFunction& fn, const Domain& domain, const Options& o) {
  return approximate(fn, domain, to_config(o));
}

// Search settings come in as keyword arguments; unknown names are rejected.
Options to_options(const py::kwargs& kw) {
  Options o;
  for (const auto& [key, value] : kw) {
    const auto k = key.cast<std::string>();
    if (k == "tol") o.tol = value.cast<double>();
    else if (k == "continuity") o.continuity = value.cast<bool>();
    else if (k == "seed") o.seed = value.cast<std::uint64_t>();
    else if (k == "max_iter") o.max_iter = value.cast<std::size_t>();
    else if (k == "population") o.population = value.cast<std::size_t>();
    else if (k == "generations") o.generations = value.cast<std::size_t>();
    else if (k == "samples") o.samples = value.cast<std::size_t>();
    else if (k == "lam") o.lam = value.cast<double>();
    else if (k == "metric") o.metric = value.cast<std::string>();
    else if (k == "threads") o.threads = value.cast<std::size_t>();
    else throw py::type_error("unexpected keyword argument '" + k + "'");
  }
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = PWACUT_VERSION;

  // Translators are tried newest first, so the base class goes in first.
  auto base = py::register_exception<Error>(m, "PwacutError", PyExc_RuntimeError);
  py::register_exception<expr::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<expr::EvalError>(m, "EvalError", base.ptr());

  py::class_<PwaModel>(m, "Model")
      .def_static("from_json", [](const std::string& s) { return deserialize(s); }, py::arg("text"))
      .def("to_json", [](const PwaModel& mdl) { return serialize(mdl); })
      .def("__call__", [](const PwaModel& mdl, const Vec& x) { return evaluate(mdl, x); }, py::arg("x"))
      .def("evaluate", [](const PwaModel& mdl, const Vec& x) { return evaluate(mdl, x); }, py::arg("x"))
      .def("locate", [](const PwaModel& mdl, const Vec& x) { return locate(mdl, mdl.domain.to_working(x)); },
           py::arg("x"), "Region index (0-based) of a point in the problem frame.")
      .def_property_readonly("dim", &PwaModel::dim)
      .def_property_readonly("outdim", &PwaModel::outdim)
      .def_property_readonly("P", &PwaModel::region_count)
      .def_property_readonly("nc", [](const PwaModel& mdl) { return mdl.arrangement.size(); })
      .def_property_readonly("continuity", [](const PwaModel& mdl) { return mdl.continuity; })
      .def_property_readonly("lower", [](const PwaModel& mdl) { return mdl.domain.lower(); })
      .def_property_readonly("upper", [](const PwaModel& mdl) { return mdl.domain.upper(); })
      .def_property_readonly("sigma", [](const PwaModel& mdl) { return mdl.sigma.rows(); })
      .def_property_readonly("adjacency", [](const PwaModel& mdl) { return mdl.adjacency.rows(); })
      .def_property_readonly("cuts",
                             [](const PwaModel& mdl) {
                               std::vector<Vec> hs;
                               for (const auto& p : mdl.arrangement.planes) hs.push_back(p.h);
                               return hs;
                             })
      .def_property_readonly("modes",
                             [](const PwaModel& mdl) {
                               std::vector<std::pair<Mat, Vec>> out;
                               for (const auto& md : mdl.modes) out.emplace_back(md.J, md.K);
                               return out;
                             })
      .def_property_readonly("gamma", [](const PwaModel& mdl) { return mdl.metadata.gamma; })
      .def_property_readonly("max_rel_err", [](const PwaModel& mdl) { return mdl.metadata.max_rel_err; })
      .def("__eq__", [](const PwaModel& a, const PwaModel& b) { return a == b; })
      .def("__repr__", [](const PwaModel& mdl) {
        std::ostringstream s;
        s << "<pwacut.Model d=" << mdl.dim() << " n=" << mdl.outdim() << " nc=" << mdl.arrangement.size()
          << " P=" << mdl.region_count() << ">";
        return s.str();
      });

  py::class_<SearchOutcome>(m, "Result")
      .def_readonly("model", &SearchOutcome::model)
      .def_readonly("gamma", &SearchOutcome::gamma)
      .def_readonly("max_rel_err", &SearchOutcome::max_rel_err)
      .def_readonly("nc", &SearchOutcome::nc)
      .def_readonly("P", &SearchOutcome::P)
      .def_readonly("tolerance_met", &SearchOutcome::tolerance_met)
      .def_property_readonly("history", [](const SearchOutcome& r) {
        py::list out;
        for (const auto& h : r.history)
          out.append(py::dict(py::arg("nc") = h.nc, py::arg("fitness") = h.fitness, py::arg("gamma") = h.gamma,
                              py::arg("max_rel_err") = h.max_rel_err, py::arg("P") = h.P));
        return out;
      });

  m.def(
      "approximate",
      [](py::function fn, const Vec& lower, const Vec& upper, const py::kwargs& kw) {
        return run_search(wrap_callable(std::move(fn)), to_domain(lower, upper), to_options(kw));
      },
      py::arg("fn"), py::arg("lower"), py::arg("upper"),
      "Approximate a Python callable over the box [lower, upper].");

  m.def(
      "approximate_expr",
      [](const std::string& func, const std::string& domain, const py::kwargs& kw) {
        const cli::DomainSpec spec = cli::parse_domain_spec(domain);
        std::vector<expr::Expr> exprs;
        std::string_view rest = func;
        while (true) {
          const auto cut = rest.find(';');
          exprs.push_back(expr::parse(rest.substr(0, cut), spec.dims));
          if (cut == std::string_view::npos) break;
          rest.remove_prefix(cut + 1);
        }
        return run_search(expression_function(std::move(exprs)), spec.domain, to_options(kw));
      },
      py::arg("func"), py::arg("domain"),
      "Approximate expressions (';' separates outputs) over a domain such as \"x1=-2:2,u1=0:1\".");

  m.def(
      "approximate_bench",
      [](const std::string& name, const py::kwargs& kw) {
        const Benchmark b = builtin(name);
        return run_search(b.function(), b.domain, to_options(kw));
      },
      py::arg("name"), "Approximate one of the builtin benchmarks.");

  m.def("benchmarks", &builtin_names);

  m.def(
      "chambers",
      [](const std::vector<Vec>& cuts, const Vec& lower, const Vec& upper) {
        const Domain d = to_domain(lower, upper);
        const auto arr = CutArrangement::from_vectors(cuts);
        const FeasibilityMatrix s = pwacut::chambers(arr, d);
        const RegionSet r = regions(arr, s);
        return py::dict(py::arg("sigma") = s.rows(), py::arg("adjacency") = r.adjacency.rows(),
                        py::arg("P") = r.count);
      },
      py::arg("cuts"), py::arg("lower"), py::arg("upper"),
      "Chambers of the cuts h^T x = 1 (working frame, centered box) inside the box.");

  m.def(
      "parse_expr",
      [](const std::string& text, std::size_t states, std::size_t inputs) {
        return expr::parse(text, {states, inputs}).str();
      },
      py::arg("text"), py::arg("states"), py::arg("inputs") = 0, "Canonical, fully parenthesized form.");
  m.def(
      "eval_expr",
      [](const std::string& text, const Vec& x, std::size_t states, std::size_t inputs) {
        return expr::eval_expr(expr::parse(text, {states, inputs}), x);
      },
      py::arg("text"), py::arg("x"), py::arg("states"), py::arg("inputs") = 0);

  m.def(
      "validate",
      [](const PwaModel& mdl, std::optional<py::function> fn, std::size_t samples, std::uint64_t seed) {
        ValidateOptions opt;
        opt.samples_n = samples;
        opt.seed = seed;
        VectorFunction f;
        if (fn) {
          f = wrap_callable(*fn);
          opt.function = &f;
        }
        const ValidationReport rep = pwacut::validate(mdl, opt);
        py::dict out(py::arg("ok") = rep.ok(), py::arg("failures") = rep.failures(),
                     py::arg("max_jump") = rep.jump.max_jump, py::arg("unassigned") = rep.unassigned,
                     py::arg("multiply_assigned") = rep.multiply_assigned);
        if (rep.gamma) out["gamma"] = *rep.gamma;
        if (rep.max_rel_err) out["max_rel_err"] = *rep.max_rel_err;
        return out;
      },
      py::arg("model"), py::arg("fn") = py::none(), py::arg("samples") = 10000, py::arg("seed") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (exit code, stdout, stderr).");
}
