#include "pwacut/cli.hpp"

#include "pwacut/benchmarks.hpp"
#include "pwacut/model.hpp"
#include "pwacut/partition.hpp"
#include "pwacut/search.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace pwacut::cli {

namespace {

std::string fmt(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s, const std::string& context) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("invalid number '" + std::string(s) + "' in " + context);
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t k = s.find(sep, start);
    out.push_back(s.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start));
    if (k == std::string_view::npos) break;
    start = k + 1;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

struct Options {
  std::string func;
  std::string bench;
  std::string domain;
  double tol = 0.05;
  std::string metric = "max";
  bool continuity = false;
  double lambda = 1e-3;
  std::uint64_t seed = 42;
  std::size_t samples = 5000;
  std::size_t population = 50;
  std::size_t generations = 60;
  std::size_t max_iter = 12;
  std::size_t nc_limit = kDefaultCutLimit;
  std::string out;
  std::string report;
  std::string plotdata;
  std::string cuts;
  std::string model;
  std::string point;
};

struct Problem {
  std::string label;
  Domain domain;
  expr::Dims dims;
  VectorFunction fn;
};

Problem resolve_problem(const Options& o) {
  if (!o.func.empty() && !o.bench.empty()) throw Error("give either --func or --bench, not both");
  if (!o.bench.empty()) {
    Benchmark b = builtin(o.bench);
    if (!o.domain.empty()) {
      DomainSpec spec = parse_domain_spec(o.domain);
      if (!(spec.dims == b.dims)) throw Error("--domain does not match the variables of benchmark " + b.name);
      b.domain = spec.domain;
    }
    return {b.name, b.domain, b.dims, b.function()};
  }
  if (o.func.empty()) throw Error("one of --func or --bench is required");
  if (o.domain.empty()) throw Error("--func requires --domain");
  DomainSpec spec = parse_domain_spec(o.domain);
  std::vector<expr::Expr> exprs;
  for (auto part : split(o.func, ';')) exprs.push_back(expr::parse(part, spec.dims));
  return {o.func, spec.domain, spec.dims, expression_function(std::move(exprs))};
}

std::optional<Problem> optional_problem(const Options& o) {
  if (o.func.empty() && o.bench.empty()) return std::nullopt;
  return resolve_problem(o);
}

std::vector<std::string> variable_names(const expr::Dims& dims) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= dims.states; ++i) names.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= dims.inputs; ++i) names.push_back("u" + std::to_string(i));
  return names;
}

SearchConfig search_config(const Options& o, std::ostream& err) {
  SearchConfig c;
  c.tol_err = o.tol;
  if (o.metric == "max")
    c.metric = StopMetric::MaxRelErr;
  else if (o.metric == "gamma")
    c.metric = StopMetric::Gamma;
  else
    throw Error("--metric must be max or gamma");
  c.continuity = o.continuity;
  c.lambda = o.lambda;
  c.seed = o.seed;
  c.samples_n = o.samples;
  c.population = o.population;
  c.generations = o.generations;
  c.max_iter = o.max_iter;
  c.nc_limit = o.nc_limit;
  c.progress = [&err](const GenerationLog& g) {
    err << "nc=" << g.nc << " gen=" << g.generation << " fitness=" << fmt(g.best_fitness) << " gamma=" << fmt(g.gamma)
        << " P=" << g.P << '\n';
  };
  return c;
}

void write_report(const std::string& path, const Problem& pb, const PwaModel& model, const SearchConfig& config) {
  SampleSet samples = sample_domain(pb.domain, config.samples_n, config.seed);
  evaluate_samples(samples, pb.domain, pb.fn);
  const auto names = variable_names(pb.dims);
  const std::size_t n = samples.outdim();
  std::ostringstream os;
  os << "index";
  for (const auto& v : names) os << ',' << v;
  for (std::size_t i = 1; i <= n; ++i) os << ",F" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",f" << i;
  os << ",rel_err\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Vec xw = samples.point(k);
    const Vec x = pb.domain.to_original(xw);
    const Vec F = samples.values.row(static_cast<Eigen::Index>(k)).transpose();
    const Vec f = evaluate_working(model, xw);
    os << k;
    for (Eigen::Index j = 0; j < x.size(); ++j) os << ',' << fmt(x[j]);
    for (Eigen::Index j = 0; j < F.size(); ++j) os << ',' << fmt(F[j]);
    for (Eigen::Index j = 0; j < f.size(); ++j) os << ',' << fmt(f[j]);
    os << ',' << fmt((F - f).norm() / std::sqrt(F.squaredNorm() + 1.0)) << '\n';
  }
  write_file(path, os.str());
}

void write_plotdata(const std::string& path, const Problem& pb, const PwaModel& model) {
  constexpr int kGrid = 101;
  const auto names = variable_names(pb.dims);
  const Domain& D = pb.domain;
  std::ostringstream os;
  os << names[0] << ',' << names[1];
  const std::size_t n = model.outdim();
  for (std::size_t i = 1; i <= n; ++i) os << ",F" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",f" << i;
  os << ",region\n";
  for (int a = 0; a < kGrid; ++a) {
    for (int b = 0; b < kGrid; ++b) {
      Vec x(2);
      x[0] = D.lower()[0] + (D.upper()[0] - D.lower()[0]) * a / (kGrid - 1);
      x[1] = D.lower()[1] + (D.upper()[1] - D.lower()[1]) * b / (kGrid - 1);
      const Vec xw = D.to_working(x);
      const Vec F = pb.fn(x);
      const Vec f = evaluate_working(model, xw);
      os << fmt(x[0]) << ',' << fmt(x[1]);
      for (Eigen::Index j = 0; j < F.size(); ++j) os << ',' << fmt(F[j]);
      for (Eigen::Index j = 0; j < f.size(); ++j) os << ',' << fmt(f[j]);
      os << ',' << locate(model, xw) + 1 << '\n';
    }
  }
  write_file(path, os.str());
}

int run_approx(const Options& o, std::ostream& out, std::ostream& err) {
  const Problem pb = resolve_problem(o);
  const SearchConfig config = search_config(o, err);
  const SearchOutcome result = approximate(pb.fn, pb.domain, config);
  const std::string json = serialize(result.model);
  if (!o.out.empty())
    write_file(o.out, json);
  else
    out << json;
  if (!o.report.empty()) write_report(o.report, pb, result.model, config);
  if (!o.plotdata.empty()) {
    if (pb.domain.dim() != 2)
      err << "warning: --plotdata needs a two-dimensional domain; skipped\n";
    else
      write_plotdata(o.plotdata, pb, result.model);
  }
  err << "nc=" << result.nc << " P=" << result.P << " gamma=" << fmt(result.gamma)
      << " max_rel_err=" << fmt(result.max_rel_err) << (result.tolerance_met ? " (tolerance met)" : " (tolerance NOT met)")
      << '\n';
  return result.tolerance_met ? kOk : kToleranceNotMet;
}

int run_eval(const Options& o, std::ostream& out) {
  if (o.model.empty()) throw Error("eval requires --model");
  if (o.point.empty()) throw Error("eval requires --point");
  const PwaModel model = deserialize(read_file(o.model));
  const auto p = parse_point(o.point);
  if (p.size() != model.dim())
    throw Error("--point has " + std::to_string(p.size()) + " coordinates, the model expects " +
                std::to_string(model.dim()));
  const Vec f = evaluate(model, Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size())));
  for (Eigen::Index j = 0; j < f.size(); ++j) out << (j ? "," : "") << fmt(f[j]);
  out << '\n';
  return kOk;
}

int run_validate(const Options& o, std::ostream& out) {
  if (o.model.empty()) throw Error("validate requires --model");
  const PwaModel model = deserialize(read_file(o.model));
  const auto pb = optional_problem(o);
  ValidateOptions vo;
  vo.seed = o.seed;
  if (pb) {
    if (!(pb->domain == model.domain)) throw Error("the function's domain differs from the model's");
    vo.function = &pb->fn;
  }
  const ValidationReport r = validate(model, vo);
  out << "regions: " << model.region_count() << '\n';
  out << "samples: " << r.samples << " (unassigned " << r.unassigned << ", multiply assigned " << r.multiply_assigned
      << ")\n";
  out << "region samples:";
  for (auto c : r.region_samples) out << ' ' << c;
  out << '\n';
  if (r.continuity_checked) {
    out << "continuity residual: " << fmt(r.continuity_residual) << " (tolerance " << fmt(r.continuity_tolerance)
        << ")\n";
    out << "facet jump: " << fmt(r.jump.max_jump) << " over " << r.jump.points << " points (tolerance "
        << fmt(r.jump_tolerance) << ")\n";
  }
  if (r.gamma) out << "gamma: " << fmt(*r.gamma) << '\n';
  if (r.max_rel_err) out << "max_rel_err: " << fmt(*r.max_rel_err) << '\n';
  const auto failures = r.failures();
  for (const auto& f : failures) out << "FAIL " << f << '\n';
  out << (failures.empty() ? "valid" : "invalid") << '\n';
  return failures.empty() ? kOk : kValidation;
}

std::vector<Vec> read_cuts(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed cuts file " + path + ": " + e.what());
  }
  if (j.is_object() && j.contains("hyperplanes")) j = j["hyperplanes"];
  if (!j.is_array()) throw Error("cuts file must hold an array of h vectors");
  std::vector<Vec> hs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array()) throw Error("cut " + std::to_string(i + 1) + " is not an array");
    Vec h(static_cast<Eigen::Index>(row.size()));
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!row[k].is_number()) throw Error("cut " + std::to_string(i + 1) + " has a non-numeric entry");
      h[static_cast<Eigen::Index>(k)] = row[k].get<double>();
    }
    hs.push_back(std::move(h));
  }
  return hs;
}

int run_chambers(const Options& o, std::ostream& out) {
  if (o.cuts.empty()) throw Error("chambers requires --cuts");
  if (o.domain.empty()) throw Error("chambers requires --domain");
  const DomainSpec spec = parse_domain_spec(o.domain);
  const auto hs = read_cuts(o.cuts);
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (static_cast<std::size_t>(hs[i].size()) != spec.domain.dim())
      throw Error("cut " + std::to_string(i + 1) + " has the wrong dimension");
  if (hs.size() > o.nc_limit) throw TooManyCuts(hs.size(), o.nc_limit);
  const CutArrangement arr = CutArrangement::from_vectors(hs);
  ChamberOptions co;
  co.cut_limit = o.nc_limit;
  const FeasibilityMatrix sigma = chambers(arr, spec.domain, co);
  const AdjacencyMatrix A = adjacency(sigma);
  nlohmann::ordered_json j;
  j["sigma"] = sigma.rows();
  j["adjacency"] = A.rows();
  j["P"] = sigma.columns();
  out << j.dump() << '\n';
  return kOk;
}

int run_bench(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.bench.empty()) throw Error("bench requires --bench");
  const Problem pb = resolve_problem(o);
  constexpr std::array<double, 3> kLevels = {0.10, 0.05, 0.025};
  out << "benchmark " << pb.label << " (metric " << o.metric << (o.continuity ? ", continuous" : "") << ")\n";
  out << std::left << std::setw(8) << "tol" << std::setw(5) << "nc" << std::setw(5) << "P" << std::setw(14)
      << "max_rel_err" << std::setw(14) << "gamma" << std::setw(6) << "met"
      << "seconds\n";
  bool all = true;
  for (double level : kLevels) {
    Options lo = o;
    lo.tol = level;
    SearchConfig config = search_config(lo, err);
    const auto t0 = std::chrono::steady_clock::now();
    const SearchOutcome r = approximate(pb.fn, pb.domain, config);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && r.tolerance_met;
    std::ostringstream e, g, s;
    e << std::setprecision(4) << r.max_rel_err;
    g << std::setprecision(4) << r.gamma;
    s << std::fixed << std::setprecision(1) << secs;
    out << std::setw(8) << fmt(level) << std::setw(5) << r.nc << std::setw(5) << r.P << std::setw(14) << e.str()
        << std::setw(14) << g.str() << std::setw(6) << (r.tolerance_met ? "yes" : "no") << s.str() << '\n';
  }
  return all ? kOk : kToleranceNotMet;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--func", o.func, "Expression in x1..xn, u1..um (';' separates outputs)");
  cmd->add_option("--bench", o.bench, "Builtin benchmark: sine2d, dubins, vehicle_vx");
  cmd->add_option("--domain", o.domain, "Box such as \"x1=-2:2,u1=-2:2\"");
  cmd->add_option("--seed", o.seed, "Random seed");
}

void add_search(CLI::App* cmd, Options& o) {
  cmd->add_option("--tol", o.tol, "Error tolerance");
  cmd->add_option("--metric", o.metric, "Stopping metric: max or gamma")->check(CLI::IsMember({"max", "gamma"}));
  cmd->add_flag("--continuity", o.continuity, "Require a continuous approximation");
  cmd->add_option("--lambda", o.lambda, "Penalty per region");
  cmd->add_option("--samples", o.samples, "Number of sample points");
  cmd->add_option("--population", o.population, "GA population size");
  cmd->add_option("--generations", o.generations, "GA generations per cut count");
  cmd->add_option("--max-iter", o.max_iter, "Largest number of cuts tried");
  cmd->add_option("--nc-limit", o.nc_limit, "Hard limit on the number of cuts");
}

}  // namespace

DomainSpec parse_domain_spec(std::string_view text) {
  std::vector<double> lo, hi;
  expr::Dims dims;
  bool inputs = false;
  for (auto entry : split(text, ',')) {
    const auto eq = entry.find('=');
    const auto colon = entry.find(':', eq == std::string_view::npos ? 0 : eq);
    if (eq == std::string_view::npos || colon == std::string_view::npos)
      throw Error("domain entry '" + std::string(entry) + "' is not of the form name=lo:hi");
    std::string_view name = entry.substr(0, eq);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    const std::string expected_x = "x" + std::to_string(dims.states + 1);
    const std::string expected_u = "u" + std::to_string(dims.inputs + 1);
    if (!inputs && name == expected_x) {
      ++dims.states;
    } else if (name == expected_u) {
      inputs = true;
      ++dims.inputs;
    } else {
      throw Error("domain variable '" + std::string(name) + "' out of order (expected " +
                  (inputs ? expected_u : expected_x + " or " + expected_u) + ")");
    }
    lo.push_back(parse_double(entry.substr(eq + 1, colon - eq - 1), "domain"));
    hi.push_back(parse_double(entry.substr(colon + 1), "domain"));
  }
  Vec l = Eigen::Map<Vec>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  Vec h = Eigen::Map<Vec>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  return {Domain(l, h), dims};
}

std::vector<double> parse_point(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_double(part, "point"));
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("pwacut");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Piecewise-affine approximation by hyperplane cuts"};
  app.set_version_flag("--version", std::string(PWACUT_VERSION));
  app.require_subcommand(1);
  Options o;

  auto* approx = app.add_subcommand("approx", "Approximate a function and write the model");
  add_common(approx, o);
  add_search(approx, o);
  approx->add_option("--out", o.out, "Model JSON output (stdout when omitted)");
  approx->add_option("--report", o.report, "CSV of per-sample errors");
  approx->add_option("--plotdata", o.plotdata, "CSV grid of F, f and region ids (2-D only)");

  auto* eval = app.add_subcommand("eval", "Evaluate a model at a point");
  eval->add_option("--model", o.model, "Model JSON")->required();
  eval->add_option("--point", o.point, "Comma-separated coordinates")->required();

  auto* val = app.add_subcommand("validate", "Check a model's partition and continuity");
  add_common(val, o);
  val->add_option("--model", o.model, "Model JSON")->required();

  auto* ch = app.add_subcommand("chambers", "Enumerate the chambers of explicit cuts");
  ch->add_option("--cuts", o.cuts, "JSON array of h vectors")->required();
  ch->add_option("--domain", o.domain, "Box such as \"x1=-2:2,x2=-2:2\"")->required();
  ch->add_option("--nc-limit", o.nc_limit, "Hard limit on the number of cuts");

  auto* bench = app.add_subcommand("bench", "Run a benchmark at 10%, 5% and 2.5%");
  add_common(bench, o);
  add_search(bench, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o1, e1;
    const int code = app.exit(e, o1, e1);
    out << o1.str();
    err << e1.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*approx) return run_approx(o, out, err);
    if (*eval) return run_eval(o, out);
    if (*val) return run_validate(o, out);
    if (*ch) return run_chambers(o, out);
    if (*bench) return run_bench(o, out, err);
  } catch (const EvaluationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kEvaluation;
  } catch (const expr::EvalError& e) {
    err << "error: " << e.what() << '\n';
    return kEvaluation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace pwacut::cli
