#include "pwacut/model.hpp"

#include "pwacut/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pwacut {

using Json = nlohmann::ordered_json;

namespace {

using Index = Eigen::Index;

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

Json int_rows_json(const std::vector<std::vector<int>>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) a.push_back(r);
  return a;
}

/// Reads fields out of a JSON tree, reporting failures with a JSON pointer.
class Reader {
 public:
  explicit Reader(const Json& root) : root_(root) {}

  const Json& field(const Json& obj, const std::string& parent, const std::string& key) const {
    if (!obj.is_object()) fail(parent.empty() ? "/" : parent, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(parent + "/" + key, "missing required field");
    return *it;
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) { throw SchemaError(path, what); }

  static double number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
  }

  static long long integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long long>();
  }

  static std::size_t count(const Json& j, const std::string& path) {
    const long long v = integer(j, path);
    if (v < 0) fail(path, "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  static std::uint64_t unsigned64(const Json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    return count(j, path);
  }

  static const Json& array(const Json& j, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
    if (!j.is_array()) fail(path, "expected an array");
    if (size && j.size() != *size)
      fail(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(j.size()));
    return j;
  }

  static Vec vector(const Json& j, const std::string& path, std::size_t size) {
    array(j, path, size);
    Vec v(static_cast<Index>(size));
    for (std::size_t i = 0; i < size; ++i) v[static_cast<Index>(i)] = number(j[i], path + "/" + std::to_string(i));
    return v;
  }

  static Mat matrix(const Json& j, const std::string& path, std::size_t rows, std::size_t cols) {
    array(j, path, rows);
    Mat m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
      m.row(static_cast<Index>(r)) = vector(j[r], path + "/" + std::to_string(r), cols).transpose();
    return m;
  }

  const Json& root() const { return root_; }

 private:
  const Json& root_;
};

}  // namespace

bool PwaModel::operator==(const PwaModel& o) const {
  if (!(domain == o.domain) || domain.shift() != o.domain.shift()) return false;
  if (arrangement.size() != o.arrangement.size()) return false;
  for (std::size_t i = 0; i < arrangement.size(); ++i)
    if (arrangement.planes[i].h != o.arrangement.planes[i].h) return false;
  return sigma == o.sigma && adjacency == o.adjacency && regions == o.regions && modes == o.modes &&
         continuity == o.continuity && metadata == o.metadata && history == o.history &&
         tolerance_met == o.tolerance_met;
}

PwaModel make_model(const Domain& domain, const CutArrangement& arrangement, const FeasibilityMatrix& sigma,
                    std::vector<AffineMode> modes, bool continuity) {
  auto rs = regions(arrangement, sigma);
  PwaModel m{domain, arrangement, sigma, std::move(rs.adjacency), std::move(rs.regions), std::move(modes), continuity, {}, {}, {}};
  m.metadata.nc = arrangement.size();
  m.metadata.P = m.modes.size();
  return m;
}

std::size_t locate(const PwaModel& model, const Vec& x_working) {
  return locate_chamber(model.arrangement, model.sigma, x_working);
}

Vec evaluate_working(const PwaModel& model, const Vec& x) { return model.modes[locate(model, x)](x); }

Vec evaluate(const PwaModel& model, const Vec& x) {
  if (static_cast<std::size_t>(x.size()) != model.dim())
    throw OutOfDomain("point has " + std::to_string(x.size()) + " coordinates, model expects " +
                      std::to_string(model.dim()));
  const Vec xw = model.domain.to_working(x);
  if (!model.domain.contains_working(xw)) {
    std::ostringstream msg;
    msg << "point (";
    for (Index j = 0; j < x.size(); ++j) msg << (j ? ", " : "") << x[j];
    msg << ") lies outside the model domain";
    throw OutOfDomain(msg.str());
  }
  return evaluate_working(model, xw);
}

std::vector<Vec> sample_facet(const PwaModel& model, std::size_t p, std::size_t plane, std::size_t count, Rng& rng) {
  const auto cons = facet_constraints(model.arrangement, model.sigma, p, plane);
  auto start = interior_point(cons, model.domain);
  if (!start) return {};
  const Vec& half = model.domain.half_width();
  const Index d = half.size();

  // Hit-and-run in z = x / half; rows a z <= b for the box and the other cuts.
  std::vector<std::pair<Vec, double>> rows;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    if (i == plane) continue;
    const Vec a = half.cwiseProduct(cons[i].h);
    if (cons[i].sense == Sense::GreaterEq)
      rows.emplace_back(-a, -1.0);
    else
      rows.emplace_back(a, 1.0);
  }
  Vec normal = half.cwiseProduct(model.arrangement.planes[plane].h);
  normal.normalize();
  Vec z = start->cwiseQuotient(half);

  std::vector<Vec> out;
  out.reserve(count);
  constexpr std::size_t kBurnIn = 10;
  for (std::size_t step = 0; out.size() < count && step < kBurnIn + 4 * count; ++step) {
    Vec dir(d);
    for (Index j = 0; j < d; ++j) dir[j] = rng.normal();
    dir -= dir.dot(normal) * normal;
    const double len = dir.norm();
    if (!(len > 1e-12)) continue;
    dir /= len;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    auto clip = [&](double slope, double room) {
      if (slope > 1e-15)
        hi = std::min(hi, room / slope);
      else if (slope < -1e-15)
        lo = std::max(lo, room / slope);
    };
    for (Index j = 0; j < d; ++j) {
      clip(dir[j], 1.0 - z[j]);
      clip(-dir[j], 1.0 + z[j]);
    }
    for (const auto& [a, b] : rows) clip(a.dot(dir), b - a.dot(z));
    if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) continue;
    z += rng.uniform(std::min(lo, 0.0), std::max(hi, 0.0)) * dir;
    if (step >= kBurnIn) out.push_back(half.cwiseProduct(z));
  }
  return out;
}

FacetJump facet_jump(const PwaModel& model, std::size_t total, std::uint64_t seed) {
  FacetJump out;
  const auto edges = model.adjacency.edges();
  if (edges.empty() || total == 0) return out;
  Rng rng(mix_seed(seed, 0xFACE7));
  const std::size_t per_edge = std::max<std::size_t>(1, (total + edges.size() - 1) / edges.size());
  for (const auto& e : edges) {
    for (const Vec& x : sample_facet(model, e.p, e.plane, per_edge, rng)) {
      out.max_jump = std::max(out.max_jump, (model.modes[e.p](x) - model.modes[e.q](x)).norm());
      ++out.points;
    }
  }
  return out;
}

bool ValidationReport::ok() const { return failures().empty(); }

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out = structure;
  for (std::size_t p : empty_regions) out.push_back("region " + std::to_string(p + 1) + " is empty (LP infeasible)");
  if (unassigned > 0) out.push_back(std::to_string(unassigned) + " samples matched no region");
  if (multiply_assigned > 0) out.push_back(std::to_string(multiply_assigned) + " samples matched more than one region");
  if (continuity_checked) {
    if (continuity_residual > continuity_tolerance) {
      std::ostringstream msg;
      msg << "continuity residual " << continuity_residual << " exceeds " << continuity_tolerance;
      out.push_back(msg.str());
    }
    if (jump.max_jump > jump_tolerance) {
      std::ostringstream msg;
      msg << "facet jump " << jump.max_jump << " exceeds " << jump_tolerance;
      out.push_back(msg.str());
    }
  }
  return out;
}

ValidationReport validate(const PwaModel& model, const ValidateOptions& options) {
  ValidationReport rep;
  const std::size_t P = model.sigma.columns();

  if (model.modes.size() != P) rep.structure.push_back("mode count differs from the number of sigma columns");
  if (model.regions.size() != P) rep.structure.push_back("region count differs from the number of sigma columns");
  if (model.sigma.cuts() != model.arrangement.size())
    rep.structure.push_back("sigma row count differs from the number of hyperplanes");
  if (!rep.structure.empty()) return rep;

  const auto expected = regions(model.arrangement, model.sigma);
  if (!(expected.adjacency == model.adjacency)) rep.structure.push_back("adjacency does not match sigma");
  if (expected.regions != model.regions) rep.structure.push_back("region halfspaces do not match sigma and adjacency");

  for (std::size_t p = 0; p < P; ++p)
    if (!lp_feasible(chamber_constraints(model.arrangement, model.sigma, p), model.domain)) rep.empty_regions.push_back(p);

  const SampleSet samples = sample_domain(model.domain, options.samples_n, options.seed);
  rep.samples = samples.size();
  rep.region_samples.assign(P, 0);
  std::vector<std::size_t> assignment(samples.size());
  double max_f = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Vec x = samples.point(k);
    const std::uint64_t code = sigma_code(model.arrangement, x);
    const auto matches = std::count(model.sigma.codes().begin(), model.sigma.codes().end(), code);
    if (matches == 0) ++rep.unassigned;
    if (matches > 1) ++rep.multiply_assigned;
    assignment[k] = locate(model, x);
    ++rep.region_samples[assignment[k]];
    max_f = std::max(max_f, model.modes[assignment[k]](x).norm());
  }

  if (options.function) {
    SampleSet with_values = samples;
    evaluate_samples(with_values, model.domain, *options.function);
    const auto c = cost(with_values, model.modes, assignment);
    rep.gamma = c.gamma;
    rep.max_rel_err = c.max_rel_err;
    max_f = std::max(max_f, with_values.values.rowwise().norm().maxCoeff());
  }

  if (model.continuity) {
    rep.continuity_checked = true;
    double scale = 1.0;
    for (const auto& e : model.adjacency.edges()) {
      const auto r = continuity_residual(model.modes[e.p], model.modes[e.q], model.arrangement.planes[e.plane].h);
      rep.continuity_jacobian = std::max(rep.continuity_jacobian, r.jacobian);
      rep.continuity_offset = std::max(rep.continuity_offset, r.offset);
      scale = std::max({scale, (model.modes[e.p].J - model.modes[e.q].J).norm(),
                        (model.modes[e.p].K - model.modes[e.q].K).cwiseAbs().maxCoeff()});
    }
    rep.continuity_residual = std::max(rep.continuity_jacobian, rep.continuity_offset);
    rep.continuity_tolerance = 1e-8 * scale;
    rep.jump = facet_jump(model, options.facet_points, options.seed);
    rep.jump_tolerance = 1e-6 * (1.0 + max_f);
  }
  return rep;
}

std::string serialize(const PwaModel& m) {
  Json j;
  j["version"] = kModelFormatVersion;
  j["dim"] = m.dim();
  j["outdim"] = m.outdim();
  j["domain"] = {{"lower", vec_json(m.domain.lower())},
                 {"upper", vec_json(m.domain.upper())},
                 {"shift", vec_json(m.domain.shift())}};
  Json planes = Json::array();
  for (const auto& p : m.arrangement.planes) planes.push_back(vec_json(p.h));
  j["hyperplanes"] = planes;
  j["sigma"] = int_rows_json(m.sigma.rows());
  j["adjacency"] = int_rows_json(m.adjacency.rows());
  Json regs = Json::array();
  for (const auto& r : m.regions) {
    Json hs = Json::array();
    for (const auto& h : r.halfspaces) hs.push_back({{"i", h.plane + 1}, {"sigma", h.sigma}});
    regs.push_back({{"halfspaces", hs}});
  }
  j["regions"] = regs;
  Json modes = Json::array();
  for (const auto& mode : m.modes) modes.push_back({{"J", mat_json(mode.J)}, {"K", vec_json(mode.K)}});
  j["modes"] = modes;
  j["continuity"] = m.continuity;
  j["metadata"] = {{"seed", m.metadata.seed},
                   {"nc", m.metadata.nc},
                   {"P", m.metadata.P},
                   {"gamma", m.metadata.gamma},
                   {"max_rel_err", m.metadata.max_rel_err},
                   {"tool_version", m.metadata.tool_version}};
  if (m.tolerance_met) j["tolerance_met"] = *m.tolerance_met;
  if (!m.history.empty()) {
    Json hist = Json::array();
    for (const auto& h : m.history)
      hist.push_back({{"nc", h.nc}, {"fitness", h.fitness}, {"gamma", h.gamma}, {"max_rel_err", h.max_rel_err}, {"P", h.P}});
    j["history"] = hist;
  }
  return j.dump(2) + "\n";
}

PwaModel deserialize(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON: ") + e.what());
  }
  Reader rd(root);
  if (!root.is_object()) Reader::fail("/", "expected an object");

  const long long version = Reader::integer(rd.field(root, "", "version"), "/version");
  if (version != kModelFormatVersion) Reader::fail("/version", "unsupported model version " + std::to_string(version));
  const std::size_t d = Reader::count(rd.field(root, "", "dim"), "/dim");
  const std::size_t n = Reader::count(rd.field(root, "", "outdim"), "/outdim");
  if (d == 0) Reader::fail("/dim", "dimension must be positive");

  const Json& jd = rd.field(root, "", "domain");
  const Vec lower = Reader::vector(rd.field(jd, "/domain", "lower"), "/domain/lower", d);
  const Vec upper = Reader::vector(rd.field(jd, "/domain", "upper"), "/domain/upper", d);
  const Vec shift = Reader::vector(rd.field(jd, "/domain", "shift"), "/domain/shift", d);
  std::optional<Domain> domain;
  try {
    domain.emplace(lower, upper);
  } catch (const DomainError& e) {
    Reader::fail("/domain", e.what());
  }
  if (domain->shift() != shift) Reader::fail("/domain/shift", "shift must be the box center");

  const Json& jh = Reader::array(rd.field(root, "", "hyperplanes"), "/hyperplanes");
  std::vector<Vec> hs;
  for (std::size_t i = 0; i < jh.size(); ++i) hs.push_back(Reader::vector(jh[i], "/hyperplanes/" + std::to_string(i), d));
  const std::size_t nc = hs.size();
  if (nc > 63) Reader::fail("/hyperplanes", "at most 63 hyperplanes are supported");

  const Json& jm = rd.field(root, "", "metadata");
  ModelMetadata meta;
  meta.seed = Reader::unsigned64(rd.field(jm, "/metadata", "seed"), "/metadata/seed");
  meta.nc = Reader::count(rd.field(jm, "/metadata", "nc"), "/metadata/nc");
  meta.P = Reader::count(rd.field(jm, "/metadata", "P"), "/metadata/P");
  meta.gamma = Reader::number(rd.field(jm, "/metadata", "gamma"), "/metadata/gamma");
  meta.max_rel_err = Reader::number(rd.field(jm, "/metadata", "max_rel_err"), "/metadata/max_rel_err");
  if (const auto it = jm.find("tool_version"); it != jm.end() && it->is_string()) meta.tool_version = it->get<std::string>();
  if (meta.nc != nc) Reader::fail("/metadata/nc", "does not match the number of hyperplanes");

  const Json& js = Reader::array(rd.field(root, "", "sigma"), "/sigma", nc);
  std::vector<std::vector<int>> sigma_rows(nc);
  const std::size_t P = meta.P;
  if (nc == 0 && P != 1) Reader::fail("/metadata/P", "a model without cuts has exactly one region");
  for (std::size_t i = 0; i < nc; ++i) {
    const std::string path = "/sigma/" + std::to_string(i);
    const Json& row = Reader::array(js[i], path, P);
    for (std::size_t p = 0; p < P; ++p) {
      const long long b = Reader::integer(row[p], path + "/" + std::to_string(p));
      if (b != 0 && b != 1) Reader::fail(path + "/" + std::to_string(p), "sigma entries must be 0 or 1");
      sigma_rows[i].push_back(static_cast<int>(b));
    }
  }
  FeasibilityMatrix sigma = nc == 0 ? FeasibilityMatrix(0, {0}) : FeasibilityMatrix::from_rows(sigma_rows);

  const Json& ja = Reader::array(rd.field(root, "", "adjacency"), "/adjacency", P);
  AdjacencyMatrix adj(P);
  for (std::size_t p = 0; p < P; ++p) {
    const std::string path = "/adjacency/" + std::to_string(p);
    const Json& row = Reader::array(ja[p], path, P);
    for (std::size_t q = 0; q < P; ++q) {
      const long long v = Reader::integer(row[q], path + "/" + std::to_string(q));
      if (v < 0 || v > static_cast<long long>(nc)) Reader::fail(path + "/" + std::to_string(q), "hyperplane index out of range");
      adj.at(p, q) = static_cast<int>(v);
    }
  }

  const Json& jr = Reader::array(rd.field(root, "", "regions"), "/regions", P);
  std::vector<Region> regs(P);
  for (std::size_t p = 0; p < P; ++p) {
    const std::string path = "/regions/" + std::to_string(p);
    regs[p].id = p;
    const Json& hsj = Reader::array(rd.field(jr[p], path, "halfspaces"), path + "/halfspaces");
    for (std::size_t k = 0; k < hsj.size(); ++k) {
      const std::string hp = path + "/halfspaces/" + std::to_string(k);
      const std::size_t i = Reader::count(rd.field(hsj[k], hp, "i"), hp + "/i");
      const long long s = Reader::integer(rd.field(hsj[k], hp, "sigma"), hp + "/sigma");
      if (i < 1 || i > nc) Reader::fail(hp + "/i", "hyperplane index out of range");
      if (s != 0 && s != 1) Reader::fail(hp + "/sigma", "sigma must be 0 or 1");
      regs[p].halfspaces.push_back({i - 1, static_cast<int>(s)});
    }
  }

  const Json& jmodes = Reader::array(rd.field(root, "", "modes"), "/modes", P);
  std::vector<AffineMode> modes;
  for (std::size_t p = 0; p < P; ++p) {
    const std::string path = "/modes/" + std::to_string(p);
    AffineMode mode;
    mode.J = Reader::matrix(rd.field(jmodes[p], path, "J"), path + "/J", n, d);
    mode.K = Reader::vector(rd.field(jmodes[p], path, "K"), path + "/K", n);
    modes.push_back(std::move(mode));
  }

  const Json& jc = rd.field(root, "", "continuity");
  if (!jc.is_boolean()) Reader::fail("/continuity", "expected a boolean");

  PwaModel m{*domain, CutArrangement::from_vectors(hs), std::move(sigma), std::move(adj), std::move(regs), std::move(modes),
             jc.get<bool>(), meta, {}, {}};
  if (const auto it = root.find("tolerance_met"); it != root.end()) {
    if (!it->is_boolean()) Reader::fail("/tolerance_met", "expected a boolean");
    m.tolerance_met = it->get<bool>();
  }
  if (const auto it = root.find("history"); it != root.end()) {
    Reader::array(*it, "/history");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string hp = "/history/" + std::to_string(k);
      const Json& h = (*it)[k];
      m.history.push_back({Reader::count(rd.field(h, hp, "nc"), hp + "/nc"),
                           Reader::number(rd.field(h, hp, "fitness"), hp + "/fitness"),
                           Reader::number(rd.field(h, hp, "gamma"), hp + "/gamma"),
                           Reader::number(rd.field(h, hp, "max_rel_err"), hp + "/max_rel_err"),
                           Reader::count(rd.field(h, hp, "P"), hp + "/P")});
    }
  }
  return m;
}

}  // namespace pwacut
