#include "nlwave/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nlwave/errors.hpp"

namespace nlwave {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("scenario: " + path + ": " + msg);
}

// Strictness backbone: every object must list its keys here.
void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      fail(path + "." + item.key(), "unknown key");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing required key '") + key + "'");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

// Complex values are written as a plain number or as [re, im].
cplx as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(path, "expected a number or [re, im]");
}

TimeMeasure parse_measure(const json& j, double horizon,
                          const std::string& path) {
  check_keys(j, {"atoms", "density"}, path);
  std::vector<TimeMeasure::Atom> atoms;
  if (auto it = j.find("atoms"); it != j.end()) {
    if (!it->is_array()) fail(path + ".atoms", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& a = (*it)[i];
      const std::string apath = path + ".atoms[" + std::to_string(i) + "]";
      check_keys(a, {"location", "weight"}, apath);
      double loc = as_number(require(a, "location", apath), apath + ".location");
      cplx w = as_complex(require(a, "weight", apath), apath + ".weight");
      if (loc < 0.0 || loc > horizon)
        fail(apath + ".location", "atom location outside [0, horizon]");
      atoms.push_back({loc, w});
    }
  }
  std::vector<cplx> density;
  if (auto it = j.find("density"); it != j.end() && !it->is_null()) {
    const std::string dpath = path + ".density";
    check_keys(*it, {"samples"}, dpath);
    const json& s = require(*it, "samples", dpath);
    if (!s.is_array() || s.size() < 2)
      fail(dpath + ".samples", "expected an array of at least 2 samples");
    for (std::size_t i = 0; i < s.size(); ++i)
      density.push_back(as_complex(s[i], dpath + ".samples[" + std::to_string(i) + "]"));
  }
  return TimeMeasure(horizon, std::move(atoms), std::move(density));
}

SpatialTerm parse_spatial(const json& j, int channels, int dim,
                          const std::string& path) {
  SpatialTerm term;
  std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "gaussian") {
    term.kind = SpatialTerm::Kind::Gaussian;
    check_keys(j, {"kind", "amplitude", "center", "width"}, path);
    if (auto it = j.find("center"); it != j.end()) {
      if (!it->is_array() || int(it->size()) != dim)
        fail(path + ".center", "expected an array of length grid.dim");
      for (int a = 0; a < dim; ++a)
        term.center[std::size_t(a)] =
            as_number((*it)[std::size_t(a)], path + ".center");
    }
    term.width = as_number(require(j, "width", path), path + ".width");
    if (!(term.width > 0.0)) fail(path + ".width", "width must be positive");
  } else if (kind == "planewave") {
    term.kind = SpatialTerm::Kind::PlaneWave;
    check_keys(j, {"kind", "amplitude", "wavevector"}, path);
    const json& k = require(j, "wavevector", path);
    if (!k.is_array() || int(k.size()) != dim)
      fail(path + ".wavevector", "expected an integer array of length grid.dim");
    for (int a = 0; a < dim; ++a)
      term.wavevector[std::size_t(a)] =
          as_int(k[std::size_t(a)], path + ".wavevector");
  } else if (kind == "constant") {
    term.kind = SpatialTerm::Kind::Constant;
    check_keys(j, {"kind", "amplitude"}, path);
  } else {
    fail(path + ".kind", "expected gaussian | planewave | constant");
  }
  const json& amp = require(j, "amplitude", path);
  // One entry per channel, or a single entry broadcast to every channel.
  if (!amp.is_array() || (int(amp.size()) != channels && amp.size() != 1))
    fail(path + ".amplitude",
         "expected an array with one entry per operator channel (" +
             std::to_string(channels) + ") or a single broadcast entry");
  for (std::size_t c = 0; c < amp.size(); ++c)
    term.amplitude.push_back(
        as_complex(amp[c], path + ".amplitude[" + std::to_string(c) + "]"));
  if (amp.size() == 1)
    term.amplitude.assign(std::size_t(channels), term.amplitude.front());
  return term;
}

FieldExpression parse_expression(const json& j, int channels, int dim,
                                 const std::string& path) {
  check_keys(j, {"terms"}, path);
  FieldExpression expr;
  if (auto it = j.find("terms"); it != j.end()) {
    if (!it->is_array()) fail(path + ".terms", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      expr.terms.push_back(parse_spatial(
          (*it)[i], channels, dim, path + ".terms[" + std::to_string(i) + "]"));
  }
  return expr;
}

TimeEnvelope parse_envelope(const json& j, const std::string& path) {
  TimeEnvelope env;
  check_keys(j, {"kind", "rate"}, path);
  std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "one") {
    env.kind = TimeEnvelope::Kind::One;
    if (j.contains("rate")) fail(path + ".rate", "kind 'one' takes no rate");
    return env;
  }
  if (kind == "cosine") env.kind = TimeEnvelope::Kind::Cosine;
  else if (kind == "sine") env.kind = TimeEnvelope::Kind::Sine;
  else if (kind == "exponential") env.kind = TimeEnvelope::Kind::Exponential;
  else fail(path + ".kind", "expected one | cosine | sine | exponential");
  env.rate = as_number(require(j, "rate", path), path + ".rate");
  return env;
}

ForcingExpression parse_forcing(const json& j, int channels, int dim,
                                const std::string& path) {
  check_keys(j, {"terms"}, path);
  ForcingExpression expr;
  if (auto it = j.find("terms"); it != j.end()) {
    if (!it->is_array()) fail(path + ".terms", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& t = (*it)[i];
      const std::string tpath = path + ".terms[" + std::to_string(i) + "]";
      check_keys(t, {"spatial", "envelope"}, tpath);
      ForcingTerm term;
      term.spatial = parse_spatial(require(t, "spatial", tpath), channels, dim,
                                   tpath + ".spatial");
      if (auto e = t.find("envelope"); e != t.end())
        term.envelope = parse_envelope(*e, tpath + ".envelope");
      expr.terms.push_back(std::move(term));
    }
  }
  return expr;
}

std::vector<double> sample_coefficient(const json& j, int points,
                                       const std::string& path) {
  check_keys(j, {"affine", "samples"}, path);
  if (j.contains("affine") == j.contains("samples"))
    fail(path, "expected exactly one of 'affine' or 'samples'");
  std::vector<double> out(std::size_t(points) + 1);
  if (auto it = j.find("affine"); it != j.end()) {
    if (!it->is_array() || it->size() != 2)
      fail(path + ".affine", "expected [c0, c1] (value c0 + c1 y on [0,1])");
    double c0 = as_number((*it)[0], path + ".affine");
    double c1 = as_number((*it)[1], path + ".affine");
    for (int i = 0; i <= points; ++i)
      out[std::size_t(i)] = c0 + c1 * double(i) / double(points);
  } else {
    const json& s = j.at("samples");
    if (!s.is_array() || int(s.size()) != points + 1)
      fail(path + ".samples", "expected " + std::to_string(points + 1) +
                                  " node samples");
    for (std::size_t i = 0; i < s.size(); ++i)
      out[i] = as_number(s[i], path + ".samples[" + std::to_string(i) + "]");
  }
  return out;
}

std::shared_ptr<const OperatorFamily> parse_operator(const json& j,
                                                     const std::string& path) {
  std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "scalar") {
    check_keys(j, {"kind", "value"}, path);
    cplx v = as_complex(require(j, "value", path), path + ".value");
    return std::make_shared<OperatorFamily>(OperatorFamily::scalar(v));
  }
  if (kind == "diagonal") {
    check_keys(j, {"kind", "values"}, path);
    const json& vals = require(j, "values", path);
    if (!vals.is_array() || vals.empty())
      fail(path + ".values", "expected a nonempty array");
    Eigen::VectorXcd d(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
      d[Eigen::Index(i)] =
          as_complex(vals[i], path + ".values[" + std::to_string(i) + "]");
    return std::make_shared<OperatorFamily>(OperatorFamily::diagonal(d));
  }
  if (kind == "matrix") {
    check_keys(j, {"kind", "rows", "condition_cap"}, path);
    const json& rows = require(j, "rows", path);
    if (!rows.is_array() || rows.empty())
      fail(path + ".rows", "expected a nonempty array of rows");
    const std::size_t n = rows.size();
    Eigen::MatrixXcd a(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      if (!rows[r].is_array() || rows[r].size() != n)
        fail(path + ".rows[" + std::to_string(r) + "]",
             "expected a row of length " + std::to_string(n));
      for (std::size_t c = 0; c < n; ++c)
        a(Eigen::Index(r), Eigen::Index(c)) =
            as_complex(rows[r][c], path + ".rows[" + std::to_string(r) + "][" +
                                       std::to_string(c) + "]");
    }
    double cap = 1e8;
    if (auto it = j.find("condition_cap"); it != j.end())
      cap = as_number(*it, path + ".condition_cap");
    return std::make_shared<OperatorFamily>(OperatorFamily::matrix(a, cap));
  }
  if (kind == "section4") {
    // Hadamard-style family a_mj = g_m * 2^(s j), j = 1..n: rank one, with
    // eigenvalues {0 (n-1 fold), sum_m g_m 2^(s m)}.
    check_keys(j, {"kind", "size", "g", "s"}, path);
    int n = as_int(require(j, "size", path), path + ".size");
    if (n < 1) fail(path + ".size", "size must be >= 1");
    const json& g = require(j, "g", path);
    if (!g.is_array() || int(g.size()) != n)
      fail(path + ".g", "expected " + std::to_string(n) + " entries");
    double s = as_number(require(j, "s", path), path + ".s");
    Eigen::MatrixXcd a(n, n);
    for (int m = 0; m < n; ++m) {
      cplx gm = as_complex(g[std::size_t(m)], path + ".g[" + std::to_string(m) + "]");
      for (int col = 0; col < n; ++col)
        a(m, col) = gm * std::exp2(s * double(col + 1));
    }
    return std::make_shared<OperatorFamily>(OperatorFamily::matrix(a));
  }
  if (kind == "wentzell") {
    check_keys(j, {"kind", "points", "a", "b", "condition_cap"}, path);
    int points = as_int(require(j, "points", path), path + ".points");
    if (points < 4) fail(path + ".points", "points must be >= 4");
    auto a = sample_coefficient(require(j, "a", path), points, path + ".a");
    auto b = sample_coefficient(require(j, "b", path), points, path + ".b");
    double cap = 1e8;
    if (auto it = j.find("condition_cap"); it != j.end())
      cap = as_number(*it, path + ".condition_cap");
    return std::make_shared<OperatorFamily>(build_wentzell(a, b, cap));
  }
  fail(path + ".kind", "expected scalar | diagonal | matrix | section4 | wentzell");
}

}  // namespace

NonlocalProblem Scenario::build_problem() const {
  NonlocalProblem prob;
  prob.grid = std::make_shared<Grid>(grid_dim, grid_points, grid_length);
  prob.family = family;
  prob.alpha = alpha;
  prob.beta = beta;
  prob.time_steps = time_steps;
  prob.horizon = horizon;
  prob.gamma = norms.gamma;
  prob.nonlinearity = nonlinearity;
  prob.exec = exec;
  prob.det_margin_fraction = det_margin_fraction;
  prob.check_box_fit = check_box_fit;
  prob.dealias = dealias;
  const int channels = family->dim();
  prob.phi = evaluate_expression(phi, prob.grid, channels, Space::Frequency);
  prob.psi = evaluate_expression(psi, prob.grid, channels, Space::Frequency);
  if (!forcing.empty())
    prob.forcing = sample_forcing(forcing, prob.grid, channels, prob.grid_times());
  prob.validate();
  return prob;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario: " + path + ": " + e.what());
  }

  check_keys(j,
             {"name", "grid", "operator", "time", "measures", "data", "forcing",
              "nonlinearity", "norms", "solver", "oracle", "tolerances", "seed",
              "extend"},
             "scenario");

  Scenario sc;
  sc.name = as_string(require(j, "name", "scenario"), "scenario.name");

  {
    const json& g = require(j, "grid", "scenario");
    check_keys(g, {"dim", "points", "length"}, "scenario.grid");
    sc.grid_dim = as_int(require(g, "dim", "scenario.grid"), "scenario.grid.dim");
    sc.grid_points =
        as_int(require(g, "points", "scenario.grid"), "scenario.grid.points");
    sc.grid_length =
        as_number(require(g, "length", "scenario.grid"), "scenario.grid.length");
    if (sc.grid_dim < 1 || sc.grid_dim > 3)
      fail("scenario.grid.dim", "dim must be 1, 2, or 3");
    if (sc.grid_points < 2)
      fail("scenario.grid.points", "points must be >= 2");
    if (!(sc.grid_length > 0.0))
      fail("scenario.grid.length", "length must be positive");
  }

  sc.family = parse_operator(require(j, "operator", "scenario"), "scenario.operator");

  {
    const json& t = require(j, "time", "scenario");
    check_keys(t, {"steps", "horizon"}, "scenario.time");
    int steps = as_int(require(t, "steps", "scenario.time"), "scenario.time.steps");
    if (steps < 8) fail("scenario.time.steps", "steps must be >= 8");
    sc.time_steps = std::size_t(steps);
    sc.horizon =
        as_number(require(t, "horizon", "scenario.time"), "scenario.time.horizon");
    if (!(sc.horizon > 0.0) || !std::isfinite(sc.horizon))
      fail("scenario.time.horizon", "horizon must be positive and finite");
  }

  sc.alpha = TimeMeasure::zero(sc.horizon);
  sc.beta = TimeMeasure::zero(sc.horizon);
  if (auto it = j.find("measures"); it != j.end()) {
    check_keys(*it, {"alpha", "beta"}, "scenario.measures");
    if (auto a = it->find("alpha"); a != it->end())
      sc.alpha = parse_measure(*a, sc.horizon, "scenario.measures.alpha");
    if (auto b = it->find("beta"); b != it->end())
      sc.beta = parse_measure(*b, sc.horizon, "scenario.measures.beta");
  }

  const int channels = sc.family->dim();
  {
    const json& d = require(j, "data", "scenario");
    check_keys(d, {"phi", "psi"}, "scenario.data");
    if (auto p = d.find("phi"); p != d.end())
      sc.phi = parse_expression(*p, channels, sc.grid_dim, "scenario.data.phi");
    if (auto p = d.find("psi"); p != d.end())
      sc.psi = parse_expression(*p, channels, sc.grid_dim, "scenario.data.psi");
  }

  if (auto it = j.find("forcing"); it != j.end())
    sc.forcing = parse_forcing(*it, channels, sc.grid_dim, "scenario.forcing");

  if (auto it = j.find("nonlinearity"); it != j.end()) {
    const std::string npath = "scenario.nonlinearity";
    check_keys(*it, {"kind", "lambda", "p"}, npath);
    std::string kind = as_string(require(*it, "kind", npath), npath + ".kind");
    if (kind == "power_law") {
      double lambda =
          as_number(require(*it, "lambda", npath), npath + ".lambda");
      double p = as_number(require(*it, "p", npath), npath + ".p");
      if (!(p > 1.0)) fail(npath + ".p", "exponent must exceed 1");
      sc.nonlinearity = Nonlinearity::power_law(lambda, p);
    } else if (kind == "none") {
      if (it->size() != 1) fail(npath, "kind 'none' takes no parameters");
      sc.nonlinearity = Nonlinearity::none();
    } else {
      fail(npath + ".kind", "expected none | power_law");
    }
  }

  if (auto it = j.find("norms"); it != j.end()) {
    check_keys(*it, {"s", "p", "q", "sigma", "gamma"}, "scenario.norms");
    if (auto v = it->find("s"); v != it->end())
      sc.norms.s = as_number(*v, "scenario.norms.s");
    if (auto v = it->find("p"); v != it->end())
      sc.norms.p = as_number(*v, "scenario.norms.p");
    if (auto v = it->find("q"); v != it->end())
      sc.norms.q = as_number(*v, "scenario.norms.q");
    if (auto v = it->find("sigma"); v != it->end())
      sc.norms.sigma = as_number(*v, "scenario.norms.sigma");
    if (auto v = it->find("gamma"); v != it->end()) {
      sc.norms.gamma = as_number(*v, "scenario.norms.gamma");
      if (sc.norms.gamma < 0.0 || sc.norms.gamma >= 0.5)
        fail("scenario.norms.gamma", "gamma must lie in [0, 1/2)");
    }
  }

  if (auto it = j.find("solver"); it != j.end()) {
    const std::string spath = "scenario.solver";
    check_keys(*it,
               {"dealias", "det_margin_fraction", "check_box_fit", "exec",
                "allow_unproven_window", "picard"},
               spath);
    if (auto v = it->find("dealias"); v != it->end())
      sc.dealias = as_bool(*v, spath + ".dealias");
    if (auto v = it->find("det_margin_fraction"); v != it->end()) {
      sc.det_margin_fraction = as_number(*v, spath + ".det_margin_fraction");
      if (sc.det_margin_fraction < 0.0)
        fail(spath + ".det_margin_fraction", "fraction must be >= 0");
    }
    if (auto v = it->find("check_box_fit"); v != it->end())
      sc.check_box_fit = as_bool(*v, spath + ".check_box_fit");
    if (auto v = it->find("exec"); v != it->end()) {
      std::string e = as_string(*v, spath + ".exec");
      if (e == "serial") sc.exec = Exec::Serial;
      else if (e == "parallel") sc.exec = Exec::Parallel;
      else fail(spath + ".exec", "expected serial | parallel");
    }
    if (auto v = it->find("allow_unproven_window"); v != it->end())
      sc.picard.allow_unproven_window =
          as_bool(*v, spath + ".allow_unproven_window");
    if (auto v = it->find("picard"); v != it->end()) {
      const std::string ppath = spath + ".picard";
      check_keys(*v,
                 {"atol", "rtol", "max_iterations", "blowup_ceiling", "c0", "c1"},
                 ppath);
      if (auto w = v->find("atol"); w != v->end())
        sc.picard.atol = as_number(*w, ppath + ".atol");
      if (auto w = v->find("rtol"); w != v->end())
        sc.picard.rtol = as_number(*w, ppath + ".rtol");
      if (auto w = v->find("max_iterations"); w != v->end())
        sc.picard.max_iterations = as_int(*w, ppath + ".max_iterations");
      if (auto w = v->find("blowup_ceiling"); w != v->end())
        sc.picard.blowup_ceiling = as_number(*w, ppath + ".blowup_ceiling");
      if (auto w = v->find("c0"); w != v->end())
        sc.picard.c0 = as_number(*w, ppath + ".c0");
      if (auto w = v->find("c1"); w != v->end())
        sc.picard.c1 = as_number(*w, ppath + ".c1");
    }
  }
  sc.picard.norm_s = sc.norms.s;
  sc.picard.norm_p = sc.norms.p;
  sc.picard.norm_q = sc.norms.q;

  if (auto it = j.find("oracle"); it != j.end()) {
    check_keys(*it, {"fine_factor", "max_modes"}, "scenario.oracle");
    if (auto v = it->find("fine_factor"); v != it->end()) {
      sc.oracle_fine = as_int(*v, "scenario.oracle.fine_factor");
      if (sc.oracle_fine < 4)
        fail("scenario.oracle.fine_factor", "fine factor must be >= 4");
    }
    if (auto v = it->find("max_modes"); v != it->end()) {
      int m = as_int(*v, "scenario.oracle.max_modes");
      if (m < 1) fail("scenario.oracle.max_modes", "max_modes must be >= 1");
      sc.oracle_max_modes = std::size_t(m);
    }
  }

  if (auto it = j.find("tolerances"); it != j.end()) {
    check_keys(*it, {"oracle_rel", "pde_residual", "condition_residual"},
               "scenario.tolerances");
    if (auto v = it->find("oracle_rel"); v != it->end())
      sc.tolerances.oracle_rel = as_number(*v, "scenario.tolerances.oracle_rel");
    if (auto v = it->find("pde_residual"); v != it->end())
      sc.tolerances.pde_residual =
          as_number(*v, "scenario.tolerances.pde_residual");
    if (auto v = it->find("condition_residual"); v != it->end())
      sc.tolerances.condition_residual =
          as_number(*v, "scenario.tolerances.condition_residual");
  }

  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) fail("scenario.seed", "expected a nonnegative integer");
    sc.seed = it->get<std::uint64_t>();
  }

  if (auto it = j.find("extend"); it != j.end()) {
    check_keys(*it, {"extra_horizon"}, "scenario.extend");
    sc.extend_extra = as_number(require(*it, "extra_horizon", "scenario.extend"),
                                "scenario.extend.extra_horizon");
    if (sc.extend_extra < 0.0)
      fail("scenario.extend.extra_horizon", "extra horizon must be >= 0");
  }

  return sc;
}

}  // namespace nlwave
