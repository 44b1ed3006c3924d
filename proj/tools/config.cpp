#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "swos/relu_blocks.hpp"

namespace swos::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

} // namespace

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError({"line " + std::to_string(lineno) +
                         ": expected 'key = value', got '" + line + "'"});
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError({"line " + std::to_string(lineno) + ": empty key"});
    cfg.kv_[key] = value;
  }
  return cfg;
}

std::string KvConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
  return out;
}

std::string KvConfig::get_str(const std::string& key,
                              const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double KvConfig::get_num(const std::string& key, double dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw ConfigError({key + ": not a number: '" + it->second + "'"});
  }
}

long KvConfig::get_int(const std::string& key, long dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    std::size_t pos = 0;
    long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw ConfigError({key + ": not an integer: '" + it->second + "'"});
  }
}

bool KvConfig::get_bool(const std::string& key, bool dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError({key + ": not a boolean: '" + it->second + "'"});
}

std::vector<double> KvConfig::get_vec(const std::string& key) const {
  std::vector<double> out;
  auto it = kv_.find(key);
  if (it == kv_.end()) return out;
  for (const std::string& tok : split(it->second, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::uint64_t KvConfig::hash() const {
  std::string s = serialize();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

ConfigError::ConfigError(const std::vector<std::string>& violations)
    : std::runtime_error("configuration invalid:\n  " + [&] {
        std::string s;
        for (std::size_t i = 0; i < violations.size(); ++i) {
          if (i) s += "\n  ";
          s += violations[i];
        }
        return s;
      }()),
      violations_(violations) {}

namespace {

FnSpec parse_fn_spec(const std::string& raw, int d,
                     std::vector<std::string>& errors, const std::string& tag) {
  FnSpec spec;
  spec.raw = raw;
  std::size_t colon = raw.find(':');
  std::string kind = colon == std::string::npos ? raw : raw.substr(0, colon);
  std::string body = colon == std::string::npos ? "" : raw.substr(colon + 1);
  if (kind == "constant" || kind == "zero") {
    double c = kind == "zero" ? 0.0 : std::stod(body);
    spec.fn = [c](const Vec&) { return c; };
    spec.lipschitz = 0.0;
    spec.sup_bound = std::fabs(c);
  } else if (kind == "affine") {
    std::vector<double> coef;
    for (const std::string& tok : split(body, ','))
      coef.push_back(std::stod(tok));
    if (int(coef.size()) != d + 1) {
      errors.push_back(tag + ": affine spec needs d+1 coefficients");
      return spec;
    }
    double b = coef.back();
    coef.pop_back();
    spec.fn = [coef, b](const Vec& x) {
      double s = b;
      for (std::size_t i = 0; i < coef.size(); ++i) s += coef[i] * x[i];
      return s;
    };
    spec.lipschitz = norm2(coef);
    spec.sup_bound = std::fabs(b) + norm2(coef) * 100.0;
  } else if (kind == "radial_pwl") {
    std::vector<double> rs, vs;
    for (const std::string& pair : split(body, ',')) {
      std::vector<std::string> parts = split(pair, ':');
      if (parts.size() != 2) {
        errors.push_back(tag + ": radial_pwl entries must be r:v pairs");
        return spec;
      }
      rs.push_back(std::stod(parts[0]));
      vs.push_back(std::stod(parts[1]));
    }
    if (rs.size() < 2) {
      errors.push_back(tag + ": radial_pwl needs at least two knots");
      return spec;
    }
    spec.fn = [rs, vs](const Vec& x) {
      double r = norm2(x);
      if (r <= rs.front()) return vs.front();
      if (r >= rs.back()) return vs.back();
      std::size_t j = 0;
      while (r > rs[j + 1]) ++j;
      double t = (r - rs[j]) / (rs[j + 1] - rs[j]);
      return vs[j] + t * (vs[j + 1] - vs[j]);
    };
    double lip = 0.0, sup = 0.0;
    for (std::size_t j = 0; j + 1 < rs.size(); ++j)
      lip = std::max(lip, std::fabs((vs[j + 1] - vs[j]) / (rs[j + 1] - rs[j])));
    for (double v : vs) sup = std::max(sup, std::fabs(v));
    spec.lipschitz = lip;
    spec.sup_bound = sup;
  } else if (kind == "net") {
    std::ifstream in(body);
    if (!in) {
      errors.push_back(tag + ": cannot open network file '" + body + "'");
      return spec;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    ReluNet net = net_from_json(buf.str());
    if (net.dims().input() != d || net.dims().output() != 1) {
      errors.push_back(tag + ": network must map R^" + std::to_string(d) +
                       " -> R");
      return spec;
    }
    auto shared = std::make_shared<ReluNet>(std::move(net));
    spec.fn = [shared](const Vec& x) { return shared->realize1(x); };
    spec.net = *shared;
    spec.lipschitz = shared->cert.valid ? shared->cert.lipschitz : 1.0;
    spec.sup_bound = 1e6;
  } else {
    errors.push_back(tag + ": unknown spec kind '" + kind + "'");
  }
  return spec;
}

} // namespace

RunConfig RunConfig::load(const KvConfig& kv, bool solver_range) {
  std::vector<std::string> errors;
  double alpha = kv.get_num("problem.alpha", 1.5);
  std::string dom_kind = kv.get_str("problem.domain", "ball");

  Vec center = kv.get_vec("problem.center");
  if (center.empty()) center = {0.0, 0.0};
  int d = int(center.size());
  Domain dom = Domain::ball({0.0, 0.0}, 1.0);
  if (dom_kind == "ball") {
    double radius = kv.get_num("problem.radius", 1.0);
    if (!(radius > 0.0)) errors.push_back("problem.radius: must be positive");
    else dom = Domain::ball(center, radius);
  } else if (dom_kind == "rect") {
    Vec lo = kv.get_vec("problem.lo");
    Vec hi = kv.get_vec("problem.hi");
    if (lo.empty() || lo.size() != hi.size()) {
      errors.push_back("problem.lo/problem.hi: must be equal-length vectors");
    } else {
      d = int(lo.size());
      bool ok = true;
      for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(hi[i] > lo[i])) ok = false;
      if (!ok)
        errors.push_back("problem.lo/problem.hi: hi must exceed lo");
      else
        dom = Domain::hyperrectangle(lo, hi);
    }
  } else {
    errors.push_back("problem.domain: expected ball or rect, got '" + dom_kind +
                     "'");
  }

  if (!(alpha > 0.0 && alpha < 2.0))
    errors.push_back("problem.alpha: must lie in (0,2)");
  if (solver_range && !(alpha > 1.0 && alpha < 2.0))
    errors.push_back("problem.alpha: solve/compile require alpha in (1,2)");
  if (solver_range && d < 2)
    errors.push_back("problem.domain: solve/compile require d >= 2");

  RunConfig rc;
  if (alpha > 0.0 && alpha < 2.0 && d >= 1) rc.params = StableParams(alpha, d);
  rc.domain = dom;

  rc.exps.p = kv.get_num("exponents.p", 1.1);
  rc.exps.s = kv.get_num("exponents.s", 1.2);
  rc.exps.q = kv.get_num("exponents.q", 1.3);
  if (solver_range) {
    try {
      rc.exps.validate(alpha);
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  rc.g = parse_fn_spec(kv.get_str("problem.g", "constant:0"), d, errors,
                       "problem.g");
  rc.f = parse_fn_spec(kv.get_str("problem.f", "constant:0"), d, errors,
                       "problem.f");

  rc.M = kv.get_int("mc.M", 10000);
  rc.M2 = kv.get_int("mc.M2", 8);
  rc.seed = std::uint64_t(kv.get_int("mc.seed", 1));
  rc.max_steps = kv.get_int("mc.max_steps", 100000);
  if (rc.M < 1) errors.push_back("mc.M: must be >= 1");
  if (rc.M2 < 1) errors.push_back("mc.M2: must be >= 1");
  if (rc.max_steps < 1) errors.push_back("mc.max_steps: must be >= 1");
  std::string est = kv.get_str("mc.estimator", "mean");
  if (est == "mean")
    rc.estimator = EstimatorKind::mean;
  else if (est == "mom" || est == "median_of_means")
    rc.estimator = EstimatorKind::median_of_means;
  else
    errors.push_back("mc.estimator: expected mean or mom");

  rc.budget.epsilon = kv.get_num("compile.epsilon", 0.1);
  rc.budget.M = kv.get_int("compile.M", rc.M);
  rc.budget.M2 = kv.get_int("compile.M2", rc.M2);
  rc.budget.delta_g = kv.get_num("compile.delta_g", 0.01);
  rc.budget.delta_dist = kv.get_num("compile.delta_dist", 0.01);
  rc.budget.delta_alpha = kv.get_num("compile.delta_alpha", 0.01);
  rc.budget.delta_f = kv.get_num("compile.delta_f", 0.01);
  rc.budget.delta_upsilon = kv.get_num("compile.delta_upsilon", 0.01);
  std::string mode = kv.get_str("compile.mode", "practical");
  if (mode == "practical")
    rc.mode = BudgetMode::practical;
  else if (mode == "theoretical")
    rc.mode = BudgetMode::theoretical;
  else
    errors.push_back("compile.mode: expected practical or theoretical");
  rc.budget.mode = rc.mode;
  rc.x_independent = kv.get_bool("compile.x_independent", true);
  try {
    rc.budget.validate();
  } catch (const std::exception& e) {
    errors.push_back(std::string("compile budget: ") + e.what());
  }

  // evaluation points: "x1,x2; x1,x2; ..."
  std::string pts = kv.get_str("eval.points", "");
  if (!pts.empty()) {
    for (const std::string& tok : split(pts, ';')) {
      if (tok.empty()) continue;
      Vec x;
      for (const std::string& c : split(tok, ',')) x.push_back(std::stod(c));
      if (int(x.size()) != d)
        errors.push_back("eval.points: point dimension mismatch");
      else
        rc.eval_points.push_back(std::move(x));
    }
  }
  rc.n_eval = kv.get_int("eval.n_eval", 2048);
  rc.out_dir = kv.get_str("output.dir", ".");
  rc.format = kv.get_str("output.format", "json");
  if (rc.format != "json" && rc.format != "csv")
    errors.push_back("output.format: expected json or csv");

  if (!errors.empty()) throw ConfigError(errors);
  rc.config_hash = kv.hash();
  return rc;
}

ReluNet spec_to_net(const FnSpec& spec, int d, double reach, double delta) {
  if (spec.net) return *spec.net;
  std::size_t colon = spec.raw.find(':');
  std::string kind =
      colon == std::string::npos ? spec.raw : spec.raw.substr(0, colon);
  std::string body = colon == std::string::npos ? "" : spec.raw.substr(colon + 1);
  if (kind == "constant" || kind == "zero") {
    double c = kind == "zero" ? 0.0 : std::stod(body);
    return const_net(d, c);
  }
  if (kind == "affine") {
    std::vector<double> coef;
    {
      std::stringstream ss(body);
      std::string tok;
      while (std::getline(ss, tok, ',')) coef.push_back(std::stod(tok));
    }
    double b = coef.back();
    coef.pop_back();
    ReluNet net;
    Layer h;
    h.W = Matrix(2, d);
    h.B.assign(2, 0.0);
    for (int i = 0; i < d; ++i) {
      h.W(0, i) = coef[std::size_t(i)];
      h.W(1, i) = -coef[std::size_t(i)];
    }
    Layer o;
    o.W = Matrix(1, 2);
    o.W(0, 0) = 1.0;
    o.W(0, 1) = -1.0;
    o.B.assign(1, b);
    net.layers = {h, o};
    return net;
  }
  if (kind == "radial_pwl") {
    std::vector<double> rs, vs;
    std::stringstream ss(body);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      std::size_t c2 = pair.find(':');
      rs.push_back(std::stod(pair.substr(0, c2)));
      vs.push_back(std::stod(pair.substr(c2 + 1)));
    }
    // clamp outside the table, matching the function form: flat below the
    // first knot and beyond the last (heavy-tailed exits reach far past any
    // certified norm range, so a sloped extension would fabricate values)
    if (rs.front() > 0.0) {
      rs.insert(rs.begin(), 0.0);
      vs.insert(vs.begin(), vs.front());
    }
    rs.push_back(std::max(16.0 * reach, rs.back() * 4.0));
    vs.push_back(vs.back());
    // |y| through a norm block, then the radial profile
    ReluNet nrm =
        affine_output(dist_net(Domain::ball(Vec(std::size_t(d), 0.0), reach),
                               delta),
                      -1.0, reach);
    return compose(pwl_net(rs, vs), nrm);
  }
  throw std::invalid_argument("spec_to_net: no network form for '" + spec.raw +
                              "'");
}

std::string version_string() { return "swos 0.1.0"; }

} // namespace swos::cli
