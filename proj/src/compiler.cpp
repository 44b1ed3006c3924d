#include "swos/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "swos/relu_blocks.hpp"

namespace swos {

// ---------------------------------------------------------------------------
// NetExpr
// ---------------------------------------------------------------------------

struct NetExprAccess {
  static NetExpr* make() { return new NetExpr(); }
};

namespace {

ExprPtr wrap(NetExpr* e) { return ExprPtr(e); }

struct EvalKey {
  const NetExpr* node;
  Vec x;
  bool operator==(const EvalKey& o) const { return node == o.node && x == o.x; }
};

struct EvalKeyHash {
  std::size_t operator()(const EvalKey& k) const {
    std::size_t h = std::hash<const void*>()(k.node);
    for (double v : k.x) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      h ^= std::hash<std::uint64_t>()(bits) + 0x9e3779b97f4a7c15ull + (h << 6) +
           (h >> 2);
    }
    return h;
  }
};

using Memo = std::unordered_map<EvalKey, Vec, EvalKeyHash>;

} // namespace

ExprPtr NetExpr::leaf(ReluNet net) {
  net.validate();
  return leaf(std::make_shared<const ReluNet>(std::move(net)));
}

ExprPtr NetExpr::leaf(std::shared_ptr<const ReluNet> net) {
  NetExpr* e = NetExprAccess::make();
  e->kind_ = Kind::leaf;
  e->dims_ = net->dims();
  e->net_ = std::move(net);
  return wrap(e);
}

ExprPtr NetExpr::compose(ExprPtr f, ExprPtr g) {
  if (f->dims().input() != g->dims().output())
    throw std::invalid_argument("NetExpr::compose: dimension mismatch");
  NetExpr* e = NetExprAccess::make();
  e->kind_ = Kind::compose;
  e->dims_ = dims_compose(f->dims(), g->dims());
  e->kids_ = {std::move(f), std::move(g)};
  return wrap(e);
}

ExprPtr NetExpr::sum(std::vector<ExprPtr> parts, std::vector<double> coeffs) {
  if (parts.empty() || parts.size() != coeffs.size())
    throw std::invalid_argument("NetExpr::sum: parts/coeffs mismatch");
  const NetDims& d0 = parts.front()->dims();
  NetDims acc = d0;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const NetDims& di = parts[i]->dims();
    if (di.entries() != d0.entries() || di.input() != d0.input() ||
        di.output() != d0.output())
      throw std::invalid_argument("NetExpr::sum: incompatible operand dims");
    acc = dims_sum(acc, di);
  }
  NetExpr* e = NetExprAccess::make();
  e->kind_ = Kind::sum;
  e->dims_ = std::move(acc);
  e->kids_ = std::move(parts);
  e->coeffs_ = std::move(coeffs);
  return wrap(e);
}

ExprPtr NetExpr::parallel(ExprPtr f, ExprPtr g) {
  if (f->dims().entries() != g->dims().entries() ||
      f->dims().input() != g->dims().input())
    throw std::invalid_argument("NetExpr::parallel: incompatible operands");
  NetExpr* e = NetExprAccess::make();
  e->kind_ = Kind::parallel;
  e->dims_ = dims_parallel(f->dims(), g->dims());
  e->kids_ = {std::move(f), std::move(g)};
  return wrap(e);
}

ExprPtr NetExpr::matmul(Matrix A, ExprPtr f) {
  if (A.cols != f->dims().output())
    throw std::invalid_argument("NetExpr::matmul: shape mismatch");
  NetExpr* e = NetExprAccess::make();
  e->kind_ = Kind::matmul;
  e->dims_ = f->dims();
  e->dims_.k.back() = A.rows;
  e->A_ = std::move(A);
  e->kids_ = {std::move(f)};
  return wrap(e);
}

ExprPtr NetExpr::pad(ExprPtr f, int target_hidden) {
  int H = f->hidden();
  if (target_hidden == H) return f;
  if (target_hidden < H)
    throw std::invalid_argument("NetExpr::pad: cannot shrink depth");
  NetExpr* e = NetExprAccess::make();
  e->kind_ = Kind::pad;
  long out = f->dims().output();
  if (target_hidden == H + 1) {
    NetDims nd = f->dims();
    nd.k.back() = 2 * out;
    nd.k.push_back(out);
    e->dims_ = std::move(nd);
  } else {
    e->dims_ = dims_compose(
        dims_scale(dims_n_chain(target_hidden - H + 1), out), f->dims());
  }
  e->pad_target_ = target_hidden;
  e->kids_ = {std::move(f)};
  return wrap(e);
}

Vec NetExpr::eval(const Vec& x) const {
  Memo memo;
  // iterative worklist is unnecessary: chains are bounded by total steps
  std::function<Vec(const NetExpr*, const Vec&)> rec =
      [&](const NetExpr* e, const Vec& in) -> Vec {
    EvalKey key{e, in};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Vec out;
    switch (e->kind_) {
      case Kind::leaf:
        out = e->net_->realize(in);
        break;
      case Kind::compose:
        out = rec(e->kids_[0].get(), rec(e->kids_[1].get(), in));
        break;
      case Kind::sum: {
        out.assign(std::size_t(e->dims_.output()), 0.0);
        for (std::size_t i = 0; i < e->kids_.size(); ++i) {
          Vec v = rec(e->kids_[i].get(), in);
          for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += e->coeffs_[i] * v[j];
        }
        break;
      }
      case Kind::parallel: {
        Vec a = rec(e->kids_[0].get(), in);
        Vec b = rec(e->kids_[1].get(), in);
        out = std::move(a);
        out.insert(out.end(), b.begin(), b.end());
        break;
      }
      case Kind::matmul:
        out = e->A_.apply(rec(e->kids_[0].get(), in));
        break;
      case Kind::pad:
        out = rec(e->kids_[0].get(), in);
        break;
    }
    memo.emplace(EvalKey{e, in}, out);
    return out;
  };
  return rec(this, x);
}

ReluNet NetExpr::materialize() const {
  std::unordered_map<const NetExpr*, ReluNet> done;
  std::function<const ReluNet&(const NetExpr*)> rec =
      [&](const NetExpr* e) -> const ReluNet& {
    auto it = done.find(e);
    if (it != done.end()) return it->second;
    ReluNet out;
    switch (e->kind_) {
      case Kind::leaf:
        out = *e->net_;
        break;
      case Kind::compose:
        out = swos::compose(rec(e->kids_[0].get()), rec(e->kids_[1].get()));
        break;
      case Kind::sum: {
        std::vector<ReluNet> parts;
        parts.reserve(e->kids_.size());
        for (const auto& k : e->kids_) parts.push_back(rec(k.get()));
        out = sum_nets(parts, e->coeffs_);
        break;
      }
      case Kind::parallel:
        out = swos::parallelize(rec(e->kids_[0].get()), rec(e->kids_[1].get()));
        break;
      case Kind::matmul:
        out = left_matmul(e->A_, rec(e->kids_[0].get()));
        break;
      case Kind::pad:
        out = depth_pad(rec(e->kids_[0].get()), e->pad_target_);
        break;
    }
    auto [pos, ok] = done.emplace(e, std::move(out));
    (void)ok;
    return pos->second;
  };
  ReluNet result = rec(this);
  if (!(result.dims() == dims_))
    throw std::logic_error("NetExpr::materialize: dims bookkeeping mismatch");
  return result;
}

// --- serialization with a shared node table --------------------------------

namespace {

using nlohmann::json;

json net_to_jobj(const ReluNet& net) { return json::parse(to_json(net)); }
ReluNet net_from_jobj(const json& j) { return net_from_json(j.dump()); }

} // namespace

std::string NetExpr::to_json() const {
  json nodes = json::array();
  std::unordered_map<const NetExpr*, int> ids;
  std::function<int(const NetExpr*)> rec = [&](const NetExpr* e) -> int {
    auto it = ids.find(e);
    if (it != ids.end()) return it->second;
    json n;
    switch (e->kind_) {
      case Kind::leaf:
        n["op"] = "leaf";
        n["net"] = net_to_jobj(*e->net_);
        break;
      case Kind::compose:
        n["op"] = "compose";
        n["kids"] = {rec(e->kids_[0].get()), rec(e->kids_[1].get())};
        break;
      case Kind::sum: {
        n["op"] = "sum";
        std::vector<int> kid_ids;
        for (const auto& k : e->kids_) kid_ids.push_back(rec(k.get()));
        n["kids"] = kid_ids;
        n["coeffs"] = e->coeffs_;
        break;
      }
      case Kind::parallel:
        n["op"] = "parallel";
        n["kids"] = {rec(e->kids_[0].get()), rec(e->kids_[1].get())};
        break;
      case Kind::matmul:
        n["op"] = "matmul";
        n["kids"] = {rec(e->kids_[0].get())};
        n["rows"] = e->A_.rows;
        n["cols"] = e->A_.cols;
        n["A"] = e->A_.a;
        break;
      case Kind::pad:
        n["op"] = "pad";
        n["kids"] = {rec(e->kids_[0].get())};
        n["target"] = e->pad_target_;
        break;
    }
    int id = int(nodes.size());
    nodes.push_back(std::move(n));
    ids.emplace(e, id);
    return id;
  };
  int root = rec(this);
  json out;
  out["version"] = 2;
  out["nodes"] = std::move(nodes);
  out["root"] = root;
  return out.dump();
}

ExprPtr NetExpr::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("version").get<int>() != 2)
    throw std::invalid_argument("NetExpr::from_json: unsupported version");
  const json& nodes = j.at("nodes");
  std::vector<ExprPtr> built(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& n = nodes[i];
    const std::string op = n.at("op").get<std::string>();
    auto kid = [&](int slot) {
      int id = n.at("kids")[std::size_t(slot)].get<int>();
      if (id < 0 || std::size_t(id) >= i)
        throw std::invalid_argument("NetExpr::from_json: bad kid reference");
      return built[std::size_t(id)];
    };
    if (op == "leaf") {
      built[i] = NetExpr::leaf(net_from_jobj(n.at("net")));
    } else if (op == "compose") {
      built[i] = NetExpr::compose(kid(0), kid(1));
    } else if (op == "sum") {
      std::vector<ExprPtr> kids;
      for (std::size_t t = 0; t < n.at("kids").size(); ++t)
        kids.push_back(kid(int(t)));
      built[i] = NetExpr::sum(std::move(kids),
                              n.at("coeffs").get<std::vector<double>>());
    } else if (op == "parallel") {
      built[i] = NetExpr::parallel(kid(0), kid(1));
    } else if (op == "matmul") {
      Matrix A(n.at("rows").get<int>(), n.at("cols").get<int>());
      A.a = n.at("A").get<std::vector<double>>();
      built[i] = NetExpr::matmul(std::move(A), kid(0));
    } else if (op == "pad") {
      built[i] = NetExpr::pad(kid(0), n.at("target").get<int>());
    } else {
      throw std::invalid_argument("NetExpr::from_json: unknown op " + op);
    }
  }
  return built[std::size_t(j.at("root").get<int>())];
}

// ---------------------------------------------------------------------------
// freezing
// ---------------------------------------------------------------------------

FrozenSampleSet freeze_samples(const Domain& dom, bool x_independent,
                               const StableParams& params,
                               const OccupationLaw& law, long M1, long M2,
                               RngStream base, long max_steps,
                               std::optional<Vec> x_ref) {
  if (M1 < 1 || M2 < 1)
    throw std::invalid_argument("freeze_samples: M1, M2 must be >= 1");
  FrozenSampleSet set{params, 0, 0, 0, 0, true, {}};
  set.M1 = M1;
  set.M2 = M2;
  set.seed = base.seed();
  set.base_stream = base.stream_id();
  set.x_independent = x_independent;
  set.replicas.reserve(std::size_t(M1));
  Vec fixed_start;
  if (!x_independent) fixed_start = x_ref ? *x_ref : dom.reference_point();
  for (long i = 0; i < M1; ++i) {
    FrozenReplica rep;
    if (x_independent) {
      RngStream srng = substream(base, std::uint64_t(i), 0xFFFFFFFFu);
      rep.start = dom.sample_interior(srng);
    } else {
      rep.start = fixed_start;
    }
    RngStream jrng = substream(base, std::uint64_t(i), 0);
    WosPath path;
    try {
      path = run_wos(dom, rep.start, params, jrng, max_steps);
    } catch (const NonTerminationError& e) {
      throw NonTerminationError(
          "freeze_samples: replica " + std::to_string(i) + ": " + e.what(),
          e.partial());
    }
    rep.jumps.reserve(path.steps.size());
    for (const WosStep& st : path.steps) rep.jumps.push_back(st.jump);
    rep.mu.resize(path.steps.size());
    for (std::size_t n = 1; n <= path.steps.size(); ++n) {
      RngStream mrng = substream(base, std::uint64_t(i), std::uint32_t(n));
      auto& slot = rep.mu[n - 1];
      slot.reserve(std::size_t(M2));
      for (long j = 0; j < M2; ++j) slot.push_back(law.sample(mrng));
    }
    set.replicas.push_back(std::move(rep));
  }
  return set;
}

// ---------------------------------------------------------------------------
// budgets / constants
// ---------------------------------------------------------------------------

void ToleranceBudget::validate() const {
  auto in01 = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in01(epsilon)) throw std::domain_error("budget: epsilon outside (0,1)");
  if (!in01(delta_g) || !in01(delta_dist) || !in01(delta_alpha) || !in01(delta_f))
    throw std::domain_error("budget: deltas must lie in (0,1)");
  if (!(delta_upsilon > 0.0 && delta_upsilon < 0.5))
    throw std::domain_error("budget: delta_upsilon outside (0,1/2)");
  if (M < 1 || M2 < 1) throw std::domain_error("budget: M, M2 must be >= 1");
}

TheoryConstants TheoryConstants::compute(
    const Domain& dom, const StableParams& params, const SolverExponents& exps,
    const OccupationLaw& law, double L_g_, double growth_B_, double growth_p_,
    double L_f_, double f_sup_, double L_alpha_, RngStream p_tilde_rng,
    long p_tilde_paths) {
  exps.validate(params.alpha);
  TheoryConstants tc;
  tc.L_g = L_g_;
  tc.L_f = L_f_;
  tc.L_tilde_f = L_f_;
  tc.L_alpha = L_alpha_;
  tc.f_sup = f_sup_;
  tc.growth_B = growth_B_;
  tc.growth_p = growth_p_;
  tc.K1 = 1.0 + dom.sup_norm_point();
  tc.K2 = tc.K1 + 2.0 * dom.diameter();
  tc.p_tilde = estimate_p_tilde(dom, params, p_tilde_paths, p_tilde_rng);
  if (dom.kind() == Domain::Kind::ball) {
    double Ra = std::pow(dom.radius(), params.alpha);
    tc.sigma_mean = law.kappa() * Ra;
    // E_0[sigma^2] = 2 kappa^2 R^{2a} E_mu[(1-r^2)^{a/2}]
    QuadResult q = integrate_gk_endpoints(
        [&](double r) {
          return std::pow(1.0 - r * r, params.alpha / 2.0) * law.radial_pdf(r);
        },
        0.0, 1.0, 1e-10);
    tc.sigma_msq = 2.0 * law.kappa() * law.kappa() * Ra * Ra * q.value;
  } else {
    // empirical proxies from the reference point
    long n = 10000;
    Vec x0 = dom.reference_point();
    double m1 = 0.0, m2 = 0.0;
    for (long i = 0; i < n; ++i) {
      RngStream rng = substream(p_tilde_rng, std::uint64_t(i), 7);
      WosPath path = run_wos(dom, x0, params, rng);
      double s = 0.0;
      for (const WosStep& st : path.steps)
        s += std::pow(st.radius, params.alpha);
      s *= law.kappa();
      m1 += s;
      m2 += s * s;
    }
    tc.sigma_mean = m1 / double(n);
    tc.sigma_msq = m2 / double(n);
  }
  tc.finalize(params, dom, exps, 0);
  return tc;
}

void TheoryConstants::finalize(const StableParams& params, const Domain& dom,
                               const SolverExponents& exps, long M_for_C5) {
  double alpha = params.alpha;
  double d = double(params.d);
  double p = growth_p, s = exps.s, q = exps.q;
  double R = 2.0 * dom.diameter();
  double vol_q = std::pow(dom.volume(), 1.0 / q);
  double Kpq = moment_K(alpha, std::min(p * q, alpha * 0.999999));
  C = std::pow(K1 + R * std::pow(Kpq, 1.0 / (p * q)), p) + std::pow(K2, p);
  double gB = growth_B;
  double tailN = (2.0 - p_tilde) / (p_tilde * p_tilde);
  C1 = 2.0 * theta_qs *
       (vol_q * gB * std::pow(d, p) * C +
        std::pow(tailN, 1.0 / q) * (1.0 + std::pow(moment_K(alpha, q), 1.0 / q)));
  C2 = vol_q * gB * std::pow(d, p) * C;
  C3 = moment_K(alpha, 1.0) / p_tilde;
  C4 = 1.0 / p_tilde;
  if (M_for_C5 > 0) {
    double M = double(M_for_C5);
    double grow = std::pow(M, 1.0 / s) * C1 + M * (C2 + C3);
    C5 = std::max({C2,
                   3.0 * vol_q * gB * std::pow(d, p) *
                       std::pow(K1 + dom.diameter() * grow, p),
                   2.0 * vol_q * gB * std::pow(d, p) /
                       (std::pow(5.0, p) * std::pow(dom.volume(), p / q) *
                        std::pow(L_g, p))});
  }
  Ct1 = std::pow(2.0, 1.0 + 1.0 / q) * theta_qs *
        (vol_q * (1.0 + f_sup) * (sigma_mean + std::sqrt(sigma_msq)) +
         std::pow(1.0 + moment_K(alpha, q), 1.0 / q) * std::pow(tailN, 1.0 / q));
  Ct2 = std::pow(2.0, 1.0 / q) * vol_q * sigma_mean;
}

namespace {

// ceil((5C/eps)^(s/(s-1))); clamps to long range with a note when astronomic
long theoretical_M(double C, double eps, double s, double& log10_M,
                   std::vector<std::string>& notes, const char* tag) {
  double expnt = s / (s - 1.0);
  double lg = expnt * std::log10(5.0 * C / eps);
  log10_M = lg;
  if (lg > 18.0) {
    notes.push_back(std::string(tag) +
                    ": theoretical M overflows practical range, log10(M) = " +
                    std::to_string(lg));
    return 4'000'000'000'000'000'000L;
  }
  return long(std::ceil(std::pow(5.0 * C / eps, expnt)));
}

} // namespace

ToleranceBudget select_parameters(double epsilon, const TheoryConstants& consts,
                                  const SolverExponents& exps,
                                  const StableParams& params, const Domain& dom,
                                  BudgetMode mode,
                                  const ToleranceBudget* practical_in) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("select_parameters: epsilon outside (0,1)");
  exps.validate(params.alpha);
  double s = exps.s, q = exps.q;
  double eps_half = 0.5 * epsilon; // equal split across the two terms

  TheoryConstants tc = consts;

  // per-term selections, computed in both modes for the report
  std::vector<std::string> notes;
  notes.push_back("p_tilde is an empirical lower-bound proxy, value " +
                  std::to_string(tc.p_tilde));
  if (tc.theta_qs == 2.0)
    notes.push_back(
        "theta_qs left at the placeholder default 2.0 (exact only for q <= s; "
        "supply a constant for q > s)");
  double lgM1 = 0.0, lgM2 = 0.0;
  long M_g = theoretical_M(tc.C1, eps_half, s, lgM1, notes, "homogeneous");
  long M_f = theoretical_M(tc.Ct1, eps_half, s, lgM2, notes, "source");
  long M_theory = std::max(M_g, M_f);

  // C5 needs the homogeneous M
  tc.finalize(params, dom, exps, M_g);

  ToleranceBudget out;
  out.epsilon = epsilon;
  out.mode = mode;

  // delta_dist (homogeneous side), in log10: the exponent is the growth term
  auto log10_1p = [](double lg_T) {
    // log10(1 + T) for T given as log10; for large T this is just lg_T
    if (lg_T > 15.0) return lg_T;
    return std::log10(1.0 + std::pow(10.0, lg_T));
  };
  auto lgsum = [](double a, double b) {
    // log10(10^a + 10^b)
    double m = std::max(a, b);
    return m + std::log10(std::pow(10.0, a - m) + std::pow(10.0, b - m));
  };
  double lg_grow = lgsum(lgM1 / s + std::log10(std::max(tc.C1, 1e-300)),
                         lgM1 + std::log10(std::max(tc.C2 + tc.C3, 1e-300)));
  double lg_exp = lgsum(lgM1 / s + std::log10(std::max(tc.C1, 1e-300)),
                        lgM1 + std::log10(std::max(tc.C2 + tc.C4, 1e-300)));
  double vol_q = std::pow(dom.volume(), 1.0 / q);
  double lg_dd1 = std::log10(eps_half / (5.0 * vol_q * tc.L_g));
  double factor = std::pow(10.0, std::min(lg_exp, 290.0));
  lg_dd1 -= factor * log10_1p(lg_grow);

  // source side
  double lg_growf = lgsum(lgM2 / s + std::log10(std::max(tc.Ct1, 1e-300)),
                          lgM2 + std::log10(std::max(tc.Ct2 + tc.C3, 1e-300)));
  double lg_expf = lgsum(lgM2 / s + std::log10(std::max(tc.Ct1, 1e-300)),
                         lgM2 + std::log10(std::max(tc.Ct2 + tc.C4, 1e-300)));
  double kappa = kappa_closed_form(params);
  double lg_ell = std::log10(2.0) +
                  std::pow(10.0, std::min(lg_expf, 290.0)) * log10_1p(lg_growf);
  double lg_dd2 = std::log10(eps_half / (5.0 * vol_q * kappa)) -
                  std::log10(std::pow(dom.diameter(), params.alpha) * tc.L_f +
                             tc.L_alpha * (1.0 + tc.f_sup)) -
                  lg_expf - lg_ell;
  double lg_dist = std::min(lg_dd1, lg_dd2);
  lg_dist = std::max(lg_dist, -1e300);

  double Minvs = std::pow(10.0, std::min(lgM2 * (1.0 / s - 1.0), 290.0));
  double shrink = Minvs * tc.Ct1 + tc.Ct2 + tc.C4;
  double d_ups = eps_half / (5.0 * vol_q * kappa) / shrink;
  double d_alpha = d_ups / (1.0 + tc.f_sup);
  double d_g = eps_half / (5.0 * std::max(tc.C5, 1e-300));
  double d_f = eps_half / (5.0 * tc.Ct2);

  if (mode == BudgetMode::theoretical) {
    out.M = M_theory;
    out.M2 = M_f;
    out.delta_g = std::min(std::max(d_g, 1e-300), 1.0 - 1e-12);
    out.delta_f = std::min(std::max(d_f, 1e-300), 1.0 - 1e-12);
    out.delta_upsilon = std::min(std::max(d_ups, 1e-300), 0.5 - 1e-12);
    out.delta_alpha = std::min(std::max(d_alpha, 1e-300), 1.0 - 1e-12);
    out.delta_dist_log10 = lg_dist;
    if (lg_dist < std::log10(1e-300)) {
      out.delta_dist = 1e-300;
      out.delta_dist_clamped = true;
      notes.push_back(
          "delta_dist underflows IEEE range; exact selection kept as log10 = " +
          std::to_string(lg_dist));
    } else {
      out.delta_dist = std::pow(10.0, lg_dist);
    }
    out.notes = std::move(notes);
    return out;
  }

  // practical mode: pass the user's budget through (or defaults scaled from
  // epsilon) and record which theoretical selections it misses
  if (practical_in) {
    out = *practical_in;
    out.epsilon = epsilon;
    out.mode = BudgetMode::practical;
  } else {
    out.M = 64;
    out.M2 = 8;
    out.delta_g = std::min(0.2, epsilon / 10.0);
    out.delta_f = std::min(0.2, epsilon / 10.0);
    out.delta_dist = std::min(0.1, epsilon / 50.0);
    out.delta_alpha = std::min(0.1, epsilon / 50.0);
    out.delta_upsilon = std::min(0.4, epsilon / 10.0);
  }
  out.delta_dist_log10 = lg_dist;
  std::vector<std::string> unmet;
  if (out.M < M_theory)
    unmet.push_back("M below the theoretical selection (log10 target " +
                    std::to_string(std::max(lgM1, lgM2)) + ")");
  if (std::log10(out.delta_dist) > lg_dist)
    unmet.push_back("delta_dist above the theoretical selection (log10 target " +
                    std::to_string(lg_dist) + ")");
  if (out.delta_g > d_g)
    unmet.push_back("delta_g above the theoretical selection");
  if (out.delta_f > d_f)
    unmet.push_back("delta_f above the theoretical selection");
  if (out.delta_alpha > d_alpha)
    unmet.push_back("delta_alpha above the theoretical selection");
  if (out.delta_upsilon > d_ups)
    unmet.push_back("delta_upsilon above the theoretical selection");
  for (auto& n : notes) unmet.push_back(std::move(n));
  out.notes = std::move(unmet);
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// replay evaluators
// ---------------------------------------------------------------------------

double replay_psi1(const FrozenSampleSet& frozen,
                   const std::function<double(const Vec&)>& dist_fn,
                   const std::function<double(const Vec&)>& g_fn, const Vec& x) {
  double acc = 0.0;
  for (const FrozenReplica& rep : frozen.replicas) {
    Vec z = x;
    for (const Vec& Y : rep.jumps) {
      double r = dist_fn(z);
      for (std::size_t c = 0; c < z.size(); ++c) z[c] += Y[c] * r;
    }
    acc += g_fn(z);
  }
  return acc / double(frozen.replicas.size());
}

double replay_psi2_with_product(
    const FrozenSampleSet& frozen,
    const std::function<double(const Vec&)>& dist_fn,
    const std::function<double(double)>& alpha_fn,
    const std::function<double(const Vec&)>& f_fn,
    const std::function<double(double, double)>& ups_fn, double kappa,
    const Vec& x) {
  double out = 0.0;
  double coeff = kappa / double(frozen.replicas.size());
  Vec y(x.size());
  for (const FrozenReplica& rep : frozen.replicas) {
    Vec z = x;
    for (int n = 1; n <= rep.n_steps(); ++n) {
      double r = dist_fn(z);
      double a = alpha_fn(r);
      double inner = 0.0;
      const auto& draws = rep.mu[std::size_t(n - 1)];
      for (const Vec& v : draws) {
        for (std::size_t c = 0; c < z.size(); ++c) y[c] = z[c] + v[c] * r;
        inner += f_fn(y) / double(draws.size());
      }
      out += coeff * ups_fn(a, inner);
      const Vec& Y = rep.jumps[std::size_t(n - 1)];
      for (std::size_t c = 0; c < z.size(); ++c) z[c] += Y[c] * r;
    }
  }
  return out;
}

double replay_psi2(const FrozenSampleSet& frozen,
                   const std::function<double(const Vec&)>& dist_fn,
                   const std::function<double(double)>& alpha_fn,
                   const std::function<double(const Vec&)>& f_fn, double kappa,
                   const Vec& x) {
  double acc = 0.0;
  Vec y(x.size());
  for (const FrozenReplica& rep : frozen.replicas) {
    Vec z = x;
    for (int n = 1; n <= rep.n_steps(); ++n) {
      double r = dist_fn(z);
      double a = alpha_fn(r);
      double inner = 0.0;
      const auto& draws = rep.mu[std::size_t(n - 1)];
      for (const Vec& v : draws) {
        for (std::size_t c = 0; c < z.size(); ++c) y[c] = z[c] + v[c] * r;
        inner += f_fn(y);
      }
      inner /= double(draws.size());
      acc += a * inner;
      const Vec& Y = rep.jumps[std::size_t(n - 1)];
      for (std::size_t c = 0; c < z.size(); ++c) z[c] += Y[c] * r;
    }
  }
  return kappa * acc / double(frozen.replicas.size());
}

// ---------------------------------------------------------------------------
// compilation
// ---------------------------------------------------------------------------

std::vector<std::vector<ExprPtr>> build_path_nets(const FrozenSampleSet& frozen,
                                                  const ExprPtr& dist_expr) {
  int d = frozen.params.d;
  if (dist_expr->dims().input() != d || dist_expr->dims().output() != 1)
    throw std::invalid_argument("build_path_nets: dist net must map R^d -> R");
  int H_dist = dist_expr->hidden();
  ExprPtr id_step = NetExpr::leaf(identity_net(d, H_dist));
  std::vector<std::vector<ExprPtr>> out(frozen.replicas.size());
  for (std::size_t i = 0; i < frozen.replicas.size(); ++i) {
    const FrozenReplica& rep = frozen.replicas[i];
    ExprPtr cur;
    out[i].reserve(rep.jumps.size());
    for (const Vec& Y : rep.jumps) {
      ExprPtr step = NetExpr::sum(
          {id_step, NetExpr::matmul(Matrix::column(Y), dist_expr)}, {1.0, 1.0});
      cur = cur ? NetExpr::compose(step, cur) : step;
      out[i].push_back(cur);
    }
  }
  return out;
}

namespace {

// dims of the one-step net (d n-chain) ⊞ beta~
NetDims step_dims(const NetDims& beta_dist, int d) {
  NetDims beta_tilde = beta_dist;
  beta_tilde.k.back() = d;
  return dims_sum(dims_scale(dims_n_chain(beta_dist.entries()), d), beta_tilde);
}

// mirror of NetExpr::pad dims (used by the shadow bookkeeping)
NetDims shadow_pad(const NetDims& nd, int target_hidden) {
  int H = nd.hidden();
  if (target_hidden == H) return nd;
  if (target_hidden == H + 1) {
    NetDims out = nd;
    long o = out.k.back();
    out.k.back() = 2 * o;
    out.k.push_back(o);
    return out;
  }
  return dims_compose(
      dims_scale(dims_n_chain(target_hidden - H + 1), nd.output()), nd);
}

std::vector<Vec> probe_points(const Domain& dom, int n, std::uint64_t seed) {
  std::vector<Vec> xs;
  RngStream rng(seed, 0x7070);
  xs.reserve(std::size_t(n));
  for (int k = 0; k < n; ++k) xs.push_back(dom.sample_interior(rng));
  return xs;
}

} // namespace

Compiled compile_homogeneous(const FrozenSampleSet& frozen, const ReluNet& g_net,
                             const ReluNet& dist_net_in, const Domain& dom,
                             const ToleranceBudget& budget,
                             const CompileOptions& opts) {
  budget.validate();
  int d = frozen.params.d;
  if (g_net.dims().input() != d || g_net.dims().output() != 1)
    throw std::invalid_argument("compile_homogeneous: g net must map R^d -> R");
  ExprPtr dist_expr = NetExpr::leaf(dist_net_in);
  ExprPtr g_expr = NetExpr::leaf(g_net);
  int H_dist = dist_expr->hidden();
  int H_g = g_expr->hidden();

  auto paths = build_path_nets(frozen, dist_expr);
  long total = frozen.total_steps();
  int H_target = int((H_dist + 1) * total) + H_g;

  std::vector<ExprPtr> branches;
  std::vector<double> coeffs;
  branches.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    ExprPtr br = NetExpr::compose(g_expr, paths[i].back());
    br = NetExpr::pad(br, H_target);
    branches.push_back(std::move(br));
    coeffs.push_back(1.0 / double(paths.size()));
  }
  Compiled out;
  out.net = NetExpr::sum(std::move(branches), std::move(coeffs));

  // shadow bookkeeping straight from the step formulas
  NetDims beta_dist = dist_net_in.dims();
  NetDims beta_g = g_net.dims();
  NetDims stepd = step_dims(beta_dist, d);
  NetDims expect;
  for (std::size_t i = 0; i < frozen.replicas.size(); ++i) {
    int Ni = frozen.replicas[i].n_steps();
    NetDims chain = stepd;
    for (int n = 2; n <= Ni; ++n) chain = dims_compose(stepd, chain);
    NetDims br = dims_compose(beta_g, chain);
    long Hi = (H_dist + 1) * (total - Ni) - 1;
    if (Hi >= 1) br = dims_compose(dims_n_chain(int(Hi) + 2), br);
    else if (Hi == 0) br = shadow_pad(br, br.hidden() + 1);
    expect = (i == 0) ? br : dims_sum(expect, br);
  }

  CompileReport& rep = out.report;
  rep.budget = budget;
  rep.total_steps = total;
  rep.param_count = out.net->param_count();
  rep.dims_norm = dims_norm(out.net->dims());
  rep.depth_entries = out.net->dims().entries();
  rep.dims_identity_ok = (expect == out.net->dims());
  long M = long(frozen.replicas.size());
  rep.norm_bound_rhs =
      M * (dims_norm(beta_g) + 2 * d + dims_norm(beta_dist));
  rep.norm_bound_ok = rep.dims_norm <= rep.norm_bound_rhs;
  if (!rep.dims_identity_ok)
    throw std::logic_error("compile_homogeneous: dims identity failed");
  if (!rep.norm_bound_ok)
    throw std::logic_error("compile_homogeneous: norm bound violated");

  // equivalence probe against the plain replay (component realizations)
  auto dist_fn = [&](const Vec& z) { return dist_net_in.realize1(z); };
  auto g_fn = [&](const Vec& z) { return g_net.realize1(z); };
  double worst = 0.0;
  for (const Vec& x : probe_points(dom, opts.n_probe_points, opts.probe_seed)) {
    double a = out.net->eval(x)[0];
    double b = replay_psi1(frozen, dist_fn, g_fn, x);
    worst = std::max(worst, std::fabs(a - b) / std::max(1.0, std::fabs(b)));
  }
  rep.equivalence_residual = worst;
  rep.equivalence_tolerance = 1e-6;
  return out;
}

namespace {

struct SourceParts {
  ExprPtr psi2;
  NetDims expect;
  double kappa_range = 0.0;
};

SourceParts assemble_source(const FrozenSampleSet& frozen, const ReluNet& f_net,
                            const ReluNet& dist_net_in, const ReluNet& alpha_net,
                            const ReluNet& upsilon, double kappa) {
  int d = frozen.params.d;
  ExprPtr dist_expr = NetExpr::leaf(dist_net_in);
  ExprPtr f_expr = NetExpr::leaf(f_net);
  ExprPtr alpha_expr = NetExpr::leaf(alpha_net);
  ExprPtr ups_expr = NetExpr::leaf(upsilon);
  int H_dist = dist_expr->hidden();
  int H_f = f_expr->hidden();
  int H_alpha = alpha_expr->hidden();
  long total = frozen.total_steps();
  long M1 = long(frozen.replicas.size());
  long M2 = frozen.M2;
  int H = int((H_dist + 1) * total) + H_alpha + H_f;

  ExprPtr id_step = NetExpr::leaf(identity_net(d, H_dist));
  auto paths = build_path_nets(frozen, dist_expr);

  NetDims beta_dist = dist_net_in.dims();
  NetDims stepd = step_dims(beta_dist, d);
  NetDims beta_f = f_net.dims();
  NetDims beta_alpha = alpha_net.dims();
  NetDims beta_ups = upsilon.dims();

  std::vector<ExprPtr> terms;
  std::vector<double> coeffs;
  NetDims expect;
  bool first = true;
  for (std::size_t i = 0; i < frozen.replicas.size(); ++i) {
    const FrozenReplica& rep = frozen.replicas[i];
    for (int n = 1; n <= rep.n_steps(); ++n) {
      ExprPtr prev = (n >= 2) ? paths[i][std::size_t(n - 2)] : nullptr;
      // alpha branch: Phi_alpha o Phi_dist o Phi_{i,n-1}
      ExprPtr phir = prev ? NetExpr::compose(dist_expr, prev) : dist_expr;
      ExprPtr abr = NetExpr::compose(alpha_expr, phir);
      abr = NetExpr::pad(abr, H);
      // f branches: (1/M2) sum_j Phi_f o (z + v_{i,j,n} dist(z)) o Phi_{i,n-1}
      std::vector<ExprPtr> fparts;
      std::vector<double> fcoef;
      for (long j = 0; j < M2; ++j) {
        const Vec& v = rep.mu[std::size_t(n - 1)][std::size_t(j)];
        ExprPtr vstep = NetExpr::sum(
            {id_step, NetExpr::matmul(Matrix::column(v), dist_expr)},
            {1.0, 1.0});
        ExprPtr base = prev ? NetExpr::compose(vstep, prev) : vstep;
        ExprPtr fb = NetExpr::compose(f_expr, base);
        fb = NetExpr::pad(fb, H);
        fparts.push_back(std::move(fb));
        fcoef.push_back(1.0 / double(M2));
      }
      ExprPtr fbr = NetExpr::sum(std::move(fparts), std::move(fcoef));
      ExprPtr pair = NetExpr::parallel(abr, fbr);
      ExprPtr term = NetExpr::compose(ups_expr, pair);
      terms.push_back(term);
      coeffs.push_back(kappa / double(M1));

      // shadow dims per the step formulas
      NetDims chain_prev;
      if (n >= 2) {
        chain_prev = stepd;
        for (int m = 2; m <= n - 1; ++m) chain_prev = dims_compose(stepd, chain_prev);
      }
      NetDims phir_d = (n >= 2) ? dims_compose(beta_dist, chain_prev) : beta_dist;
      NetDims abr_d = dims_compose(beta_alpha, phir_d);
      abr_d = shadow_pad(abr_d, H);
      NetDims fb_d = (n >= 2) ? dims_compose(beta_f, dims_compose(stepd, chain_prev))
                              : dims_compose(beta_f, stepd);
      fb_d = shadow_pad(fb_d, H);
      NetDims fsum_d = fb_d;
      for (long j = 1; j < M2; ++j) fsum_d = dims_sum(fsum_d, fb_d);
      NetDims pair_d = dims_parallel(abr_d, fsum_d);
      NetDims term_d = dims_compose(beta_ups, pair_d);
      expect = first ? term_d : dims_sum(expect, term_d);
      first = false;
    }
  }
  SourceParts out;
  out.psi2 = NetExpr::sum(std::move(terms), std::move(coeffs));
  out.expect = std::move(expect);
  return out;
}

} // namespace

Compiled compile_source(const FrozenSampleSet& frozen, const ReluNet& f_net,
                        const ReluNet& dist_net_in, const ReluNet& alpha_net,
                        const OccupationLaw& law, const Domain& dom,
                        const ToleranceBudget& budget,
                        const CompileOptions& opts) {
  budget.validate();
  int d = frozen.params.d;
  if (f_net.dims().input() != d || f_net.dims().output() != 1)
    throw std::invalid_argument("compile_source: f net must map R^d -> R");
  if (alpha_net.dims().input() != 1 || alpha_net.dims().output() != 1)
    throw std::invalid_argument("compile_source: alpha net must map R -> R");
  double kappa = law.kappa();

  // operand range pre-pass for the product block
  auto dist_fn = [&](const Vec& z) { return dist_net_in.realize1(z); };
  auto alpha_fn = [&](double r) { return alpha_net.realize1(r); };
  auto f_fn = [&](const Vec& z) { return f_net.realize1(z); };
  auto operand_range = [&](const std::vector<Vec>& xs) {
    double worst = 0.0;
    Vec y(std::size_t(d), 0.0);
    for (const Vec& x : xs) {
      for (const FrozenReplica& rep : frozen.replicas) {
        Vec z = x;
        for (int n = 1; n <= rep.n_steps(); ++n) {
          double r = dist_fn(z);
          worst = std::max(worst, std::fabs(alpha_fn(r)));
          double inner = 0.0;
          for (const Vec& v : rep.mu[std::size_t(n - 1)]) {
            for (int c = 0; c < d; ++c)
              y[std::size_t(c)] = z[std::size_t(c)] + v[std::size_t(c)] * r;
            inner += f_fn(y);
          }
          worst = std::max(worst, std::fabs(inner / double(rep.mu[std::size_t(n - 1)].size())));
          const Vec& Y = rep.jumps[std::size_t(n - 1)];
          for (int c = 0; c < d; ++c) z[std::size_t(c)] += Y[std::size_t(c)] * r;
        }
      }
    }
    return worst;
  };
  std::vector<Vec> pre = probe_points(dom, std::max(8, opts.n_probe_points / 2),
                                      opts.probe_seed ^ 0x5151u);
  double kap_range = std::max(0.5, 2.0 * operand_range(pre));

  Compiled out;
  bool regrown = false;
  for (int attempt = 0; attempt < 3; ++attempt) {
    ReluNet upsilon = product_net(kap_range, budget.delta_upsilon);
    SourceParts parts = assemble_source(frozen, f_net, dist_net_in, alpha_net,
                                        upsilon, kappa);
    CompileReport rep;
    rep.budget = budget;
    rep.total_steps = frozen.total_steps();
    rep.param_count = parts.psi2->param_count();
    rep.dims_norm = dims_norm(parts.psi2->dims());
    rep.depth_entries = parts.psi2->dims().entries();
    rep.dims_identity_ok = (parts.expect == parts.psi2->dims());
    long M2 = frozen.M2;
    rep.norm_bound_rhs =
        (dims_norm(upsilon.dims()) + dims_norm(alpha_net.dims()) +
         M2 * dims_norm(f_net.dims()) +
         (M2 + 1) * (2 * d + dims_norm(dist_net_in.dims()))) *
        frozen.total_steps();
    rep.norm_bound_ok = rep.dims_norm <= rep.norm_bound_rhs;
    rep.upsilon_kappa_range = kap_range;
    rep.upsilon_kappa_regrown = regrown;
    {
      // a priori product range from the step-count/jump sums; dominated by
      // L_alpha (1 + sum|Y|)^N, astronomically larger than the operands the
      // network ever sees, hence reported in log10 beside the built range
      double L_alpha = alpha_net.cert.valid ? alpha_net.cert.lipschitz : 1.0;
      double base = 0.0;
      for (const FrozenReplica& r2 : frozen.replicas) {
        double sy = 1.0;
        for (const Vec& Y : r2.jumps) sy += norm2(Y);
        base = std::max(base, double(r2.n_steps()) * std::log10(sy));
      }
      double head = std::log10(
          1.0 + std::pow(dom.diameter(), frozen.params.alpha) +
          std::max(L_alpha, 1e-300));
      rep.upsilon_kappa_apriori_log10 =
          std::max(std::log10(std::max(L_alpha, 1e-300)) + base, head);
    }
    if (!rep.dims_identity_ok)
      throw std::logic_error("compile_source: dims identity failed");
    if (!rep.norm_bound_ok)
      throw std::logic_error("compile_source: norm bound violated");

    // equivalence probe; also watch the operand range on the probe set
    double worst = 0.0;
    std::vector<Vec> xs = probe_points(dom, opts.n_probe_points, opts.probe_seed);
    double observed = operand_range(xs);
    if (observed > kap_range) {
      kap_range = 2.0 * observed;
      regrown = true;
      continue;
    }
    double tol = budget.delta_upsilon * double(frozen.total_steps()) * kappa /
                     double(frozen.replicas.size()) +
                 1e-6;
    for (const Vec& x : xs) {
      double a = parts.psi2->eval(x)[0];
      double b = replay_psi2(frozen, dist_fn, alpha_fn, f_fn, kappa, x);
      worst = std::max(worst, std::fabs(a - b));
    }
    rep.equivalence_residual = worst;
    rep.equivalence_tolerance = tol;
    if (regrown)
      rep.notes.push_back("product range regrown to cover observed operands");
    out.net = parts.psi2;
    out.report = std::move(rep);
    return out;
  }
  throw NumericError("compile_source: product range kept growing", kap_range);
}

CompiledFull compile_full(const Domain& dom, const ReluNet& g_net,
                          const ReluNet& f_net, const ReluNet& dist_net_in,
                          const ReluNet& alpha_net, const OccupationLaw& law,
                          const ToleranceBudget& budget, RngStream freeze_rng,
                          bool x_independent, std::optional<Vec> x_ref,
                          long max_steps, const CompileOptions& opts) {
  budget.validate();
  const StableParams& params = law.params();
  FrozenSampleSet frozen1 =
      freeze_samples(dom, x_independent, params, law, budget.M, budget.M2,
                     substream(freeze_rng, 1, 1), max_steps, x_ref);
  FrozenSampleSet frozen2 =
      freeze_samples(dom, x_independent, params, law, budget.M, budget.M2,
                     substream(freeze_rng, 2, 2), max_steps, x_ref);

  CompiledFull out;
  Compiled c1 = compile_homogeneous(frozen1, g_net, dist_net_in, dom, budget, opts);
  Compiled c2 =
      compile_source(frozen2, f_net, dist_net_in, alpha_net, law, dom, budget, opts);
  out.psi1 = c1.net;
  out.psi2 = c2.net;
  out.report1 = c1.report;
  out.report2 = c2.report;

  int H1 = out.psi1->hidden();
  int H2 = out.psi2->hidden();
  int target = H1 + H2 + 1;
  ExprPtr p1 = NetExpr::pad(out.psi1, target);
  ExprPtr p2 = NetExpr::pad(out.psi2, target);
  out.net = NetExpr::sum({p1, p2}, {1.0, 1.0});

  CompileReport& rep = out.report;
  rep.budget = budget;
  rep.total_steps = c1.report.total_steps + c2.report.total_steps;
  rep.param_count = out.net->param_count();
  rep.dims_norm = dims_norm(out.net->dims());
  rep.depth_entries = out.net->dims().entries();
  NetDims expect = dims_sum(shadow_pad(out.psi1->dims(), target),
                            shadow_pad(out.psi2->dims(), target));
  rep.dims_identity_ok = (expect == out.net->dims());
  rep.norm_bound_rhs =
      dims_norm(out.psi1->dims()) + dims_norm(out.psi2->dims());
  rep.norm_bound_ok = rep.dims_norm <= rep.norm_bound_rhs;
  if (!rep.dims_identity_ok)
    throw std::logic_error("compile_full: dims identity failed");
  if (!rep.norm_bound_ok) throw std::logic_error("compile_full: norm bound violated");

  // pointwise sum identity
  double worst = 0.0;
  for (const Vec& x : probe_points(dom, opts.n_probe_points, opts.probe_seed)) {
    double a = out.net->eval(x)[0];
    double b = out.psi1->eval(x)[0] + out.psi2->eval(x)[0];
    worst = std::max(worst, std::fabs(a - b));
  }
  rep.equivalence_residual = worst;
  rep.equivalence_tolerance = 1e-9;
  return out;
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

namespace {

struct Fit {
  double slope = 0.0;
  double residual = 0.0; // relative RMS of the fit in log space
};

Fit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  Fit fit;
  fit.slope = sxy / sxx;
  double b = my - fit.slope * mx;
  double ss = 0, scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = ly[i] - (b + fit.slope * lx[i]);
    ss += e * e;
    scale += ly[i] * ly[i];
  }
  fit.residual = std::sqrt(ss / double(n)) /
                 std::max(1e-12, std::sqrt(scale / double(n)));
  return fit;
}

} // namespace

AuditReport audit_cod(const std::function<long(int, double)>& param_count_of,
                      const std::vector<int>& d_list,
                      const std::vector<double>& epsilon_list, double eta) {
  if (d_list.size() < 3 || epsilon_list.size() < 3)
    throw std::invalid_argument("audit_cod: need at least 3 values per axis");
  AuditReport out;
  out.eta = eta;
  double eps_mid = epsilon_list[epsilon_list.size() / 2];
  int d_mid = d_list[d_list.size() / 2];

  std::vector<double> dx, dy;
  for (int d : d_list) {
    long P = param_count_of(d, eps_mid);
    out.points.push_back({d, eps_mid, P});
    dx.push_back(double(d));
    dy.push_back(double(P));
  }
  std::vector<double> ex, ey;
  for (double eps : epsilon_list) {
    long P = param_count_of(d_mid, eps);
    out.points.push_back({d_mid, eps, P});
    ex.push_back(1.0 / eps);
    ey.push_back(double(P));
  }
  Fit fd = loglog_fit(dx, dy);
  Fit fe = loglog_fit(ex, ey);
  out.d_exponent = fd.slope;
  out.eps_exponent = fe.slope;
  out.d_fit_residual = fd.residual;
  out.eps_fit_residual = fe.residual;
  out.pass = std::isfinite(fd.slope) && std::isfinite(fe.slope) &&
             fd.slope <= eta && fe.slope <= eta;
  return out;
}

std::string AuditReport::to_csv() const {
  std::string s = "d,epsilon,param_count\n";
  for (const AuditPoint& p : points) {
    s += std::to_string(p.d) + "," + std::to_string(p.epsilon) + "," +
         std::to_string(p.param_count) + "\n";
  }
  return s;
}

std::string CompileReport::to_json() const {
  nlohmann::json j;
  j["param_count"] = param_count;
  j["dims_norm"] = dims_norm;
  j["depth_entries"] = depth_entries;
  j["dims_identity_ok"] = dims_identity_ok;
  j["norm_bound_ok"] = norm_bound_ok;
  j["norm_bound_rhs"] = norm_bound_rhs;
  j["equivalence_residual"] = equivalence_residual;
  j["equivalence_tolerance"] = equivalence_tolerance;
  j["upsilon_kappa_range"] = upsilon_kappa_range;
  j["upsilon_kappa_apriori_log10"] = upsilon_kappa_apriori_log10;
  j["upsilon_kappa_regrown"] = upsilon_kappa_regrown;
  j["total_steps"] = total_steps;
  j["budget"] = {{"epsilon", budget.epsilon},
                 {"delta_g", budget.delta_g},
                 {"delta_dist", budget.delta_dist},
                 {"delta_alpha", budget.delta_alpha},
                 {"delta_f", budget.delta_f},
                 {"delta_upsilon", budget.delta_upsilon},
                 {"M", budget.M},
                 {"M2", budget.M2},
                 {"mode", budget.mode == BudgetMode::theoretical ? "theoretical"
                                                                 : "practical"},
                 {"delta_dist_log10", budget.delta_dist_log10},
                 {"delta_dist_clamped", budget.delta_dist_clamped},
                 {"notes", budget.notes}};
  j["notes"] = notes;
  return j.dump(2);
}

} // namespace swos
