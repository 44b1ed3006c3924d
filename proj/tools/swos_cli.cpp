// Command-line front end: sampling, solving, compiling and auditing from a
// flat key=value configuration. Exit codes: 0 success, 2 configuration
// error, 3 numeric error, 4 non-termination.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "swos/relu_blocks.hpp"

using namespace swos;
using namespace swos::cli;
using nlohmann::json;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
  std::string out_dir;
  std::string format;
};

KvConfig load_kv(const GlobalArgs& g) {
  KvConfig kv;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    if (!in) throw ConfigError({"cannot open config file '" + g.config_path + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    kv = KvConfig::parse(buf.str());
  }
  if (g.seed_override) kv.set("mc.seed", std::to_string(*g.seed_override));
  if (!g.out_dir.empty()) kv.set("output.dir", g.out_dir);
  if (!g.format.empty()) kv.set("output.format", g.format);
  return kv;
}

int resolve_threads(const GlobalArgs& g) {
  if (g.threads_override) return std::max(1, *g.threads_override);
  if (const char* env = std::getenv("SWOS_THREADS"))
    return std::max(1, std::atoi(env));
  return 1;
}

json run_header(const RunConfig& rc) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                (unsigned long long)rc.config_hash);
  return json{{"version", version_string()},
              {"config_hash", std::string(hex)},
              {"seed", rc.seed}};
}

void write_text(const std::string& dir, const std::string& name,
                const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name);
  out << text;
}

BoundaryData boundary_of(const RunConfig& rc) {
  BoundaryData g;
  g.g = rc.g.fn;
  g.lipschitz = rc.g.lipschitz;
  g.growth_B = std::max(1.0, rc.g.sup_bound);
  g.growth_p = 1.0;
  return g;
}

SourceData source_of(const RunConfig& rc) {
  SourceData f;
  f.f = rc.f.fn;
  f.lipschitz = rc.f.lipschitz;
  f.sup_bound = std::max(1e-12, rc.f.sup_bound);
  return f;
}

// ---------------------------------------------------------------------------

int cmd_moments(const RunConfig& rc, const std::vector<double>& betas) {
  json out;
  out["header"] = run_header(rc);
  json vals = json::array();
  for (double beta : betas)
    vals.push_back(json{{"beta", beta}, {"K", moment_K(rc.params.alpha, beta)}});
  out["alpha"] = rc.params.alpha;
  out["moments"] = vals;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_kappa(const RunConfig& rc) {
  double closed = kappa_closed_form(rc.params);
  double quad = kappa_quadrature(rc.params);
  json out;
  out["header"] = run_header(rc);
  out["alpha"] = rc.params.alpha;
  out["d"] = rc.params.d;
  out["kappa_closed_form"] = closed;
  out["kappa_quadrature"] = quad;
  out["relative_gap"] = std::fabs(closed - quad) / closed;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_sample_exit(const RunConfig& rc, long n) {
  RngStream rng(rc.seed, 0);
  json out;
  out["header"] = run_header(rc);
  json samples = json::array();
  double mean_r = 0.0;
  for (long i = 0; i < n; ++i) {
    Vec y = sample_exit_unit_ball(rc.params, rng);
    mean_r += norm2(y);
    if (i < 1000) samples.push_back(y);
  }
  out["n"] = n;
  out["mean_radius"] = mean_r / double(n);
  out["first_samples"] = samples;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_wos_path(const RunConfig& rc, long n_paths,
                 const std::string& path_log) {
  Vec x = rc.eval_points.empty() ? rc.domain.reference_point()
                                 : rc.eval_points.front();
  std::ofstream log;
  if (!path_log.empty()) log.open(path_log);
  json out;
  out["header"] = run_header(rc);
  json stats = json::array();
  RngStream base(rc.seed, 0);
  for (long i = 0; i < n_paths; ++i) {
    RngStream rng = substream(base, std::uint64_t(i), 0);
    WosPath path = run_wos(rc.domain, x, rc.params, rng, rc.max_steps);
    stats.push_back(json{{"steps", path.n_steps()},
                         {"exit_norm", norm2(path.exit_point)}});
    if (log.is_open()) {
      json line;
      line["start"] = path.start;
      json jumps = json::array();
      for (const WosStep& st : path.steps) jumps.push_back(st.jump);
      line["jumps"] = std::move(jumps);
      line["exit"] = path.exit_point;
      log << line.dump() << "\n";
    }
  }
  out["paths"] = std::move(stats);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_solve(const RunConfig& rc, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  BoundaryData g = boundary_of(rc);
  SourceData f = source_of(rc);
  g.check_envelope(rc.domain, RngStream(rc.seed, 0xE11));
  f.check_bound(rc.domain, RngStream(rc.seed, 0xE12));
  OccupationLaw law = build_occupation_law(rc.params);
  McOptions opts;
  opts.kind = rc.estimator;
  opts.max_steps = rc.max_steps;
  opts.n_threads = threads;
  std::vector<Vec> points = rc.eval_points;
  if (points.empty()) points.push_back(rc.domain.reference_point());
  json records = json::array();
  for (std::size_t j = 0; j < points.size(); ++j) {
    RngStream base(rc.seed, std::uint64_t(j));
    Estimate est = solve(rc.domain, points[j], g, f, rc.params, law, rc.M,
                         rc.M2, base, opts);
    records.push_back(json{{"x", points[j]},
                           {"value", est.value},
                           {"std_error", est.std_error},
                           {"M", est.n_samples},
                           {"seed", rc.seed},
                           {"params", {{"alpha", rc.params.alpha},
                                       {"d", rc.params.d}}},
                           {"estimator",
                            est.kind == EstimatorKind::mean ? "mean" : "mom"},
                           {"tail_warning", est.tail_warning}});
  }
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  json out;
  out["header"] = run_header(rc);
  out["records"] = std::move(records);
  out["wallclock_s"] = wall;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& rc, int threads) {
  BoundaryData g = boundary_of(rc);
  SourceData f = source_of(rc);
  OccupationLaw law = build_occupation_law(rc.params);
  McOptions opts;
  opts.kind = rc.estimator;
  opts.max_steps = rc.max_steps;
  opts.n_threads = threads;
  std::vector<Vec> points = rc.eval_points;
  if (points.empty()) {
    RngStream rng(rc.seed, 0xA11);
    for (int k = 0; k < 16; ++k) points.push_back(rc.domain.sample_interior(rng));
  }
  std::ostringstream csv;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)rc.config_hash);
  csv << "# " << version_string() << " config_hash=" << hex
      << " seed=" << rc.seed << "\n";
  for (int c = 0; c < rc.params.d; ++c) csv << "x" << c << ",";
  csv << "estimate,std_error,M,wallclock\n";
  for (std::size_t j = 0; j < points.size(); ++j) {
    auto t0 = std::chrono::steady_clock::now();
    RngStream base(rc.seed, std::uint64_t(j));
    Estimate est = solve(rc.domain, points[j], g, f, rc.params, law, rc.M,
                         rc.M2, base, opts);
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    csv.precision(17);
    for (int c = 0; c < rc.params.d; ++c) csv << points[j][std::size_t(c)] << ",";
    csv << est.value << "," << est.std_error << "," << est.n_samples << ","
        << wall << "\n";
  }
  std::cout << csv.str();
  return 0;
}

int cmd_compile(const RunConfig& rc) {
  OccupationLaw law = build_occupation_law(rc.params);
  double reach = rc.domain.sup_norm_point() + 2.0 * rc.domain.diameter();
  ReluNet gnet = spec_to_net(rc.g, rc.params.d, reach, rc.budget.delta_g);
  ReluNet fnet = spec_to_net(rc.f, rc.params.d, reach, rc.budget.delta_f);
  ReluNet dnet = dist_net(rc.domain, rc.budget.delta_dist);
  ReluNet anet =
      power_net(rc.params.alpha, rc.domain.diameter(), rc.budget.delta_alpha);

  ToleranceBudget budget = rc.budget;
  if (rc.mode == BudgetMode::theoretical) {
    TheoryConstants tc = TheoryConstants::compute(
        rc.domain, rc.params, rc.exps, law, rc.g.lipschitz,
        std::max(1.0, rc.g.sup_bound), 1.0, rc.f.lipschitz, rc.f.sup_bound,
        anet.cert.lipschitz, RngStream(rc.seed, 0xC0));
    budget = select_parameters(rc.budget.epsilon, tc, rc.exps, rc.params,
                               rc.domain, BudgetMode::theoretical);
    // the actually built distance net is clamped well above the selection
    budget.delta_dist = std::max(budget.delta_dist, 1e-12);
    budget.M = std::min(budget.M, rc.budget.M);
    budget.M2 = std::min(budget.M2, rc.budget.M2);
    budget.notes.push_back(
        "theoretical M and delta_dist reported; built artifact uses the "
        "practical caps above");
  }

  CompiledFull full =
      compile_full(rc.domain, gnet, fnet, dnet, anet, law, budget,
                   RngStream(rc.seed, 0xC1), rc.x_independent, std::nullopt,
                   rc.max_steps);
  write_text(rc.out_dir, "psi.json", full.net->to_json());
  write_text(rc.out_dir, "psi1.json", full.psi1->to_json());
  write_text(rc.out_dir, "psi2.json", full.psi2->to_json());
  json rep;
  rep["header"] = run_header(rc);
  rep["psi"] = json::parse(full.report.to_json());
  rep["psi1"] = json::parse(full.report1.to_json());
  rep["psi2"] = json::parse(full.report2.to_json());
  write_text(rc.out_dir, "report.json", rep.dump(2));
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_eval_net(const RunConfig& rc, const std::string& net_path) {
  std::ifstream in(net_path);
  if (!in) throw ConfigError({"cannot open network file '" + net_path + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  json j = json::parse(text);
  int version = j.at("version").get<int>();
  std::function<Vec(const Vec&)> eval;
  if (version == 1) {
    auto net = std::make_shared<ReluNet>(net_from_json(text));
    eval = [net](const Vec& x) { return net->realize(x); };
  } else {
    ExprPtr expr = NetExpr::from_json(text);
    eval = [expr](const Vec& x) { return expr->eval(x); };
  }
  std::vector<Vec> points = rc.eval_points;
  if (points.empty()) points.push_back(rc.domain.reference_point());
  json out;
  out["header"] = run_header(rc);
  json vals = json::array();
  for (const Vec& x : points)
    vals.push_back(json{{"x", x}, {"value", eval(x)}});
  out["values"] = std::move(vals);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_validate(const RunConfig& rc) {
  json suites = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass,
                    const std::string& detail) {
    suites.push_back(json{{"suite", name}, {"pass", pass}, {"detail", detail}});
    all = all && pass;
  };

  { // moment normalization and sampler consistency
    bool pass = true;
    std::string detail;
    for (double a : {1.2, 1.5, 1.8}) {
      if (std::fabs(moment_K(a, 0.0) - 1.0) > 1e-12) pass = false;
      StableParams p(a, 2);
      RngStream rng(rc.seed, 0x11);
      long n = 200000;
      double beta = a / 4.0;
      double s = 0.0, s2 = 0.0;
      for (long i = 0; i < n; ++i) {
        double v = std::pow(norm2(sample_exit_unit_ball(p, rng)), beta);
        s += v;
        s2 += v * v;
      }
      double mean = s / n, sd = std::sqrt(s2 / n - mean * mean);
      double truth = moment_K(a, beta);
      if (std::fabs(mean - truth) > 4.0 * sd / std::sqrt(double(n))) {
        pass = false;
        detail += "moment mismatch at alpha=" + std::to_string(a) + "; ";
      }
    }
    record("exit_law_moments", pass, detail);
  }
  { // kappa cross-validation
    bool pass = true;
    for (int d : {2, 3, 5})
      for (double a : {1.2, 1.5, 1.8}) {
        StableParams p(a, d);
        if (std::fabs(kappa_quadrature(p) - kappa_closed_form(p)) /
                kappa_closed_form(p) >
            1e-6)
          pass = false;
      }
    record("kappa_cross_validation", pass, "");
  }
  { // exit-time identity at the ball center
    StableParams p(1.5, 2);
    Domain dom = Domain::ball({0.0, 0.0}, 1.0);
    OccupationLaw law = build_occupation_law(p, 512);
    SourceData f;
    f.f = [](const Vec&) { return 1.0; };
    f.sup_bound = 1.0;
    Estimate est = estimate_source(dom, {0.5, 0.0}, f, p, law, 20000, 1,
                                   RngStream(rc.seed, 0x13));
    double truth = std::pow(0.75, 0.75) * law.kappa();
    bool pass = std::fabs(est.value - truth) <= 3.0 * est.std_error + 1e-12;
    record("exit_time_identity", pass, "");
  }
  { // geometric tail
    StableParams p(1.5, 2);
    Domain dom = Domain::ball({0.0, 0.0}, 1.0);
    std::vector<int> counts;
    RngStream base(rc.seed, 0x14);
    for (long i = 0; i < 20000; ++i) {
      RngStream srng = substream(base, std::uint64_t(i), 0xFFFFFFFFu);
      Vec x = dom.sample_interior(srng);
      RngStream rng = substream(base, std::uint64_t(i), 0);
      counts.push_back(run_wos(dom, x, p, rng).n_steps());
    }
    TailFit fit = fit_log_tail(counts);
    record("geometric_tail", fit.slope < 0.0 && fit.r_squared >= 0.98,
           "r2=" + std::to_string(fit.r_squared));
  }
  { // network algebra exactness (reduced battery)
    RngStream rng(rc.seed, 0x15);
    bool pass = true;
    for (int t = 0; t < 200 && pass; ++t) {
      ReluNet g;
      {
        Layer h;
        h.W = Matrix(3, 2);
        h.B.assign(3, 0.0);
        for (double& v : h.W.a) v = rng.next_normal();
        Layer o;
        o.W = Matrix(2, 3);
        o.B.assign(2, 0.0);
        for (double& v : o.W.a) v = rng.next_normal();
        g.layers = {h, o};
      }
      ReluNet f;
      {
        Layer h;
        h.W = Matrix(4, 2);
        h.B.assign(4, 0.0);
        for (double& v : h.W.a) v = rng.next_normal();
        Layer o;
        o.W = Matrix(1, 4);
        o.B.assign(1, 0.0);
        for (double& v : o.W.a) v = rng.next_normal();
        f.layers = {h, o};
      }
      ReluNet fg = compose(f, g);
      Vec x{rng.next_normal(), rng.next_normal()};
      double direct = f.realize(g.realize(x))[0];
      double through = fg.realize1(x);
      if (std::fabs(direct - through) >
          1e-9 * std::max(1.0, std::fabs(direct)))
        pass = false;
    }
    record("network_algebra", pass, "");
  }

  json out;
  out["header"] = run_header(rc);
  out["suites"] = std::move(suites);
  out["all_pass"] = all;
  std::cout << out.dump(2) << "\n";
  return all ? 0 : 3;
}

int cmd_audit(const RunConfig& rc, const KvConfig& kv) {
  std::vector<double> d_raw = kv.get_vec("audit.d_list");
  std::vector<double> eps_list = kv.get_vec("audit.eps_list");
  if (d_raw.empty()) d_raw = {2, 3, 5, 10};
  if (eps_list.empty()) eps_list = {0.5, 0.25, 0.1};
  std::vector<int> d_list;
  for (double v : d_raw) d_list.push_back(int(v));
  long M = kv.get_int("audit.M", 32);
  long M2 = kv.get_int("audit.M2", 4);
  double eta = kv.get_num("audit.eta", 40.0);

  auto builder = [&](int d, double eps) -> long {
    StableParams p(rc.params.alpha, d);
    Domain dom = Domain::ball(Vec(std::size_t(d), 0.0), 1.0);
    OccupationLaw law = build_occupation_law(p, 512);
    ToleranceBudget budget;
    budget.epsilon = eps;
    budget.M = M;
    budget.M2 = M2;
    budget.delta_g = std::min(0.2, eps / 10.0);
    budget.delta_f = std::min(0.2, eps / 10.0);
    budget.delta_dist = std::min(0.1, eps / 50.0);
    budget.delta_alpha = std::min(0.1, eps / 50.0);
    budget.delta_upsilon = std::min(0.4, eps / 10.0);
    ReluNet gnet = const_net(d, 1.0);
    ReluNet fnet = const_net(d, 1.0);
    ReluNet dnet = dist_net(dom, budget.delta_dist);
    ReluNet anet = power_net(p.alpha, dom.diameter(), budget.delta_alpha);
    CompiledFull full = compile_full(dom, gnet, fnet, dnet, anet, law, budget,
                                     RngStream(rc.seed, 0xAD), true,
                                     std::nullopt, rc.max_steps);
    return full.report.param_count;
  };
  AuditReport rep = audit_cod(builder, d_list, eps_list, eta);
  write_text(rc.out_dir, "audit.csv", rep.to_csv());
  json out;
  out["header"] = run_header(rc);
  out["d_exponent"] = rep.d_exponent;
  out["eps_exponent"] = rep.eps_exponent;
  out["d_fit_residual"] = rep.d_fit_residual;
  out["eps_fit_residual"] = rep.eps_fit_residual;
  out["eta"] = rep.eta;
  out["pass"] = rep.pass;
  std::cout << out.dump(2) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  GlobalArgs g;
  CLI::App app{"walk-on-spheres solver and network compiler for the "
               "fractional Dirichlet problem"};
  app.require_subcommand(1);
  app.add_option("--config", g.config_path, "configuration file");
  std::uint64_t seed_opt = 0;
  auto* seed_flag = app.add_option("--seed", seed_opt, "seed override");
  int threads_opt = 0;
  auto* threads_flag = app.add_option("--threads", threads_opt,
                                      "worker threads (env SWOS_THREADS)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--format", g.format, "json|csv");

  long n_samples = 10000;
  long n_paths = 16;
  std::string path_log;
  std::string net_path;
  std::vector<double> betas{0.0, 0.5, 1.0};

  auto* c_sample = app.add_subcommand("sample-exit", "draw unit-ball exit samples");
  c_sample->add_option("--n", n_samples, "sample count");
  auto* c_moments = app.add_subcommand("moments", "closed-form exit moments");
  c_moments->add_option("--beta", betas, "moment orders");
  app.add_subcommand("kappa", "mean exit time constant, both evaluations");
  auto* c_wos = app.add_subcommand("wos-path", "simulate walk paths");
  c_wos->add_option("--n", n_paths, "path count");
  c_wos->add_option("--path-log", path_log, "JSON-lines path log");
  app.add_subcommand("solve", "pointwise Monte Carlo solve");
  app.add_subcommand("sweep", "CSV sweep over evaluation points");
  app.add_subcommand("compile", "assemble and serialize the networks");
  auto* c_eval = app.add_subcommand("eval-net", "evaluate a serialized network");
  c_eval->add_option("--net", net_path, "network file")->required();
  app.add_subcommand("validate", "run the identity suites");
  app.add_subcommand("audit", "parameter-count scaling audit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_flag) g.seed_override = seed_opt;
  if (*threads_flag) g.threads_override = threads_opt;

  try {
    KvConfig kv = load_kv(g);
    const std::string sub = app.get_subcommands().front()->get_name();
    bool solver_range =
        (sub == "solve" || sub == "sweep" || sub == "compile" || sub == "audit");
    RunConfig rc = RunConfig::load(kv, solver_range);
    int threads = resolve_threads(g);

    if (sub == "sample-exit") return cmd_sample_exit(rc, n_samples);
    if (sub == "moments") return cmd_moments(rc, betas);
    if (sub == "kappa") return cmd_kappa(rc);
    if (sub == "wos-path") return cmd_wos_path(rc, n_paths, path_log);
    if (sub == "solve") return cmd_solve(rc, threads);
    if (sub == "sweep") return cmd_sweep(rc, threads);
    if (sub == "compile") return cmd_compile(rc);
    if (sub == "eval-net") return cmd_eval_net(rc, net_path);
    if (sub == "validate") return cmd_validate(rc);
    if (sub == "audit") return cmd_audit(rc, kv);
    std::cerr << "unknown subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const NonTerminationError& e) {
    std::cerr << "non-termination: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what()
              << " (residual " << e.residual() << ")\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
