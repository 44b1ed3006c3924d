#pragma once

#include <memory>
#include <optional>

#include "swos/mc_solver.hpp"
#include "swos/relu_net.hpp"

namespace swos {

// ---------------------------------------------------------------------------
// Network expression DAG.
//
// The assembled estimator networks are block-structured: sums of M branches,
// each a long composition chain. Their layer algebra (and therefore dims and
// parameter count) is tracked exactly, while evaluation walks the structure
// instead of dense block matrices. materialize() produces the equivalent
// dense net and is meant for nets whose parameter count fits in memory; the
// two evaluation routes agree to rounding and are tested against each other.
// ---------------------------------------------------------------------------

class NetExpr;
using ExprPtr = std::shared_ptr<const NetExpr>;

class NetExpr {
public:
  enum class Kind { leaf, compose, sum, parallel, matmul, pad };

  static ExprPtr leaf(ReluNet net);
  static ExprPtr leaf(std::shared_ptr<const ReluNet> net);
  static ExprPtr compose(ExprPtr f, ExprPtr g); // f after g
  static ExprPtr sum(std::vector<ExprPtr> parts, std::vector<double> coeffs);
  static ExprPtr parallel(ExprPtr f, ExprPtr g);
  static ExprPtr matmul(Matrix A, ExprPtr f);
  static ExprPtr pad(ExprPtr f, int target_hidden);

  Kind kind() const { return kind_; }
  const NetDims& dims() const { return dims_; }
  int hidden() const { return dims_.hidden(); }
  long param_count() const { return dims_param_count(dims_); }

  Vec eval(const Vec& x) const;
  ReluNet materialize() const;

  std::string to_json() const;
  static ExprPtr from_json(const std::string& text);

private:
  friend struct NetExprAccess;
  NetExpr() = default;

  Kind kind_ = Kind::leaf;
  NetDims dims_;
  std::shared_ptr<const ReluNet> net_;
  std::vector<ExprPtr> kids_;
  std::vector<double> coeffs_;
  Matrix A_;
  int pad_target_ = 0;
};

// ---------------------------------------------------------------------------
// Frozen Monte Carlo randomness baked into compiled networks.
// ---------------------------------------------------------------------------

struct FrozenReplica {
  Vec start;                         // simulation start of this replica
  std::vector<Vec> jumps;            // Y_{i,1..N}, all |Y| > 1
  std::vector<std::vector<Vec>> mu;  // mu[n-1][j], all |v| < 1
  int n_steps() const { return int(jumps.size()); }
};

struct FrozenSampleSet {
  StableParams params;
  long M1 = 0;
  long M2 = 0;
  std::uint64_t seed = 0;
  std::uint64_t base_stream = 0;
  bool x_independent = true;
  std::vector<FrozenReplica> replicas;

  long total_steps() const {
    long s = 0;
    for (const auto& r : replicas) s += r.n_steps();
    return s;
  }
};

// Simulates M1 walk replicas with the exact distance function and stores all
// jumps and occupation draws. x_independent = true draws each replica's start
// uniformly in D (one set serves the whole domain); false starts every
// replica at x_ref (or the domain reference point), for per-point compiles.
FrozenSampleSet freeze_samples(const Domain& dom, bool x_independent,
                               const StableParams& params,
                               const OccupationLaw& law, long M1, long M2,
                               RngStream base, long max_steps = 100000,
                               std::optional<Vec> x_ref = std::nullopt);

// ---------------------------------------------------------------------------
// Budgets and constants.
// ---------------------------------------------------------------------------

enum class BudgetMode { theoretical, practical };

struct ToleranceBudget {
  double epsilon = 0.1;
  double delta_g = 0.01;
  double delta_dist = 0.01;
  double delta_alpha = 0.01;
  double delta_f = 0.01;
  double delta_upsilon = 0.01;
  long M = 64;
  long M2 = 8;
  BudgetMode mode = BudgetMode::practical;

  // diagnostics from theoretical selection
  double delta_dist_log10 = 0.0; // exact selected value in log10
  bool delta_dist_clamped = false;
  std::vector<std::string> notes;

  void validate() const;
};

struct TheoryConstants {
  double theta_qs = 2.0; // placeholder for 2 K_{q,s}; exact 2 when q <= s
  double p_tilde = 0.5;
  double K1 = 0.0, K2 = 0.0;
  double B = 1.0, a = 1.0, b = 1.0; // assumption envelope constants
  double L_g = 1.0, L_f = 1.0, L_tilde_f = 1.0, L_alpha = 1.0;
  double f_sup = 1.0;
  double growth_B = 1.0, growth_p = 1.0; // envelope of g
  double sigma_mean = 0.0, sigma_msq = 0.0; // E[sigma_D], E[sigma_D^2] proxies
  double eta = 40.0;                        // audit exponent

  // derived (filled by finalize)
  double C = 0.0, C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0, C5 = 0.0;
  double Ct1 = 0.0, Ct2 = 0.0;

  // populates K1/K2/sigma moments/p_tilde from the problem, then the
  // C-chain given exponents
  static TheoryConstants compute(const Domain& dom, const StableParams& params,
                                 const SolverExponents& exps,
                                 const OccupationLaw& law, double L_g,
                                 double growth_B, double growth_p, double L_f,
                                 double f_sup, double L_alpha,
                                 RngStream p_tilde_rng, long p_tilde_paths = 4000);

  void finalize(const StableParams& params, const Domain& dom,
                const SolverExponents& exps, long M_for_C5);
};

ToleranceBudget select_parameters(double epsilon, const TheoryConstants& consts,
                                  const SolverExponents& exps,
                                  const StableParams& params, const Domain& dom,
                                  BudgetMode mode,
                                  const ToleranceBudget* practical_in = nullptr);

// ---------------------------------------------------------------------------
// Compilation.
// ---------------------------------------------------------------------------

struct CompileReport {
  long param_count = 0;
  long dims_norm = 0;
  int depth_entries = 0; // dim(D(.)) including input and output
  bool dims_identity_ok = false;
  bool norm_bound_ok = false;
  long norm_bound_rhs = 0;
  double equivalence_residual = 0.0; // max |net - replay| over probe points
  double equivalence_tolerance = 0.0;
  double upsilon_kappa_range = 0.0;       // pre-pass operand range, as built
  double upsilon_kappa_apriori_log10 = 0.0; // a priori range formula, in log10
  bool upsilon_kappa_regrown = false;
  long total_steps = 0;
  ToleranceBudget budget;
  std::vector<std::string> notes;

  std::string to_json() const;
};

struct CompileOptions {
  int n_probe_points = 20;   // equivalence probe sample size
  std::uint64_t probe_seed = 424242;
  long materialize_cap = 40'000'000; // params
};

// path nets Phi_{i,n} for n = 1..N_i (index [i][n-1])
std::vector<std::vector<ExprPtr>> build_path_nets(const FrozenSampleSet& frozen,
                                                  const ExprPtr& dist_net);

struct Compiled {
  ExprPtr net;
  CompileReport report;
};

Compiled compile_homogeneous(const FrozenSampleSet& frozen, const ReluNet& g_net,
                             const ReluNet& dist_net, const Domain& dom,
                             const ToleranceBudget& budget,
                             const CompileOptions& opts = {});

Compiled compile_source(const FrozenSampleSet& frozen, const ReluNet& f_net,
                        const ReluNet& dist_net, const ReluNet& alpha_net,
                        const OccupationLaw& law, const Domain& dom,
                        const ToleranceBudget& budget,
                        const CompileOptions& opts = {});

struct CompiledFull {
  ExprPtr net;       // Psi
  ExprPtr psi1;
  ExprPtr psi2;
  CompileReport report;
  CompileReport report1;
  CompileReport report2;
};

CompiledFull compile_full(const Domain& dom, const ReluNet& g_net,
                          const ReluNet& f_net, const ReluNet& dist_net,
                          const ReluNet& alpha_net, const OccupationLaw& law,
                          const ToleranceBudget& budget, RngStream freeze_rng,
                          bool x_independent = true,
                          std::optional<Vec> x_ref = std::nullopt,
                          long max_steps = 100000,
                          const CompileOptions& opts = {});

// Plain-function replays of the compiled formulas; the oracle route for the
// equivalence checks. replay_psi2 uses the true product where the network
// uses its product block.
double replay_psi1(const FrozenSampleSet& frozen,
                   const std::function<double(const Vec&)>& dist_fn,
                   const std::function<double(const Vec&)>& g_fn, const Vec& x);

double replay_psi2(const FrozenSampleSet& frozen,
                   const std::function<double(const Vec&)>& dist_fn,
                   const std::function<double(double)>& alpha_fn,
                   const std::function<double(const Vec&)>& f_fn, double kappa,
                   const Vec& x);

// Structural evaluation of the assembled source network: identical term
// order and coefficients, with the product block realized by ups_fn. Equals
// the expression-DAG evaluation to rounding; usable at replica counts whose
// explicit layer lists would not fit in memory.
double replay_psi2_with_product(
    const FrozenSampleSet& frozen,
    const std::function<double(const Vec&)>& dist_fn,
    const std::function<double(double)>& alpha_fn,
    const std::function<double(const Vec&)>& f_fn,
    const std::function<double(double, double)>& ups_fn, double kappa,
    const Vec& x);

// ---------------------------------------------------------------------------
// Curse-of-dimensionality audit.
// ---------------------------------------------------------------------------

struct AuditPoint {
  int d = 0;
  double epsilon = 0.0;
  long param_count = 0;
};

struct AuditReport {
  std::vector<AuditPoint> points;
  double d_exponent = 0.0;
  double eps_exponent = 0.0;
  double d_fit_residual = 0.0;   // relative RMS
  double eps_fit_residual = 0.0;
  bool pass = false;
  double eta = 0.0;

  std::string to_csv() const;
};

AuditReport audit_cod(const std::function<long(int, double)>& param_count_of,
                      const std::vector<int>& d_list,
                      const std::vector<double>& epsilon_list, double eta);

} // namespace swos
