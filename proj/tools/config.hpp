#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swos/compiler.hpp"

namespace swos::cli {

// Flat "section.key = value" configuration text; '#' starts a comment.
// Chosen for diff-ability in experiment logs.
class KvConfig {
public:
  static KvConfig parse(const std::string& text);
  std::string serialize() const; // canonical: sorted keys, "k = v\n"

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  std::string get_str(const std::string& key, const std::string& dflt) const;
  double get_num(const std::string& key, double dflt) const;
  long get_int(const std::string& key, long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_vec(const std::string& key) const;

  std::uint64_t hash() const; // FNV-1a of the canonical serialization

  const std::map<std::string, std::string>& entries() const { return kv_; }

private:
  std::map<std::string, std::string> kv_;
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::vector<std::string>& violations);
  const std::vector<std::string>& violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

// Function spec strings:
//   constant:<c>
//   affine:<a1>,...,<ad>,<b>
//   radial_pwl:<r0>:<v0>,<r1>:<v1>,...
//   net:<path to serialized network>
struct FnSpec {
  std::string raw;
  std::function<double(const Vec&)> fn;
  std::optional<ReluNet> net; // when representable / loaded
  double lipschitz = 1.0;
  double sup_bound = 1.0;
};

struct RunConfig {
  Domain domain = Domain::ball({0.0, 0.0}, 1.0);
  StableParams params{1.5, 2};
  SolverExponents exps;
  FnSpec g, f;
  long M = 10000;
  long M2 = 8;
  std::uint64_t seed = 1;
  long max_steps = 100000;
  int threads = 1;
  EstimatorKind estimator = EstimatorKind::mean;
  ToleranceBudget budget;
  BudgetMode mode = BudgetMode::practical;
  bool x_independent = true;
  std::vector<Vec> eval_points;
  long n_eval = 2048;
  std::string out_dir = ".";
  std::string format = "json";
  std::uint64_t config_hash = 0;

  // solver_range: alpha restricted to (1,2) (solve/compile/audit); sampler
  // subcommands accept the full (0,2)
  static RunConfig load(const KvConfig& kv, bool solver_range);
};

// d-input network for a spec, for the compile path. Radial specs are lifted
// through a norm block; "net:" loads the serialized network.
ReluNet spec_to_net(const FnSpec& spec, int d, double reach, double delta);

std::string version_string();

} // namespace swos::cli
