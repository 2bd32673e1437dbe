#pragma once

#include "sgf/continuation.hpp"
#include "sgf/mesh.hpp"

#include <string>
#include <vector>

namespace sgf {

/// Target y_d in modal coordinates.
struct TargetSpec {
  enum class Kind { zero, coefficients, from_control };
  Kind kind = Kind::coefficients;
  Vec coefficients;  ///< target coefficients, or the control generating the target
};

struct IdlabConfig {
  double alpha = 0.1;
  int samples = 8;
  Index modes = 6;
  std::vector<double> refinement{0.3, 0.2, 0.13};
  int rm2_samples = 50;
  int sigma_samples = 20;
};

struct RunConfig {
  DomainSpec domain;
  Index m = 32;
  Index m_c = 8;
  double nu = 1;
  double alpha = 0.1;  ///< single-solve subcommands
  std::vector<double> alphas{0.2, 0.1, 0.05, 0.025, 0.0125, 0.0};
  double R = 3;
  double lambda_reg = 1e-2;
  Vec u;  ///< fixed control for state, gateaux and the state sweep
  TargetSpec target;
  std::vector<double> rhos{0.1, 0.05, 0.025, 0.0125, 0.00625};
  Vec direction;  ///< gateaux direction
  StateOptions state;
  ControlOptions optimizer;
  IdlabConfig idlab;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "runs/latest";
  std::string cache_dir = ".sgf-cache";

  /// The benchmark: ellipse a = 2, b = 1, h = 0.11, m = 32, m_c = 8.
  static RunConfig defaults();
  /// Throws ErrorKind::validation naming the offending field path.
  void validate() const;
};

/// Unknown keys and type mismatches are errors carrying the field path.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical echo: stable key order, every field present.
Json config_to_json(const RunConfig& c);
std::string config_to_toml(const RunConfig& c);

/// Benchmark target and control coefficients.
Vec benchmark_target(Index m);
Vec benchmark_control(Index m_c);

AdmissibleSet admissible_set(const RunConfig& c);
/// Resolves a from_control target by solving the state at c.alpha.
CostSpec cost_spec(const RunConfig& c, const ReducedSystem& sys);

}  // namespace sgf
