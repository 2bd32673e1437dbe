#include "sgf/commands.hpp"
#include "sgf/idlab.hpp"
#include "sgf/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

using namespace sgf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double secs, double limit = 0) {
  const bool in_time = limit <= 0 || secs < limit;
  if (!(pass && in_time)) ++failures;
  std::printf("%s %2d  %-34s %s [%.1f s%s]\n", pass && in_time ? "PASS" : "FAIL", id, name, detail.c_str(), secs,
              limit > 0 ? (in_time ? "" : ", over time limit") : "");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vec gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

StateProblem problem(double nu, double alpha, const Vec& u) {
  StateProblem p;
  p.nu = nu;
  p.alpha = alpha;
  p.u = u;
  return p;
}

struct OptimalityLog {
  double worst_vi = std::numeric_limits<double>::infinity();  ///< min vi_sampled / vi_scale
  double worst_kkt = 0;
  int solves = 0, ball_active = 0, unconverged = 0;

  void add(const OptimalityReport& r) {
    ++solves;
    if (!r.converged) {
      ++unconverged;
      return;
    }
    worst_vi = std::min(worst_vi, r.vi_sampled / r.vi_scale);
    if (r.ball_active) {
      ++ball_active;
      worst_kkt = std::max(worst_kkt, r.kkt_residual);
    }
  }
};

}  // namespace

int main() {
  const RunConfig cfg = RunConfig::defaults();
  std::printf("default benchmark: ellipse a=%g b=%g h=%g, m=%ld, m_c=%ld, nu=%g\n", cfg.domain.a, cfg.domain.b,
              cfg.domain.h_target, long(cfg.m), long(cfg.m_c), cfg.nu);
  auto t0 = Clock::now();
  const Workbench w = prepare(cfg.domain, cfg.m);
  const double setup_secs = seconds_since(t0);
  const ReducedSystem& sys = w.sys;
  const Index m = sys.m;
  std::printf("triangles %ld, velocity dofs %ld, lambda_1 = %.6f, lambda_m = %.4f, setup %.1f s\n",
              long(w.d->mesh().num_triangles()), long(w.d->space().n_v()), sys.lambda(0), sys.lambda(m - 1),
              setup_secs);
  std::mt19937_64 rng(cfg.seed);
  OptimalityLog opt;

  {  // 1
    t0 = Clock::now();
    double worst = 0;
    for (double alpha : {0.0, 0.1}) {
      const Vec wts = sys.weights(alpha);
      for (int k = 0; k < 100; ++k) {
        const Vec eta = gaussian(m, rng);
        const double v = std::abs(sys.pairing(wts.cwiseProduct(eta), eta, eta));
        worst = std::max(worst, v / std::pow(eta.norm(), 3));
      }
    }
    report(1, "energy orthogonality", worst <= 1e-10, fmt("max |N(eta).eta|/|eta|^3 = %.2e (<= 1e-10)", worst),
           seconds_since(t0), 5);
  }

  {  // 2
    t0 = Clock::now();
    const StateSolution s = solve_state(sys, problem(cfg.nu, 0.1, Vec::Zero(cfg.m_c)));
    CostSpec c;
    c.d = Vec::Zero(m);
    c.offset = 0.125;
    c.lambda_reg = 0.01;
    const double J = cost(Vec::Zero(cfg.m_c), s.eta, c);
    const bool pass = s.eta.isZero(0) && J == c.offset;
    report(2, "zero force gives zero state", pass, fmt("max|eta| = %.1e, J - offset = %.1e", s.eta.cwiseAbs().maxCoeff(), J - c.offset),
           seconds_since(t0));
  }

  {  // 3
    const auto& o = w.d->ops();
    const Mat gram = w.basis.E.transpose() * (o.M * w.basis.E);
    const Mat stiff = w.basis.E.transpose() * (o.K * w.basis.E);
    const double e_m = (gram - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
    const double e_k = (stiff - Mat(w.basis.lambda.asDiagonal())).cwiseAbs().maxCoeff() / w.basis.lambda.maxCoeff();
    report(3, "eigenbasis identities", e_m <= 1e-10 && e_k <= 1e-8 && w.basis.lambda(0) > 0,
           fmt("|E'ME - I| = %.1e, |E'KE - diag| = %.1e rel, lambda_1 = %.4f", e_m, e_k, w.basis.lambda(0)),
           setup_secs, 60);
  }

  const Vec u_bench = cfg.u;
  {  // 4
    t0 = Clock::now();
    const CostSpec c = cost_spec(cfg, sys);
    const GateauxReport g = gateaux_check(sys, problem(cfg.nu, 0.1, u_bench), cfg.direction, {1e-1, 1e-2, 1e-3, 1e-4}, c);
    const bool pass = g.complete && std::abs(g.slope_r - 1) <= 0.1 && std::abs(g.slope_cost - 1) <= 0.1;
    report(4, "Gateaux remainder slopes", pass, fmt("state %.4f, cost %.4f (in [0.9, 1.1])", g.slope_r, g.slope_cost),
           seconds_since(t0), 60);
  }

  {  // 5
    t0 = Clock::now();
    const StateSolution s = solve_state(sys, problem(cfg.nu, 0.1, u_bench));
    const LinearizedOperator L = assemble_linearized(sys, s.eta, cfg.nu, 0.1);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
      const Vec f = gaussian(m, rng), wv = gaussian(m, rng);
      const Vec z = solve_linearized(sys, L, wv).z;
      const Vec p = solve_adjoint(L, f);
      worst = std::max(worst, std::abs(f.dot(z) - wv.dot(p)) / (f.norm() * wv.norm()));
    }
    report(5, "adjoint duality", worst <= 1e-12, fmt("max |(f,z)-(w,p)|/(|f||w|) = %.1e (<= 1e-12)", worst),
           seconds_since(t0));
  }

  {  // 6
    t0 = Clock::now();
    const CostSpec c = cost_spec(cfg, sys);
    double worst = 0;
    for (int b = 0; b < 2; ++b) {
      const Vec u = 2.0 * gaussian(cfg.m_c, rng).normalized();
      const StateProblem p = problem(cfg.nu, 0.1, u);
      const GradientResult g = reduced_gradient(sys, p, c);
      for (int k = 0; k < 3; ++k) {
        const Vec dir = gaussian(cfg.m_c, rng).normalized();
        const double fd = directional_fd(sys, p, c, dir, 1e-4);
        worst = std::max(worst, std::abs(g.grad.dot(dir) - fd) / std::max(std::abs(fd), 1e-14));
      }
    }
    report(6, "gradient vs finite differences", worst <= 1e-4, fmt("max relative error %.1e (<= 1e-4)", worst),
           seconds_since(t0));
  }

  {  // 7
    t0 = Clock::now();
    AdmissibleSet set = admissible_set(cfg);
    const Vec u_true = 0.9 * set.R * gaussian(cfg.m_c, rng).normalized();
    CostSpec c;
    c.d = solve_state(sys, problem(cfg.nu, 0.1, u_true)).eta;
    c.lambda_reg = 0;
    ControlOptions o = cfg.optimizer;
    o.tol = 1e-10;
    const ControlResult r = solve_control(sys, cfg.nu, 0.1, set, c, o);
    opt.add(r.report);
    const double J0 = r.report.trace.front().J;
    const bool pass = r.report.J <= 1e-6 * J0 && r.report.iterations <= 200;
    report(7, "inverse-crime recovery", pass,
           fmt("J/J0 = %.1e after %d iterations, |u - u_true| = %.1e", r.report.J / J0, r.report.iterations,
               (r.u - u_true).norm()),
           seconds_since(t0), 300);
  }

  SweepResult sweep;
  double sweep_secs = 0;
  {
    t0 = Clock::now();
    sweep = run_control_sweep(sys, cfg.nu, admissible_set(cfg), cost_spec(cfg, sys), cfg.alphas, cfg.optimizer);
    sweep_secs = seconds_since(t0);
  }

  {  // 8
    t0 = Clock::now();
    // benchmark solves at every ladder alpha are interior; the small ball makes the constraint active
    for (double alpha : cfg.alphas) {
      const ControlResult r = solve_control(sys, cfg.nu, alpha, admissible_set(cfg), cost_spec(cfg, sys), cfg.optimizer);
      opt.add(r.report);
    }
    AdmissibleSet small = admissible_set(cfg);
    small.R = 0.5;
    for (double alpha : {0.0, 0.1}) {
      const ControlResult r = solve_control(sys, cfg.nu, alpha, small, cost_spec(cfg, sys), cfg.optimizer);
      opt.add(r.report);
    }
    const bool pass = opt.unconverged == 0 && opt.worst_vi >= -1e-8 && opt.ball_active > 0 && opt.worst_kkt <= 1e-6;
    report(8, "optimality conditions", pass,
           fmt("%d solves (%d ball-active, %d unconverged): min vi/scale = %.1e, max kkt = %.1e", opt.solves,
               opt.ball_active, opt.unconverged, opt.worst_vi, opt.worst_kkt),
           seconds_since(t0));
  }

  {  // 9
    t0 = Clock::now();
    const StateSweep s = run_state_sweep(sys, cfg.nu, u_bench, {0.2, 0.1, 0.05, 0.025, 0.0125}, cfg.state);
    bool dec = s.complete;
    for (std::size_t k = 1; k + 1 < s.records.size(); ++k) dec = dec && s.records[k].h1_diff < s.records[k - 1].h1_diff;
    const double first = s.records.front().h1_diff, last = s.records[s.records.size() - 2].h1_diff;
    report(9, "vanishing-alpha state convergence", dec && last <= 0.1 * first,
           fmt("|y_a - y_0|_H1: %.2e -> %.2e (ratio %.3f, strictly decreasing: %s)", first, last, last / first,
               dec ? "yes" : "no"),
           seconds_since(t0), 120);
  }

  {  // 10
    const auto& r = sweep.records;
    const std::size_t n = r.size();
    const double J0 = sweep.zero().J;
    bool pass = sweep.complete && n >= 4;
    bool all_conv = true;
    for (const auto& x : r) all_conv = all_conv && x.converged;
    pass = pass && all_conv;
    const bool last3 = r[n - 2].gap < r[n - 3].gap && r[n - 3].gap < r[n - 4].gap;
    const bool small = r[n - 2].gap <= 0.05 * J0;
    const bool u_trend = r[n - 2].u_dist < r[0].u_dist;
    const bool p_trend = r[n - 2].p_dist < r[0].p_dist;
    const bool cold = std::abs(J0 - sweep.J0_cold) <= 1e-8 * J0;
    pass = pass && last3 && small && u_trend && p_trend && cold;
    report(10, "stability of minima", pass,
           fmt("gaps %.2e, %.2e, %.2e; final/J0 = %.1e; u_dist %.1e -> %.1e; p_dist %.1e -> %.1e; J0 vs cold %.1e",
               r[n - 4].gap, r[n - 3].gap, r[n - 2].gap, r[n - 2].gap / J0, r[0].u_dist, r[n - 2].u_dist, r[0].p_dist,
               r[n - 2].p_dist, std::abs(J0 - sweep.J0_cold) / J0),
           sweep_secs, 900);
  }

  ConstantsReport consts;
  {  // 11
    t0 = Clock::now();
    consts = measure_constants(*w.d, w.basis, sys, {.seed = cfg.seed});
    int holds = 0, total = 0;
    double worst = 0;
    for (double nu : {1.0, 0.5}) {
      for (int k = 0; k < 20; ++k) {
        const StateProblem p = problem(nu, 0.1, gaussian(cfg.m_c, rng).normalized());
        const EstimateReport e = state_estimates(sys, solve_state(sys, p), p, consts);
        holds += e.holds;
        ++total;
        worst = std::max(worst, e.dnorm / e.bound);
      }
    }
    report(11, "energy estimate, measured kappa2", holds == total,
           fmt("%d/%d hold, max |Dy|/(kappa2 |u|/nu) = %.3f, kappa2 = S2 C_K/2 = %.4f", holds, total, worst,
               consts.kappa2),
           seconds_since(t0));
  }

  {  // 12
    t0 = Clock::now();
    DomainSpec circle = cfg.domain;
    circle.a = circle.b = 1;
    const Workbench wc = prepare(circle, 6);
    const Vec rot = interpolate_velocity(wc.d->mesh(), [](const Vec2& x) { return Vec2(-x(1), x(0)); });
    const double trace = check_curl_trace(*wc.d, rot).max;
    const double contrast = measure_constants(*wc.d, wc.basis, wc.sys, {.seed = cfg.seed}).C_K / consts.C_K;
    const IdentityRefinement ref =
        identity_refinement(cfg.domain, cfg.idlab.refinement, cfg.idlab.alpha, cfg.idlab.samples, cfg.idlab.modes, 3);
    bool dec = true;
    for (std::size_t k = 1; k < ref.reports.size(); ++k) {
      const auto &a = ref.reports[k - 1], &b = ref.reports[k];
      dec = dec && b.mismatch1 < a.mismatch1 && b.mismatch2a < a.mismatch2a && b.mismatch2b < a.mismatch2b &&
            b.mismatch_ab < a.mismatch_ab;
    }
    const double slope = std::min({ref.slope1, ref.slope2a, ref.slope2b, ref.slope_ab});
    const bool pass = trace <= 1e-10 && dec && slope >= 0.7 && contrast >= 10;
    report(12, "identity suite", pass,
           fmt("curl trace %.1e; slopes %.2f/%.2f/%.2f/%.2f (>= 0.7); C_K circle/ellipse = %.1e", trace, ref.slope1,
               ref.slope2a, ref.slope2b, ref.slope_ab, contrast),
           seconds_since(t0), 600);
  }

  {  // 13
    t0 = Clock::now();
    const std::string root = (std::filesystem::temp_directory_path() / "sgf-acceptance").string();
    std::filesystem::remove_all(root);
    RunConfig c = cfg;
    c.cache_dir = "";
    std::ostringstream log;
    run_command("sweep", c, root + "/a", log);
    run_command("sweep", c, root + "/b", log);
    bool same = true;
    for (const char* f : {"sweep.csv", "state_sweep.csv"})
      same = same && read_text(root + "/a/" + f) == read_text(root + "/b/" + f);
    std::filesystem::remove_all(root);
    report(13, "deterministic sweep output", same, same ? "sweep.csv and state_sweep.csv byte-identical" : "CSV differs",
           seconds_since(t0));
  }

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
