#include "sgf/commands.hpp"

#include "sgf/idlab.hpp"
#include "sgf/pipeline.hpp"

#include <future>
#include <ostream>

namespace sgf {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"mesh", "eig", "state", "gateaux", "control", "sweep", "idlab", "constants"};
  return names;
}

namespace {

struct Run {
  const RunConfig& cfg;
  std::string dir;
  std::ostream& log;

  std::string path(const std::string& name) const { return dir + "/" + name; }

  Workbench bench(const DomainSpec& domain, Index m) const {
    log << "preparing basis (m = " << m << ")\n";
    Workbench w = prepare(domain, m, cfg.cache_dir);
    log << "  basis " << (w.basis_from_cache ? "cached" : "computed") << ", tensor "
        << (w.tensor_from_cache ? "cached" : "computed") << "\n";
    return w;
  }
  Workbench bench() const { return bench(cfg.domain, cfg.m); }

  StateProblem problem(double alpha, const Vec& u) const {
    StateProblem p;
    p.nu = cfg.nu;
    p.alpha = alpha;
    p.u = u;
    p.opts = cfg.state;
    return p;
  }
};

Json mesh_json(const Discretization& d) {
  const Mesh& m = d.mesh();
  Json j;
  j["hash"] = hex64(d.mesh_hash());
  j["nodes"] = m.num_nodes();
  j["triangles"] = m.num_triangles();
  j["vertices"] = m.num_vertices();
  j["boundary_nodes"] = m.num_boundary_nodes();
  j["max_edge"] = m.max_edge_length();
  j["min_jacobian"] = m.min_jacobian();
  j["velocity_dofs"] = d.space().n_v();
  j["area"] = d.ops().area;
  return j;
}

Json constants_json(const ConstantsReport& c) {
  return {{"S2", c.S2},         {"S2_modal", c.S2_modal}, {"S4_lower", c.S4_lower},
          {"S4_is_lower_bound", true}, {"C_K", c.C_K}, {"korn_reliable", c.korn_reliable},
          {"kappa1", c.kappa1}, {"kappa2", c.kappa2},     {"mesh_hash", hex64(c.mesh_hash)},
          {"n_v", c.n_v},       {"m", c.m}};
}

Json diagnostics_json(const StateDiagnostics& g) {
  return {{"dnorm", g.dnorm}, {"curl_sigma", g.curl_sigma}, {"h1", g.h1},
          {"h3_proxy", g.h3_proxy}, {"q", g.q}, {"energy_gap", g.energy_gap}};
}

Json cmd_mesh(const Run& r) {
  const auto d = Discretization::build(r.cfg.domain);
  write_msh(d->mesh(), r.path("mesh.msh"));
  const Json j = mesh_json(*d);
  CsvTable t({"quantity", "value"});
  for (const auto& [k, v] : j.items())
    t.add_row({k, v.is_string() ? CsvTable::Cell(v.get<std::string>()) : CsvTable::Cell(v.get<double>())});
  t.write(r.path("mesh.csv"));
  PlotSeries s{"boundary", {}, {}};
  for (int n : d->mesh().boundary_loop()) {
    s.x.push_back(d->mesh().nodes(0, n));
    s.y.push_back(d->mesh().nodes(1, n));
  }
  s.x.push_back(s.x.front());
  s.y.push_back(s.y.front());
  write_text(r.path("boundary.svg"), svg_line_plot({"domain boundary", "x1", "x2"}, {s}));
  return {{"mesh", j}};
}

Json cmd_eig(const Run& r) {
  const Workbench w = r.bench();
  CsvTable t({"j", "lambda"});
  PlotSeries s{"lambda_j", {}, {}};
  for (Index j = 0; j < w.basis.m; ++j) {
    t.add_row({static_cast<long long>(j + 1), w.basis.lambda(j)});
    s.x.push_back(double(j + 1));
    s.y.push_back(w.basis.lambda(j));
  }
  t.write(r.path("eigenvalues.csv"));
  write_text(r.path("eigenvalues.svg"), svg_line_plot({"slip-Stokes eigenvalues", "j", "lambda_j"}, {s}));
  return {{"mesh", mesh_json(*w.d)},
          {"m", w.basis.m},
          {"lambda", to_json(w.basis.lambda)},
          {"max_residual", w.basis.max_residual},
          {"from_cache", w.basis_from_cache}};
}

Json cmd_state(const Run& r) {
  const Workbench w = r.bench();
  const StateProblem p = r.problem(r.cfg.alpha, r.cfg.u);
  const StateSolution s = solve_state(w.sys, p);
  const ConstantsReport consts = measure_constants(*w.d, w.basis, w.sys, {.seed = r.cfg.seed});
  const EstimateReport est = state_estimates(w.sys, s, p, consts);
  const UniquenessReport uq = uniqueness_monitor(w.sys, s, p);
  const double transport = transport_residual(*w.d, w.basis, w.sys, s, p);

  const Vec u = p.u_full(w.sys.m);
  CsvTable t({"k", "lambda", "u", "eta"});
  for (Index k = 0; k < w.sys.m; ++k) t.add_row({static_cast<long long>(k + 1), w.sys.lambda(k), u(k), s.eta(k)});
  t.write(r.path("state.csv"));
  CsvTable it({"iter", "kind", "residual", "step"});
  PlotSeries res{"residual", {}, {}};
  for (const auto& x : s.trace) {
    it.add_row({static_cast<long long>(x.iter), x.kind, x.residual, x.step});
    if (x.residual > 0) {
      res.x.push_back(double(x.iter));
      res.y.push_back(x.residual);
    }
  }
  it.write(r.path("iterations.csv"));
  PlotSpec ps{"state solver residual", "iteration", "max |R|"};
  ps.logy = true;
  if (!res.x.empty()) write_text(r.path("residual.svg"), svg_line_plot(ps, {res}));

  return {{"alpha", p.alpha},
          {"nu", p.nu},
          {"method", s.method},
          {"iterations", s.iterations},
          {"residual", s.residual},
          {"eta", to_json(s.eta)},
          {"diagnostics", diagnostics_json(s.diag)},
          {"estimate", {{"kappa2", est.kappa2}, {"bound", est.bound}, {"dnorm", est.dnorm}, {"holds", est.holds},
                        {"ratio_curl", est.ratio_curl}, {"ratio_h3", est.ratio_h3}}},
          {"uniqueness", {{"q", uq.q}, {"sigma_min", uq.sigma_min}}},
          {"transport_residual", transport},
          {"constants", constants_json(consts)}};
}

Json cmd_gateaux(const Run& r) {
  const Workbench w = r.bench();
  const StateProblem p = r.problem(r.cfg.alpha, r.cfg.u);
  const GateauxReport g = gateaux_check(w.sys, p, r.cfg.direction, r.cfg.rhos, cost_spec(r.cfg, w.sys));
  CsvTable t({"rho", "dnorm_r", "cost_remainder", "solved"});
  PlotSeries a{"|D r_rho|", {}, {}}, b{"cost remainder", {}, {}};
  for (const auto& x : g.rows) {
    t.add_row({x.rho, x.dnorm_r, x.cost_remainder, static_cast<long long>(x.solved)});
    if (x.dnorm_r > 0) {
      a.x.push_back(x.rho);
      a.y.push_back(x.dnorm_r);
    }
    if (x.cost_remainder > 0) {
      b.x.push_back(x.rho);
      b.y.push_back(x.cost_remainder);
    }
  }
  t.write(r.path("gateaux.csv"));
  PlotSpec ps{"Taylor remainders", "rho", "remainder"};
  ps.logx = ps.logy = true;
  std::vector<PlotSeries> series;
  if (!a.x.empty()) series.push_back(a);
  if (!b.x.empty()) series.push_back(b);
  if (!series.empty()) write_text(r.path("gateaux.svg"), svg_line_plot(ps, series));
  return {{"alpha", p.alpha}, {"slope_r", g.slope_r}, {"slope_cost", g.slope_cost}, {"dJ", g.dJ},
          {"complete", g.complete}};
}

Json report_json(const OptimalityReport& o) {
  return {{"J", o.J},
          {"vi_sampled", o.vi_sampled},
          {"vi_exact", o.vi_exact},
          {"vi_scale", o.vi_scale},
          {"ball_active", o.ball_active},
          {"mu", o.mu},
          {"kkt_residual", o.kkt_residual},
          {"fixed_point", o.fixed_point},
          {"q", o.q},
          {"outside_certified", o.outside_certified},
          {"iterations", o.iterations},
          {"converged", o.converged}};
}

Json cmd_control(const Run& r) {
  const Workbench w = r.bench();
  const CostSpec spec = cost_spec(r.cfg, w.sys);
  ControlOptions opts = r.cfg.optimizer;
  opts.state = r.cfg.state;
  const ControlResult c = solve_control(w.sys, r.cfg.nu, r.cfg.alpha, admissible_set(r.cfg), spec, opts);
  trace_table(c.report).write(r.path("trace.csv"));
  CsvTable t({"k", "u", "eta", "p", "d"});
  Vec u = Vec::Zero(w.sys.m);
  u.head(c.u.size()) = c.u;
  for (Index k = 0; k < w.sys.m; ++k) t.add_row({static_cast<long long>(k + 1), u(k), c.eta(k), c.p(k), spec.d(k)});
  t.write(r.path("control.csv"));
  PlotSeries J{"J", {}, {}}, vi{"|vi|", {}, {}};
  for (const auto& x : c.report.trace) {
    J.x.push_back(double(x.iter));
    J.y.push_back(x.J);
    if (std::abs(x.vi) > 0) {
      vi.x.push_back(double(x.iter));
      vi.y.push_back(std::abs(x.vi));
    }
  }
  PlotSpec ps{"projected gradient descent", "iteration", "value"};
  ps.logy = true;
  std::vector<PlotSeries> series{J};
  if (!vi.x.empty()) series.push_back(vi);
  write_text(r.path("convergence.svg"), svg_line_plot(ps, series));
  Json j = report_json(c.report);
  j["alpha"] = r.cfg.alpha;
  j["u"] = to_json(c.u);
  return j;
}

Json cmd_sweep(const Run& r) {
  if (r.cfg.alphas.back() != 0.0) throw Error(ErrorKind::validation, "model.alphas: must end with 0 for sweeps");
  const Workbench w = r.bench();
  r.log << "state sweep\n";
  const StateSweep ss = run_state_sweep(w.sys, r.cfg.nu, r.cfg.u, r.cfg.alphas, r.cfg.state);
  state_sweep_table(ss).write(r.path("state_sweep.csv"));
  r.log << "control sweep\n";
  ControlOptions opts = r.cfg.optimizer;
  opts.state = r.cfg.state;
  const SweepResult sw = run_control_sweep(w.sys, r.cfg.nu, admissible_set(r.cfg), cost_spec(r.cfg, w.sys),
                                           r.cfg.alphas, opts);
  sweep_table(sw).write(r.path("sweep.csv"));

  PlotSeries gap{"|J_a - J_0|", {}, {}}, ud{"|u_a - u_0|", {}, {}}, yd{"|y_a - y_0|_H1", {}, {}},
      pd{"|p_a - p_0|", {}, {}}, sd{"state |y_a - y_0|_H1", {}, {}};
  auto push = [](PlotSeries& s, double x, double y) {
    if (x > 0 && y > 0) {
      s.x.push_back(x);
      s.y.push_back(y);
    }
  };
  for (const auto& x : sw.records) {
    push(gap, x.alpha, x.gap);
    push(ud, x.alpha, x.u_dist);
    push(yd, x.alpha, x.y_dist);
    push(pd, x.alpha, x.p_dist);
  }
  for (const auto& x : ss.records) push(sd, x.alpha, x.h1_diff);
  PlotSpec ps{"vanishing alpha", "alpha", "value"};
  ps.logx = ps.logy = true;
  if (!gap.x.empty()) write_text(r.path("gap.svg"), svg_line_plot(ps, {gap}));
  std::vector<PlotSeries> series;
  for (const auto* s : {&ud, &yd, &pd, &sd})
    if (!s->x.empty()) series.push_back(*s);
  if (!series.empty()) write_text(r.path("distances.svg"), svg_line_plot(ps, series));

  Json recs = Json::array();
  for (const auto& x : sw.records)
    recs.push_back({{"alpha", x.alpha}, {"J", x.J}, {"gap", x.gap}, {"converged", x.converged}, {"q", x.q}});
  return {{"J0", sw.zero().J}, {"J0_cold", sw.J0_cold}, {"complete", sw.complete && ss.complete},
          {"records", recs}};
}

Json cmd_constants(const Run& r) {
  const Workbench w = r.bench();
  const ConstantsReport c = measure_constants(*w.d, w.basis, w.sys, {.seed = r.cfg.seed});
  const Json j = constants_json(c);
  CsvTable t({"constant", "value"});
  for (const char* k : {"S2", "S2_modal", "S4_lower", "C_K", "kappa1", "kappa2"}) t.add_row({std::string(k), j[k].get<double>()});
  t.write(r.path("constants.csv"));
  return j;
}

Json identity_json(const IdentityReport& x) {
  return {{"alpha", x.alpha}, {"mismatch1", x.mismatch1}, {"mismatch2a", x.mismatch2a},
          {"mismatch2b", x.mismatch2b}, {"mismatch_ab", x.mismatch_ab}, {"self_max", x.self_max}};
}

Json cmd_idlab(const Run& r) {
  const IdlabConfig& lab = r.cfg.idlab;
  const Workbench w = r.bench();
  const std::uint64_t seed = r.cfg.seed;
  r.log << "constants\n";
  const ConstantsReport consts = measure_constants(*w.d, w.basis, w.sys, {.seed = seed});
  DomainSpec circle = r.cfg.domain;
  circle.kind = DomainSpec::Kind::ellipse;
  circle.a = circle.b = 1.0;
  const Workbench wc = r.bench(circle, lab.modes);
  const ConstantsReport cc = measure_constants(*wc.d, wc.basis, wc.sys, {.seed = seed});

  r.log << "curl trace\n";
  const CurlTraceReport trace = check_curl_trace(*w.d, w.basis.E.col(0));
  const Vec rot = interpolate_velocity(wc.d->mesh(), [](const Vec2& x) { return Vec2(-x(1), x(0)); });
  const CurlTraceReport trace_rot = check_curl_trace(*wc.d, rot);

  r.log << "identities\n";
  const IdentityReport id0 = check_trilinear_identities(*w.d, w.basis, 0.0, lab.samples, lab.modes, seed + 2);
  const IdentityReport ida = check_trilinear_identities(*w.d, w.basis, lab.alpha, lab.samples, lab.modes, seed + 2);
  CsvTable samples({"alpha", "sample", "id1_lhs", "id1_rhs", "id2_lhs", "id2_route_a", "id2_route_b"});
  for (const auto* rep : {&id0, &ida})
    for (std::size_t k = 0; k < rep->samples.size(); ++k) {
      const auto& s = rep->samples[k];
      samples.add_row({rep->alpha, static_cast<long long>(k), s.id1_lhs, s.id1_rhs, s.id2_lhs, s.id2_a, s.id2_b});
    }
  samples.write(r.path("identities.csv"));

  r.log << "refinement study\n";
  IdentityRefinement ref;
  if (r.cfg.workers > 1) {
    // one mesh per task, results gathered in order
    std::vector<std::future<IdentityRefinement>> jobs;
    for (double h : lab.refinement) {
      jobs.push_back(std::async(std::launch::async, [&, h] {
        return identity_refinement(r.cfg.domain, {h}, lab.alpha, lab.samples, lab.modes, seed + 2);
      }));
    }
    std::vector<double> m1, m2a, m2b, mab;
    for (auto& j : jobs) {
      const IdentityRefinement one = j.get();
      ref.h.push_back(one.h[0]);
      ref.reports.push_back(one.reports[0]);
      m1.push_back(one.reports[0].mismatch1);
      m2a.push_back(one.reports[0].mismatch2a);
      m2b.push_back(one.reports[0].mismatch2b);
      mab.push_back(one.reports[0].mismatch_ab);
    }
    ref.slope1 = loglog_slope(ref.h, m1);
    ref.slope2a = loglog_slope(ref.h, m2a);
    ref.slope2b = loglog_slope(ref.h, m2b);
    ref.slope_ab = loglog_slope(ref.h, mab);
  } else {
    ref = identity_refinement(r.cfg.domain, lab.refinement, lab.alpha, lab.samples, lab.modes, seed + 2);
  }
  CsvTable rt({"h", "mismatch1", "mismatch2a", "mismatch2b", "mismatch_ab"});
  PlotSeries s1{"identity 1", {}, {}}, s2{"identity 2 (route a)", {}, {}}, s3{"identity 2 (route b)", {}, {}};
  for (std::size_t k = 0; k < ref.h.size(); ++k) {
    const auto& x = ref.reports[k];
    rt.add_row({ref.h[k], x.mismatch1, x.mismatch2a, x.mismatch2b, x.mismatch_ab});
    s1.x.push_back(ref.h[k]);
    s1.y.push_back(x.mismatch1);
    s2.x.push_back(ref.h[k]);
    s2.y.push_back(x.mismatch2a);
    s3.x.push_back(ref.h[k]);
    s3.y.push_back(x.mismatch2b);
  }
  rt.write(r.path("refinement.csv"));
  PlotSpec ps{"identity mismatch under refinement", "h", "relative mismatch"};
  ps.logx = ps.logy = true;
  write_text(r.path("refinement.svg"), svg_line_plot(ps, {s1, s2, s3}));

  r.log << "bounds\n";
  const Rm2Report rm = check_rm2_bound(w.sys, consts, lab.alpha, lab.rm2_samples, seed + 4);
  const auto sig = check_sigma_psigma(*w.d, w.basis, w.sys, {0.0, 0.05, 0.1, 0.2}, lab.sigma_samples, seed + 6);
  CsvTable st({"alpha", "max_ratio", "min_ratio", "projection_error", "equiv_min", "equiv_max"});
  for (const auto& x : sig) st.add_row({x.alpha, x.max_ratio, x.min_ratio, x.projection_error, x.equiv_min, x.equiv_max});
  st.write(r.path("sigma.csv"));

  Json refj = Json::array();
  for (std::size_t k = 0; k < ref.h.size(); ++k) {
    Json e = identity_json(ref.reports[k]);
    e["h"] = ref.h[k];
    refj.push_back(e);
  }
  return {{"constants", constants_json(consts)},
          {"circle_constants", constants_json(cc)},
          {"korn_contrast", cc.C_K / consts.C_K},
          {"curl_trace_e1", {{"max", trace.max}, {"rms", trace.rms}}},
          {"curl_trace_rotation_circle", {{"max", trace_rot.max}, {"rms", trace_rot.rms}}},
          {"identities_alpha0", identity_json(id0)},
          {"identities_alpha", identity_json(ida)},
          {"refinement", refj},
          {"slopes", {{"identity1", ref.slope1}, {"identity2a", ref.slope2a}, {"identity2b", ref.slope2b},
                      {"cross_route", ref.slope_ab}}},
          {"rm2", {{"safety", rm.safety}, {"max_ratio0", rm.max_ratio0}, {"holds0", rm.holds0},
                   {"max_ratio_alpha", rm.max_ratio_alpha}}}};
}

}  // namespace

Json run_command(const std::string& name, const RunConfig& cfg, const std::string& dir, std::ostream& log) {
  cfg.validate();
  ensure_directory(dir);
  write_json(dir + "/config.json", config_to_json(cfg));
  write_text(dir + "/config.toml", config_to_toml(cfg));
  const Run r{cfg, dir, log};
  Json j;
  if (name == "mesh") j = cmd_mesh(r);
  else if (name == "eig") j = cmd_eig(r);
  else if (name == "state") j = cmd_state(r);
  else if (name == "gateaux") j = cmd_gateaux(r);
  else if (name == "control") j = cmd_control(r);
  else if (name == "sweep") j = cmd_sweep(r);
  else if (name == "idlab") j = cmd_idlab(r);
  else if (name == "constants") j = cmd_constants(r);
  else throw Error(ErrorKind::validation, "unknown subcommand '" + name + "'");
  Json summary;
  summary["command"] = name;
  summary["result"] = j;
  write_json(dir + "/summary.json", summary);
  return j;
}

}  // namespace sgf
