#include "sgf/config.hpp"

#include "sgf/io.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <filesystem>
#include <set>
#include <sstream>

namespace sgf {

Vec benchmark_target(Index m) {
  Vec d = Vec::Zero(m);
  for (Index k = 0; k < std::min<Index>(m, 8); ++k) d(k) = 0.4 * (k % 3 == 0 ? 1.0 : -0.5) / double(1 + k);
  return d;
}

Vec benchmark_control(Index m_c) {
  Vec u(m_c);
  for (Index k = 0; k < m_c; ++k) u(k) = (k % 2 ? -1.0 : 1.0) / double(k + 1);
  return 3.0 * u / u.norm();
}

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.u = benchmark_control(c.m_c);
  c.target.coefficients = benchmark_target(c.m);
  c.direction = Vec::Ones(c.m_c) / std::sqrt(double(c.m_c));
  return c;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::validation, path + ": " + what);
}

void check_ladder(const std::string& path, const std::vector<double>& a) {
  if (a.empty()) fail(path, "must not be empty");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0) || !std::isfinite(a[i])) fail(path, "entries must be finite and >= 0");
    if (i > 0 && !(a[i] < a[i - 1])) fail(path, "must be strictly decreasing");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (domain.kind == DomainSpec::Kind::ellipse) {
    if (!(domain.a > 0)) fail("domain.a", "must be > 0");
    if (!(domain.b > 0)) fail("domain.b", "must be > 0");
  } else if (!std::filesystem::exists(domain.mesh_path)) {
    fail("domain.mesh", "file '" + domain.mesh_path + "' does not exist");
  }
  if (!(domain.h_target > 0)) fail("domain.h", "must be > 0");
  if (m < 1) fail("model.m", "must be >= 1");
  if (m_c < 1 || m_c > m) fail("model.m_c", "must satisfy 1 <= m_c <= m");
  if (!(nu > 0)) fail("model.nu", "must be > 0");
  if (!(alpha >= 0)) fail("model.alpha", "must be >= 0");
  check_ladder("model.alphas", alphas);
  if (!(R > 0)) fail("control.R", "must be > 0");
  if (!(lambda_reg >= 0)) fail("control.lambda_reg", "must be >= 0");
  if (u.size() > m_c) fail("state.u", "has more coefficients than model.m_c");
  if (!u.allFinite()) fail("state.u", "must be finite");
  switch (target.kind) {
    case TargetSpec::Kind::zero: break;
    case TargetSpec::Kind::coefficients:
      if (target.coefficients.size() > m) fail("target.coefficients", "has more coefficients than model.m");
      break;
    case TargetSpec::Kind::from_control:
      if (target.coefficients.size() > m_c) fail("target.coefficients", "has more coefficients than model.m_c");
      break;
  }
  if (rhos.empty()) fail("gateaux.rhos", "must not be empty");
  for (double r : rhos)
    if (!(r > 0)) fail("gateaux.rhos", "entries must be > 0");
  if (direction.size() > m_c || direction.size() == 0) fail("gateaux.direction", "needs 1..m_c coefficients");
  if (!(state.tol > 0)) fail("solver.tol", "must be > 0");
  if (state.max_newton < 1) fail("solver.max_newton", "must be >= 1");
  if (!(optimizer.tol > 0)) fail("optimizer.tol", "must be > 0");
  if (optimizer.max_iter < 1) fail("optimizer.max_iter", "must be >= 1");
  if (!(idlab.alpha >= 0)) fail("idlab.alpha", "must be >= 0");
  if (idlab.samples < 1) fail("idlab.samples", "must be >= 1");
  if (idlab.modes < 1 || idlab.modes > m) fail("idlab.modes", "must satisfy 1 <= modes <= model.m");
  if (idlab.refinement.size() < 2) fail("idlab.refinement", "needs at least two mesh sizes");
  for (double h : idlab.refinement)
    if (!(h > 0)) fail("idlab.refinement", "entries must be > 0");
  if (workers < 1) fail("workers", "must be >= 1");
  if (out.empty()) fail("output", "must not be empty");
}

namespace {

/// Reads one table, remembering which keys were consumed.
class Reader {
 public:
  Reader(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const toml::node* get(const std::string& key) {
    seen_.insert(key);
    return t_ ? t_->get(key) : nullptr;
  }

  void number(const std::string& key, double& v) {
    if (const auto* n = get(key)) {
      if (auto x = n->value<double>()) v = *x;
      else fail(at(key), "expected a number");
    }
  }
  template <typename I>
  void integer(const std::string& key, I& v) {
    if (const auto* n = get(key)) {
      if (auto x = n->value<std::int64_t>()) v = static_cast<I>(*x);
      else fail(at(key), "expected an integer");
    }
  }
  void text(const std::string& key, std::string& v) {
    if (const auto* n = get(key)) {
      if (auto x = n->value<std::string>()) v = *x;
      else fail(at(key), "expected a string");
    }
  }
  bool numbers(const std::string& key, std::vector<double>& v) {
    const auto* n = get(key);
    if (!n) return false;
    const auto* arr = n->as_array();
    if (!arr) fail(at(key), "expected an array of numbers");
    v.clear();
    for (std::size_t i = 0; i < arr->size(); ++i) {
      auto x = (*arr)[i].value<double>();
      if (!x) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      v.push_back(*x);
    }
    return true;
  }
  bool vector(const std::string& key, Vec& v) {
    std::vector<double> tmp;
    if (!numbers(key, tmp)) return false;
    v = Eigen::Map<const Vec>(tmp.data(), static_cast<Index>(tmp.size()));
    return true;
  }
  Reader sub(const std::string& key) {
    const auto* n = get(key);
    if (n && !n->is_table()) fail(at(key), "expected a table");
    return Reader(n ? n->as_table() : nullptr, at(key));
  }
  void finish() const {
    if (!t_) return;
    for (const auto& [k, v] : *t_)
      if (!seen_.count(std::string(k.str()))) fail(at(std::string(k.str())), "unknown key");
  }

 private:
  const toml::table* t_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw Error(ErrorKind::parse, os.str());
  }
  RunConfig c = RunConfig::defaults();
  Reader top(&root, "");
  top.integer("seed", c.seed);
  top.integer("workers", c.workers);
  top.text("output", c.out);
  top.text("cache", c.cache_dir);

  Reader dom = top.sub("domain");
  dom.number("a", c.domain.a);
  dom.number("b", c.domain.b);
  dom.number("h", c.domain.h_target);
  std::string mesh;
  dom.text("mesh", mesh);
  if (!mesh.empty()) {
    c.domain.kind = DomainSpec::Kind::external_mesh;
    c.domain.mesh_path = mesh;
  }
  dom.finish();

  Reader model = top.sub("model");
  const Index m0 = c.m, mc0 = c.m_c;
  model.integer("m", c.m);
  model.integer("m_c", c.m_c);
  model.number("nu", c.nu);
  model.number("alpha", c.alpha);
  model.numbers("alphas", c.alphas);
  model.finish();

  Reader ctl = top.sub("control");
  ctl.number("R", c.R);
  ctl.number("lambda_reg", c.lambda_reg);
  ctl.finish();

  Reader st = top.sub("state");
  if (!st.vector("u", c.u) && c.m_c != mc0) c.u = benchmark_control(std::min<Index>(c.m_c, mc0));
  st.finish();

  Reader tg = top.sub("target");
  std::string kind = "coefficients";
  tg.text("kind", kind);
  if (kind == "zero") {
    c.target.kind = TargetSpec::Kind::zero;
    c.target.coefficients.resize(0);
  } else if (kind == "coefficients" || kind == "from-control") {
    c.target.kind = kind == "coefficients" ? TargetSpec::Kind::coefficients : TargetSpec::Kind::from_control;
    if (!tg.vector("coefficients", c.target.coefficients)) {
      if (c.target.kind == TargetSpec::Kind::from_control) fail("target.coefficients", "required for from-control");
      if (c.m != m0) c.target.coefficients = benchmark_target(c.m);
    }
  } else {
    fail("target.kind", "expected one of zero, coefficients, from-control");
  }
  tg.finish();

  Reader gt = top.sub("gateaux");
  gt.numbers("rhos", c.rhos);
  if (!gt.vector("direction", c.direction) && c.m_c != mc0)
    c.direction = Vec::Ones(c.m_c) / std::sqrt(double(c.m_c));
  gt.finish();

  Reader sol = top.sub("solver");
  sol.number("tol", c.state.tol);
  sol.integer("max_newton", c.state.max_newton);
  sol.integer("max_picard", c.state.max_picard);
  sol.integer("continuation_steps", c.state.continuation_steps);
  sol.finish();
  c.optimizer.state = c.state;

  Reader opt = top.sub("optimizer");
  opt.number("tol", c.optimizer.tol);
  opt.integer("max_iter", c.optimizer.max_iter);
  opt.number("c1", c.optimizer.c1);
  opt.number("initial_step", c.optimizer.initial_step);
  opt.integer("max_backtracks", c.optimizer.max_backtracks);
  opt.finish();

  Reader lab = top.sub("idlab");
  c.idlab.modes = std::min(c.idlab.modes, c.m);
  lab.number("alpha", c.idlab.alpha);
  lab.integer("samples", c.idlab.samples);
  lab.integer("modes", c.idlab.modes);
  lab.numbers("refinement", c.idlab.refinement);
  lab.integer("rm2_samples", c.idlab.rm2_samples);
  lab.integer("sigma_samples", c.idlab.sigma_samples);
  lab.finish();

  top.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::io, "config file '" + path + "' does not exist");
  return parse_config(read_text(path), path);
}

namespace {

std::vector<double> as_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

const char* kind_name(TargetSpec::Kind k) {
  switch (k) {
    case TargetSpec::Kind::zero: return "zero";
    case TargetSpec::Kind::coefficients: return "coefficients";
    case TargetSpec::Kind::from_control: return "from-control";
  }
  return "";
}

}  // namespace

Json config_to_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["output"] = c.out;
  j["cache"] = c.cache_dir;
  Json& dom = j["domain"];
  dom["a"] = c.domain.a;
  dom["b"] = c.domain.b;
  dom["h"] = c.domain.h_target;
  dom["mesh"] = c.domain.kind == DomainSpec::Kind::external_mesh ? c.domain.mesh_path : "";
  Json& model = j["model"];
  model["m"] = c.m;
  model["m_c"] = c.m_c;
  model["nu"] = c.nu;
  model["alpha"] = c.alpha;
  model["alphas"] = c.alphas;
  j["control"] = {{"R", c.R}, {"lambda_reg", c.lambda_reg}};
  j["state"] = {{"u", as_std(c.u)}};
  j["target"] = {{"kind", kind_name(c.target.kind)}, {"coefficients", as_std(c.target.coefficients)}};
  j["gateaux"] = {{"rhos", c.rhos}, {"direction", as_std(c.direction)}};
  j["solver"] = {{"tol", c.state.tol},
                 {"max_newton", c.state.max_newton},
                 {"max_picard", c.state.max_picard},
                 {"continuation_steps", c.state.continuation_steps}};
  j["optimizer"] = {{"tol", c.optimizer.tol},
                    {"max_iter", c.optimizer.max_iter},
                    {"c1", c.optimizer.c1},
                    {"initial_step", c.optimizer.initial_step},
                    {"max_backtracks", c.optimizer.max_backtracks}};
  j["idlab"] = {{"alpha", c.idlab.alpha},
                {"samples", c.idlab.samples},
                {"modes", c.idlab.modes},
                {"refinement", c.idlab.refinement},
                {"rm2_samples", c.idlab.rm2_samples},
                {"sigma_samples", c.idlab.sigma_samples}};
  return j;
}

namespace {

toml::array to_array(const std::vector<double>& v) {
  toml::array a;
  for (double x : v) a.push_back(x);
  return a;
}

toml::table to_table(const Json& j) {
  toml::table t;
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) t.insert_or_assign(k, to_table(v));
    else if (v.is_array()) t.insert_or_assign(k, to_array(v.get<std::vector<double>>()));
    else if (v.is_string()) t.insert_or_assign(k, v.get<std::string>());
    else if (v.is_number_integer()) t.insert_or_assign(k, v.get<std::int64_t>());
    else t.insert_or_assign(k, v.get<double>());
  }
  return t;
}

}  // namespace

std::string config_to_toml(const RunConfig& c) {
  Json j = config_to_json(c);
  // an empty mesh path means the generated ellipse
  if (j["domain"]["mesh"] == "") j["domain"].erase("mesh");
  std::ostringstream os;
  os << toml::toml_formatter(to_table(j), toml::format_flags::none);
  os << "\n";
  return os.str();
}

AdmissibleSet admissible_set(const RunConfig& c) {
  AdmissibleSet s;
  s.m_c = c.m_c;
  s.R = c.R;
  return s;
}

CostSpec cost_spec(const RunConfig& c, const ReducedSystem& sys) {
  CostSpec spec;
  spec.lambda_reg = c.lambda_reg;
  spec.d = Vec::Zero(sys.m);
  switch (c.target.kind) {
    case TargetSpec::Kind::zero: break;
    case TargetSpec::Kind::coefficients: {
      const Index n = std::min(sys.m, c.target.coefficients.size());
      spec.d.head(n) = c.target.coefficients.head(n);
      break;
    }
    case TargetSpec::Kind::from_control: {
      StateProblem p;
      p.nu = c.nu;
      p.alpha = c.alpha;
      p.u = c.target.coefficients;
      p.opts = c.state;
      spec.d = solve_state(sys, p).eta;
      break;
    }
  }
  return spec;
}

}  // namespace sgf
