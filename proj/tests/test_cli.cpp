#include "support.hpp"

#include "sgf/commands.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace sgf;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config(text, "test.toml");
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind(0);
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text, "test.toml");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

RunConfig small(const std::string& name) {
  RunConfig c = parse_config("[domain]\nh = 0.35\n[model]\nm = 8\nm_c = 4\n");
  c.out = (std::filesystem::temp_directory_path() / ("sgf-test-" + name)).string();
  c.cache_dir = "";
  return c;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const RunConfig d = parse_config("");
  CHECK(d.m == 32);
  CHECK(d.m_c == 8);
  CHECK(d.domain.h_target == 0.11);
  CHECK(d.u.size() == 8);
  CHECK(d.u.norm() == doctest::Approx(3.0));
  CHECK(d.target.coefficients.size() == 32);

  const RunConfig c = parse_config("seed = 9\n[model]\nnu = 0.5\nm = 10\nalphas = [0.3, 0.0]\n[target]\nkind = \"zero\"\n");
  CHECK(c.seed == 9);
  CHECK(c.nu == 0.5);
  CHECK(c.m == 10);
  CHECK(c.alphas == std::vector<double>{0.3, 0.0});
  CHECK(c.target.kind == TargetSpec::Kind::zero);
  CHECK(c.target.coefficients.size() == 0);
}

TEST_CASE("config errors carry field paths") {
  CHECK(kind_of("[domain]\nh = -1\n") == ErrorKind::validation);
  CHECK(message_of("[domain]\nh = -1\n").find("domain.h") != std::string::npos);
  CHECK(message_of("[model]\nalphas = [0.1, 0.2]\n").find("model.alphas") != std::string::npos);
  CHECK(message_of("[model]\nm_c = 40\n").find("model.m_c") != std::string::npos);
  CHECK(message_of("[model]\nnu = \"one\"\n").find("model.nu") != std::string::npos);
  CHECK(message_of("[model]\nalphas = [0.1, \"x\"]\n").find("model.alphas[1]") != std::string::npos);
  CHECK(message_of("[domain]\ncolour = 1\n").find("domain.colour") != std::string::npos);
  CHECK(message_of("[target]\nkind = \"from-control\"\n").find("target.coefficients") != std::string::npos);
  CHECK(message_of("[domain]\nmesh = \"/no/such/file.msh\"\n").find("domain.mesh") != std::string::npos);
  CHECK(kind_of("[domain\n") == ErrorKind::parse);
  CHECK(message_of("a = \n").find("test.toml:1") != std::string::npos);
}

TEST_CASE("config echo round trips") {
  const RunConfig c = parse_config("seed = 4\n[model]\nm = 12\nm_c = 5\nalpha = 0.3\n[target]\nkind = \"from-control\"\ncoefficients = [1, 0.5]\n");
  const std::string toml = config_to_toml(c);
  const RunConfig back = parse_config(toml, "echo.toml");
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_to_json(parse_config(config_to_toml(RunConfig::defaults()))) == config_to_json(RunConfig::defaults()));
}

TEST_CASE("state subcommand with zero control") {
  RunConfig c = small("state");
  c.u = Vec::Zero(4);
  std::ostringstream log;
  const Json j = run_command("state", c, c.out, log);
  CHECK(j["iterations"] == 0);
  for (const auto& [k, v] : j["diagnostics"].items()) CHECK(v.get<double>() == 0.0);
  for (const char* f : {"config.json", "config.toml", "summary.json", "state.csv", "iterations.csv"})
    CHECK(std::filesystem::exists(c.out + "/" + f));
  // the echoed config reproduces the run configuration
  CHECK(config_to_json(load_config(c.out + "/config.toml")) == config_to_json(c));
  std::filesystem::remove_all(c.out);
}

TEST_CASE("sweep subcommand writes one row per alpha") {
  RunConfig c = small("sweep");
  c.alphas = {0.1, 0.05, 0.0};
  std::ostringstream log;
  run_command("sweep", c, c.out, log);
  const std::string csv = read_text(c.out + "/sweep.csv");
  CHECK(csv.rfind("alpha,J,gap,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  for (const char* f : {"state_sweep.csv", "gap.svg", "distances.svg"}) CHECK(std::filesystem::exists(c.out + "/" + f));
  c.alphas = {0.1, 0.05};
  CHECK_THROWS_AS(run_command("sweep", c, c.out, log), Error);
  CHECK_THROWS_AS(run_command("nonsense", small("x"), c.out, log), Error);
  std::filesystem::remove_all(c.out);
}

TEST_CASE("basis and tensor caches are reused") {
  RunConfig c = small("cache");
  c.cache_dir = c.out + "/cache";
  std::ostringstream log;
  run_command("eig", c, c.out + "/a", log);
  std::ostringstream log2;
  const Json j = run_command("eig", c, c.out + "/b", log2);
  CHECK(j["from_cache"] == true);
  CHECK(log2.str().find("tensor cached") != std::string::npos);
  CHECK(read_text(c.out + "/a/eigenvalues.csv") == read_text(c.out + "/b/eigenvalues.csv"));
  std::filesystem::remove_all(c.out);
}

TEST_CASE("command line exit codes") {
  const std::string exe = SGFCTL_PATH;
  const auto dir = std::filesystem::temp_directory_path() / "sgf-test-cli";
  std::filesystem::create_directories(dir);
  const std::string bad = (dir / "bad.toml").string();
  write_text(bad, "[model]\nnu = -1\n");
  const std::string broken = (dir / "broken.toml").string();
  write_text(broken, "[model\n");
  auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("mesh --config " + bad) == int(ErrorKind::validation));
  CHECK(run("mesh --config " + broken) == int(ErrorKind::parse));
  const std::string good = (dir / "good.toml").string();
  write_text(good, "[domain]\nh = 0.5\n[model]\nm = 4\nm_c = 2\n");
  CHECK(run("mesh --config " + good + " --out " + (dir / "mesh").string()) == 0);
  CHECK(std::filesystem::exists(dir / "mesh" / "mesh.msh"));
  CHECK(run("mesh --config " + good + " --nu -2 --out " + (dir / "m2").string()) == int(ErrorKind::validation));
  std::filesystem::remove_all(dir);
}
