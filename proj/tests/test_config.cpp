#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "o3v/config.hpp"
#include "o3v/errors.hpp"
#include "o3v/io.hpp"

using namespace o3v;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string pointer_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

json minimal() {
  return json::parse(R"({"grid": [32, 32], "epsilon": 0.3,
                         "vortices": [{"x": 1.0, "y": 2.0, "m": 1, "sign": 1}]})");
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("o3v_test_" + std::to_string(::getpid())) / name;
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults and basic fields") {
  const ExperimentConfig c = parse_config(minimal());
  CHECK(c.domain.n1() == 32);
  CHECK(c.domain.L1() == doctest::Approx(2 * M_PI));
  CHECK(c.tau == 1.0);
  CHECK(c.vortices.N1() == 1);
  CHECK(c.solver == "newton");
  CHECK(c.target_epsilon() == 0.3);
  CHECK(c.solve_schedule().size() == 1);
}

TEST_CASE("continuation schedule follows the config") {
  json j = minimal();
  j["epsilon"] = 0.1;
  const auto sched = parse_config(j).solve_schedule();
  CHECK(sched.front() == 0.25);
  CHECK(sched.back() == 0.1);
  j["continuation"] = {{"enabled", false}};
  CHECK(parse_config(j).solve_schedule() == std::vector<double>{0.1});
  j.erase("epsilon");
  j["epsilon_schedule"] = {0.3, 0.2};
  CHECK(parse_config(j).solve_schedule() == std::vector<double>{0.3, 0.2});
}

TEST_CASE("schema violations report the offending pointer") {
  json j = minimal();
  j["bogus"] = 1;
  CHECK(pointer_of(j) == "/bogus");

  j = minimal();
  j["vortices"][0]["q"] = 1;
  CHECK(pointer_of(j) == "/vortices/0/q");

  j = minimal();
  j["vortices"][0]["sign"] = 0;
  CHECK(pointer_of(j) == "/vortices/0/sign");

  j = minimal();
  j["vortices"][0]["x"] = 7.0;
  CHECK(pointer_of(j) == "/vortices/0/x");

  j = minimal();
  j["grid"] = {32, 31};
  CHECK(pointer_of(j) == "/grid/1");

  j = minimal();
  j["tau"] = "one";
  CHECK(pointer_of(j) == "/tau");

  j = minimal();
  j["tau"] = -1.0;
  CHECK(pointer_of(j) == "/tau");

  j = minimal();
  j["solver"] = "multigrid";
  CHECK(pointer_of(j) == "/solver");

  j = minimal();
  j["epsilon_schedule"] = {0.2};
  CHECK(pointer_of(j) == "/epsilon_schedule");

  j = minimal();
  j["sweep"] = {{"epsilons", {0.2, 0.3}}};
  CHECK(pointer_of(j) == "/sweep/epsilons/1");

  j = minimal();
  j["tolerances"] = {{"newton_tol", 1e-9}};
  CHECK(pointer_of(j) == "/tolerances/newton_tol");

  j = minimal();
  j["vortices"].push_back({{"x", 1.0}, {"y", 2.0}});
  CHECK(pointer_of(j) == "/vortices");

  j = minimal();
  j["output"] = {{"prefix", "a/b"}};
  CHECK(pointer_of(j) == "/output/prefix");
}

TEST_CASE("a torus solve needs an epsilon") {
  json j = minimal();
  j.erase("epsilon");
  const ExperimentConfig c = parse_config(j);
  CHECK_THROWS_AS(c.target_epsilon(), ConfigError);
}

TEST_CASE("overrides") {
  json j = minimal();
  apply_override(j, "tau=2");
  CHECK(j["tau"] == 2);
  apply_override(j, "sweep.steps=5");
  CHECK(j["sweep"]["steps"] == 5);
  apply_override(j, "/vortices/0/x=0.5");
  CHECK(j["vortices"][0]["x"] == 0.5);
  apply_override(j, "vortices.0.m=2");
  CHECK(j["vortices"][0]["m"] == 2);
  apply_override(j, "solver=monotone");
  CHECK(j["solver"] == "monotone");
  apply_override(j, "sweep.epsilons=[0.2,0.1]");
  CHECK(j["sweep"]["epsilons"].size() == 2);
  const ExperimentConfig c = parse_config(j);
  CHECK(c.tau == 2.0);
  CHECK(c.sweep.steps == 5);
  CHECK(c.vortices.positive()[0].multiplicity == 2);
  CHECK(c.sweep_epsilons() == std::vector<double>{0.2, 0.1});

  CHECK_THROWS_AS(apply_override(j, "tau"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "a..b=1"), ConfigError);
  apply_override(j, "typo=1");
  CHECK(pointer_of(j) == "/typo");
}

TEST_CASE("json output uses 17 significant digits") {
  io::json j;
  j["x"] = 0.1;
  j["n"] = 3;
  j["one"] = 1.0;
  j["bad"] = std::nan("");
  j["s"] = "a\"b";
  const std::string s = io::dump_json(j, -1);
  CHECK(s == "{\"x\":0.10000000000000001,\"n\":3,\"one\":1.0,\"bad\":null,\"s\":\"a\\\"b\"}\n");
  CHECK(io::format_number(1.0 / 3.0) == "0.33333333333333331");
  CHECK(std::stod(io::format_number(M_PI)) == M_PI);
  CHECK(io::format_number(-INFINITY) == "-inf");
  const io::json back = io::json::parse(io::dump_json(j));
  CHECK(back["x"].get<double>() == 0.1);
}

TEST_CASE("atomic writes replace the target and leave no temporaries") {
  const fs::path p = scratch("sub/dir/file.txt");
  io::write_atomic(p, "first");
  io::write_atomic(p, "second");
  CHECK(slurp(p) == "second");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(p.parent_path())) ++entries;
  CHECK(entries == 1);
}

TEST_CASE("radial CSV exports") {
  const RadialSolution sol = integrate_radial(-1.0, 0.0, 1.0, 1e3);
  const std::string csv = io::profile_csv(sol);
  CHECK(csv.rfind("r,u,du_dr\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == sol.grid.size() + 1);

  const BetaCurve curve = compute_beta_curve(1.0, {-2.0, -1.0}, 1e3);
  const std::string c = io::beta_curve_csv(curve);
  CHECK(c.rfind("s,beta,bc_type\n-2,", 0) == 0);
  CHECK(c.find("NonTopologicalI") != std::string::npos);
}

TEST_CASE("field export round trip") {
  const TorusDomain d(2 * M_PI, 2 * M_PI, 32, 32);
  VortexSet vs;
  vs.add_positive({M_PI, M_PI}, 1);
  const TorusField f = solve_newton(d, vs, ModelParams(1.0, 0.3));
  const fs::path base = scratch("field");
  io::export_field(f, base);
  CHECK(fs::file_size(fs::path(base.string() + ".bin")) == 2 * d.size() * sizeof(double));

  const json side = json::parse(slurp(base.string() + ".json"));
  CHECK(side["shape"] == json({32, 32}));
  CHECK(side["blocks"][1]["offset"] == d.size() * sizeof(double));

  const TorusField g = io::import_field(base.string() + ".json");
  CHECK(g.domain == d);
  CHECK(g.params.epsilon() == 0.3);
  CHECK(max_abs_diff(g.v, f.v) == 0.0);
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < d.size(); ++k) mismatches += g.u0[k] != f.u0[k];
  CHECK(mismatches == 0);
  CHECK(g.nodes.size() == 1);
  CHECK(g.residual_norm == doctest::Approx(f.residual_norm).epsilon(1e-6));

  const std::string slice = io::field_slice_csv(f, 16);
  CHECK(slice.rfind("x,y,u0,v,u\n", 0) == 0);
  CHECK(slice.find("-inf") != std::string::npos);
  CHECK_THROWS_AS(io::field_slice_csv(f, 32), std::out_of_range);
}

TEST_CASE("sweep CSV columns") {
  SweepRecord r;
  r.epsilon = 0.2;
  r.per_vortex.resize(2);
  const std::string csv = io::sweep_csv({r});
  CHECK(csv.rfind("epsilon,sup_K,inf_K,total_abs_mass,v0_mass,v0_pohozaev_residual,v0_quantization,v1_mass,", 0) == 0);
}
