#include "aci/experiment.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "aci/cir.hpp"
#include "aci/config.hpp"

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "aci-tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  return line;
}

// A full experiment small enough for a unit test: one second of the reduced
// pair with every optional artifact switched on.
aci::ExperimentConfig tiny_config(const std::string& out_leaf) {
  aci::ExperimentConfig cfg = aci::preset_config("reduced-linear");
  cfg.t_start = -0.2;
  cfg.t_end = 0.8;
  cfg.window_start = 0.0;
  cfg.window_end = 0.5;
  cfg.write_filter = true;
  cfg.write_bank = true;
  cfg.out_dir = fresh_dir(out_leaf).string();
  return cfg;
}

}  // namespace

TEST_CASE("the preset catalogue builds checkable models of the right shape") {
  const auto names = aci::preset_names();
  REQUIRE(names.size() == 5);
  for (const auto& name : names) {
    const auto cfg = aci::preset_config(name);
    const auto model = aci::make_model(cfg.model);
    CHECK_NOTHROW(model.check());
    CHECK(!cfg.queries.empty());
    CHECK(cfg.window_start >= cfg.t_start);
    CHECK(cfg.window_end <= cfg.t_end);
  }

  CHECK(aci::preset_config("climate-eps001").model.climate.eps == 0.01);
  CHECK(aci::preset_config("climate-eps01").model.climate.eps == 0.1);
  CHECK_THROWS_WITH_AS(aci::preset_config("plasma"),
                       doctest::Contains("unknown preset 'plasma'"),
                       aci::Error);
}

TEST_CASE("model kinds map onto the expected observed and hidden shapes") {
  auto dims = [](const std::string& kind) {
    aci::ModelChoice mc;
    mc.kind = kind;
    const auto m = aci::make_model(mc);
    return std::pair<int, int>{m.obs_dim, m.hidden_dim};
  };
  CHECK(dims("climate") == std::pair<int, int>{1, 2});
  CHECK(dims("climate-gamma-hidden") == std::pair<int, int>{2, 1});
  CHECK(dims("multiscale") == std::pair<int, int>{2, 2});
  CHECK(dims("lorenz84") == std::pair<int, int>{2, 1});
  CHECK(dims("reduced-linear") == std::pair<int, int>{1, 1});

  aci::ModelChoice bad;
  bad.kind = "volterra";
  CHECK_THROWS_WITH_AS(aci::make_model(bad),
                       doctest::Contains("unknown model kind"), aci::Error);
}

TEST_CASE("an experiment writes the full artifact set for each query") {
  const auto cfg = tiny_config("experiment-artifacts");
  const auto result = aci::run_experiment(cfg);
  const fs::path dir(cfg.out_dir);

  for (const char* name :
       {"config.ini", "metadata.txt", "trajectory.csv", "trajectory.csv.meta",
        "cir-y.csv", "figure-y.svg", "filter-y.csv", "bank-y.csv"}) {
    INFO("artifact: " << name);
    CHECK(fs::exists(dir / name));
  }

  // The analysis grid covers the window at the configured stride.
  REQUIRE(result.series.size() == 1);
  const auto& pts = result.series[0].points;
  REQUIRE(!pts.empty());
  CHECK(pts.size() == 51);
  CHECK(std::abs(pts.front().t) < 1e-9);
  CHECK(std::abs(pts.back().t - 0.5) < 1e-9);
  for (const auto& p : pts) {
    CHECK(p.t > -1e-9);
    CHECK(p.t < 0.5 + 1e-9);
  }

  // The echoed config is already in fixed-point form.
  const std::string echoed = slurp(dir / "config.ini");
  CHECK(echoed == aci::render_config(cfg));
  CHECK(aci::render_config(aci::parse_config((dir / "config.ini").string())) ==
        echoed);

  // Headers of the per-query diagnostics for a scalar hidden state.
  CHECK(first_line(dir / "filter-y.csv") == "t,mu_0,R_00");
  CHECK(first_line(dir / "bank-y.csv") == "j,n,mu_0,R_00,normD");
  CHECK(slurp(dir / "figure-y.svg").rfind("<svg", 0) == 0);

  const std::string meta = slurp(dir / "metadata.txt");
  CHECK(meta.find("seed = 105") != std::string::npos);
  CHECK(meta.find("query y:") != std::string::npos);
  CHECK(meta.find("window = [0, 0.5]") != std::string::npos);

  // Round-trip the range CSV and re-render a standalone figure from it.
  const auto reread = aci::read_cir_csv((dir / "cir-y.csv").string());
  REQUIRE(reread.points.size() == pts.size());
  CHECK(!reread.has_exact);
  CHECK(reread.points.front().aci.total() ==
        doctest::Approx(pts.front().aci.total()).epsilon(1e-9));
  const fs::path refig = dir / "refigure.svg";
  aci::write_cir_figure(refig.string(), reread);
  CHECK(slurp(refig).rfind("<svg", 0) == 0);
}

TEST_CASE("identical configurations reproduce artifacts byte for byte") {
  auto a = tiny_config("experiment-repro-a");
  auto b = tiny_config("experiment-repro-b");
  aci::run_experiment(a);
  aci::run_experiment(b);
  CHECK(slurp(fs::path(a.out_dir) / "trajectory.csv") ==
        slurp(fs::path(b.out_dir) / "trajectory.csv"));
  CHECK(slurp(fs::path(a.out_dir) / "cir-y.csv") ==
        slurp(fs::path(b.out_dir) / "cir-y.csv"));
  CHECK(slurp(fs::path(a.out_dir) / "figure-y.svg") ==
        slurp(fs::path(b.out_dir) / "figure-y.svg"));
}

TEST_CASE("initial conditions must match the model dimensions") {
  auto cfg = tiny_config("experiment-bad-init");
  cfg.x0 = {1.0, 2.0};
  CHECK_THROWS_WITH_AS(aci::run_experiment(cfg),
                       doctest::Contains("x0 has 2 entries"), aci::Error);
}
