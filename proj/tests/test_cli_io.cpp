#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lyap/cli_io.hpp"

using namespace lyap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lyap_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("parse a full simulate line") {
  const auto cfg = cli::parse_config({"simulate", "--ensemble", "ginibre", "--beta", "2",
                                      "--n", "3", "--t", "200", "--samples", "10000",
                                      "--seed", "42", "--observable", "sv-lyapunov"});
  CHECK(cfg.command == cli::Command::simulate);
  CHECK(cfg.ensemble.family == rng::Family::ginibre_beta2);
  CHECK(cfg.ensemble.n == 3);
  CHECK(cfg.ensemble.t == 200);
  CHECK(cfg.ensemble.samples == 10000);
  CHECK(cfg.ensemble.master_seed == 42);
  CHECK(cfg.ensemble.observable == rng::Observable::sv_lyapunov);
}

TEST_CASE("invalid arguments produce actionable errors") {
  CHECK_THROWS_WITH_AS(cli::parse_config({"simulate", "--t", "0"}),
                       doctest::Contains("t must be >= 1"), cli::CliError);
  CHECK_THROWS_AS(cli::parse_config({"simulate", "--frobnicate", "1"}), cli::CliError);
  CHECK_THROWS_AS(cli::parse_config({"orbit"}), cli::CliError);
  CHECK_THROWS_AS(cli::parse_config({}), cli::CliError);
  CHECK_THROWS_AS(cli::parse_config({"simulate", "--beta", "3"}), cli::CliError);
  CHECK_THROWS_AS(cli::parse_config({"density", "--grid", "1:0:100"}), cli::CliError);
  CHECK_THROWS_AS(cli::parse_config({"simulate", "--preset", "fig9"}), cli::CliError);
}

TEST_CASE("config file with flag override") {
  const fs::path dir = fresh_dir("config");
  const fs::path cfg_path = dir / "exp.json";
  {
    std::ofstream out(cfg_path);
    out << R"({"n": 4, "t": 100, "samples": 50, "seed": 9, "observable": "sv-lyapunov"})";
  }
  const auto cfg = cli::parse_config({"simulate", "--config", cfg_path.string(), "--t", "30"});
  CHECK(cfg.ensemble.t == 30);        // flag wins
  CHECK(cfg.ensemble.n == 4);         // file value
  CHECK(cfg.ensemble.samples == 50);  // file value
  CHECK(cfg.ensemble.master_seed == 9);

  {
    std::ofstream out(cfg_path);
    out << R"({"definitely_unknown": 1})";
  }
  CHECK_THROWS_WITH_AS(cli::parse_config({"simulate", "--config", cfg_path.string()}),
                       doctest::Contains("unknown config key"), cli::CliError);
}

TEST_CASE("csv round trip is bit exact") {
  const fs::path dir = fresh_dir("roundtrip");
  cli::CsvTable t;
  t.metadata = {{"ensemble", "ginibre-beta2"}, {"N", "3"}};
  t.columns = {"a", "b"};
  t.rows = {{1.0 / 3.0, 2.0 / 7.0}, {1e-300, 6.02214076e23}, {-0.0, 0.1 + 0.2}};
  const std::string path = (dir / "t.csv").string();
  cli::write_csv(path, t, /*with_timestamp=*/false);
  const auto back = cli::read_csv(path);
  REQUIRE(back.rows.size() == t.rows.size());
  REQUIRE(back.columns == t.columns);
  for (size_t i = 0; i < t.rows.size(); ++i)
    for (size_t j = 0; j < t.rows[i].size(); ++j)
      CHECK(back.rows[i][j] == t.rows[i][j]);  // exact, 17 significant digits
  CHECK(back.metadata.size() >= 2);
}

TEST_CASE("simulate writes deterministic artifacts") {
  const fs::path dir1 = fresh_dir("sim1"), dir2 = fresh_dir("sim2");
  auto args = [&](const fs::path& d) {
    return std::vector<std::string>{"simulate", "--n",     "2",    "--t",
                                    "5",        "--samples", "20", "--seed",
                                    "3",        "--out",   d.string(), "--no-timestamp"};
  };
  CHECK(cli::run(cli::parse_config(args(dir1))) == 0);
  CHECK(cli::run(cli::parse_config(args(dir2))) == 0);
  const std::string a = slurp(dir1 / "samples.csv");
  const std::string b = slurp(dir2 / "samples.csv");
  CHECK(!a.empty());
  CHECK(a == b);  // byte-identical without the timestamp line
  CHECK(a.find("# ensemble=ginibre-beta2") != std::string::npos);
  CHECK(a.find("# seed=3") != std::string::npos);

  // with timestamps the data lines still match
  const fs::path dir3 = fresh_dir("sim3");
  auto argv3 = args(dir3);
  argv3.pop_back();  // drop --no-timestamp
  CHECK(cli::run(cli::parse_config(argv3)) == 0);
  CHECK(slurp(dir3 / "samples.csv").find("# timestamp=") != std::string::npos);
}

TEST_CASE("density command writes the requested grid") {
  const fs::path dir = fresh_dir("density");
  const auto cfg = cli::parse_config({"density", "--model", "saddle", "--n", "3", "--t", "30",
                                      "--grid", "-0.8:0.8:400", "--out", dir.string(),
                                      "--no-timestamp"});
  CHECK(cli::run(cfg) == 0);
  const auto table = cli::read_csv((dir / "density.csv").string());
  CHECK(table.rows.size() == 400);
  CHECK(table.columns == std::vector<std::string>{"x", "pdf", "cdf"});
  CHECK(table.rows.front()[0] == -0.8);
  CHECK(table.rows.back()[0] == 0.8);
  // cdf column is monotone
  for (size_t i = 1; i < table.rows.size(); ++i)
    CHECK(table.rows[i][2] >= table.rows[i - 1][2] - 1e-12);
}

TEST_CASE("compare emits a JSON summary with pass/fail semantics") {
  const fs::path dir = fresh_dir("compare");
  const auto base = std::vector<std::string>{
      "compare", "--n", "1", "--t", "100", "--samples", "4000", "--seed", "12",
      "--model", "gaussian", "--out", dir.string(), "--no-timestamp"};
  CHECK(cli::run(cli::parse_config(base)) == 0);
  nlohmann::json summary;
  std::ifstream(dir / "compare.json") >> summary;
  for (const char* key :
       {"experiment", "model", "ks", "tolerance", "pass", "runtime_seconds", "seed"})
    CHECK(summary.contains(key));
  CHECK(summary["pass"].get<bool>());
  CHECK(summary["ks"].get<double>() < 0.05);

  // an absurd tolerance flips the exit code to 2
  auto strict = base;
  strict.insert(strict.end(), {"--tolerance", "0.000001"});
  CHECK(cli::run(cli::parse_config(strict)) == 2);

  CHECK(fs::exists(dir / "compare_hist.csv"));
  CHECK(fs::exists(dir / "compare_model.csv"));
}

TEST_CASE("positions, limits and spacing commands") {
  const fs::path dir = fresh_dir("misc");
  CHECK(cli::run(cli::parse_config({"positions", "--n", "3", "--beta", "2", "--out",
                                    dir.string(), "--no-timestamp"})) == 0);
  const auto pos = cli::read_csv((dir / "positions.csv").string());
  REQUIRE(pos.rows.size() == 3);
  CHECK(pos.rows[0][1] == doctest::Approx(-0.2886).epsilon(1e-3));

  CHECK(cli::run(cli::parse_config({"limits", "--n", "100", "--out", dir.string(),
                                    "--no-timestamp"})) == 0);
  const auto mom = cli::read_csv((dir / "limits_moments.csv").string());
  CHECK(mom.rows[1][1] == doctest::Approx(0.5).epsilon(2e-3));  // n = 2 moment

  CHECK(cli::run(cli::parse_config({"spacing", "--n", "20", "--t", "1", "--samples", "10",
                                    "--seed", "4", "--out", dir.string(),
                                    "--no-timestamp"})) == 0);
  const auto atoms = cli::read_csv((dir / "spacing_atoms.csv").string());
  CHECK(atoms.rows.size() == 19);
  CHECK(fs::exists(dir / "spacing_mc_hist.csv"));
}

TEST_CASE("simulate with the 2x2 Schur observable") {
  const fs::path dir = fresh_dir("schur");
  CHECK(cli::run(cli::parse_config({"simulate", "--n", "2", "--t", "50", "--samples", "30",
                                    "--seed", "8", "--observable", "two-by-two-schur",
                                    "--out", dir.string(), "--no-timestamp"})) == 0);
  const auto t = cli::read_csv((dir / "samples.csv").string());
  CHECK(t.columns == std::vector<std::string>{"max_exponent"});
  CHECK(t.rows.size() == 30);
  bool found = false;
  for (const auto& [k, v] : t.metadata)
    if (k == "lower_bound_violations") {
      found = true;
      CHECK(v == "0");
    }
  CHECK(found);
}

TEST_CASE("plot script emission") {
  const fs::path dir = fresh_dir("plot");
  CHECK(cli::run(cli::parse_config({"density", "--model", "gaussian", "--n", "2", "--t", "50",
                                    "--grid", "-1:1:50", "--out", dir.string(),
                                    "--emit-plot-script", "--no-timestamp"})) == 0);
  const std::string script = slurp(dir / "plot.gp");
  CHECK(script.find("density.csv") != std::string::npos);
}

}  // TEST_SUITE
