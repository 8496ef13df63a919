#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "ddstop/cli.hpp"
#include "ddstop/config.hpp"
#include "ddstop/error.hpp"
#include "support.hpp"

using namespace ddstop;
using ddstop::test::error_code;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ddstop_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const Json& cfg) {
  const auto p = dir / "config.json";
  std::ofstream(p) << cfg.dump(2);
  return p;
}

int run(const std::string& sub, const fs::path& dir, const Json& cfg, std::optional<std::uint64_t> seed = {}) {
  cli::RunOptions o;
  o.config_path = write_config(dir, cfg).string();
  o.out_dir = (dir / "out").string();
  o.seed = seed;
  return cli::run(sub, o);
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

Json sweep_config() {
  return {{"drift", {{"name", "ou"}, {"slope", 0.5}}},
          {"payoff", {{"name", "sim_tent"}, {"y1", 0.2}, {"zeta", 2.0}}},
          {"experiment",
           {{"T_grid", {{"log_e", {3, 5}}, {"n", 4}}},
            {"betas", {0.25, 0.5}},
            {"dt", 0.01},
            {"replications", 3},
            {"master_seed", 11}}}};
}

RegretRecord rec(double T, double beta, int rep, double regret) { return {T, beta, rep, 1.0, regret, 0, true, ""}; }

}  // namespace

TEST_CASE("figure data axes", "[cli]") {
  std::vector<RegretRecord> rs;
  for (double T : {10.0, 100.0})
    for (int r = 0; r < 4; ++r) rs.push_back(rec(T, 0.5, r, 0.1 * (r + 1) / T));
  const auto loglog = cli::emit_figure_data(rs, cli::FigureMode::LogLog);
  std::istringstream in(loglog);
  std::string header, row;
  std::getline(in, header);
  REQUIRE(header == "x,y,beta,n_reps,stderr");
  std::getline(in, row);
  double x = 0, y = 0, beta = 0, n = 0, se = 0;
  char c;
  std::istringstream(row) >> x >> c >> y >> c >> beta >> c >> n >> c >> se;
  REQUIRE(x == Catch::Approx(std::log(10.0)));
  REQUIRE(y == Catch::Approx(std::log(0.025)));
  REQUIRE(beta == 0.5);
  REQUIRE(n == 4);
  REQUIRE(se > 0.0);

  const auto semilog = cli::emit_figure_data(rs, cli::FigureMode::SemiLog);
  REQUIRE(semilog.find("\n10,") != std::string::npos);
  REQUIRE(semilog.find("\n100,") != std::string::npos);
}

TEST_CASE("figure data for one horizon has one row", "[cli]") {
  std::vector<RegretRecord> rs{rec(50.0, 1.0, 0, 0.1), rec(50.0, 1.0, 1, 0.3)};
  const auto csv = cli::emit_figure_data(rs, cli::FigureMode::SemiLog);
  REQUIRE(lines(csv) == 2);
  // stderr of the log mean: sd / sqrt(n) / mean = (0.1414 / 1.414) / 0.2.
  REQUIRE(csv.find(",0.5,") == std::string::npos);
  const auto last = csv.substr(csv.rfind(',') + 1);
  REQUIRE(std::stod(last) == Catch::Approx(0.5));
}

TEST_CASE("figure data rejects empty input", "[cli]") {
  REQUIRE(error_code([] { cli::emit_figure_data({}, cli::FigureMode::LogLog); }) == Errc::EmptyInput);
  std::vector<RegretRecord> failed{rec(10.0, 0.5, 0, 0.0)};
  failed[0].ok = false;
  REQUIRE(error_code([&] { cli::emit_figure_data(failed, cli::FigureMode::LogLog); }) == Errc::EmptyInput);
}

TEST_CASE("config hash ignores key order", "[cli]") {
  const auto a = Json::parse(R"({"drift": {"name": "ou", "slope": 0.5}, "pac": {"C1": 1}})");
  const auto b = Json::parse(R"({"pac": {"C1": 1}, "drift": {"slope": 0.5, "name": "ou"}})");
  REQUIRE(config::hash(a) == config::hash(b));
  REQUIRE(config::hash(a).size() == 16);
  REQUIRE(config::hash(a) != config::hash(Json::parse(R"({"drift": {"name": "ou", "slope": 0.6}})")));
  REQUIRE(config::fnv1a64("") == 0xcbf29ce484222325ULL);
  REQUIRE(config::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("config errors name the offending key", "[cli]") {
  const auto dir = scratch("missing_drift");
  auto cfg = sweep_config();
  cfg.erase("drift");
  REQUIRE(run("regret-sweep", dir, cfg) == 2);
  const auto err = read_json(dir / "out" / "error.json");
  REQUIRE(err["error"] == "ConfigError");
  REQUIRE(err["key"] == "drift");
  const auto manifest = read_json(dir / "out" / "manifest.json");
  REQUIRE(manifest["ok"] == false);
  REQUIRE(manifest["subcommand"] == "regret-sweep");

  const auto key_of = [](const std::string& name, Json c) {
    const auto d = scratch(name);
    REQUIRE(run("regret-sweep", d, std::move(c)) == 2);
    return read_json(d / "out" / "error.json")["key"].get<std::string>();
  };
  auto bad = sweep_config();
  bad["experiment"]["dt"] = "fast";
  REQUIRE(key_of("bad_dt", bad) == "experiment.dt");
  bad = sweep_config();
  bad["drift"]["name"] = "brownian";
  REQUIRE(key_of("bad_name", bad) == "drift.name");
  bad = sweep_config();
  bad["experiment"]["T_grid"] = Json::array({100, 50});
  REQUIRE(key_of("bad_grid", bad) == "experiment.T_grid");
  bad = sweep_config();
  bad["experiment"]["master_seed"] = -3;
  REQUIRE(key_of("bad_seed", bad) == "experiment.master_seed");

  // Unreadable config file.
  cli::RunOptions o;
  o.config_path = (dir / "nope.json").string();
  o.out_dir = (dir / "out2").string();
  REQUIRE(cli::run("pac", o) == 2);
}

TEST_CASE("module errors surface with exit status 1", "[cli]") {
  const auto dir = scratch("pac_bad");
  const Json cfg = {{"pac", {{"eps", {1.5}}}}};
  REQUIRE(run("pac", dir, cfg) == 1);
  REQUIRE(read_json(dir / "out" / "error.json")["error"] == "BadParameters");
}

TEST_CASE("regret-sweep outputs and determinism", "[cli]") {
  const auto a = scratch("sweep_a");
  const auto b = scratch("sweep_b");
  REQUIRE(run("regret-sweep", a, sweep_config()) == 0);
  REQUIRE(run("regret-sweep", b, sweep_config()) == 0);

  const auto records = slurp(a / "out" / "regret_records.csv");
  REQUIRE(records.rfind("T,beta,replication,y_hat,regret,seed,ok,error\n", 0) == 0);
  REQUIRE(lines(records) == 1 + 2 * 4 * 3);
  for (const auto* name : {"regret_records.csv", "regret_summary.csv", "figure_loglog.csv"})
    REQUIRE(slurp(a / "out" / name) == slurp(b / "out" / name));
  REQUIRE_FALSE(fs::exists(a / "out" / "figure_semilog.csv"));

  const auto summary = read_json(a / "out" / "summary.json");
  REQUIRE(summary["fits"].size() == 2);
  for (const auto& f : summary["fits"]) {
    REQUIRE(f.contains("slope"));
    REQUIRE(f.contains("ci95"));
    REQUIRE(f.contains("r2"));
    REQUIRE(f["axis"] == "log_T");
  }

  const auto manifest = read_json(a / "out" / "manifest.json");
  REQUIRE(manifest["ok"] == true);
  REQUIRE(manifest["master_seed"] == 11);
  REQUIRE(manifest["version"] == std::string(cli::kVersion));
  REQUIRE(manifest["outputs"].size() == 4);
  REQUIRE(manifest["config_hash"] == config::hash(sweep_config()));

  // --seed overrides the config.
  const auto c = scratch("sweep_c");
  REQUIRE(run("regret-sweep", c, sweep_config(), 12) == 0);
  REQUIRE(read_json(c / "out" / "manifest.json")["master_seed"] == 12);
  REQUIRE(slurp(c / "out" / "regret_records.csv") != records);
}

TEST_CASE("beta = 1 sweeps get the semilog figure", "[cli]") {
  auto cfg = sweep_config();
  cfg["experiment"]["betas"] = Json::array({1.0});
  cfg["experiment"]["T_grid"] = Json::array({100, 200, 300, 400});
  cfg["experiment"]["replications"] = 2;
  const auto dir = scratch("sweep_beta1");
  REQUIRE(run("regret-sweep", dir, cfg) == 0);
  REQUIRE(fs::exists(dir / "out" / "figure_semilog.csv"));
  REQUIRE(read_json(dir / "out" / "summary.json")["fits"][0]["axis"] == "T");
}

TEST_CASE("simulate writes the path and a controlled trajectory", "[cli]") {
  const Json cfg = {{"drift", {{"name", "ou"}, {"slope", 0.5}}},
                    {"payoff", {{"name", "sim_tent"}, {"beta", 0.5}}},
                    {"simulate", {{"T", 20.0}, {"dt", 0.01}, {"seed", 5}, {"threshold", 1.0}}}};
  const auto dir = scratch("simulate");
  REQUIRE(run("simulate", dir, cfg) == 0);
  const auto path = slurp(dir / "out" / "path.csv");
  REQUIRE(lines(path) == 1 + 2001);
  REQUIRE(path.rfind("t,x\n0,0\n", 0) == 0);
  const auto traj = slurp(dir / "out" / "trajectory.csv");
  REQUIRE(traj.rfind("tau,y,payoff,phase\n", 0) == 0);
  REQUIRE(traj.find(",exploit\n") != std::string::npos);
  REQUIRE(path.find(' ') == std::string::npos);
}

TEST_CASE("estimate from a simulated and from a CSV path", "[cli]") {
  const auto dir = scratch("estimate");
  const Json cfg = {{"drift", {{"name", "ou"}, {"slope", 0.5}}},
                    {"payoff", {{"name", "sim_tent"}, {"beta", 0.5}}},
                    {"estimate", {{"T", 200.0}, {"dt", 0.01}, {"seed", 3}}}};
  REQUIRE(run("estimate", dir, cfg) == 0);
  const auto est = slurp(dir / "out" / "estimate.csv");
  REQUIRE(est.rfind("x,rho_hat,F_hat,xi_hat,xi_true\n", 0) == 0);
  const auto s = read_json(dir / "out" / "summary.json");
  for (const auto* k : {"y_hat", "value", "T", "seed"}) REQUIRE(s.contains(k));
  REQUIRE(s["y_hat"].get<double>() >= 0.2);
  REQUIRE(s["y_hat"].get<double>() <= 2.0);

  // Same data through a path CSV without a drift.
  const auto sim_dir = scratch("estimate_sim");
  const Json sim = {{"drift", {{"name", "ou"}, {"slope", 0.5}}}, {"simulate", {{"T", 200.0}, {"seed", 3}}}};
  REQUIRE(run("simulate", sim_dir, sim) == 0);
  std::ofstream(dir / "tent.csv") << "x,g\n0.001,-1\n1,1\n3,-1\n";
  const Json from_csv = {{"payoff", {{"name", "tabulated"}, {"path", (dir / "tent.csv").string()}}},
                         {"estimate",
                          {{"path_csv", (sim_dir / "out" / "path.csv").string()},
                           {"floor_a", s["floor_a"]},
                           {"clamp_M1", s["clamp_M1"]}}}};
  const auto d2 = scratch("estimate_csv");
  REQUIRE(run("estimate", d2, from_csv) == 0);
  const auto s2 = read_json(d2 / "out" / "summary.json");
  REQUIRE(s2["T"].get<double>() == Catch::Approx(200.0));
  REQUIRE(slurp(d2 / "out" / "estimate.csv").rfind("x,rho_hat,F_hat,xi_hat\n", 0) == 0);
}

TEST_CASE("pac, hypotheses and margin-check", "[cli]") {
  const auto p = scratch("pac");
  REQUIRE(run("pac", p, Json{{"pac", {{"betas", {0.5}}, {"eps", {0.1}}, {"delta", {0.1}}}}}) == 0);
  const auto pac = read_json(p / "out" / "summary.json");
  REQUIRE(pac["bounds"].size() == 1);
  REQUIRE(pac["bounds"][0]["T_margin"].get<double>() == Catch::Approx(pac_bounds(0.5, 0.1, 0.1).T_margin));

  const auto h = scratch("hypotheses");
  const Json hcfg = {{"hypotheses", {{"mode", "general"}, {"T", {1e3}}, {"grid_step", 1e-3}}}};
  REQUIRE(run("hypotheses", h, hcfg) == 0);
  const auto hs = read_json(h / "out" / "summary.json")["hypotheses"][0];
  for (const auto* k : {"mode", "T", "eps", "delta", "kl", "separation_report"}) REQUIRE(hs.contains(k));
  REQUIRE(hs["mode"] == "general");
  REQUIRE(hs["eps"].get<double>() == Catch::Approx(1.0 / std::sqrt(1e3)));
  REQUIRE(slurp(h / "out" / "hypotheses.csv").rfind("T,x,ratio_b,ratio_b_bar\n", 0) == 0);

  const auto hm = scratch("hypotheses_missing_mode");
  REQUIRE(run("hypotheses", hm, Json{{"hypotheses", {{"T", {1e3}}}}}) == 2);
  REQUIRE(read_json(hm / "out" / "error.json")["key"] == "hypotheses.mode");

  const auto m = scratch("margin");
  Json mcfg = {{"drift", {{"name", "ou"}, {"slope", 0.5}}},
               {"payoff", {{"name", "sim_tent"}, {"beta", 0.5}}},
               {"margin", {{"beta", 0.5}, {"eta", 2.0}}}};
  REQUIRE(run("margin-check", m, mcfg) == 0);
  const auto ms = read_json(m / "out" / "summary.json");
  REQUIRE(ms["ok"] == true);
  REQUIRE(ms["maximizers"][0].get<double>() == Catch::Approx(1.0).margin(1e-4));
  mcfg["margin"]["eta"] = 1.0;
  const auto m2 = scratch("margin_fail");
  REQUIRE(run("margin-check", m2, mcfg) == 0);
  REQUIRE(read_json(m2 / "out" / "summary.json")["ok"] == false);
}

TEST_CASE("cumulative subcommand", "[cli]") {
  const Json cfg = {{"drift", {{"name", "ou"}, {"slope", 0.5}}},
                    {"payoff", {{"name", "sim_tent"}, {"beta", 0.5}}},
                    {"experiment",
                     {{"T_grid", {100, 200, 400, 800}}, {"beta", 0.5}, {"replications", 2}, {"master_seed", 4}}},
                    {"strategy", {{"block_len", 1.0}}}};
  const auto a = scratch("cum_a");
  const auto b = scratch("cum_b");
  REQUIRE(run("cumulative", a, cfg) == 0);
  REQUIRE(run("cumulative", b, cfg) == 0);
  const auto recs = slurp(a / "out" / "cumulative_records.csv");
  REQUIRE(recs == slurp(b / "out" / "cumulative_records.csv"));
  REQUIRE(lines(recs) == 1 + 4 * 2);
  REQUIRE(read_json(a / "out" / "summary.json")["fit"].contains("slope"));

  auto bad = cfg;
  bad["strategy"]["explore"] = false;
  const auto c = scratch("cum_bad");
  REQUIRE(run("cumulative", c, bad) == 2);
  REQUIRE(read_json(c / "out" / "error.json")["key"] == "strategy.fixed_threshold");
}

TEST_CASE("output directory falls back to the environment", "[cli]") {
  const auto dir = scratch("env_out");
  ::setenv(std::string(cli::kOutDirEnv).c_str(), (dir / "from_env").string().c_str(), 1);
  cli::RunOptions o;
  o.config_path = write_config(dir, Json{{"pac", Json::object()}}).string();
  REQUIRE(cli::run("pac", o) == 0);
  ::unsetenv(std::string(cli::kOutDirEnv).c_str());
  REQUIRE(fs::exists(dir / "from_env" / "pac.csv"));
  REQUIRE(fs::exists(dir / "from_env" / "manifest.json"));
}
