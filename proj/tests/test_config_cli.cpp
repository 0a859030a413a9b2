#include <doctest.h>

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "helpers.hpp"
#include "neseek/commands.hpp"
#include "neseek/config.hpp"
#include "neseek/errors.hpp"
#include "neseek/rng.hpp"

using namespace neseek;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_bad(const std::string& fragment, const std::function<void()>& f) {
  try {
    f();
    FAIL_CHECK("expected BadConfig mentioning \"" << fragment << "\"");
  } catch (const Error& e) {
    CHECK_MESSAGE(e.code() == Err::BadConfig, e.what());
    CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos,
                  "message \"" << e.what() << "\" lacks \"" << fragment
                               << "\"");
  }
}

fs::path fresh_dir(const std::string& leaf) {
  fs::path dir = fs::temp_directory_path() / "neseek_cli_tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_json(const fs::path& dir, const std::string& name,
                    const json& j) {
  fs::path p = dir / name;
  std::ofstream out(p);
  out << j.dump(2) << "\n";
  REQUIRE(out.good());
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json cycle_graph_json(double w = 10.0) {
  return json{{"n", 5},
              {"edges",
               json::array({json::array({1, 5, w}), json::array({5, 4, w}),
                            json::array({4, 3, w}), json::array({3, 2, w}),
                            json::array({2, 1, w})})}};
}

}  // namespace

TEST_CASE("an empty document parses to the documented defaults") {
  ExperimentConfig cfg = parse_config(json::object());
  CHECK_FALSE(cfg.game.has_value());
  CHECK_FALSE(cfg.graph.has_value());
  CHECK_FALSE(cfg.schedule.has_value());
  CHECK(cfg.sim.epsilon_auto);
  CHECK(cfg.sim.kbar_broadcast);
  CHECK(cfg.sim.kbar_value == 1.0);
  CHECK(cfg.sim.dt == 1e-2);
  CHECK_FALSE(cfg.sim.t_end.has_value());
  CHECK(cfg.sim.x0_mode == InitMode::Zero);
  CHECK(cfg.sim.y0_mode == InitMode::Zero);
  CHECK(cfg.sim.seed == 0);
  CHECK(cfg.sim.init_lo == -15.0);
  CHECK(cfg.sim.init_hi == 15.0);
  CHECK(cfg.analysis.lyapunov);
  CHECK(cfg.analysis.conditions);
  CHECK(cfg.analysis.rate_fit);
  CHECK_FALSE(cfg.analysis.rate_window.has_value());
  CHECK(cfg.analysis.theta == 0.5);
  CHECK(cfg.analysis.certificate == "general");
  CHECK(cfg.output.csv.empty());
  CHECK(cfg.output.summary.empty());
  CHECK(cfg.notes.empty());
}

TEST_CASE("a full document round-trips every section") {
  json doc{
      {"game",
       {{"kind", "energy"},
        {"xq", {10.0, 15.0, 20.0, 25.0, 30.0}},
        {"r1", 0.1},
        {"r2", 5.0}}},
      {"graph", cycle_graph_json(2.5)},
      {"schedule",
       {{"kind", "periodic"}, {"T", 10.0}, {"theta", 0.5}, {"horizon", 95.0}}},
      {"sim",
       {{"epsilon", 0.04},
        {"kbar", {1.0, 2.0, 3.0, 4.0, 5.0}},
        {"dt", 0.005},
        {"t_end", 50.0},
        {"x0", {1.0, 2.0, 3.0, 4.0, 5.0}},
        {"y0", "random"},
        {"seed", 99},
        {"init_range", {-2.0, 2.0}}}},
      {"analysis",
       {{"lyapunov", false},
        {"conditions", true},
        {"rate_fit", {5.0, 45.0}},
        {"theta", 0.25},
        {"certificate", "diagonal"}}},
      {"output", {{"csv", "a.csv"}, {"summary", "b.json"}}},
      {"notes", "scratch"}};
  ExperimentConfig cfg = parse_config(doc);
  REQUIRE(cfg.game.has_value());
  CHECK(cfg.game->kind == "energy");
  CHECK(cfg.game->xq(4) == 30.0);
  CHECK(cfg.game->r1 == 0.1);
  REQUIRE(cfg.graph.has_value());
  CHECK(cfg.graph->n == 5);
  REQUIRE(cfg.graph->edges.size() == 5);
  CHECK(cfg.graph->edges[0].from == 0);
  CHECK(cfg.graph->edges[0].to == 4);
  CHECK(cfg.graph->edges[0].weight == 2.5);
  REQUIRE(cfg.schedule.has_value());
  CHECK(cfg.schedule->kind == "periodic");
  CHECK(cfg.schedule->period == 10.0);
  CHECK(cfg.schedule->ratio == 0.5);
  REQUIRE(cfg.schedule->horizon.has_value());
  CHECK(*cfg.schedule->horizon == 95.0);
  CHECK_FALSE(cfg.sim.epsilon_auto);
  CHECK(cfg.sim.epsilon == 0.04);
  CHECK_FALSE(cfg.sim.kbar_broadcast);
  CHECK(cfg.sim.kbar.size() == 5);
  CHECK(cfg.sim.dt == 0.005);
  REQUIRE(cfg.sim.t_end.has_value());
  CHECK(*cfg.sim.t_end == 50.0);
  CHECK(cfg.sim.x0_mode == InitMode::Explicit);
  CHECK(cfg.sim.x0.size() == 5);
  CHECK(cfg.sim.y0_mode == InitMode::Random);
  CHECK(cfg.sim.seed == 99);
  CHECK(cfg.sim.init_lo == -2.0);
  CHECK(cfg.sim.init_hi == 2.0);
  CHECK_FALSE(cfg.analysis.lyapunov);
  REQUIRE(cfg.analysis.rate_window.has_value());
  CHECK(cfg.analysis.rate_window->first == 5.0);
  CHECK(cfg.analysis.rate_window->second == 45.0);
  CHECK(cfg.analysis.theta == 0.25);
  CHECK(cfg.analysis.certificate == "diagonal");
  CHECK(cfg.output.csv == "a.csv");
  CHECK(cfg.output.summary == "b.json");
  CHECK(cfg.notes == "scratch");
}

TEST_CASE("unknown keys are rejected with their full path") {
  check_bad("$.bogus", [] { parse_config(json{{"bogus", 1}}); });
  check_bad("$.sim.foo",
            [] { parse_config(json{{"sim", {{"foo", 1}}}}); });
  check_bad("$.game.M", [] {
    parse_config(json{{"game", {{"kind", "energy"}, {"M", 1}}}});
  });
  check_bad("$.schedule.windows", [] {
    parse_config(json{{"schedule",
                       {{"kind", "periodic"},
                        {"T", 1.0},
                        {"theta", 0.5},
                        {"windows", json::array()}}}});
  });
  check_bad("$.schedule.reference_stats.median", [] {
    parse_config(
        json{{"schedule",
              {{"kind", "intervals"},
               {"windows", json::array({json::array({0.0, 1.0})})},
               {"reference_stats",
                {{"min", 1.0}, {"mean", 1.0}, {"max", 1.0}, {"median", 1.0}}},
               {"horizon", 2.0}}}});
  });
  check_bad("$.analysis.extra",
            [] { parse_config(json{{"analysis", {{"extra", true}}}}); });
  check_bad("$.output.path",
            [] { parse_config(json{{"output", {{"path", "x"}}}}); });
}

TEST_CASE("malformed values are rejected where they sit") {
  check_bad("$: expected a configuration object",
            [] { parse_config(json::array()); });
  check_bad("$.game.kind", [] {
    parse_config(json{{"game", {{"kind", "tennis"}}}});
  });
  check_bad("$.game.dims", [] {
    parse_config(json{{"game",
                       {{"kind", "affine"},
                        {"M", json::array({json::array({1.0})})},
                        {"b", {0.0}},
                        {"dims", json::array()}}}});
  });
  check_bad("$.graph.n", [] {
    parse_config(json{{"graph", {{"edges", json::array()}}}});
  });
  check_bad("$.graph.edges[0]", [] {
    parse_config(json{
        {"graph", {{"n", 2}, {"edges", json::array({json::array({1, 2})})}}}});
  });
  check_bad("1-based", [] {
    parse_config(
        json{{"graph",
              {{"n", 2},
               {"edges", json::array({json::array({0, 1, 1.0})})}}}});
  });
  check_bad("$.schedule.kind", [] {
    parse_config(json{{"schedule", {{"kind", "sometimes"}}}});
  });
  check_bad("$.schedule.horizon", [] {
    parse_config(json{{"schedule",
                       {{"kind", "periodic"},
                        {"T", 1.0},
                        {"theta", 0.5},
                        {"horizon", 0.0}}}});
  });
  check_bad("$.sim.epsilon", [] {
    parse_config(json{{"sim", {{"epsilon", "fast"}}}});
  });
  check_bad("$.sim.epsilon", [] {
    parse_config(json{{"sim", {{"epsilon", 0.0}}}});
  });
  check_bad("$.sim.dt", [] {
    parse_config(json{{"sim", {{"dt", -0.5}}}});
  });
  check_bad("$.sim.t_end", [] {
    parse_config(json{{"sim", {{"t_end", 0.0}}}});
  });
  check_bad("$.sim.x0", [] {
    parse_config(json{{"sim", {{"x0", "everywhere"}}}});
  });
  check_bad("seed must be nonnegative", [] {
    parse_config(json{{"sim", {{"seed", -4}}}});
  });
  check_bad("$.sim.seed", [] {
    parse_config(json{{"sim", {{"seed", 1.5}}}});
  });
  check_bad("$.sim.init_range", [] {
    parse_config(json{{"sim", {{"init_range", {3.0, 1.0}}}}});
  });
  check_bad("$.analysis.rate_fit", [] {
    parse_config(json{{"analysis", {{"rate_fit", {5.0, 2.0}}}}});
  });
  check_bad("$.analysis.rate_fit", [] {
    parse_config(json{{"analysis", {{"rate_fit", "yes"}}}});
  });
  check_bad("$.analysis.theta", [] {
    parse_config(json{{"analysis", {{"theta", 1.5}}}});
  });
  check_bad("$.analysis.certificate", [] {
    parse_config(json{{"analysis", {{"certificate", "fancy"}}}});
  });
  check_bad("$.notes", [] { parse_config(json{{"notes", 7}}); });
}

TEST_CASE("graph indices convert from the 1-based listing") {
  ExperimentConfig cfg = parse_config(json{{"graph", cycle_graph_json(3.0)}});
  DirectedGraph g = make_graph(*cfg.graph);
  // listed [1, 5, w]: node 1 sends to node 5, so receiver row 4 column 0
  CHECK(g.weights(4, 0) == 3.0);
  CHECK(g.weights(0, 4) == 0.0);
  CHECK(g.weights(3, 4) == 3.0);
}

TEST_CASE("gain vectors broadcast or validate their length") {
  SimSpec scalar;
  scalar.kbar_value = 2.5;
  Eigen::VectorXd k = resolved_kbar(scalar, 3);
  REQUIRE(k.size() == 3);
  CHECK(k(0) == 2.5);
  CHECK(k(2) == 2.5);

  SimSpec list;
  list.kbar_broadcast = false;
  list.kbar = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
  CHECK(resolved_kbar(list, 2)(1) == 2.0);
  try {
    resolved_kbar(list, 3);
    FAIL_CHECK("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DimensionMismatch);
  }
}

TEST_CASE("schedule horizon falls back to the supplied end time") {
  ScheduleSpec spec;
  spec.kind = "periodic";
  spec.period = 2.0;
  spec.ratio = 0.5;
  Schedule s = make_schedule(spec, 10.0);
  CHECK(s.horizon == 10.0);
  CHECK(interval_stats(s).count == 5);

  spec.horizon = 4.0;
  Schedule clipped = make_schedule(spec, 10.0);
  CHECK(clipped.horizon == 4.0);
  CHECK(interval_stats(clipped).count == 2);

  spec.horizon.reset();
  check_bad("schedule horizon is undetermined",
            [&] { make_schedule(spec, -1.0); });
}

TEST_CASE("initial state draws are deterministic and ordered") {
  SimSpec sim;
  sim.x0_mode = InitMode::Random;
  sim.y0_mode = InitMode::Random;
  sim.init_lo = -3.0;
  sim.init_hi = 7.0;

  InitialState a = resolve_initial_state(sim, 2, 2, 42);
  InitialState b = resolve_initial_state(sim, 2, 2, 42);
  InitialState c = resolve_initial_state(sim, 2, 2, 43);
  REQUIRE(a.x0.size() == 2);
  REQUIRE(a.y0.size() == 4);
  CHECK((a.x0 - b.x0).norm() == 0.0);
  CHECK((a.y0 - b.y0).norm() == 0.0);
  CHECK((a.x0 - c.x0).norm() > 0.0);
  for (int i = 0; i < 2; ++i) {
    CHECK(a.x0(i) >= -3.0);
    CHECK(a.x0(i) < 7.0);
  }

  // one generator, x0 block drawn before y0 block
  std::mt19937_64 rng(42);
  for (int i = 0; i < 2; ++i)
    CHECK(a.x0(i) == uniform_real(rng, -3.0, 7.0));
  for (int i = 0; i < 4; ++i)
    CHECK(a.y0(i) == uniform_real(rng, -3.0, 7.0));

  // explicit blocks consume no draws: y0 sees the same leading stream
  SimSpec mixed = sim;
  mixed.x0_mode = InitMode::Explicit;
  mixed.x0 = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
  InitialState m = resolve_initial_state(mixed, 2, 2, 42);
  CHECK(m.x0(1) == 2.0);
  std::mt19937_64 rng2(42);
  for (int i = 0; i < 4; ++i)
    CHECK(m.y0(i) == uniform_real(rng2, -3.0, 7.0));

  SimSpec wrong = sim;
  wrong.x0_mode = InitMode::Explicit;
  wrong.x0 = Eigen::VectorXd::Zero(3);
  try {
    resolve_initial_state(wrong, 2, 2, 0);
    FAIL_CHECK("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DimensionMismatch);
  }
}

TEST_CASE("solve command writes the equilibrium summary") {
  fs::path dir = fresh_dir("solve");
  json doc{{"game", {{"kind", "energy"}}},
           {"output", {{"summary", "ne.json"}}}};
  fs::path cfg = write_json(dir, "solve.json", doc);
  CommandOptions opt;
  opt.configs = {cfg.string()};
  opt.out_dir = dir.string();
  CHECK(cmd_solve_ne(opt) == 0);
  json out = read_json(dir / "ne.json");
  REQUIRE(out["x_star"].size() == 5);
  CHECK(out["x_star"][0].get<double>() ==
        doctest::Approx(3.9377289377289377).epsilon(1e-9));
  CHECK(out["x_star"][4].get<double>() ==
        doctest::Approx(22.985347985347986).epsilon(1e-9));
  CHECK(out["residual"].get<double>() <= 1e-10);
}

TEST_CASE("solve command propagates math failures as exit 3") {
  fs::path dir = fresh_dir("solve_bad");
  json doc{{"game",
            {{"kind", "affine"},
             {"M", json::array({json::array({0.0, 0.0}),
                                json::array({0.0, 0.0})})},
             {"b", {1.0, 1.0}},
             {"dims", {1, 1}}}}};
  fs::path cfg = write_json(dir, "flat.json", doc);
  CommandOptions opt;
  opt.configs = {cfg.string()};
  opt.out_dir = dir.string();
  CHECK(cmd_solve_ne(opt) == 3);
}

TEST_CASE("configuration problems exit with code 2") {
  fs::path dir = fresh_dir("cfg_errors");
  CommandOptions missing;
  missing.configs = {(dir / "absent.json").string()};
  missing.out_dir = dir.string();
  CHECK(cmd_solve_ne(missing) == 2);

  json no_game{{"notes", "empty"}};
  CommandOptions opt;
  opt.configs = {write_json(dir, "no_game.json", no_game).string()};
  opt.out_dir = dir.string();
  CHECK(cmd_solve_ne(opt) == 2);

  json overlap{{"schedule",
                {{"kind", "intervals"},
                 {"windows", json::array({json::array({0.0, 5.0}),
                                          json::array({4.0, 8.0})})},
                 {"horizon", 10.0}}}};
  CommandOptions sched;
  sched.configs = {write_json(dir, "overlap.json", overlap).string()};
  sched.out_dir = dir.string();
  CHECK(cmd_check_schedule(sched) == 2);

  CommandOptions no_sched;
  no_sched.configs = {write_json(dir, "no_sched.json", no_game).string()};
  no_sched.out_dir = dir.string();
  CHECK(cmd_check_schedule(no_sched) == 2);

  CommandOptions two;
  two.configs = {sched.configs[0], opt.configs[0]};
  two.out_dir = dir.string();
  CHECK(cmd_solve_ne(two) == 2);
}

TEST_CASE("a run that leaves finite numbers exits with code 4") {
  fs::path dir = fresh_dir("blowup");
  json doc{
      {"game",
       {{"kind", "affine"},
        {"M", json::array({json::array({100.0, 0.0}),
                           json::array({0.0, 100.0})})},
        {"b", {0.0, 0.0}},
        {"dims", {1, 1}}}},
      {"graph",
       {{"n", 2},
        {"edges", json::array({json::array({1, 2, 1.0}),
                               json::array({2, 1, 1.0})})}}},
      {"schedule", {{"kind", "periodic"}, {"T", 1.0}, {"theta", 0.5}}},
      {"sim",
       {{"epsilon", 1e100},
        {"dt", 0.01},
        {"t_end", 1.0},
        {"x0", {1e150, 1e150}},
        {"y0", {1e150, 1e150, 1e150, 1e150}}}},
      {"analysis",
       {{"lyapunov", false}, {"conditions", false}, {"rate_fit", false}}}};
  CommandOptions opt;
  opt.configs = {write_json(dir, "hot.json", doc).string()};
  opt.out_dir = dir.string();
  CHECK(cmd_run(opt) == 4);
}

TEST_CASE("rerunning the echoed configuration reproduces the run bitwise") {
  fs::path dir1 = fresh_dir("rerun1");
  fs::path dir2 = fresh_dir("rerun2");
  json doc{
      {"game", {{"kind", "connectivity"}}},
      {"graph", cycle_graph_json(10.0)},
      {"schedule", {{"kind", "periodic"}, {"T", 5.0}, {"theta", 0.6}}},
      {"sim",
       {{"epsilon", 0.02},
        {"dt", 0.01},
        {"t_end", 10.0},
        {"x0", "random"},
        {"y0", "random"},
        {"seed", 7},
        {"init_range", {-15.0, 15.0}}}},
      {"analysis",
       {{"lyapunov", true}, {"conditions", false}, {"rate_fit", false}}}};
  fs::path cfg1 = write_json(dir1, "loop.json", doc);
  CommandOptions opt1;
  opt1.configs = {cfg1.string()};
  opt1.out_dir = dir1.string();
  REQUIRE(cmd_run(opt1) == 0);

  json summary = read_json(dir1 / "loop_summary.json");
  REQUIRE(summary.contains("effective_config"));
  json echoed = summary["effective_config"];
  // the echo pins the drawn state explicitly
  CHECK(echoed["sim"]["x0"].is_array());
  CHECK(echoed["sim"]["y0"].size() == 50);
  CHECK(echoed["sim"]["epsilon"].is_number());

  fs::path cfg2 = write_json(dir2, "loop_again.json", echoed);
  CommandOptions opt2;
  opt2.configs = {cfg2.string()};
  opt2.out_dir = dir2.string();
  REQUIRE(cmd_run(opt2) == 0);

  std::string csv1 = read_bytes(dir1 / "loop_trajectory.csv");
  std::string csv2 = read_bytes(dir2 / "loop_trajectory.csv");
  REQUIRE(!csv1.empty());
  CHECK(csv1 == csv2);

  json summary2 = read_json(dir2 / "loop_summary.json");
  CHECK(summary2["final_e_norm"].get<double>() ==
        summary["final_e_norm"].get<double>());
}

TEST_CASE("the seed option overrides the configured seed") {
  fs::path dir = fresh_dir("seed_override");
  json doc{
      {"game", {{"kind", "energy"}}},
      {"graph", cycle_graph_json(10.0)},
      {"schedule", {{"kind", "periodic"}, {"T", 1.0}, {"theta", 0.5}}},
      {"sim",
       {{"epsilon", 0.05},
        {"dt", 0.01},
        {"t_end", 1.0},
        {"x0", "random"},
        {"y0", "zero"},
        {"seed", 7}}},
      {"analysis",
       {{"lyapunov", false}, {"conditions", false}, {"rate_fit", false}}}};
  fs::path cfg = write_json(dir, "seeded.json", doc);

  CommandOptions base;
  base.configs = {cfg.string()};
  base.out_dir = dir.string();
  REQUIRE(cmd_run(base) == 0);
  json s1 = read_json(dir / "seeded_summary.json");

  CommandOptions forced = base;
  forced.seed = 123;
  REQUIRE(cmd_run(forced) == 0);
  json s2 = read_json(dir / "seeded_summary.json");

  CHECK(s1["effective_config"]["sim"]["seed"].get<std::uint64_t>() == 7);
  CHECK(s2["effective_config"]["sim"]["seed"].get<std::uint64_t>() == 123);
  CHECK(s1["effective_config"]["sim"]["x0"] !=
        s2["effective_config"]["sim"]["x0"]);
}

TEST_CASE("multiple configurations run in one call and report the worst") {
  fs::path dir = fresh_dir("multi");
  json good{
      {"game", {{"kind", "energy"}}},
      {"graph", cycle_graph_json(10.0)},
      {"schedule", {{"kind", "periodic"}, {"T", 1.0}, {"theta", 0.5}}},
      {"sim", {{"epsilon", 0.05}, {"dt", 0.01}, {"t_end", 1.0}}},
      {"analysis",
       {{"lyapunov", false}, {"conditions", false}, {"rate_fit", false}}}};
  fs::path g1 = write_json(dir, "g1.json", good);
  fs::path g2 = write_json(dir, "g2.json", good);

  CommandOptions both;
  both.configs = {g1.string(), g2.string()};
  both.out_dir = dir.string();
  both.jobs = 2;
  CHECK(cmd_run(both) == 0);
  CHECK(fs::exists(dir / "g1_summary.json"));
  CHECK(fs::exists(dir / "g2_summary.json"));

  CommandOptions mixed;
  mixed.configs = {g1.string(), (dir / "absent.json").string()};
  mixed.out_dir = dir.string();
  CHECK(cmd_run(mixed) == 2);
}

TEST_CASE("missing end time is reported before anything runs") {
  fs::path dir = fresh_dir("no_t_end");
  json doc{
      {"game", {{"kind", "energy"}}},
      {"graph", cycle_graph_json(10.0)},
      {"schedule", {{"kind", "periodic"}, {"T", 1.0}, {"theta", 0.5}}},
      {"sim", {{"epsilon", 0.05}, {"dt", 0.01}}}};
  CommandOptions opt;
  opt.configs = {write_json(dir, "open.json", doc).string()};
  opt.out_dir = dir.string();
  CHECK(cmd_run(opt) == 2);
}

TEST_CASE("condition checks emit constants, margins, and the sweep table") {
  fs::path dir = fresh_dir("conditions");
  json doc{
      {"game", {{"kind", "energy"}}},
      {"graph", cycle_graph_json(10.0)},
      {"schedule",
       {{"kind", "periodic"}, {"T", 10.0}, {"theta", 0.5}, {"horizon", 95.0}}},
      {"sim", {{"epsilon", 0.05}}},
      {"output", {{"summary", "cond.json"}}}};
  fs::path cfg = write_json(dir, "cond.json", doc);
  CommandOptions opt;
  opt.configs = {cfg.string()};
  opt.out_dir = dir.string();
  opt.sweep = 5;
  CHECK(cmd_check_conditions(opt) == 0);

  json out = read_json(dir / "cond.json");
  REQUIRE(out.contains("constants"));
  CHECK(out["constants"]["q_min"].get<double>() > 0.0);
  CHECK(out["constants"]["gamma3_exact"].get<bool>());
  CHECK(out["constants"]["eps_star"].get<double>() ==
        doctest::Approx(0.058114388471798305).epsilon(1e-9));
  CHECK(out["epsilon"].get<double>() == 0.05);
  CHECK(out["epsilon_source"].get<std::string>() == "config");
  CHECK(out["certificate_residual"].get<double>() <= 1e-10);
  REQUIRE(out.contains("checks"));
  for (const char* key : {"pic", "aic", "min_ratio", "acr"}) {
    REQUIRE(out["checks"].contains(key));
    CHECK(out["checks"][key].contains("margin"));
    CHECK(out["checks"][key].contains("satisfied"));
  }

  std::string sweep = read_bytes(dir / "cond_acr_sweep.csv");
  int lines = 0;
  for (char ch : sweep)
    if (ch == '\n') ++lines;
  CHECK(lines == 6);  // header plus five samples
  CHECK(sweep.rfind("vartheta,margin,satisfied\n", 0) == 0);

  CommandOptions bad_sweep = opt;
  bad_sweep.sweep = 1;
  CHECK(cmd_check_conditions(bad_sweep) == 2);
}

TEST_CASE("the diagonal certificate path reports a usable certificate") {
  fs::path dir = fresh_dir("diag");
  json doc{
      {"game", {{"kind", "energy"}}},
      {"graph", cycle_graph_json(10.0)},
      {"schedule", {{"kind", "periodic"}, {"T", 10.0}, {"theta", 0.5}}},
      {"sim", {{"epsilon", 0.05}, {"t_end", 95.0}}},
      {"analysis", {{"certificate", "diagonal"}}},
      {"output", {{"summary", "diag.json"}}}};
  CommandOptions opt;
  opt.configs = {write_json(dir, "diag_cfg.json", doc).string()};
  opt.out_dir = dir.string();
  CHECK(cmd_check_conditions(opt) == 0);
  json out = read_json(dir / "diag.json");
  CHECK(out["constants"]["p_min"].get<double>() > 0.0);
  CHECK(out["constants"]["q_min"].get<double>() > 0.0);
  CHECK(out["certificate_residual"].get<double>() <= 1e-10);
}

TEST_CASE("schedule checks echo the reference and flag mismatches") {
  fs::path dir = fresh_dir("sched_ref");
  json doc{
      {"schedule",
       {{"kind", "intervals"},
        {"windows", json::array({json::array({0.0, 4.0}),
                                 json::array({6.0, 12.0})})},
        {"horizon", 12.0},
        {"reference_stats", {{"min", 4.0}, {"mean", 5.0}, {"max", 6.0}}}}},
      {"output", {{"summary", "sched.json"}}}};
  CommandOptions opt;
  opt.configs = {write_json(dir, "sched_cfg.json", doc).string()};
  opt.out_dir = dir.string();
  CHECK(cmd_check_schedule(opt) == 0);
  json out = read_json(dir / "sched.json");
  CHECK(out["interval_stats"]["min"].get<double>() == 4.0);
  CHECK(out["interval_stats"]["max"].get<double>() == 6.0);
  CHECK(out["interval_stats"]["mean"].get<double>() == 5.0);
  CHECK(out["horizon"].get<double>() == 12.0);
  CHECK(out["reference_mismatches"].empty());

  json off = doc;
  off["schedule"]["reference_stats"]["mean"] = 4.5;
  CommandOptions opt2;
  opt2.configs = {write_json(dir, "sched_off.json", off).string()};
  opt2.out_dir = dir.string();
  CHECK(cmd_check_schedule(opt2) == 0);
  json out2 = read_json(dir / "sched.json");
  REQUIRE(out2["reference_mismatches"].size() == 1);
  std::string msg = out2["reference_mismatches"][0].get<std::string>();
  CHECK(msg.find("mean") != std::string::npos);
}
