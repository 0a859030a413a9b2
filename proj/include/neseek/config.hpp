#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "neseek/game.hpp"
#include "neseek/graph.hpp"
#include "neseek/schedule.hpp"

namespace neseek {

// Parsed experiment description. Parsing is strict: unknown keys are
// rejected with their JSON path, and every value is type- and range-checked
// where the value's meaning is local. Cross-section checks (sizes against
// the game, horizon against t_end) happen when the specs are materialized.
struct GameSpec {
  std::string kind;  // "energy" | "connectivity" | "affine"
  Eigen::VectorXd xq;
  double r1 = 0.1;
  double r2 = 5.0;
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
  std::vector<int> dims;
  Eigen::VectorXd seek;  // empty = all +1
};

struct GraphSpec {
  int n = 0;
  std::vector<Edge> edges;  // already 0-based (config lists 1-based triples)
};

struct ScheduleSpec {
  std::string kind;  // "periodic" | "intervals"
  double period = 0.0;
  double ratio = 0.0;
  std::vector<Window> windows;
  std::optional<double> horizon;  // defaults to the run's t_end
  std::optional<WidthStats> reference;  // published stats to compare against
};

enum class InitMode { Zero, Explicit, Random };

struct SimSpec {
  bool epsilon_auto = true;  // "auto": 0.9 eps_star when available, else 0.1
  double epsilon = 0.0;      // valid when !epsilon_auto
  bool kbar_broadcast = true;
  double kbar_value = 1.0;
  Eigen::VectorXd kbar;  // valid when !kbar_broadcast
  double dt = 1e-2;
  std::optional<double> t_end;
  InitMode x0_mode = InitMode::Zero;
  Eigen::VectorXd x0;
  InitMode y0_mode = InitMode::Zero;
  Eigen::VectorXd y0;
  std::uint64_t seed = 0;
  double init_lo = -15.0;
  double init_hi = 15.0;
};

struct AnalysisSpec {
  bool lyapunov = true;
  bool conditions = true;
  bool rate_fit = true;
  std::optional<std::pair<double, double>> rate_window;  // default [0, t_end]
  double theta = 0.5;                 // rate for the average-rate checks
  std::string certificate = "general";  // or "diagonal"
};

struct OutputSpec {
  std::string csv;      // default "<config stem>_trajectory.csv"
  std::string summary;  // default "<config stem>_summary.json"
};

struct ExperimentConfig {
  std::optional<GameSpec> game;
  std::optional<GraphSpec> graph;
  std::optional<ScheduleSpec> schedule;
  SimSpec sim;
  AnalysisSpec analysis;
  OutputSpec output;
  std::string notes;
};

// Strict parse of a config document; throws BadConfig naming the offending
// JSON path on any unknown key, wrong type, or out-of-range value.
ExperimentConfig parse_config(const nlohmann::json& j);

// Reads and parses a config file (BadConfig on unreadable or invalid JSON).
ExperimentConfig load_config(const std::string& path);

GameModel make_game(const GameSpec& spec);
DirectedGraph make_graph(const GraphSpec& spec);

// horizon resolves as spec.horizon when set, else the supplied fallback
// (the run's t_end); a negative fallback means "no fallback available".
Schedule make_schedule(const ScheduleSpec& spec, double fallback_horizon);

// Per-player gains: broadcast scalar or validated explicit list.
Eigen::VectorXd resolved_kbar(const SimSpec& sim, int n);

// Draws or validates the initial state. Random coordinates come from one
// generator seeded with `seed`, x0 drawn before y0, each coordinate uniform
// over [init_lo, init_hi).
struct InitialState {
  Eigen::VectorXd x0;
  Eigen::VectorXd y0;
};
InitialState resolve_initial_state(const SimSpec& sim, int n, int total_dim,
                                   std::uint64_t seed);

}  // namespace neseek
