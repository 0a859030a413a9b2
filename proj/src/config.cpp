#include "neseek/config.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "neseek/rng.hpp"

namespace neseek {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(Err::BadConfig, path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) bad(path + "." + item.key(), "unknown key");
  }
}

const json& member(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing required key");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  auto v = j.get<std::int64_t>();
  if (v < -2147483648LL || v > 2147483647LL) bad(path, "integer out of range");
  return static_cast<int>(v);
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) bad(path + "[0]", "expected a row");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      bad(rp, "rows must all have " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

GameSpec parse_game(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  GameSpec g;
  g.kind = as_string(member(j, path, "kind"), path + ".kind");
  if (g.kind == "energy") {
    check_keys(j, path, {"kind", "xq", "r1", "r2"});
    if (j.contains("xq")) {
      g.xq = as_vector(j["xq"], path + ".xq");
    } else {
      g.xq.resize(5);
      g.xq << 10, 15, 20, 25, 30;
    }
    if (j.contains("r1")) g.r1 = as_number(j["r1"], path + ".r1");
    if (j.contains("r2")) g.r2 = as_number(j["r2"], path + ".r2");
  } else if (g.kind == "connectivity") {
    check_keys(j, path, {"kind"});
  } else if (g.kind == "affine") {
    check_keys(j, path, {"kind", "M", "b", "dims", "seek_sign"});
    g.m = as_matrix(member(j, path, "M"), path + ".M");
    g.b = as_vector(member(j, path, "b"), path + ".b");
    const json& dims = member(j, path, "dims");
    if (!dims.is_array() || dims.empty())
      bad(path + ".dims", "expected a nonempty array of integers");
    for (std::size_t i = 0; i < dims.size(); ++i)
      g.dims.push_back(
          as_int(dims[i], path + ".dims[" + std::to_string(i) + "]"));
    if (j.contains("seek_sign"))
      g.seek = as_vector(j["seek_sign"], path + ".seek_sign");
  } else {
    bad(path + ".kind",
        "must be \"energy\", \"connectivity\", or \"affine\"");
  }
  return g;
}

GraphSpec parse_graph(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  check_keys(j, path, {"n", "edges"});
  GraphSpec g;
  g.n = as_int(member(j, path, "n"), path + ".n");
  const json& edges = member(j, path, "edges");
  if (!edges.is_array()) bad(path + ".edges", "expected an array of triples");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ep = path + ".edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    if (!e.is_array() || e.size() != 3)
      bad(ep, "expected [from, to, weight] with 1-based node indices");
    int from = as_int(e[0], ep + "[0]");
    int to = as_int(e[1], ep + "[1]");
    double w = as_number(e[2], ep + "[2]");
    if (from < 1 || to < 1) bad(ep, "node indices are 1-based");
    g.edges.push_back({from - 1, to - 1, w});
  }
  return g;
}

ScheduleSpec parse_schedule(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  ScheduleSpec s;
  s.kind = as_string(member(j, path, "kind"), path + ".kind");
  if (s.kind == "periodic") {
    check_keys(j, path, {"kind", "T", "theta", "horizon"});
    s.period = as_number(member(j, path, "T"), path + ".T");
    s.ratio = as_number(member(j, path, "theta"), path + ".theta");
  } else if (s.kind == "intervals") {
    check_keys(j, path, {"kind", "windows", "horizon", "reference_stats"});
    const json& w = member(j, path, "windows");
    if (!w.is_array()) bad(path + ".windows", "expected an array of pairs");
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string wp = path + ".windows[" + std::to_string(i) + "]";
      if (!w[i].is_array() || w[i].size() != 2)
        bad(wp, "expected [open, close]");
      s.windows.push_back(
          {as_number(w[i][0], wp + "[0]"), as_number(w[i][1], wp + "[1]")});
    }
    if (j.contains("reference_stats")) {
      const json& r = j["reference_stats"];
      const std::string rp = path + ".reference_stats";
      if (!r.is_object()) bad(rp, "expected an object");
      check_keys(r, rp, {"min", "mean", "max"});
      WidthStats ref;
      ref.min = as_number(member(r, rp, "min"), rp + ".min");
      ref.mean = as_number(member(r, rp, "mean"), rp + ".mean");
      ref.max = as_number(member(r, rp, "max"), rp + ".max");
      s.reference = ref;
    }
  } else {
    bad(path + ".kind", "must be \"periodic\" or \"intervals\"");
  }
  if (j.contains("horizon")) {
    double h = as_number(j["horizon"], path + ".horizon");
    if (!(h > 0.0)) bad(path + ".horizon", "must be positive");
    s.horizon = h;
  }
  return s;
}

SimSpec parse_sim(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  check_keys(j, path,
             {"epsilon", "kbar", "dt", "t_end", "x0", "y0", "seed",
              "init_range"});
  SimSpec s;
  if (j.contains("epsilon")) {
    const json& e = j["epsilon"];
    if (e.is_string()) {
      if (e.get<std::string>() != "auto")
        bad(path + ".epsilon", "must be a positive number or \"auto\"");
      s.epsilon_auto = true;
    } else {
      double v = as_number(e, path + ".epsilon");
      if (!(v > 0.0) || !std::isfinite(v))
        bad(path + ".epsilon", "must be positive and finite");
      s.epsilon_auto = false;
      s.epsilon = v;
    }
  }
  if (j.contains("kbar")) {
    const json& k = j["kbar"];
    if (k.is_array()) {
      s.kbar_broadcast = false;
      s.kbar = as_vector(k, path + ".kbar");
    } else {
      s.kbar_value = as_number(k, path + ".kbar");
    }
  }
  if (j.contains("dt")) {
    s.dt = as_number(j["dt"], path + ".dt");
    if (!(s.dt > 0.0)) bad(path + ".dt", "must be positive");
  }
  if (j.contains("t_end")) {
    double v = as_number(j["t_end"], path + ".t_end");
    if (!(v > 0.0)) bad(path + ".t_end", "must be positive");
    s.t_end = v;
  }
  auto parse_init = [&](const char* key, InitMode& mode, Eigen::VectorXd& v) {
    if (!j.contains(key)) return;
    const json& e = j[key];
    const std::string p = path + "." + key;
    if (e.is_string()) {
      std::string m = e.get<std::string>();
      if (m == "zero")
        mode = InitMode::Zero;
      else if (m == "random")
        mode = InitMode::Random;
      else
        bad(p, "must be an array, \"zero\", or \"random\"");
    } else {
      mode = InitMode::Explicit;
      v = as_vector(e, p);
    }
  };
  parse_init("x0", s.x0_mode, s.x0);
  parse_init("y0", s.y0_mode, s.y0);
  if (j.contains("seed")) {
    const json& e = j["seed"];
    if (!e.is_number_integer()) bad(path + ".seed", "expected an integer");
    if (!e.is_number_unsigned() && e.get<std::int64_t>() < 0)
      bad(path + ".seed", "seed must be nonnegative");
    s.seed = e.get<std::uint64_t>();
  }
  if (j.contains("init_range")) {
    Eigen::VectorXd r = as_vector(j["init_range"], path + ".init_range");
    if (r.size() != 2 || !(r(0) < r(1)))
      bad(path + ".init_range", "expected [lo, hi] with lo < hi");
    s.init_lo = r(0);
    s.init_hi = r(1);
  }
  return s;
}

AnalysisSpec parse_analysis(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  check_keys(j, path,
             {"lyapunov", "conditions", "rate_fit", "theta", "certificate"});
  AnalysisSpec a;
  if (j.contains("lyapunov"))
    a.lyapunov = as_bool(j["lyapunov"], path + ".lyapunov");
  if (j.contains("conditions"))
    a.conditions = as_bool(j["conditions"], path + ".conditions");
  if (j.contains("rate_fit")) {
    const json& r = j["rate_fit"];
    if (r.is_boolean()) {
      a.rate_fit = r.get<bool>();
    } else if (r.is_array() && r.size() == 2) {
      double ta = as_number(r[0], path + ".rate_fit[0]");
      double tb = as_number(r[1], path + ".rate_fit[1]");
      if (!(ta < tb)) bad(path + ".rate_fit", "window must satisfy t_a < t_b");
      a.rate_fit = true;
      a.rate_window = {ta, tb};
    } else {
      bad(path + ".rate_fit", "expected a boolean or [t_a, t_b]");
    }
  }
  if (j.contains("theta")) {
    a.theta = as_number(j["theta"], path + ".theta");
    if (!(a.theta > 0.0 && a.theta < 1.0))
      bad(path + ".theta", "must lie in (0, 1)");
  }
  if (j.contains("certificate")) {
    a.certificate = as_string(j["certificate"], path + ".certificate");
    if (a.certificate != "general" && a.certificate != "diagonal")
      bad(path + ".certificate", "must be \"general\" or \"diagonal\"");
  }
  return a;
}

OutputSpec parse_output(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  check_keys(j, path, {"csv", "summary"});
  OutputSpec o;
  if (j.contains("csv")) o.csv = as_string(j["csv"], path + ".csv");
  if (j.contains("summary"))
    o.summary = as_string(j["summary"], path + ".summary");
  return o;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) fail(Err::BadConfig, "$: expected a configuration object");
  check_keys(j, "$",
             {"game", "graph", "schedule", "sim", "analysis", "output",
              "notes"});
  ExperimentConfig cfg;
  if (j.contains("game")) cfg.game = parse_game(j["game"], "$.game");
  if (j.contains("graph")) cfg.graph = parse_graph(j["graph"], "$.graph");
  if (j.contains("schedule"))
    cfg.schedule = parse_schedule(j["schedule"], "$.schedule");
  if (j.contains("sim")) cfg.sim = parse_sim(j["sim"], "$.sim");
  if (j.contains("analysis"))
    cfg.analysis = parse_analysis(j["analysis"], "$.analysis");
  if (j.contains("output")) cfg.output = parse_output(j["output"], "$.output");
  if (j.contains("notes")) cfg.notes = as_string(j["notes"], "$.notes");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Err::BadConfig, "cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Err::BadConfig,
         "config " + path + " is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

GameModel make_game(const GameSpec& spec) {
  if (spec.kind == "energy") return energy_game(spec.xq, spec.r1, spec.r2);
  if (spec.kind == "connectivity") return connectivity_game();
  return affine_game(spec.m, spec.b, spec.dims, spec.seek);
}

DirectedGraph make_graph(const GraphSpec& spec) {
  return build_graph(spec.n, spec.edges);
}

Schedule make_schedule(const ScheduleSpec& spec, double fallback_horizon) {
  double horizon = spec.horizon ? *spec.horizon : fallback_horizon;
  require(horizon > 0.0, Err::BadConfig,
          "schedule horizon is undetermined: set schedule.horizon or "
          "sim.t_end");
  if (spec.kind == "periodic")
    return periodic_schedule(spec.period, spec.ratio, horizon);
  return from_intervals(spec.windows, horizon);
}

Eigen::VectorXd resolved_kbar(const SimSpec& sim, int n) {
  if (sim.kbar_broadcast) return Eigen::VectorXd::Constant(n, sim.kbar_value);
  require(sim.kbar.size() == n, Err::DimensionMismatch,
          "kbar lists " + std::to_string(sim.kbar.size()) + " gains for " +
              std::to_string(n) + " players");
  return sim.kbar;
}

InitialState resolve_initial_state(const SimSpec& sim, int n, int total_dim,
                                   std::uint64_t seed) {
  InitialState st;
  std::mt19937_64 rng(seed);
  auto draw = [&](Eigen::Index count) {
    Eigen::VectorXd v(count);
    for (Eigen::Index k = 0; k < count; ++k)
      v(k) = uniform_real(rng, sim.init_lo, sim.init_hi);
    return v;
  };
  // random blocks consume the stream in x0-then-y0 order
  switch (sim.x0_mode) {
    case InitMode::Zero:
      st.x0 = Eigen::VectorXd::Zero(total_dim);
      break;
    case InitMode::Random:
      st.x0 = draw(total_dim);
      break;
    case InitMode::Explicit:
      require(sim.x0.size() == total_dim, Err::DimensionMismatch,
              "x0 has " + std::to_string(sim.x0.size()) +
                  " entries, expected " + std::to_string(total_dim));
      st.x0 = sim.x0;
      break;
  }
  switch (sim.y0_mode) {
    case InitMode::Zero:
      st.y0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * total_dim);
      break;
    case InitMode::Random:
      st.y0 = draw(static_cast<Eigen::Index>(n) * total_dim);
      break;
    case InitMode::Explicit:
      require(sim.y0.size() == static_cast<Eigen::Index>(n) * total_dim,
              Err::DimensionMismatch,
              "y0 has " + std::to_string(sim.y0.size()) +
                  " entries, expected " + std::to_string(n * total_dim));
      st.y0 = sim.y0;
      break;
  }
  return st;
}

}  // namespace neseek
