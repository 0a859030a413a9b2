#include "neseek/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "neseek/analysis.hpp"
#include "neseek/config.hpp"
#include "neseek/dynamics.hpp"
#include "neseek/game.hpp"
#include "neseek/graph.hpp"

namespace neseek {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(Err code) {
  switch (code) {
    case Err::NotHurwitz:
    case Err::SingularSystem:
    case Err::NoConvergence:
    case Err::NonPositiveBeta:
      return 3;
    case Err::NonFiniteState:
      return 4;
    default:
      return 2;
  }
}

json error_json(const std::string& code, const std::string& message) {
  return json{{"error", {{"code", code}, {"message", message}}}};
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json width_stats_json(const WidthStats& w) {
  return json{{"min", w.min}, {"mean", w.mean}, {"max", w.max},
              {"count", w.count}};
}

json quasi_stats_json(const QuasiStats& q) {
  return json{{"inf_width", q.inf_width},
              {"sup_period", q.sup_period},
              {"window_count", q.window_count}};
}

const char* acr_mode_name(AcrMode mode) {
  return mode == AcrMode::FromZero ? "from-zero" : "all-pairs";
}

json acr_report_json(const AcrReport& r) {
  return json{{"theta", r.theta},
              {"mode", acr_mode_name(r.mode)},
              {"elastic_slack", r.elastic_slack},
              {"holds_strict", r.holds_strict},
              {"worst_time", r.worst_time},
              {"worst_start", r.worst_start}};
}

// gamma5 is an unbounded sentinel and is deliberately left out of the JSON.
json constants_json(const TheoremConstants& c) {
  return json{{"alpha", c.alpha},
              {"beta", c.beta},
              {"gamma1", c.gamma1},
              {"gamma2", c.gamma2},
              {"gamma3", c.gamma3},
              {"gamma4", c.gamma4},
              {"gamma3_exact", c.gamma3_exact},
              {"kbar_min", c.kbar_min},
              {"kbar_max", c.kbar_max},
              {"p_min", c.p_min},
              {"p_norm", c.p_norm},
              {"q_min", c.q_min},
              {"pi1", c.pi1},
              {"pi2", c.pi2},
              {"eps1_star", c.eps1_star},
              {"eps2_star", c.eps2_star},
              {"eps_star", c.eps_star},
              {"epsilon", c.epsilon},
              {"epsilon_exceeds_star", c.epsilon_exceeds_star},
              {"eta1", c.eta1},
              {"eta2", c.eta2},
              {"mu1", c.mu1},
              {"mu2", c.mu2},
              {"mu2_alt", c.mu2_alt}};
}

json condition_json(const ConditionReport& r) {
  json inputs = json::object();
  for (const auto& [key, value] : r.inputs) inputs[key] = value;
  return json{{"regime", regime_name(r.regime)},
              {"satisfied", r.satisfied},
              {"margin", r.margin},
              {"mu1", r.mu1},
              {"mu2", r.mu2},
              {"eps_star", r.eps_star},
              {"inputs", inputs}};
}

// Largest realized silent-time fraction over prefixes [0, t]; the fraction
// peaks at window openings (and the horizon), so checking breakpoints is
// exact.
double max_silent_ratio(const Schedule& s) {
  std::vector<double> pts;
  for (const Window& w : s.windows) {
    if (w.open > 0.0) pts.push_back(w.open);
    pts.push_back(w.close);
  }
  pts.push_back(s.horizon);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double worst = 0.0;
  for (double t : pts) {
    if (t <= 0.0 || t > s.horizon) continue;
    worst = std::max(worst, (t - comm_width(s, 0.0, t)) / t);
  }
  return worst;
}

json check_or_error(const std::function<ConditionReport()>& make) {
  try {
    return condition_json(make());
  } catch (const Error& e) {
    return json{{"error", {{"code", err_name(e.code())},
                           {"message", e.what()}}}};
  }
}

// All four condition checks against one schedule; individual precondition
// failures are reported in place instead of aborting the others.
json evaluate_checks(const TheoremConstants& c, const Schedule& sched,
                     double acr_theta) {
  json checks;
  checks["pic"] = check_or_error([&] {
    double theta_tilde =
        sched.periodic ? sched.ratio
                       : comm_width(sched, 0.0, sched.horizon) / sched.horizon;
    return check_pic(c, theta_tilde);
  });
  checks["aic"] = check_or_error([&] {
    QuasiStats q = quasi_periodic_stats(sched);
    return check_aic(c, q.inf_width, q.sup_period);
  });
  checks["min_ratio"] = check_or_error(
      [&] { return check_min_ratio(c, max_silent_ratio(sched)); });
  checks["acr"] =
      check_or_error([&] { return check_acr_condition(c, acr_theta); });
  return checks;
}

std::string resolve_path(const std::string& out_dir, const std::string& name) {
  fs::path p(name);
  if (p.is_absolute()) return p.string();
  return (fs::path(out_dir) / p).string();
}

std::string config_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

void ensure_parent_dir(const std::string& file_path) {
  fs::path parent = fs::path(file_path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::BadConfig, "cannot open " + path + " for writing");
  out << text;
  require(out.good(), Err::BadConfig, "failed while writing " + path);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<double>* lyapunov) {
  ensure_parent_dir(path);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  require(f != nullptr, Err::BadConfig, "cannot open " + path +
                                            " for writing");
  const int d = static_cast<int>(traj.x_samples.cols());
  const int nd = static_cast<int>(traj.y_samples.cols());
  std::fputs("t,comm", f);
  for (int k = 0; k < d; ++k) std::fprintf(f, ",x_%d", k + 1);
  for (int k = 0; k < nd; ++k) std::fprintf(f, ",y_%d", k + 1);
  if (lyapunov != nullptr) std::fputs(",V", f);
  std::fputc('\n', f);
  const int m = static_cast<int>(traj.times.size());
  for (int r = 0; r < m; ++r) {
    std::fprintf(f, "%.17g,%d", traj.times[r], traj.comm_flags[r]);
    for (int k = 0; k < d; ++k)
      std::fprintf(f, ",%.17g", traj.x_samples(r, k));
    for (int k = 0; k < nd; ++k)
      std::fprintf(f, ",%.17g", traj.y_samples(r, k));
    if (lyapunov != nullptr) std::fprintf(f, ",%.17g", (*lyapunov)[r]);
    std::fputc('\n', f);
  }
  bool ok = std::fclose(f) == 0;
  require(ok, Err::BadConfig, "failed while writing " + path);
}

json game_echo(const GameSpec& spec) {
  json g{{"kind", spec.kind}};
  if (spec.kind == "energy") {
    g["xq"] = vec_json(spec.xq);
    g["r1"] = spec.r1;
    g["r2"] = spec.r2;
  } else if (spec.kind == "affine") {
    g["M"] = mat_json(spec.m);
    g["b"] = vec_json(spec.b);
    g["dims"] = spec.dims;
    if (spec.seek.size() > 0) g["seek_sign"] = vec_json(spec.seek);
  }
  return g;
}

json graph_echo(const GraphSpec& spec) {
  json edges = json::array();
  for (const Edge& e : spec.edges)
    edges.push_back(json::array({e.from + 1, e.to + 1, e.weight}));
  return json{{"n", spec.n}, {"edges", edges}};
}

json schedule_echo(const ScheduleSpec& spec, double resolved_horizon) {
  json s{{"kind", spec.kind}, {"horizon", resolved_horizon}};
  if (spec.kind == "periodic") {
    s["T"] = spec.period;
    s["theta"] = spec.ratio;
  } else {
    json windows = json::array();
    for (const Window& w : spec.windows)
      windows.push_back(json::array({w.open, w.close}));
    s["windows"] = windows;
    if (spec.reference) {
      s["reference_stats"] = json{{"min", spec.reference->min},
                                  {"mean", spec.reference->mean},
                                  {"max", spec.reference->max}};
    }
  }
  return s;
}

json analysis_echo(const AnalysisSpec& a) {
  json out{{"lyapunov", a.lyapunov},
           {"conditions", a.conditions},
           {"theta", a.theta},
           {"certificate", a.certificate}};
  if (a.rate_window)
    out["rate_fit"] = json::array({a.rate_window->first,
                                   a.rate_window->second});
  else
    out["rate_fit"] = a.rate_fit;
  return out;
}

LyapunovCertificate make_certificate(const DirectedGraph& g,
                                     const std::string& kind) {
  CouplingMatrices cm = coupling_matrices(g);
  if (kind == "diagonal") return solve_diagonal_certificate(cm);
  const Eigen::Index m = cm.h.rows();
  return solve_lyapunov_certificate(cm, Eigen::MatrixXd::Identity(m, m));
}

struct EpsilonChoice {
  double value = 0.0;
  std::string source;  // "config" | "auto" | "fallback"
};

EpsilonChoice resolve_epsilon(const SimSpec& sim, const double* eps_star,
                              std::vector<std::string>& warnings) {
  if (!sim.epsilon_auto) return {sim.epsilon, "config"};
  if (eps_star != nullptr && std::isfinite(*eps_star) && *eps_star > 0.0)
    return {0.9 * *eps_star, "auto"};
  warnings.push_back(
      "epsilon was \"auto\" but no usable eps_star is available; "
      "defaulting to 0.1");
  return {0.1, "fallback"};
}

void print_stdout(const json& j) { std::cout << j.dump(2) << std::endl; }

int report_error(const Error& e, const std::string& config_path) {
  json err = error_json(err_name(e.code()), e.what());
  if (!config_path.empty()) err["error"]["config"] = config_path;
  std::cerr << err.dump(2) << std::endl;
  return exit_code_for(e.code());
}

int report_unexpected(const std::exception& e,
                      const std::string& config_path) {
  json err = error_json("BadConfig", e.what());
  if (!config_path.empty()) err["error"]["config"] = config_path;
  std::cerr << err.dump(2) << std::endl;
  return 2;
}

const ExperimentConfig load_single(const CommandOptions& opt,
                                   const char* command) {
  require(opt.configs.size() == 1, Err::BadConfig,
          std::string(command) + " expects exactly one --config");
  return load_config(opt.configs[0]);
}

}  // namespace

int cmd_solve_ne(const CommandOptions& opt) {
  std::string path = opt.configs.empty() ? "" : opt.configs[0];
  try {
    ExperimentConfig cfg = load_single(opt, "solve-ne");
    require(cfg.game.has_value(), Err::BadConfig, "$.game is required");
    GameModel game = make_game(*cfg.game);
    NashSolution sol = solve_nash(game);
    json out{{"x_star", vec_json(sol.x_star)},
             {"residual", sol.residual},
             {"iterations", sol.iterations}};
    print_stdout(out);
    if (!cfg.output.summary.empty())
      write_text_file(resolve_path(opt.out_dir, cfg.output.summary),
                      out.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    return report_error(e, path);
  } catch (const std::exception& e) {
    return report_unexpected(e, path);
  }
}

int cmd_check_schedule(const CommandOptions& opt) {
  std::string path = opt.configs.empty() ? "" : opt.configs[0];
  try {
    ExperimentConfig cfg = load_single(opt, "check-schedule");
    require(cfg.schedule.has_value(), Err::BadConfig,
            "$.schedule is required");
    double fallback = cfg.sim.t_end ? *cfg.sim.t_end : -1.0;
    Schedule sched = make_schedule(*cfg.schedule, fallback);
    double theta = opt.theta ? *opt.theta : cfg.analysis.theta;
    WidthStats stats = interval_stats(sched);
    QuasiStats quasi = quasi_periodic_stats(sched);
    AcrReport acr = check_acr(sched, theta, opt.mode);
    json out{{"interval_stats", width_stats_json(stats)},
             {"quasi_stats", quasi_stats_json(quasi)},
             {"acr", acr_report_json(acr)},
             {"horizon", sched.horizon}};
    if (cfg.schedule->reference) {
      const WidthStats& ref = *cfg.schedule->reference;
      out["reference_stats"] =
          json{{"min", ref.min}, {"mean", ref.mean}, {"max", ref.max}};
      json mismatches = json::array();
      auto compare = [&](const char* name, double listed, double measured) {
        if (std::abs(listed - measured) > 1e-9)
          mismatches.push_back(
              std::string(name) + " differs: listed " +
              std::to_string(listed) + ", measured " +
              std::to_string(measured));
      };
      compare("min", ref.min, stats.min);
      compare("mean", ref.mean, stats.mean);
      compare("max", ref.max, stats.max);
      out["reference_mismatches"] = mismatches;
    }
    print_stdout(out);
    if (!cfg.output.summary.empty())
      write_text_file(resolve_path(opt.out_dir, cfg.output.summary),
                      out.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    return report_error(e, path);
  } catch (const std::exception& e) {
    return report_unexpected(e, path);
  }
}

int cmd_check_conditions(const CommandOptions& opt) {
  std::string path = opt.configs.empty() ? "" : opt.configs[0];
  try {
    ExperimentConfig cfg = load_single(opt, "check-conditions");
    require(cfg.game.has_value(), Err::BadConfig, "$.game is required");
    require(cfg.graph.has_value(), Err::BadConfig, "$.graph is required");
    require(cfg.schedule.has_value(), Err::BadConfig,
            "$.schedule is required");
    GameModel game = make_game(*cfg.game);
    DirectedGraph graph = make_graph(*cfg.graph);
    double fallback = cfg.sim.t_end ? *cfg.sim.t_end : -1.0;
    Schedule sched = make_schedule(*cfg.schedule, fallback);
    Eigen::VectorXd kbar = resolved_kbar(cfg.sim, game.n);
    LyapunovCertificate cert =
        make_certificate(graph, cfg.analysis.certificate);
    RegularityConstants reg = regularity_constants(game);
    std::vector<std::string> warnings;
    TheoremConstants probe = build_constants(game, reg, kbar, cert, 1.0);
    EpsilonChoice eps = resolve_epsilon(cfg.sim, &probe.eps_star, warnings);
    TheoremConstants constants =
        build_constants(game, reg, kbar, cert, eps.value);
    double acr_theta = opt.theta ? *opt.theta : cfg.analysis.theta;
    json out{{"constants", constants_json(constants)},
             {"checks", evaluate_checks(constants, sched, acr_theta)},
             {"epsilon", eps.value},
             {"epsilon_source", eps.source},
             {"certificate_residual", cert.residual}};
    if (!warnings.empty()) out["warnings"] = warnings;
    if (opt.sweep > 0) {
      require(opt.sweep >= 2, Err::BadConfig,
              "--sweep needs at least 2 samples");
      std::string sweep_path = resolve_path(
          opt.out_dir, config_stem(opt.configs[0]) + "_acr_sweep.csv");
      ensure_parent_dir(sweep_path);
      std::FILE* f = std::fopen(sweep_path.c_str(), "wb");
      require(f != nullptr, Err::BadConfig,
              "cannot open " + sweep_path + " for writing");
      std::fputs("vartheta,margin,satisfied\n", f);
      for (int k = 1; k <= opt.sweep; ++k) {
        double v = static_cast<double>(k) / (opt.sweep + 1);
        ConditionReport r = check_acr_condition(constants, v);
        std::fprintf(f, "%.17g,%.17g,%d\n", v, r.margin,
                     r.satisfied ? 1 : 0);
      }
      require(std::fclose(f) == 0, Err::BadConfig,
              "failed while writing " + sweep_path);
      out["sweep_csv"] = sweep_path;
    }
    print_stdout(out);
    if (!cfg.output.summary.empty())
      write_text_file(resolve_path(opt.out_dir, cfg.output.summary),
                      out.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    return report_error(e, path);
  } catch (const std::exception& e) {
    return report_unexpected(e, path);
  }
}

namespace {

int run_one(const CommandOptions& opt, const std::string& config_path,
            std::mutex& io) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    require(cfg.game.has_value(), Err::BadConfig, "$.game is required");
    require(cfg.graph.has_value(), Err::BadConfig, "$.graph is required");
    require(cfg.schedule.has_value(), Err::BadConfig,
            "$.schedule is required");
    require(cfg.sim.t_end.has_value(), Err::BadConfig,
            "$.sim.t_end is required for run");
    GameModel game = make_game(*cfg.game);
    DirectedGraph graph = make_graph(*cfg.graph);
    double t_end = *cfg.sim.t_end;
    Schedule sched = make_schedule(*cfg.schedule, t_end);
    Eigen::VectorXd kbar = resolved_kbar(cfg.sim, game.n);
    std::uint64_t seed = opt.seed ? *opt.seed : cfg.sim.seed;
    InitialState init =
        resolve_initial_state(cfg.sim, game.n, game.total_dim, seed);

    std::vector<std::string> warnings;

    // Certificate and constants may be unavailable (for instance a graph
    // that is not strongly connected); that only disables the dependent
    // diagnostics, never the run itself.
    LyapunovCertificate cert;
    RegularityConstants reg;
    bool have_cert = false;
    std::string cert_error;
    std::string cert_error_code;
    try {
      cert = make_certificate(graph, cfg.analysis.certificate);
      reg = regularity_constants(game);
      have_cert = true;
    } catch (const Error& e) {
      cert_error = e.what();
      cert_error_code = err_name(e.code());
      warnings.push_back("constants unavailable: " + cert_error);
    }

    double eps_star_probe = 0.0;
    bool have_constants = false;
    if (have_cert) {
      try {
        TheoremConstants probe = build_constants(game, reg, kbar, cert, 1.0);
        eps_star_probe = probe.eps_star;
        have_constants = true;
      } catch (const Error& e) {
        cert_error = e.what();
        cert_error_code = err_name(e.code());
        warnings.push_back("constants unavailable: " + cert_error);
      }
    }
    EpsilonChoice eps = resolve_epsilon(
        cfg.sim, have_constants ? &eps_star_probe : nullptr, warnings);
    TheoremConstants constants;
    if (have_constants)
      constants = build_constants(game, reg, kbar, cert, eps.value);

    SimConfig sim;
    sim.epsilon = eps.value;
    sim.kbar = kbar;
    sim.dt = cfg.sim.dt;
    sim.t_end = t_end;
    sim.x0 = init.x0;
    sim.y0 = init.y0;
    Trajectory traj = simulate(game, graph, sched, sim);
    for (const std::string& w : traj.warnings) warnings.push_back(w);

    NashSolution nash = solve_nash(game);
    ErrorTraces errors = error_traces(traj, nash.x_star);

    std::vector<double> lyapunov;
    bool have_lyapunov = false;
    if (cfg.analysis.lyapunov && have_cert) {
      try {
        LyapunovCertificate lifted = lift_certificate(cert, game.dims);
        lyapunov = lyapunov_trace(traj, nash.x_star, lifted);
        have_lyapunov = true;
      } catch (const Error& e) {
        warnings.push_back(std::string("lyapunov trace unavailable: ") +
                           e.what());
      }
    } else if (cfg.analysis.lyapunov && !have_cert) {
      warnings.push_back("lyapunov trace unavailable: " + cert_error);
    }

    json fitted_rate;  // null unless the fit succeeds
    double rate_a = 0.0;
    double rate_b = t_end;
    if (cfg.analysis.rate_window) {
      rate_a = cfg.analysis.rate_window->first;
      rate_b = cfg.analysis.rate_window->second;
    }
    if (cfg.analysis.rate_fit && have_lyapunov) {
      try {
        fitted_rate =
            fit_exponential_rate(traj.times, lyapunov, rate_a, rate_b);
      } catch (const Error& e) {
        warnings.push_back(std::string("rate fit unavailable: ") + e.what());
      }
    } else if (cfg.analysis.rate_fit && !have_lyapunov) {
      warnings.push_back("rate fit skipped: no lyapunov trace");
    }

    json conditions;
    if (cfg.analysis.conditions) {
      if (have_constants)
        conditions = evaluate_checks(constants, sched, cfg.analysis.theta);
      else
        conditions = json{{"error", {{"code", cert_error_code},
                                     {"message", cert_error}}}};
    }

    std::string stem = config_stem(config_path);
    std::string csv_name = cfg.output.csv.empty()
                               ? stem + "_trajectory.csv"
                               : cfg.output.csv;
    std::string summary_name = cfg.output.summary.empty()
                                   ? stem + "_summary.json"
                                   : cfg.output.summary;
    std::string csv_path = resolve_path(opt.out_dir, csv_name);
    std::string summary_path = resolve_path(opt.out_dir, summary_name);
    write_trajectory_csv(csv_path, traj,
                         have_lyapunov ? &lyapunov : nullptr);

    json effective{
        {"game", game_echo(*cfg.game)},
        {"graph", graph_echo(*cfg.graph)},
        {"schedule", schedule_echo(*cfg.schedule, sched.horizon)},
        {"sim",
         {{"epsilon", eps.value},
          {"kbar", vec_json(kbar)},
          {"dt", cfg.sim.dt},
          {"t_end", t_end},
          {"x0", vec_json(init.x0)},
          {"y0", vec_json(init.y0)},
          {"seed", seed},
          {"init_range", json::array({cfg.sim.init_lo, cfg.sim.init_hi})}}},
        {"analysis", analysis_echo(cfg.analysis)},
        {"output", {{"csv", csv_name}, {"summary", summary_name}}}};
    if (!cfg.notes.empty()) effective["notes"] = cfg.notes;

    json summary{
        {"config", config_path},
        {"x_star", vec_json(nash.x_star)},
        {"nash_residual", nash.residual},
        {"nash_iterations", nash.iterations},
        {"final_x", vec_json(traj.x_samples.row(traj.x_samples.rows() - 1)
                                 .transpose())},
        {"final_e_norm", errors.e_norms.back()},
        {"final_ex_norm", errors.ex_norms.back()},
        {"epsilon", eps.value},
        {"epsilon_source", eps.source},
        {"fitted_rate", fitted_rate},
        {"rate_window", json::array({rate_a, rate_b})},
        {"sample_count", static_cast<int>(traj.times.size())},
        {"csv", csv_path},
        {"schedule_stats", width_stats_json(interval_stats(sched))},
        {"quasi_stats", quasi_stats_json(quasi_periodic_stats(sched))},
        {"warnings", warnings},
        {"effective_config", effective}};
    if (have_constants) summary["constants"] = constants_json(constants);
    if (cfg.analysis.conditions) summary["conditions"] = conditions;
    write_text_file(summary_path, summary.dump(2) + "\n");

    {
      std::lock_guard<std::mutex> lock(io);
      print_stdout(json{{"config", config_path},
                        {"csv", csv_path},
                        {"summary", summary_path},
                        {"final_e_norm", errors.e_norms.back()},
                        {"epsilon", eps.value}});
    }
    return 0;
  } catch (const Error& e) {
    std::lock_guard<std::mutex> lock(io);
    return report_error(e, config_path);
  } catch (const std::exception& e) {
    std::lock_guard<std::mutex> lock(io);
    return report_unexpected(e, config_path);
  }
}

}  // namespace

int cmd_run(const CommandOptions& opt) {
  if (opt.configs.empty()) {
    std::cerr << error_json("BadConfig", "run expects at least one --config")
                     .dump(2)
              << std::endl;
    return 2;
  }
  std::mutex io;
  std::vector<int> codes(opt.configs.size(), 0);
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1 || opt.configs.size() == 1) {
    for (std::size_t i = 0; i < opt.configs.size(); ++i)
      codes[i] = run_one(opt, opt.configs[i], io);
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= opt.configs.size()) break;
        codes[i] = run_one(opt, opt.configs[i], io);
      }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads =
        std::min<std::size_t>(jobs, opt.configs.size());
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace neseek
