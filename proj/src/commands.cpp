#include "hybridplace/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "hybridplace/errors.hpp"
#include "hybridplace/report.hpp"

namespace hybridplace {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Stream tag separating random-placement draws from measurement noise.
constexpr uint64_t kPlacementStream = 0x706c6163u;

struct LoadedConfig {
  RunConfig cfg;
  std::string base_dir;
  std::string out_dir;
};

LoadedConfig load(const CommandOptions& opts) {
  LoadedConfig lc;
  lc.cfg = parse_run_config(parse_document_file(opts.config_path));
  if (opts.seed) lc.cfg.solver.seed = *opts.seed;
  if (opts.out) lc.cfg.out_dir = *opts.out;
  lc.base_dir = std::filesystem::path(opts.config_path).parent_path().string();
  lc.out_dir = lc.cfg.out_dir;
  return lc;
}

std::string out_path(const LoadedConfig& lc, const char* name) {
  return (std::filesystem::path(lc.out_dir) / name).string();
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

TargetSensorConfig circle_placement(const RunConfig& cfg,
                                    const DesignProblem& problem,
                                    const std::vector<double>& angles) {
  TargetSensorConfig tc;
  tc.target = cfg.target;
  tc.sensors = Mat(cfg.m, 2);
  for (int i = 0; i < cfg.m; ++i) {
    tc.sensors(i, 0) = cfg.target[0] - problem.distances.d[i] * std::cos(angles[i]);
    tc.sensors(i, 1) = cfg.target[1] - problem.distances.d[i] * std::sin(angles[i]);
  }
  return tc;
}

}  // namespace

int cmd_design(const CommandOptions& opts) {
  LoadedConfig lc;
  DesignProblem problem;
  Orientation init = uniform_orientation(2, 2);
  try {
    lc = load(opts);
    problem = build_problem(lc.cfg, lc.base_dir);
    init = build_initial_orientation(lc.cfg, lc.base_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalidConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    const DesignResult res = solve(problem, init, lc.cfg.solver);
    write_file_atomic(out_path(lc, "design_result.txt"),
                      render_design_result(lc.cfg, res));
    write_file_atomic(out_path(lc, "design_trace.csv"), render_trace_csv(res));
    std::printf("design: status=%s criterion=%s value=%s iterations=%d (%.1f ms)\n",
                res.status == TerminationReason::kConverged ? "converged"
                                                            : "max-iterations",
                criterion_name(lc.cfg.criterion),
                format_double(res.trace.back().criterion).c_str(),
                res.trace.back().iter, elapsed_ms(t0));
    return res.status == TerminationReason::kConverged ? kExitOk
                                                       : kExitMaxIterations;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolverError;
  }
}

int cmd_evaluate(const CommandOptions& opts, const std::string& orientation_path) {
  LoadedConfig lc;
  DesignProblem problem;
  Mat j;
  try {
    lc = load(opts);
    problem = build_problem(lc.cfg, lc.base_dir);
    j = load_matrix_file(orientation_path);
    if (j.rows() != lc.cfg.m || j.cols() != lc.cfg.n)
      throw ConfigError(orientation_path + ": orientation must be " +
                        std::to_string(lc.cfg.m) + "x" + std::to_string(lc.cfg.n));
    for (int i = 0; i < j.rows(); ++i) {
      double s = 0.0;
      for (int k = 0; k < j.cols(); ++k) s += j(i, k) * j(i, k);
      const double dev = std::fabs(std::sqrt(s) - 1.0);
      if (dev > 1e-6)
        throw ConfigError(orientation_path + ": row " + std::to_string(i) +
                          " is not unit-norm (|norm-1| = " + format_double(dev) +
                          " > 1e-6)");
      if (dev > 1e-9) {
        std::fprintf(stderr,
                     "warning: renormalizing row %d (|norm-1| = %g)\n", i, dev);
        const double norm = std::sqrt(s);
        for (int k = 0; k < j.cols(); ++k) j(i, k) /= norm;
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalidConfig;
  }

  try {
    const FimResult fim = hybrid_fim(problem, Orientation(j));
    write_file_atomic(
        out_path(lc, "evaluate_result.txt"),
        render_evaluate_result(lc.cfg, fim.trace_crlb, fim.neg_log_det_f,
                               fim.max_eig_crlb));
    std::printf("evaluate: A=%s D=%s E=%s\n",
                format_double(fim.trace_crlb).c_str(),
                format_double(fim.neg_log_det_f).c_str(),
                format_double(fim.max_eig_crlb).c_str());
    return kExitOk;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolverError;
  }
}

int cmd_mse(const CommandOptions& opts) {
  LoadedConfig lc;
  DesignProblem problem;
  try {
    lc = load(opts);
    if (lc.cfg.n != 2)
      throw ConfigError(opts.config_path + ": mse requires n = 2");
    problem = build_problem(lc.cfg, lc.base_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalidConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    TargetSensorConfig placement;
    std::string placement_name;
    switch (lc.cfg.placement) {
      case PlacementKind::kDesigned: {
        placement_name = "designed";
        const Orientation init = build_initial_orientation(lc.cfg, lc.base_dir);
        const DesignResult res = solve(problem, init, lc.cfg.solver);
        const std::vector<double> design_target =
            lc.cfg.design_target.value_or(lc.cfg.target);
        placement =
            positions_from_orientation(res.j_star, problem.distances, design_target);
        placement.target = lc.cfg.target;  // truth may differ from the design point
        break;
      }
      case PlacementKind::kUniformCircle: {
        placement_name = "uniform";
        std::vector<double> angles(lc.cfg.m);
        for (int i = 0; i < lc.cfg.m; ++i) angles[i] = 2.0 * kPi * i / lc.cfg.m;
        placement = circle_placement(lc.cfg, problem, angles);
        break;
      }
      case PlacementKind::kRandomCircle: {
        placement_name = "random";
        RngStream rng = RngStream(lc.cfg.solver.seed).substream(kPlacementStream);
        std::vector<double> angles(lc.cfg.m);
        for (int i = 0; i < lc.cfg.m; ++i) angles[i] = rng.uniform(0.0, 2.0 * kPi);
        placement = circle_placement(lc.cfg, problem, angles);
        break;
      }
    }

    GridSpec grid = GridSpec::default_for(placement);
    if (lc.cfg.grid_half_width) grid.half_width = *lc.cfg.grid_half_width;
    grid.resolution = lc.cfg.grid_resolution;

    const MseReport report =
        monte_carlo_mse(placement, problem.noise, problem.constants,
                        lc.cfg.trials, grid, lc.cfg.solver.seed);
    write_file_atomic(out_path(lc, "mse_report.txt"),
                      render_mse_report(lc.cfg, report, placement_name));
    std::printf("mse: placement=%s trials=%d mse=%s failures=%d (%.1f ms)\n",
                placement_name.c_str(), report.trials,
                format_double(report.mse).c_str(), report.failures,
                elapsed_ms(t0));
    if (!report.valid) {
      std::fprintf(stderr, "error: estimation failure rate above 1%%\n");
      return kExitEstimationFailure;
    }
    return kExitOk;
  } catch (const EstimationFailedError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitEstimationFailure;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolverError;
  }
}

int cmd_bruteforce(const CommandOptions& opts, double resolution_deg) {
  LoadedConfig lc;
  DesignProblem problem;
  try {
    lc = load(opts);
    if (lc.cfg.n != 2)
      throw ConfigError(opts.config_path + ": bruteforce requires n = 2");
    if (lc.cfg.m > 3)
      throw ConfigError(opts.config_path +
                        ": bruteforce refused for m > 3 (grid grows as T^m)");
    if (resolution_deg < 0.5)
      throw ConfigError("resolution below 0.5 degrees refused");
    problem = build_problem(lc.cfg, lc.base_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalidConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    const BruteForceResult res = brute_force_design(problem, resolution_deg);
    write_file_atomic(out_path(lc, "bruteforce_result.txt"),
                      render_bruteforce_result(lc.cfg, res));
    std::printf("bruteforce: criterion=%s value=%s resolution=%gdeg (%.1f ms)\n",
                criterion_name(lc.cfg.criterion), format_double(res.value).c_str(),
                res.resolution_deg, elapsed_ms(t0));
    return kExitOk;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolverError;
  }
}

}  // namespace hybridplace
