#pragma once

#include <string>

#include "hybridplace/config.hpp"
#include "hybridplace/estimator.hpp"
#include "hybridplace/mm_solver.hpp"
#include "hybridplace/oracle.hpp"

namespace hybridplace {

/// %.17g; lossless round-trip for doubles.
std::string format_double(double v);

/// Writes content to path via a temp file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// The config echoed into every result document: each section name gains an
/// "echo." prefix. extract_echoed_config() strips it and re-parses.
std::string echo_config(const RunConfig& cfg);
RunConfig extract_echoed_config(const std::string& result_text);

std::string render_design_result(const RunConfig& cfg, const DesignResult& res);
std::string render_trace_csv(const DesignResult& res);
std::string render_evaluate_result(const RunConfig& cfg, double a, double d,
                                   double e);
std::string render_mse_report(const RunConfig& cfg, const MseReport& report,
                              const std::string& placement_name);
std::string render_bruteforce_result(const RunConfig& cfg,
                                     const BruteForceResult& res);

}  // namespace hybridplace
