#include "hybridplace/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hybridplace/errors.hpp"

namespace hybridplace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path())
    std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << content;
    if (!out) throw Error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

std::string echo_config(const RunConfig& cfg) {
  const std::string text = cfg.to_text();
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '[')
      out += "[echo." + line.substr(1) + "\n";
    else
      out += line + "\n";
  }
  return out;
}

RunConfig extract_echoed_config(const std::string& result_text) {
  std::istringstream in(result_text);
  std::string line, cfg_text;
  bool in_echo = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '[') {
      in_echo = line.rfind("[echo.", 0) == 0;
      if (in_echo) cfg_text += "[" + line.substr(6) + "\n";
    } else if (in_echo) {
      cfg_text += line + "\n";
    }
  }
  return parse_run_config(parse_document_text(cfg_text, "<echo>"));
}

namespace {

std::string orientation_rows(const Mat& j) {
  std::string out = "[orientation]\n";
  for (int i = 0; i < j.rows(); ++i) {
    out += "row" + std::to_string(i) + " =";
    for (int k = 0; k < j.cols(); ++k) out += " " + format_double(j(i, k));
    out += "\n";
  }
  return out;
}

std::string angle_rows(const Orientation& j) {
  std::string out = "[angles]\n";
  const std::vector<RowAngles> a = angles_from_orientation(j);
  for (size_t i = 0; i < a.size(); ++i) {
    out += "row" + std::to_string(i) + " = " + format_double(a[i].theta);
    if (j.dimension() == 3) out += " " + format_double(a[i].phi);
    out += "\n";
  }
  return out;
}

}  // namespace

std::string render_design_result(const RunConfig& cfg, const DesignResult& res) {
  std::string out = "[format]\nversion = 1\nkind = design_result\n\n[result]\n";
  out += std::string("status = ") +
         (res.status == TerminationReason::kConverged ? "converged"
                                                      : "max-iterations") +
         "\n";
  out += std::string("criterion = ") + criterion_name(cfg.criterion) + "\n";
  out += "value = " + format_double(res.trace.back().criterion) + "\n";
  out += "iterations = " + std::to_string(res.trace.back().iter) + "\n";
  out += "seed = " + std::to_string(cfg.solver.seed) + "\n";
  out += std::string("perturbed_init = ") + (res.perturbed_init ? "1" : "0") + "\n";
  out += "\n" + orientation_rows(res.j_star.j());
  out += "\n" + angle_rows(res.j_star);
  out += "\n" + echo_config(cfg);
  return out;
}

std::string render_trace_csv(const DesignResult& res) {
  // wall_ms stays 0 in files: outputs are byte-reproducible per (config,
  // seed), so measured time is reported on stdout instead.
  std::string out = "iter,criterion,inner_iters,step_norm,floor_hits,wall_ms\n";
  for (const IterationRecord& r : res.trace) {
    out += std::to_string(r.iter) + "," + format_double(r.criterion) + "," +
           std::to_string(r.inner_iterations) + "," + format_double(r.step_norm) +
           "," + std::to_string(r.floor_hits) + ",0\n";
  }
  return out;
}

std::string render_evaluate_result(const RunConfig& cfg, double a, double d,
                                   double e) {
  std::string out = "[format]\nversion = 1\nkind = evaluate_result\n\n[result]\n";
  out += "criterion_a = " + format_double(a) + "\n";
  out += "criterion_d = " + format_double(d) + "\n";
  out += "criterion_e = " + format_double(e) + "\n";
  out += "\n" + echo_config(cfg);
  return out;
}

std::string render_mse_report(const RunConfig& cfg, const MseReport& report,
                              const std::string& placement_name) {
  std::string out = "[format]\nversion = 1\nkind = mse_report\n\n[result]\n";
  out += "placement = " + placement_name + "\n";
  out += "trials = " + std::to_string(report.trials) + "\n";
  out += "mse = " + format_double(report.mse) + "\n";
  out += "failures = " + std::to_string(report.failures) + "\n";
  out += std::string("valid = ") + (report.valid ? "1" : "0") + "\n";
  out += "seed = " + std::to_string(report.seed) + "\n";
  out += "\n[squared_errors]\n";
  for (size_t i = 0; i < report.squared_errors.size(); ++i)
    out += "e" + std::to_string(i) + " = " +
           format_double(report.squared_errors[i]) + "\n";
  out += "\n" + echo_config(cfg);
  return out;
}

std::string render_bruteforce_result(const RunConfig& cfg,
                                     const BruteForceResult& res) {
  std::string out = "[format]\nversion = 1\nkind = bruteforce_result\n\n[result]\n";
  out += std::string("criterion = ") + criterion_name(cfg.criterion) + "\n";
  out += "value = " + format_double(res.value) + "\n";
  out += "resolution_deg = " + format_double(res.resolution_deg) + "\n";
  out += "\n" + orientation_rows(res.orientation.j());
  out += "\n" + echo_config(cfg);
  return out;
}

}  // namespace hybridplace
