#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hybridplace/mm_solver.hpp"
#include "hybridplace/problem.hpp"

namespace hybridplace {

/// Generic sections-and-keys text document ([name] headers, key = value
/// lines, '#' comments). Line numbers are kept for error messages.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  std::vector<ConfigEntry> entries;
  int line = 0;

  const ConfigEntry* find(const std::string& key) const;
};

struct Document {
  std::string source;  // path, or "<string>" for in-memory text
  std::vector<ConfigSection> sections;

  const ConfigSection* find(const std::string& name) const;
};

Document parse_document_text(const std::string& text, const std::string& source);
Document parse_document_file(const std::string& path);

enum class NoiseKind { kUniform, kDiagonal, kFile, kRandomCorrelated };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kUniform;
  double variance = 1.0;            // uniform
  std::vector<double> entries;      // diagonal variances
  std::string path;                 // dense matrix sidecar
  uint64_t seed = 0;                // random-correlated
  double floor = 0.1;               // random-correlated

  bool operator==(const NoiseSpec&) const = default;
};

enum class InitKind { kUniform, kPositions, kFile };
enum class PlacementKind { kDesigned, kUniformCircle, kRandomCircle };

/// Full parsed run configuration; built from a config document and written
/// back verbatim into every result document.
struct RunConfig {
  // [problem]
  int m = 0;
  int n = 2;
  Criterion criterion = Criterion::A;
  std::vector<double> target;               // n entries
  std::optional<std::vector<double>> distances;  // m entries
  std::optional<std::vector<double>> positions;  // m*n entries, row-major
  std::optional<double> alpha;
  std::optional<double> eta;
  double c = 299792458.0;
  double p0 = 0.0;

  // [noise.*]
  NoiseSpec toa;
  NoiseSpec rss;
  std::optional<NoiseSpec> aoa;

  // [solver]
  SolverOptions solver;
  InitKind init = InitKind::kUniform;
  std::string init_path;

  // [mse]
  PlacementKind placement = PlacementKind::kDesigned;
  int trials = 1000;
  std::optional<std::vector<double>> design_target;
  std::optional<double> grid_half_width;
  int grid_resolution = 201;

  // [output]
  std::string out_dir = ".";

  bool operator==(const RunConfig&) const;

  /// Canonical serialization; parse_run_config round-trips it exactly.
  std::string to_text() const;
};

/// Interprets a parsed document. base_dir resolves relative sidecar paths
/// at problem-build time (the stored strings stay as written).
RunConfig parse_run_config(const Document& doc);

/// Builds the solvable problem: resolves noise specs to matrices, derives
/// distances from positions when needed, ties eta and alpha.
DesignProblem build_problem(const RunConfig& cfg, const std::string& base_dir);

/// Initial orientation per the config's init spec.
Orientation build_initial_orientation(const RunConfig& cfg,
                                      const std::string& base_dir);

/// Loads a whitespace-delimited text matrix (one row per line).
Mat load_matrix_file(const std::string& path);
/// As above but requires rows = cols = m and exact symmetry; errors name
/// the offending entry.
SymMatrix load_symmetric_matrix_file(const std::string& path, int m);

}  // namespace hybridplace
