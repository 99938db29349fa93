#include "hybridplace/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hybridplace/errors.hpp"

namespace hybridplace {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& source, int line, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) fail(source, line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(source, line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& source, int line, const std::string& v) {
  try {
    size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) fail(source, line, "trailing characters in integer '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(source, line, "expected an integer, got '" + v + "'");
  }
}

uint64_t parse_u64(const std::string& source, int line, const std::string& v) {
  try {
    size_t pos = 0;
    const uint64_t d = std::stoull(v, &pos);
    if (pos != v.size()) fail(source, line, "trailing characters in integer '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(source, line, "expected an unsigned integer, got '" + v + "'");
  }
}

std::vector<double> parse_vector(const std::string& source, int line,
                                 const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string tok;
  while (ss >> tok) out.push_back(parse_double(source, line, tok));
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vector(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt17(v[i]);
  }
  return s;
}

// Section reader with required/optional key helpers and unknown-key checks.
struct SectionReader {
  const std::string& source;
  const ConfigSection* sec;
  std::vector<std::string> known;

  bool has(const std::string& key) {
    known.push_back(key);
    return sec && sec->find(key) != nullptr;
  }
  const ConfigEntry& require(const std::string& key) {
    known.push_back(key);
    const ConfigEntry* e = sec ? sec->find(key) : nullptr;
    if (!e)
      fail(source, sec ? sec->line : 0,
           "missing key '" + key + "' in section [" + (sec ? sec->name : "?") + "]");
    return *e;
  }
  const ConfigEntry* get(const std::string& key) {
    known.push_back(key);
    return sec ? sec->find(key) : nullptr;
  }
  void check_no_unknown() const {
    if (!sec) return;
    for (const auto& e : sec->entries)
      if (std::find(known.begin(), known.end(), e.key) == known.end())
        fail(source, e.line, "unknown key '" + e.key + "' in section [" + sec->name + "]");
  }
};

NoiseSpec parse_noise_section(const std::string& source, const ConfigSection* sec,
                              const std::string& name) {
  if (!sec) throw ConfigError(source + ": missing section [" + name + "]");
  SectionReader r{source, sec, {}};
  NoiseSpec spec;
  const ConfigEntry& kind = r.require("kind");
  if (kind.value == "uniform") {
    spec.kind = NoiseKind::kUniform;
    const ConfigEntry& v = r.require("variance");
    spec.variance = parse_double(source, v.line, v.value);
    if (!(spec.variance > 0.0) && spec.variance != 0.0)
      fail(source, v.line, "variance must be >= 0");
  } else if (kind.value == "diagonal") {
    spec.kind = NoiseKind::kDiagonal;
    const ConfigEntry& v = r.require("entries");
    spec.entries = parse_vector(source, v.line, v.value);
  } else if (kind.value == "file") {
    spec.kind = NoiseKind::kFile;
    spec.path = trim(r.require("path").value);
  } else if (kind.value == "random") {
    spec.kind = NoiseKind::kRandomCorrelated;
    const ConfigEntry& s = r.require("seed");
    spec.seed = parse_u64(source, s.line, s.value);
    if (const ConfigEntry* f = r.get("floor"))
      spec.floor = parse_double(source, f->line, f->value);
  } else {
    fail(source, kind.line,
         "unknown noise kind '" + kind.value +
             "' (expected uniform, diagonal, file or random)");
  }
  r.check_no_unknown();
  return spec;
}

void append_noise_section(std::string& out, const std::string& name,
                          const NoiseSpec& s) {
  out += "[" + name + "]\n";
  switch (s.kind) {
    case NoiseKind::kUniform:
      out += "kind = uniform\n";
      out += "variance = " + fmt17(s.variance) + "\n";
      break;
    case NoiseKind::kDiagonal:
      out += "kind = diagonal\n";
      out += "entries = " + fmt_vector(s.entries) + "\n";
      break;
    case NoiseKind::kFile:
      out += "kind = file\n";
      out += "path = " + s.path + "\n";
      break;
    case NoiseKind::kRandomCorrelated:
      out += "kind = random\n";
      out += "seed = " + std::to_string(s.seed) + "\n";
      out += "floor = " + fmt17(s.floor) + "\n";
      break;
  }
  out += "\n";
}

}  // namespace

const ConfigEntry* ConfigSection::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

const ConfigSection* Document::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

Document parse_document_text(const std::string& text, const std::string& source) {
  Document doc;
  doc.source = source;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  ConfigSection* cur = nullptr;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(source, lineno, "malformed section header '" + raw + "'");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail(source, lineno, "empty section name");
      if (doc.find(name))
        fail(source, lineno, "duplicate section [" + name + "]");
      doc.sections.push_back({name, {}, lineno});
      cur = &doc.sections.back();
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(source, lineno, "expected 'key = value', got '" + raw + "'");
    if (!cur) fail(source, lineno, "key before any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(source, lineno, "empty key");
    if (cur->find(key))
      fail(source, lineno, "duplicate key '" + key + "' in [" + cur->name + "]");
    cur->entries.push_back({key, value, lineno});
  }
  return doc;
}

Document parse_document_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document_text(ss.str(), path);
}

bool RunConfig::operator==(const RunConfig& o) const {
  return m == o.m && n == o.n && criterion == o.criterion && target == o.target &&
         distances == o.distances && positions == o.positions && alpha == o.alpha &&
         eta == o.eta && c == o.c && p0 == o.p0 && toa == o.toa && rss == o.rss &&
         aoa == o.aoa && solver.outer_tol == o.solver.outer_tol &&
         solver.inner_tol == o.solver.inner_tol &&
         solver.max_outer == o.solver.max_outer &&
         solver.max_inner == o.solver.max_inner &&
         solver.norm_floor == o.solver.norm_floor &&
         solver.random_phi_init == o.solver.random_phi_init &&
         solver.seed == o.solver.seed && init == o.init && init_path == o.init_path &&
         placement == o.placement && trials == o.trials &&
         design_target == o.design_target && grid_half_width == o.grid_half_width &&
         grid_resolution == o.grid_resolution && out_dir == o.out_dir;
}

RunConfig parse_run_config(const Document& doc) {
  const std::string& src = doc.source;
  RunConfig cfg;

  if (const ConfigSection* fmt = doc.find("format")) {
    SectionReader r{src, fmt, {}};
    const ConfigEntry& v = r.require("version");
    if (parse_int(src, v.line, v.value) != 1)
      fail(src, v.line, "unsupported format version '" + v.value + "'");
    r.get("kind");  // present in result documents; ignored on input
    r.check_no_unknown();
  } else {
    throw ConfigError(src + ": missing section [format]");
  }

  const ConfigSection* prob = doc.find("problem");
  if (!prob) throw ConfigError(src + ": missing section [problem]");
  {
    SectionReader r{src, prob, {}};
    const ConfigEntry& me = r.require("m");
    cfg.m = static_cast<int>(parse_int(src, me.line, me.value));
    if (cfg.m < 2) fail(src, me.line, "m must be >= 2");
    const ConfigEntry& ne = r.require("n");
    cfg.n = static_cast<int>(parse_int(src, ne.line, ne.value));
    if (cfg.n != 2 && cfg.n != 3) fail(src, ne.line, "n must be 2 or 3");
    const ConfigEntry& ce = r.require("criterion");
    try {
      cfg.criterion = criterion_from_name(ce.value);
    } catch (const InvalidInputError& e) {
      fail(src, ce.line, e.what());
    }
    if (const ConfigEntry* t = r.get("target")) {
      cfg.target = parse_vector(src, t->line, t->value);
      if (static_cast<int>(cfg.target.size()) != cfg.n)
        fail(src, t->line, "target needs n entries");
    } else {
      cfg.target.assign(cfg.n, 0.0);
    }
    const ConfigEntry* de = r.get("distances");
    const ConfigEntry* pe = r.get("positions");
    if ((de == nullptr) == (pe == nullptr))
      fail(src, prob->line, "exactly one of 'distances' and 'positions' required");
    if (de) {
      cfg.distances = parse_vector(src, de->line, de->value);
      if (static_cast<int>(cfg.distances->size()) != cfg.m)
        fail(src, de->line, "distances needs m entries");
    }
    if (pe) {
      cfg.positions = parse_vector(src, pe->line, pe->value);
      if (static_cast<int>(cfg.positions->size()) != cfg.m * cfg.n)
        fail(src, pe->line, "positions needs m*n entries (row-major)");
    }
    const ConfigEntry* ae = r.get("alpha");
    const ConfigEntry* ee = r.get("eta");
    if (ae && ee) fail(src, ee->line, "give either alpha or eta, not both");
    if (ae) cfg.alpha = parse_double(src, ae->line, ae->value);
    if (ee) cfg.eta = parse_double(src, ee->line, ee->value);
    if (const ConfigEntry* e = r.get("c")) cfg.c = parse_double(src, e->line, e->value);
    if (const ConfigEntry* e = r.get("p0")) cfg.p0 = parse_double(src, e->line, e->value);
    r.check_no_unknown();
  }

  cfg.toa = parse_noise_section(src, doc.find("noise.toa"), "noise.toa");
  cfg.rss = parse_noise_section(src, doc.find("noise.rss"), "noise.rss");
  if (const ConfigSection* aoa = doc.find("noise.aoa")) {
    if (cfg.n == 3)
      fail(src, aoa->line,
           "AOA covariance provided for n=3; 3D bearings are not part of this "
           "model (remove [noise.aoa])");
    cfg.aoa = parse_noise_section(src, aoa, "noise.aoa");
  } else if (cfg.n == 2) {
    throw ConfigError(src + ": missing section [noise.aoa] (required for n=2)");
  }

  if (const ConfigSection* sol = doc.find("solver")) {
    SectionReader r{src, sol, {}};
    if (const ConfigEntry* e = r.get("outer_tol"))
      cfg.solver.outer_tol = parse_double(src, e->line, e->value);
    if (const ConfigEntry* e = r.get("inner_tol"))
      cfg.solver.inner_tol = parse_double(src, e->line, e->value);
    if (const ConfigEntry* e = r.get("max_outer"))
      cfg.solver.max_outer = static_cast<int>(parse_int(src, e->line, e->value));
    if (const ConfigEntry* e = r.get("max_inner"))
      cfg.solver.max_inner = static_cast<int>(parse_int(src, e->line, e->value));
    if (const ConfigEntry* e = r.get("norm_floor"))
      cfg.solver.norm_floor = parse_double(src, e->line, e->value);
    if (const ConfigEntry* e = r.get("random_phi_init"))
      cfg.solver.random_phi_init = parse_int(src, e->line, e->value) != 0;
    if (const ConfigEntry* e = r.get("seed"))
      cfg.solver.seed = parse_u64(src, e->line, e->value);
    if (const ConfigEntry* e = r.get("init")) {
      if (e->value == "uniform") cfg.init = InitKind::kUniform;
      else if (e->value == "positions") cfg.init = InitKind::kPositions;
      else if (e->value == "file") cfg.init = InitKind::kFile;
      else fail(src, e->line, "init must be uniform, positions or file");
    }
    if (const ConfigEntry* e = r.get("init_path")) cfg.init_path = trim(e->value);
    r.check_no_unknown();
    if (!(cfg.solver.outer_tol > 0.0) || !(cfg.solver.inner_tol > 0.0))
      fail(src, sol->line, "tolerances must be > 0");
  }
  if (cfg.init == InitKind::kPositions && !cfg.positions.has_value())
    throw ConfigError(src + ": init = positions requires 'positions' in [problem]");
  if (cfg.init == InitKind::kFile && cfg.init_path.empty())
    throw ConfigError(src + ": init = file requires 'init_path'");

  if (const ConfigSection* mse = doc.find("mse")) {
    SectionReader r{src, mse, {}};
    if (const ConfigEntry* e = r.get("placement")) {
      if (e->value == "designed") cfg.placement = PlacementKind::kDesigned;
      else if (e->value == "uniform") cfg.placement = PlacementKind::kUniformCircle;
      else if (e->value == "random") cfg.placement = PlacementKind::kRandomCircle;
      else fail(src, e->line, "placement must be designed, uniform or random");
    }
    if (const ConfigEntry* e = r.get("trials")) {
      cfg.trials = static_cast<int>(parse_int(src, e->line, e->value));
      if (cfg.trials < 1) fail(src, e->line, "trials must be >= 1");
    }
    if (const ConfigEntry* e = r.get("design_target")) {
      cfg.design_target = parse_vector(src, e->line, e->value);
      if (static_cast<int>(cfg.design_target->size()) != cfg.n)
        fail(src, e->line, "design_target needs n entries");
    }
    if (const ConfigEntry* e = r.get("grid_half_width")) {
      cfg.grid_half_width = parse_double(src, e->line, e->value);
      if (!(*cfg.grid_half_width > 0.0)) fail(src, e->line, "grid_half_width must be > 0");
    }
    if (const ConfigEntry* e = r.get("grid_resolution")) {
      cfg.grid_resolution = static_cast<int>(parse_int(src, e->line, e->value));
      if (cfg.grid_resolution < 3) fail(src, e->line, "grid_resolution must be >= 3");
    }
    r.check_no_unknown();
  }

  if (const ConfigSection* out = doc.find("output")) {
    SectionReader r{src, out, {}};
    if (const ConfigEntry* e = r.get("out_dir")) cfg.out_dir = trim(e->value);
    r.check_no_unknown();
  }

  for (const auto& s : doc.sections) {
    if (s.name != "format" && s.name != "problem" && s.name != "noise.toa" &&
        s.name != "noise.rss" && s.name != "noise.aoa" && s.name != "solver" &&
        s.name != "mse" && s.name != "output")
      fail(src, s.line, "unknown section [" + s.name + "]");
  }
  return cfg;
}

std::string RunConfig::to_text() const {
  std::string out = "[format]\nversion = 1\n\n[problem]\n";
  out += "m = " + std::to_string(m) + "\n";
  out += "n = " + std::to_string(n) + "\n";
  out += std::string("criterion = ") + criterion_name(criterion) + "\n";
  out += "target = " + fmt_vector(target) + "\n";
  if (distances) out += "distances = " + fmt_vector(*distances) + "\n";
  if (positions) out += "positions = " + fmt_vector(*positions) + "\n";
  if (alpha) out += "alpha = " + fmt17(*alpha) + "\n";
  if (eta) out += "eta = " + fmt17(*eta) + "\n";
  out += "c = " + fmt17(c) + "\n";
  out += "p0 = " + fmt17(p0) + "\n\n";

  append_noise_section(out, "noise.toa", toa);
  append_noise_section(out, "noise.rss", rss);
  if (aoa) append_noise_section(out, "noise.aoa", *aoa);

  out += "[solver]\n";
  out += "outer_tol = " + fmt17(solver.outer_tol) + "\n";
  out += "inner_tol = " + fmt17(solver.inner_tol) + "\n";
  out += "max_outer = " + std::to_string(solver.max_outer) + "\n";
  out += "max_inner = " + std::to_string(solver.max_inner) + "\n";
  out += "norm_floor = " + fmt17(solver.norm_floor) + "\n";
  out += "random_phi_init = " + std::string(solver.random_phi_init ? "1" : "0") + "\n";
  out += "seed = " + std::to_string(solver.seed) + "\n";
  out += std::string("init = ") +
         (init == InitKind::kUniform
              ? "uniform"
              : init == InitKind::kPositions ? "positions" : "file") + "\n";
  if (!init_path.empty()) out += "init_path = " + init_path + "\n";
  out += "\n[mse]\n";
  out += std::string("placement = ") +
         (placement == PlacementKind::kDesigned
              ? "designed"
              : placement == PlacementKind::kUniformCircle ? "uniform" : "random") +
         "\n";
  out += "trials = " + std::to_string(trials) + "\n";
  if (design_target) out += "design_target = " + fmt_vector(*design_target) + "\n";
  if (grid_half_width) out += "grid_half_width = " + fmt17(*grid_half_width) + "\n";
  out += "grid_resolution = " + std::to_string(grid_resolution) + "\n";
  out += "\n[output]\n";
  out += "out_dir = " + out_dir + "\n";
  return out;
}

Mat load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open matrix file");
  std::vector<std::vector<double>> rows;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    rows.push_back(parse_vector(path, lineno, raw));
    if (rows.size() > 1 && rows.back().size() != rows.front().size())
      fail(path, lineno, "ragged row in matrix file");
  }
  if (rows.empty()) throw ConfigError(path + ": empty matrix file");
  Mat m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

SymMatrix load_symmetric_matrix_file(const std::string& path, int m) {
  const Mat raw = load_matrix_file(path);
  if (raw.rows() != m || raw.cols() != m)
    throw ConfigError(path + ": expected a " + std::to_string(m) + "x" +
                      std::to_string(m) + " matrix, got " +
                      std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (raw(i, j) != raw(j, i))
        throw ConfigError(path + ": matrix not symmetric: entry (" +
                          std::to_string(i) + "," + std::to_string(j) + ") = " +
                          fmt17(raw(i, j)) + " but (" + std::to_string(j) + "," +
                          std::to_string(i) + ") = " + fmt17(raw(j, i)));
  return SymMatrix::require_symmetric(raw);
}

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

SymMatrix resolve_noise(const NoiseSpec& spec, int m, const std::string& base_dir,
                        const char* name) {
  switch (spec.kind) {
    case NoiseKind::kUniform: {
      Mat s = Mat::identity(m) * spec.variance;
      return SymMatrix::require_symmetric(s);
    }
    case NoiseKind::kDiagonal: {
      if (static_cast<int>(spec.entries.size()) != m)
        throw ConfigError(std::string(name) + ": diagonal noise needs m entries");
      return SymMatrix::diag(spec.entries);
    }
    case NoiseKind::kFile:
      return load_symmetric_matrix_file(resolve_path(base_dir, spec.path), m);
    case NoiseKind::kRandomCorrelated:
      return random_correlated_covariance(m, spec.floor, spec.seed);
  }
  throw ConfigError("bad noise kind");
}

std::vector<double> derive_distances(const RunConfig& cfg) {
  if (cfg.distances) return *cfg.distances;
  std::vector<double> d(cfg.m);
  for (int i = 0; i < cfg.m; ++i) {
    double s = 0.0;
    for (int k = 0; k < cfg.n; ++k) {
      const double diff = cfg.target[k] - (*cfg.positions)[i * cfg.n + k];
      s += diff * diff;
    }
    d[i] = std::sqrt(s);
  }
  return d;
}

}  // namespace

DesignProblem build_problem(const RunConfig& cfg, const std::string& base_dir) {
  DesignProblem p;
  p.m = cfg.m;
  p.n = cfg.n;
  p.distances = DistanceProfile(derive_distances(cfg));
  p.constants = cfg.eta ? ModelConstants::from_eta(*cfg.eta, cfg.c, cfg.p0)
                        : ModelConstants::from_alpha(cfg.alpha.value_or(1.0),
                                                     cfg.c, cfg.p0);
  p.noise.sigma_toa = resolve_noise(cfg.toa, cfg.m, base_dir, "noise.toa");
  p.noise.sigma_rss = resolve_noise(cfg.rss, cfg.m, base_dir, "noise.rss");
  if (cfg.aoa)
    p.noise.sigma_aoa = resolve_noise(*cfg.aoa, cfg.m, base_dir, "noise.aoa");
  p.criterion = cfg.criterion;
  p.validate();
  return p;
}

Orientation build_initial_orientation(const RunConfig& cfg,
                                      const std::string& base_dir) {
  switch (cfg.init) {
    case InitKind::kUniform:
      return uniform_orientation(cfg.m, cfg.n);
    case InitKind::kPositions: {
      TargetSensorConfig tc;
      tc.target = cfg.target;
      tc.sensors = Mat(cfg.m, cfg.n);
      for (int i = 0; i < cfg.m; ++i)
        for (int k = 0; k < cfg.n; ++k)
          tc.sensors(i, k) = (*cfg.positions)[i * cfg.n + k];
      return orientation_from_positions(tc).first;
    }
    case InitKind::kFile: {
      const Mat j = load_matrix_file(resolve_path(base_dir, cfg.init_path));
      if (j.rows() != cfg.m || j.cols() != cfg.n)
        throw ConfigError(cfg.init_path + ": initial orientation must be " +
                          std::to_string(cfg.m) + "x" + std::to_string(cfg.n));
      return Orientation(j);
    }
  }
  throw ConfigError("bad init kind");
}

}  // namespace hybridplace
