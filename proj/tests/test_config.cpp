#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hybridplace/config.hpp"
#include "hybridplace/errors.hpp"
#include "hybridplace/report.hpp"

using namespace hybridplace;

namespace {

const char* kBasicConfig = R"(# demo run
[format]
version = 1

[problem]
m = 4
n = 2
criterion = A
target = 0 0
distances = 10 10 10 10
eta = -4.343

[noise.toa]
kind = uniform
variance = 1

[noise.rss]
kind = diagonal
entries = 1 0.5 2 1.5

[noise.aoa]
kind = random
seed = 7
floor = 0.1

[solver]
outer_tol = 1e-6
seed = 42

[output]
out_dir = out
)";

std::string write_temp(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "hybridplace_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / name).string();
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("document parsing tracks lines and rejects malformed input") {
  const Document doc = parse_document_text("[a]\nx = 1\n# c\ny = 2 3\n", "<t>");
  REQUIRE(doc.sections.size() == 1);
  CHECK(doc.sections[0].entries[1].line == 4);

  CHECK_THROWS_WITH_AS(parse_document_text("x = 1\n", "<t>"),
                       doctest::Contains("<t>:1"), ConfigError);
  CHECK_THROWS_AS(parse_document_text("[a]\nnokey\n", "<t>"), ConfigError);
  CHECK_THROWS_AS(parse_document_text("[a]\nx=1\n[a]\n", "<t>"), ConfigError);
  CHECK_THROWS_AS(parse_document_text("[a]\nx=1\nx=2\n", "<t>"), ConfigError);
}

TEST_CASE("run config parses and round-trips through serialization") {
  const RunConfig cfg =
      parse_run_config(parse_document_text(kBasicConfig, "<t>"));
  CHECK(cfg.m == 4);
  CHECK(cfg.criterion == Criterion::A);
  CHECK(cfg.eta == -4.343);
  CHECK(cfg.rss.kind == NoiseKind::kDiagonal);
  CHECK(cfg.aoa->seed == 7);
  CHECK(cfg.solver.seed == 42);

  const RunConfig again =
      parse_run_config(parse_document_text(cfg.to_text(), "<t2>"));
  CHECK(again == cfg);
  CHECK(again.to_text() == cfg.to_text());
}

TEST_CASE("validation errors carry file and line context") {
  std::string bad = kBasicConfig;
  bad.replace(bad.find("criterion = A"), 13, "criterion = Q");
  try {
    parse_run_config(parse_document_text(bad, "demo.cfg"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("demo.cfg:") != std::string::npos);
    CHECK(msg.find("criterion") != std::string::npos);
  }
}

TEST_CASE("exactly one geometry spec") {
  std::string both = kBasicConfig;
  both.replace(both.find("distances = 10 10 10 10"), 23,
               "distances = 1 1 1 1\npositions = 1 0 0 1 -1 0 0 -1");
  CHECK_THROWS_AS(parse_run_config(parse_document_text(both, "<t>")), ConfigError);
}

TEST_CASE("n=3 with an AOA section is rejected with a pointed message") {
  std::string cfg = kBasicConfig;
  cfg.replace(cfg.find("n = 2"), 5, "n = 3");
  cfg.replace(cfg.find("target = 0 0"), 12, "target = 0 0 0");
  CHECK_THROWS_WITH_AS(parse_run_config(parse_document_text(cfg, "<t>")),
                       doctest::Contains("AOA"), ConfigError);
}

TEST_CASE("missing AOA section in 2D is rejected") {
  std::string cfg = kBasicConfig;
  const size_t pos = cfg.find("[noise.aoa]");
  cfg = cfg.substr(0, pos) + cfg.substr(cfg.find("[solver]"));
  CHECK_THROWS_WITH_AS(parse_run_config(parse_document_text(cfg, "<t>")),
                       doctest::Contains("noise.aoa"), ConfigError);
}

TEST_CASE("problem building resolves noise kinds") {
  const RunConfig cfg =
      parse_run_config(parse_document_text(kBasicConfig, "<t>"));
  const DesignProblem p = build_problem(cfg, "");
  CHECK(p.noise.sigma_toa(0, 0) == 1.0);
  CHECK(p.noise.sigma_rss(1, 1) == 0.5);
  CHECK(smallest_eigenvalue(*p.noise.sigma_aoa) >= 0.1);
  CHECK(p.constants.eta == -4.343);
}

TEST_CASE("file-backed noise loads and checks symmetry exactly") {
  const std::string good =
      write_temp("cov_good.txt", "1 0.25 0 0\n0.25 1 0 0\n0 0 1 0\n0 0 0 1\n");
  const std::string bad =
      write_temp("cov_bad.txt", "1 0.25 0 0\n0.2500001 1 0 0\n0 0 1 0\n0 0 0 1\n");

  std::string cfg_text = kBasicConfig;
  const std::string from = "kind = random\nseed = 7\nfloor = 0.1";
  cfg_text.replace(cfg_text.find(from), from.size(),
                   "kind = file\npath = " + good);
  const RunConfig cfg = parse_run_config(parse_document_text(cfg_text, "<t>"));
  const DesignProblem p = build_problem(cfg, "");
  CHECK((*p.noise.sigma_aoa)(0, 1) == 0.25);

  std::string bad_text = kBasicConfig;
  bad_text.replace(bad_text.find(from), from.size(),
                   "kind = file\npath = " + bad);
  const RunConfig bad_cfg = parse_run_config(parse_document_text(bad_text, "<t>"));
  try {
    build_problem(bad_cfg, "");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
  }
}

TEST_CASE("initial orientation sources") {
  std::string pos_text = kBasicConfig;
  pos_text.replace(pos_text.find("distances = 10 10 10 10"), 23,
                   "positions = 10 0 0 10 -10 0 0 -10");
  pos_text.replace(pos_text.find("seed = 42"), 9, "seed = 42\ninit = positions");
  const RunConfig cfg = parse_run_config(parse_document_text(pos_text, "<t>"));
  const Orientation j = build_initial_orientation(cfg, "");
  CHECK(j.j()(0, 0) == doctest::Approx(-1.0));

  const std::string jfile = write_temp("j0.txt", "1 0\n0 1\n-1 0\n0 -1\n");
  std::string file_text = kBasicConfig;
  file_text.replace(file_text.find("seed = 42"), 9,
                    "seed = 42\ninit = file\ninit_path = " + jfile);
  const RunConfig cfg2 = parse_run_config(parse_document_text(file_text, "<t>"));
  const Orientation j2 = build_initial_orientation(cfg2, "");
  CHECK(j2.j()(3, 1) == -1.0);
}

TEST_CASE("echoed config re-parses identically") {
  const RunConfig cfg =
      parse_run_config(parse_document_text(kBasicConfig, "<t>"));
  const std::string echoed = echo_config(cfg);
  CHECK(echoed.find("[echo.problem]") != std::string::npos);
  const RunConfig back = extract_echoed_config("[format]\nversion = 1\nkind = x\n\n" +
                                               echoed);
  CHECK(back == cfg);
}

TEST_CASE("atomic write produces the final file") {
  const auto dir = std::filesystem::temp_directory_path() / "hybridplace_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "atomic.txt").string();
  write_file_atomic(path, "hello\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");
  CHECK(!std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("format_double survives a round trip") {
  for (double v : {0.1, 1.0 / 3.0, 2.0, 1e-17, 123456.789012345678}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
