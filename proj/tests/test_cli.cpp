#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hybridplace/config.hpp"
#include "hybridplace/errors.hpp"
#include "hybridplace/fim.hpp"
#include "hybridplace/report.hpp"

using namespace hybridplace;

namespace {

std::filesystem::path work_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "hybridplace_cli";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string binary() {
  const char* env = std::getenv("PLACEMENT_BIN");
  REQUIRE_MESSAGE(env != nullptr, "PLACEMENT_BIN must point at the CLI binary");
  return env;
}

int run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write(const std::string& name, const std::string& content) {
  const auto path = work_dir() / name;
  std::ofstream(path) << content;
  return path.string();
}

const char* kDesignConfig = R"([format]
version = 1

[problem]
m = 4
n = 2
criterion = A
distances = 10 10 10 10
eta = -4.343

[noise.toa]
kind = random
seed = 11
floor = 0.1

[noise.rss]
kind = random
seed = 12
floor = 0.1

[noise.aoa]
kind = random
seed = 13
floor = 0.1

[solver]
seed = 1
)";

}  // namespace

TEST_CASE("design runs, writes results and is byte-reproducible") {
  const auto out1 = work_dir() / "out1";
  const std::string cfg = write("design.cfg", kDesignConfig);
  REQUIRE(run("design --config " + cfg + " --out " + out1.string()) == 0);
  const std::string r1 = slurp(out1 / "design_result.txt");
  const std::string t1 = slurp(out1 / "design_trace.csv");
  REQUIRE(run("design --config " + cfg + " --out " + out1.string()) == 0);
  const std::string r2 = slurp(out1 / "design_result.txt");
  CHECK(r1 == r2);
  CHECK(t1 == slurp(out1 / "design_trace.csv"));

  // Result document carries a re-parseable config echo.
  const RunConfig echoed = extract_echoed_config(r1);
  CHECK(echoed.m == 4);
  CHECK(echoed.out_dir == out1.string());

  // Trace rows: consecutive iteration indices, non-increasing criterion.
  std::istringstream trace(slurp(out1 / "design_trace.csv"));
  std::string line;
  std::getline(trace, line);
  CHECK(line == "iter,criterion,inner_iters,step_norm,floor_hits,wall_ms");
  int prev = -1, count = 0;
  double prev_criterion = 1e300;
  while (std::getline(trace, line)) {
    const size_t comma = line.find(',');
    const int iter = std::stoi(line.substr(0, comma));
    CHECK(iter == prev + 1);
    prev = iter;
    const double criterion = std::stod(line.substr(comma + 1));
    CHECK(criterion <= prev_criterion + 1e-9);
    prev_criterion = criterion;
    ++count;
  }
  CHECK(count >= 2);
}

TEST_CASE("seed override changes the echoed seed") {
  const auto out = work_dir() / "out_seed";
  const std::string cfg = write("design_seed.cfg", kDesignConfig);
  REQUIRE(run("design --config " + cfg + " --out " + out.string() + " --seed 99") ==
          0);
  const RunConfig echoed = extract_echoed_config(slurp(out / "design_result.txt"));
  CHECK(echoed.solver.seed == 99);
}

TEST_CASE("hitting the iteration cap exits with code 2") {
  // kDesignConfig ends inside [solver].
  const std::string capped =
      std::string(kDesignConfig) + "max_outer = 1\nouter_tol = 1e-15\n";
  const std::string cfg = write("capped.cfg", capped);
  const auto out = work_dir() / "out_capped";
  CHECK(run("design --config " + cfg + " --out " + out.string()) == 2);
  CHECK(slurp(out / "design_result.txt").find("status = max-iterations") !=
        std::string::npos);
}

TEST_CASE("singular information exits with code 4") {
  // Two sensors in 3D: rank-2 information, unidentifiable design.
  const std::string cfg = write("singular3d.cfg", R"([format]
version = 1

[problem]
m = 2
n = 3
criterion = A
distances = 1 1
eta = -4.343

[noise.toa]
kind = uniform
variance = 1

[noise.rss]
kind = uniform
variance = 1

[solver]
seed = 1
)");
  CHECK(run("design --config " + cfg) == 4);
}

TEST_CASE("invalid config exits with code 3 and a line-precise message") {
  std::string broken = kDesignConfig;
  broken.replace(broken.find("criterion = A"), 13, "criterion = Z");
  const std::string cfg = write("broken.cfg", broken);
  CHECK(run("design --config " + cfg) == 3);
  CHECK(run("design --config /nonexistent/x.cfg") == 3);
}

TEST_CASE("non-symmetric noise matrix is named in the failure") {
  const std::string mat = write("asym.txt", "1 0.3\n0.2 1\n");
  std::string cfg_text = kDesignConfig;
  cfg_text.replace(cfg_text.find("m = 4"), 5, "m = 2");
  cfg_text.replace(cfg_text.find("distances = 10 10 10 10"), 23,
                   "distances = 10 10");
  const std::string from = "kind = random\nseed = 13\nfloor = 0.1";
  cfg_text.replace(cfg_text.find(from), from.size(), "kind = file\npath = " + mat);
  const std::string cfg = write("asym.cfg", cfg_text);

  const auto err = work_dir() / "asym_err.txt";
  const std::string cmd = binary() + " design --config " + cfg + " 2> " +
                          err.string() + " > /dev/null";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
  const std::string msg = slurp(err);
  CHECK(msg.find("(0,1)") != std::string::npos);
}

TEST_CASE("evaluate matches the library computation") {
  const std::string jfile = write("cross.txt", "1 0\n0 1\n-1 0\n0 -1\n");
  std::string cfg_text = kDesignConfig;
  const auto out = work_dir() / "out_eval";
  const std::string cfg = write("eval.cfg", cfg_text);
  REQUIRE(run("evaluate --config " + cfg + " --orientation " + jfile + " --out " +
              out.string()) == 0);

  const std::string result = slurp(out / "evaluate_result.txt");
  const RunConfig rc = extract_echoed_config(result);
  const DesignProblem p = build_problem(rc, work_dir().string());
  const Orientation j(Mat(4, 2, {1, 0, 0, 1, -1, 0, 0, -1}));
  const FimResult want = hybrid_fim(p, j);

  const Document doc = parse_document_text(result, "<res>");
  const ConfigSection* res = doc.find("result");
  REQUIRE(res != nullptr);
  CHECK(std::stod(res->find("criterion_a")->value) ==
        doctest::Approx(want.trace_crlb).epsilon(1e-15));
  CHECK(std::stod(res->find("criterion_d")->value) ==
        doctest::Approx(want.neg_log_det_f).epsilon(1e-15));
  CHECK(std::stod(res->find("criterion_e")->value) ==
        doctest::Approx(want.max_eig_crlb).epsilon(1e-15));
}

TEST_CASE("evaluate renormalizes slightly-off rows and rejects bad ones") {
  const std::string near = write("near.txt", "1.0000001 0\n0 1\n-1 0\n0 -1\n");
  const std::string cfg = write("eval2.cfg", kDesignConfig);
  const auto out = work_dir() / "out_eval2";
  CHECK(run("evaluate --config " + cfg + " --orientation " + near + " --out " +
            out.string()) == 0);

  const std::string far = write("far.txt", "1.1 0\n0 1\n-1 0\n0 -1\n");
  CHECK(run("evaluate --config " + cfg + " --orientation " + far) == 3);
}

TEST_CASE("bruteforce refusals and success") {
  std::string small = kDesignConfig;
  small.replace(small.find("m = 4"), 5, "m = 2");
  small.replace(small.find("distances = 10 10 10 10"), 23, "distances = 10 10");
  const std::string cfg = write("brute.cfg", small);
  const auto out = work_dir() / "out_brute";
  CHECK(run("bruteforce --config " + cfg + " --resolution 0.4") == 3);
  const std::string cfg4 = write("brute4.cfg", kDesignConfig);
  CHECK(run("bruteforce --config " + cfg4) == 3);  // m = 4 refused
  REQUIRE(run("bruteforce --config " + cfg + " --resolution 2 --out " +
              out.string()) == 0);
  const std::string result = slurp(out / "bruteforce_result.txt");
  CHECK(result.find("kind = bruteforce_result") != std::string::npos);
}

TEST_CASE("mse runs reproducibly and honors the placement spec") {
  std::string cfg_text = kDesignConfig;
  cfg_text.replace(cfg_text.find("distances = 10 10 10 10"), 23,
                   "distances = 1 1 1 1");
  cfg_text += "\n[mse]\nplacement = uniform\ntrials = 8\n";
  const std::string cfg = write("mse.cfg", cfg_text);
  const auto out1 = work_dir() / "out_mse1";
  REQUIRE(run("mse --config " + cfg + " --out " + out1.string()) == 0);
  const std::string first = slurp(out1 / "mse_report.txt");
  REQUIRE(run("mse --config " + cfg + " --out " + out1.string()) == 0);
  CHECK(first == slurp(out1 / "mse_report.txt"));

  const Document doc =
      parse_document_text(slurp(out1 / "mse_report.txt"), "<mse>");
  const ConfigSection* res = doc.find("result");
  REQUIRE(res != nullptr);
  CHECK(res->find("placement")->value == "uniform");
  CHECK(std::stoi(res->find("trials")->value) == 8);
  const ConfigSection* errs = doc.find("squared_errors");
  REQUIRE(errs != nullptr);
  CHECK(errs->entries.size() == 8);
}
