#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

// End-to-end tests against the installed binary: every assertion here goes
// through the real argv parsing, dispatch, and exit-code mapping.

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string scratch_path(const std::string& stem) {
  static int counter = 0;
  return "/tmp/hgff_cli_" + std::to_string(getpid()) + "_" +
         std::to_string(counter++) + "_" + stem;
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = scratch_path("stdout");
  const std::string err_path = scratch_path("stderr");
  const std::string cmd = std::string(HGFF_CLI_PATH) + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

// Data rows of a CSV payload: skips the # config header and the column row.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream ss(text);
  std::string line;
  bool seen_header = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("spectrum emits eigenvalues with provenance columns") {
  const RunResult r = run_cli("spectrum --d 3 --n 2 --model nn");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("# config:") == 0);
  CHECK(r.out.find("\"d\":3") != std::string::npos);
  CHECK(r.out.find("i,lambda_i,kappa_i") != std::string::npos);

  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(std::stod(rows[0][1]) == doctest::Approx(1.0));
  CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::stod(rows[3][1]) == doctest::Approx(-1.0));
  CHECK(rows[1][2] == "3");
  // Provenance rides on every row: method and model names.
  CHECK(rows[0].back() == "na");  // no seed on a deterministic table
  CHECK(r.out.find("nn") != std::string::npos);
}

TEST_CASE("krawtchouk table matches the frozen H(2,2) values") {
  const RunResult r = run_cli("kraw-table --d 2 --n 2");
  CHECK(r.exit_code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[1][1]) == 2.0);
  CHECK(std::stod(rows[1][2]) == 0.0);
  CHECK(std::stod(rows[1][3]) == -2.0);
  CHECK(std::stod(rows[2][2]) == -1.0);
}

TEST_CASE("green profile reproduces the frozen NN values") {
  const RunResult r = run_cli("green --d 2 --n 2 --model nn --m 1");
  CHECK(r.exit_code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);  // rho = 0, 1, 2
  CHECK(std::stod(rows[0][1]) == doctest::Approx(7.0 / 6.0).epsilon(1e-14));
  CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::stod(rows[2][1]) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("dense and spectral green agree through the CLI") {
  const RunResult spec =
      run_cli("green --d 2 --n 3 --model binomial --gamma 0.4 --m 0.8");
  const RunResult dense = run_cli(
      "green --d 2 --n 3 --model binomial --gamma 0.4 --m 0.8 --method dense");
  CHECK(spec.exit_code == 0);
  CHECK(dense.exit_code == 0);
  const auto a = csv_rows(spec.out);
  const auto b = csv_rows(dense.out);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(std::stod(a[k][1]) ==
          doctest::Approx(std::stod(b[k][1])).epsilon(1e-10));
  }
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("spectrum --d 1 --n 2").exit_code == 2);
  CHECK(run_cli("spectrum --d 2 --n 1").exit_code == 2);
  CHECK(run_cli("nonsense").exit_code == 2);
  CHECK(run_cli("green --d 2 --n 2 --rho 1 --pair 0,1").exit_code == 2);
  CHECK(run_cli("green --d 2 --n 2 --method teleport").exit_code == 2);
  CHECK(run_cli("sweep --d 2 --n 2 --limit nowhere --grid 1,2").exit_code == 2);
  CHECK(run_cli("sample --d 2 --n 2 --probes 0:99").exit_code == 2);
  CHECK(run_cli("partition --d 2 --n 2 --model custom").exit_code == 2);
  CHECK(run_cli("spectrum --d 2 --n 2 --out /nonexistent/dir/file.csv")
            .exit_code == 2);

  const RunResult r = run_cli("spectrum --d 1 --n 2");
  CHECK(r.err.find("usage error") != std::string::npos);
}

TEST_CASE("domain failures exit with 1 and explain themselves") {
  const RunResult massless = run_cli("green --d 2 --n 2 --model nn --m 0");
  CHECK(massless.exit_code == 1);
  CHECK(massless.err.find("boundary") != std::string::npos);

  // Same failure regardless of the requested method.
  CHECK(run_cli("green --d 2 --n 2 --m 0 --method dense").exit_code == 1);
  CHECK(run_cli("green --d 2 --n 2 --m 0 --method mc").exit_code == 1);

  // Capacity: 2^13 vertices exceed the dense cap.
  const RunResult cap = run_cli("green --d 13 --n 2 --m 1 --method dense");
  CHECK(cap.exit_code == 1);
  CHECK(cap.err.find("error") != std::string::npos);
}

TEST_CASE("reruns are byte-identical, including through --out") {
  const std::string f1 = scratch_path("a.csv");
  const std::string f2 = scratch_path("b.csv");
  const std::string args =
      "sample --d 2 --n 2 --model nn --m 1 --samples 500 --seed 9 --out ";
  CHECK(run_cli(args + f1).exit_code == 0);
  CHECK(run_cli(args + f2).exit_code == 0);
  const std::string a = slurp(f1);
  const std::string b = slurp(f2);
  CHECK(!a.empty());
  CHECK(a == b);
  std::remove(f1.c_str());
  std::remove(f2.c_str());

  // stdout output matches the file content byte for byte.
  const RunResult direct = run_cli(
      "sample --d 2 --n 2 --model nn --m 1 --samples 500 --seed 9");
  CHECK(direct.out == a);
}

TEST_CASE("config files feed defaults that explicit flags override") {
  const std::string cfg = scratch_path("cfg.json");
  {
    std::ofstream f(cfg);
    f << "{\"d\": 3, \"n\": 2, \"model\": \"nn\"}\n";
  }
  const RunResult from_cfg = run_cli("spectrum --config " + cfg);
  CHECK(from_cfg.exit_code == 0);
  CHECK(from_cfg.out.find("\"d\":3") != std::string::npos);
  CHECK(csv_rows(from_cfg.out).size() == 4);

  const RunResult overridden = run_cli("spectrum --config " + cfg + " --d 2");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.out.find("\"d\":2") != std::string::npos);
  CHECK(csv_rows(overridden.out).size() == 3);

  // Unknown keys are a usage error, not a silent ignore.
  {
    std::ofstream f(cfg);
    f << "{\"d\": 3, \"dee\": 4}\n";
  }
  CHECK(run_cli("spectrum --config " + cfg).exit_code == 2);
  std::remove(cfg.c_str());
}

TEST_CASE("partition emits a JSON report with the frozen value") {
  const RunResult r = run_cli("partition --d 2 --n 2 --model uniform --m 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"log_z\"") != std::string::npos);
  CHECK(r.out.find("2.6360333619787") != std::string::npos);
  CHECK(r.out.find("\"internal_energy\"") != std::string::npos);
  CHECK(r.out.find("\"params\"") != std::string::npos);
}

TEST_CASE("sweep diagnostics move in the documented direction") {
  const RunResult r = run_cli(
      "sweep --limit ninf --model nn --d 4 --m 1 --rho 1 --grid 4,16,64");
  CHECK(r.exit_code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  // Columns: n, scaled_cov, coeff, gap (+ provenance).
  const double coeff = std::stod(rows[0][2]);
  CHECK(coeff == doctest::Approx(1.0 / 14.0).epsilon(1e-10));
  CHECK(std::stod(rows[1][3]) < std::stod(rows[0][3]));
  CHECK(std::stod(rows[2][3]) < std::stod(rows[1][3]));

  // Worker count must not change a single byte of the payload.
  const RunResult serial = run_cli(
      "sweep --limit m0 --model nn --d 2 --n 2 "
      "--grid 0.1,0.05,0.02,0.01,0.005,0.001 --jobs 1");
  const RunResult parallel = run_cli(
      "sweep --limit m0 --model nn --d 2 --n 2 "
      "--grid 0.1,0.05,0.02,0.01,0.005,0.001 --jobs 3");
  CHECK(serial.exit_code == 0);
  CHECK(serial.out == parallel.out);
  const auto m0 = csv_rows(serial.out);
  REQUIRE(m0.size() == 6);
  CHECK(std::stod(m0.back()[1]) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("verify runs clean and the fault hook trips it") {
  const RunResult ok = run_cli("verify --level quick");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("total,pass") != std::string::npos);
  CHECK(ok.out.find(",fail,") == std::string::npos);

  const RunResult bad = run_cli("verify --level quick --inject-kraw-sign-flip");
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("krawtchouk,fail") != std::string::npos);
}
