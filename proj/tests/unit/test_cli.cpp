#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gfs2d/cli.hpp"

using namespace gfs2d;
using cli::Options;

namespace {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  Json j;
  in >> j;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Options fast_options() {
  Options o;
  o.grid = 256;
  o.json_path = "cli_test_report.json";
  o.out_prefix = "cli_test";
  return o;
}

}  // namespace

TEST_CASE("classify: the line family on the full column") {
  Options o = fast_options();
  o.weight = "examplex";
  o.x0 = 0.0;
  o.alpha = 1.0;
  o.p = 2.0;
  o.pattern = "column";
  CHECK(cli::cmd_classify(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  CHECK(j["schema"] == 1);
  CHECK(j["verdict"]["complete"] == "yes");
  CHECK(j["verdict"]["minimal"] == "yes");
  CHECK(j["verdict"]["m_basis"] == "yes");
  // evidence carries the exclusion-level ladders for auditing
  bool has_levels = false;
  for (const auto& e : j["verdict"]["evidence"])
    if (e.contains("integral") && !e["integral"]["levels"].empty()) has_levels = true;
  CHECK(has_levels);
}

TEST_CASE("classify: constant weight is not complete at the point pattern") {
  Options o = fast_options();
  o.weight = "const1";
  o.pattern = "point";
  o.nu = 0;
  o.mu = 0;
  CHECK(cli::cmd_classify(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  CHECK(j["verdict"]["complete"] == "no");
  CHECK(j["verdict"]["minimal"] == "yes");
}

TEST_CASE("classify: punctured column blocks complete+minimal") {
  Options o = fast_options();
  o.weight = "examplex";
  o.x0 = 0.0;
  o.alpha = 1.0;
  o.pattern = "column0";
  CHECK(cli::cmd_classify(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  CHECK(j["verdict"]["complete"] == "yes");
  CHECK(j["verdict"]["minimal"] == "no");
}

TEST_CASE("classify: required inconclusive evidence exits 4") {
  const std::string csv = "cli_test_zero_weight.csv";
  {
    std::ofstream out(csv);
    out << "4,4\n";
    for (int i = 0; i < 4; ++i) out << "0,1,1,1\n";
  }
  Options o = fast_options();
  o.weight = "csv";
  o.weight_csv = csv;
  o.pattern = "point";
  CHECK(cli::cmd_classify(o) == cli::kExitInconclusive);
  std::remove(csv.c_str());
}

TEST_CASE("dual: certified column system verifies within tolerance") {
  Options o = fast_options();
  o.weight = "examplex";
  o.x0 = 1.0;
  o.alpha = 1.0;
  o.pattern = "column";
  o.window = 2;
  CHECK(cli::cmd_dual(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  CHECK(j["dual"]["form"] == "column");
  CHECK(j["dual"]["max_dev"].get<double>() <= 1e-6);
  const std::string csv = read_file(j["dual"]["csv"].get<std::string>());
  CHECK(csv.rfind("k,m,j,l,re,im,deviation\n", 0) == 0);
}

TEST_CASE("dual: plain duals of the constant weight") {
  Options o = fast_options();
  o.weight = "const1";
  o.pattern = "point";
  o.window = 2;
  CHECK(cli::cmd_dual(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  CHECK(j["dual"]["form"] == "plain");
  CHECK(j["dual"]["max_dev"].get<double>() <= 1e-12);
}

TEST_CASE("dual: punctured column without a phase pair is blocked with guidance") {
  Options o = fast_options();
  o.weight = "examplesum";  // complete unknown-to-no, minimal needs P,Q
  o.x0 = 1.0;
  o.y0 = 2.0;
  o.alpha = 1.3;
  o.pattern = "column0";
  CHECK(cli::cmd_dual(o) == cli::kExitBlocked);
  const Json j = read_json(o.json_path);
  const std::string err = j["error"].get<std::string>();
  CHECK(err.find("--phase") != std::string::npos);
  CHECK(err.find("--q-phase") != std::string::npos);
}

TEST_CASE("dual: non-minimal system is blocked without --force") {
  Options o = fast_options();
  o.weight = "examplex";
  o.x0 = 1.0;
  o.alpha = 1.6;  // complete but not minimal
  o.pattern = "column";
  o.window = 1;
  CHECK(cli::cmd_dual(o) == cli::kExitBlocked);
  o.force = true;
  o.phase = "const:1.0";
  CHECK(cli::cmd_dual(o) == cli::kExitOk);  // negative control still runs
}

TEST_CASE("coeffs: span inputs are recovered") {
  Options o = fast_options();
  o.weight = "examplex";
  o.x0 = 1.0;
  o.alpha = 1.0;
  o.pattern = "column";
  o.window = 3;
  o.span = "2,-1,2;1,0,-3";
  CHECK(cli::cmd_coeffs(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  std::istringstream csv(read_file(j["coefficients"]["csv"].get<std::string>()));
  std::string line;
  std::getline(csv, line);  // header
  bool saw_21 = false, saw_10 = false;
  while (std::getline(csv, line)) {
    int k = 0, m = 0;
    double re = 0, im = 0;
    int flag = 0;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%d", &k, &m, &re, &im, &flag) == 5);
    if (k == 2 && m == -1) {
      CHECK(std::fabs(re - 2.0) <= 1e-6);
      saw_21 = true;
    }
    if (k == 1 && m == 0) {
      CHECK(std::fabs(re + 3.0) <= 1e-6);
      saw_10 = true;
    }
    CHECK(std::fabs(im) <= 1e-6);
  }
  CHECK(saw_21);
  CHECK(saw_10);
}

TEST_CASE("coeffs: empty span produces an empty table") {
  Options o = fast_options();
  o.weight = "const1";
  o.pattern = "point";
  CHECK(cli::cmd_coeffs(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  CHECK(j["coefficients"]["entries"] == 0);
  CHECK(read_file(j["coefficients"]["csv"].get<std::string>()) == "k,m,re,im,flag\n");
}

TEST_CASE("reconstruct: errors decay once the support is covered") {
  Options o = fast_options();
  o.weight = "const1";
  o.pattern = "point";
  o.window = 3;
  o.span = "3,0,1;1,1,0.5";
  o.n_list = "2,3";
  CHECK(cli::cmd_reconstruct(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  const auto& errs = j["reconstruction"]["errors"];
  CHECK(errs[0]["error"].get<double>() > 1e-3);
  CHECK(errs[1]["error"].get<double>() <= 1e-6);
}

TEST_CASE("sweep: reproduces the admissible band of the line family") {
  Options o = fast_options();
  o.weight = "examplex";
  o.x0 = 0.0;
  o.p = 2.0;
  o.pattern = "column";
  o.alphas = "0.25,0.5,1.0,1.49,1.6";
  CHECK(cli::cmd_sweep(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"no", "yes"}, {"yes", "yes"}, {"yes", "yes"}, {"yes", "yes"}, {"yes", "no"}};
  REQUIRE(j["rows"].size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(j["rows"][i]["verdict"]["complete"] == expected[i].first);
    CHECK(j["rows"][i]["verdict"]["minimal"] == expected[i].second);
  }
}

TEST_CASE("sweep: constant weight is never complete") {
  Options o = fast_options();
  o.weight = "const1";
  o.pattern = "column";
  o.alphas = "0.5,1.0,1.5";
  CHECK(cli::cmd_sweep(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  for (const auto& row : j["rows"]) CHECK(row["verdict"]["complete"] == "no");
}

TEST_CASE("sweep: point-family audit carries both flags and the ladders") {
  Options o = fast_options();
  o.weight = "examplesum";
  o.x0 = 1.0;
  o.y0 = 2.0;
  o.p = 2.0;
  o.pattern = "point";
  o.alphas = "0.6";
  CHECK(cli::cmd_sweep(o) == cli::kExitOk);
  const Json j = read_json(o.json_path);
  const auto& row = j["rows"][0];
  CHECK(row.contains("published_band"));
  CHECK(row.contains("derived_complete_minimal"));
  CHECK(row.contains("disagreement"));
  // alpha = 0.6 sits inside the published band but the integral converges
  CHECK(row["published_band"] == true);
  CHECK(row["derived_complete_minimal"] == "no");
  CHECK(row["disagreement"] == true);
  const std::string csv = read_file(j["csv"].get<std::string>());
  CHECK(csv.find("published_band") != std::string::npos);
}

TEST_CASE("dual: identical invocations produce identical matrix bytes") {
  Options o = fast_options();
  o.weight = "examplex";
  o.x0 = 1.0;
  o.alpha = 1.0;
  o.pattern = "column";
  o.window = 2;
  o.out_prefix = "cli_test_ddet1";
  CHECK(cli::cmd_dual(o) == cli::kExitOk);
  o.out_prefix = "cli_test_ddet2";
  CHECK(cli::cmd_dual(o) == cli::kExitOk);
  CHECK(read_file("cli_test_ddet1_biorth.csv") == read_file("cli_test_ddet2_biorth.csv"));
}

TEST_CASE("sweep: identical invocations produce identical CSV bytes") {
  Options o = fast_options();
  o.weight = "examplex";
  o.x0 = 0.0;
  o.pattern = "column";
  o.alphas = "0.5,1.0";
  o.out_prefix = "cli_test_det1";
  CHECK(cli::cmd_sweep(o) == cli::kExitOk);
  const std::string first = read_file("cli_test_det1_sweep.csv");
  o.out_prefix = "cli_test_det2";
  CHECK(cli::cmd_sweep(o) == cli::kExitOk);
  const std::string second = read_file("cli_test_det2_sweep.csv");
  CHECK(first == second);
}

TEST_CASE("results do not depend on the worker count") {
  const char* bin = std::getenv("GFS2D_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd =
      " dual --weight examplex --x0 1 --alpha 1 --p 2 --pattern column --grid 256"
      " --window 2 --json /dev/null";
  CHECK(std::system(("GFS2D_THREADS=1 " + std::string(bin) + cmd + " --out cli_test_t1").c_str()) == 0);
  CHECK(std::system(("GFS2D_THREADS=4 " + std::string(bin) + cmd + " --out cli_test_t4").c_str()) == 0);
  CHECK(read_file("cli_test_t1_biorth.csv") == read_file("cli_test_t4_biorth.csv"));
}

TEST_CASE("the installed binary honours the exit-code contract") {
  const char* bin = std::getenv("GFS2D_BIN");
  REQUIRE(bin != nullptr);
  const std::string base = std::string(bin);

  const int ok = std::system(
      (base +
       " classify --weight examplex --x0 0 --alpha 1 --p 2 --pattern column --grid 256"
       " --json cli_test_bin.json > /dev/null 2>&1")
          .c_str());
  CHECK(WEXITSTATUS(ok) == cli::kExitOk);
  const Json j = read_json("cli_test_bin.json");
  CHECK(j["verdict"]["m_basis"] == "yes");

  const int usage =
      std::system((base + " classify --no-such-flag > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(usage) == cli::kExitUsage);

  const int bad_pattern = std::system(
      (base + " classify --pattern diagonal --json cli_test_bin.json > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad_pattern) == cli::kExitUsage);

  // the boundary exponent and inverted level ranges are argument errors
  const int bad_p = std::system(
      (base + " classify --weight const1 --p 1 --pattern point > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad_p) == cli::kExitUsage);
  const int bad_levels = std::system(
      (base + " classify --weight const1 --jmin 12 --jmax 5 > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad_levels) == cli::kExitUsage);

  const int blocked = std::system(
      (base +
       " dual --weight examplex --x0 1 --alpha 1.6 --p 2 --pattern column --grid 256"
       " --window 1 --json cli_test_bin.json > /dev/null 2>&1")
          .c_str());
  CHECK(WEXITSTATUS(blocked) == cli::kExitBlocked);
}
