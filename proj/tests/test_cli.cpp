#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "jbd/cli.hpp"
#include "jbd/matrix_market.hpp"
#include "jbd/testgen.hpp"

using namespace jbd;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("jbd_cli");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int line_count(const std::string& text) {
  int n = 0;
  for (char ch : text)
    if (ch == '\n') ++n;
  return n;
}

// writes a small well-separated pair to Matrix Market files, returns (a, l)
std::pair<fs::path, fs::path> small_pair_files(const fs::path& dir) {
  std::vector<double> c(18);
  for (int i = 0; i < 18; ++i) c[i] = 0.9 - 0.7 * i / 17.0;
  GeneratedPair gp = make_cs_pair(18, c, 0);
  const fs::path a = dir / "a.mtx", l = dir / "l.mtx";
  write_matrix_market(gp.a, a.string());
  write_matrix_market(gp.l, l.string());
  return {a, l};
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({}) == 2);                       // no subcommand
  CHECK(run_cli({"run", "--bogus"}) == 2);       // unknown flag
  CHECK(run_cli({"run", "--builtin", "cs800"}) == 2);  // steps missing
  CHECK(run_cli({"frobnicate"}) == 2);           // unknown subcommand
  CHECK(run_cli({"run", "--steps", "3"}) == 2);  // no input at all
  CHECK(run_cli({"gen", "--builtin", "nosuch",
                 "--out", fresh_dir("cli_gen_bad").string()}) == 2);
  CHECK(run_cli({"run", "--builtin", "cs800", "--pair-a", "x.mtx",
                 "--pair-l", "y.mtx", "--steps", "3"}) == 2);  // both sources
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("missing input files exit with code 5") {
  const auto out = fresh_dir("cli_io");
  CHECK(run_cli({"run", "--pair-a", "/nonexistent/a.mtx", "--pair-l",
                 "/nonexistent/l.mtx", "--steps", "3", "--out",
                 out.string()}) == 5);
}

TEST_CASE("gen writes the difference operator") {
  const auto out = fresh_dir("cli_gen");
  CHECK(run_cli({"gen", "--builtin", "deriv:6", "--out", out.string()}) == 0);
  CsrMatrix d = load_matrix_market((out / "deriv_6.mtx").string());
  CHECK(d.nrows == 5);
  CHECK(d.ncols == 6);
  CHECK(d.nnz() == 10);
}

TEST_CASE("run writes the full artifact set deterministically") {
  const auto dir = fresh_dir("cli_run");
  auto [a, l] = small_pair_files(dir);
  const auto out1 = fresh_dir("cli_run_out1");
  const auto out2 = fresh_dir("cli_run_out2");

  const std::vector<std::string> base{
      "run",   "--pair-a", a.string(), "--pair-l", l.string(),
      "--steps", "12",     "--strategy", "partial"};
  auto with_out = [&](const fs::path& o) {
    std::vector<std::string> v = base;
    v.push_back("--out");
    v.push_back(o.string());
    return v;
  };
  REQUIRE(run_cli(with_out(out1)) == 0);
  REQUIRE(run_cli(with_out(out2)) == 0);

  for (const char* name : {"diag.csv", "ritz_b.csv", "ritz_bhat.csv",
                           "reorth.csv"}) {
    const std::string b1 = slurp(out1 / name);
    const std::string b2 = slurp(out2 / name);
    CHECK(!b1.empty());
    CHECK(b1 == b2);
  }

  const std::string diag = slurp(out1 / "diag.csv");
  CHECK(line_count(diag) == 13);  // header + one row per step
  CHECK(diag.rfind("k,kappa_u,", 0) == 0);

  // three per-side records per step
  CHECK(line_count(slurp(out1 / "reorth.csv")) == 1 + 3 * 12);

  // ritz history: step k contributes k values
  CHECK(line_count(slurp(out1 / "ritz_b.csv")) == 1 + (12 * 13) / 2);
}

TEST_CASE("lsqr backend leaves projection residual columns empty") {
  const auto dir = fresh_dir("cli_lsqr");
  auto [a, l] = small_pair_files(dir);
  const auto out = fresh_dir("cli_lsqr_out");
  REQUIRE(run_cli({"run", "--pair-a", a.string(), "--pair-l", l.string(),
                   "--steps", "8", "--projector", "lsqr", "--out",
                   out.string()}) == 0);
  std::ifstream f(out / "diag.csv");
  std::string header, row;
  std::getline(f, header);
  std::getline(f, row);
  CHECK(row.find("nan") != std::string::npos);
}

TEST_CASE("early breakdown still flushes artifacts and exits 3") {
  // only three distinct generalized values: the process runs dry early
  std::vector<double> c{0.8, 0.8, 0.8, 0.5, 0.5, 0.5, 0.3, 0.3};
  GeneratedPair gp = make_cs_pair(8, c, 0);
  const auto dir = fresh_dir("cli_breakdown");
  write_matrix_market(gp.a, (dir / "a.mtx").string());
  write_matrix_market(gp.l, (dir / "l.mtx").string());
  const auto out = fresh_dir("cli_breakdown_out");

  CHECK(run_cli({"run", "--pair-a", (dir / "a.mtx").string(), "--pair-l",
                 (dir / "l.mtx").string(), "--steps", "8", "--strategy",
                 "full", "--out", out.string()}) == 3);
  const std::string diag = slurp(out / "diag.csv");
  CHECK(!diag.empty());
  CHECK(line_count(diag) >= 2);      // at least one completed step
  CHECK(line_count(diag) < 1 + 8);   // but fewer than requested
}

TEST_CASE("compare writes one row per strategy") {
  const auto dir = fresh_dir("cli_cmp");
  auto [a, l] = small_pair_files(dir);
  const auto out = fresh_dir("cli_cmp_out");
  REQUIRE(run_cli({"compare", "--pair-a", a.string(), "--pair-l", l.string(),
                   "--steps", "8", "--out", out.string()}) == 0);

  std::ifstream f(out / "compare.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header ==
        "strategy,wall_time_s,reorth_ops,final_kappa_u,final_kappa_vt,"
        "ghosts_b,ghosts_bhat");
  std::vector<std::string> rows;
  for (std::string line; std::getline(f, line);) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("none,", 0) == 0);
  CHECK(rows[1].rfind("partial,", 0) == 0);
  CHECK(rows[2].rfind("full,", 0) == 0);
}

TEST_CASE("invalid lsqr tolerance is a usage error") {
  const auto dir = fresh_dir("cli_atol");
  auto [a, l] = small_pair_files(dir);
  CHECK(run_cli({"run", "--pair-a", a.string(), "--pair-l", l.string(),
                 "--steps", "4", "--projector", "lsqr", "--lsqr-atol",
                 "1e-3", "--out", fresh_dir("cli_atol_out").string()}) == 2);
}
