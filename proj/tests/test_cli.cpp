#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "npq/io.hpp"
#include "npq/model.hpp"

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "npq");
  std::ostringstream out, err;
  Run r;
  r.code = npq::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("marginal csv format") {
  const auto r = run({"marginal", "--r", "0.9", "--nu", "0.5", "--nmax", "200", "--method", "ri", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 202);
  CHECK(rows[0] == std::vector<std::string>{"n", "f_lo", "neglog10"});
  CHECK(rows[1][0] == "0");
  CHECK(rows[201][0] == "200");
  const double f = std::stod(rows[50][1]);
  CHECK(std::stod(rows[50][2]) == doctest::Approx(-std::log10(f)).epsilon(1e-15));
  // %.17e: one digit, point, 17 digits, exponent
  CHECK(rows[1][1].size() == std::string("1.38373600523041151e-01").size());
}

TEST_CASE("marginal at nu = 0 is the geometric law") {
  const auto r = run({"marginal", "--r", "0.6", "--nu", "0", "--nmax", "30"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  for (int n = 0; n <= 30; ++n) CHECK(rows[static_cast<std::size_t>(n) + 1][1] == npq::format_double(npq::geometric_pmf(0.6, n)));
}

TEST_CASE("usage and domain errors exit with 2") {
  CHECK(run({"marginal", "--r", "1.0", "--nu", "0.5"}).code == 2);
  CHECK(run({"marginal", "--r", "1.5", "--nu", "0.5"}).code == 2);
  CHECK(run({"joint", "--r", "0.5", "--nu", "1.5"}).code == 2);
  CHECK(run({"marginal", "--r", "0.5", "--nu", "0.5", "--method", "cheb"}).code == 2);
  CHECK(run({"marginal", "--nu", "0.5"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"validate", "--tests", "bogus", "--r", "0.5", "--nu", "0.5"}).code == 2);
  CHECK(run({"marginal", "--r", "0.5", "--nu", "0.5", "--format", "xml"}).code == 2);
  const auto r = run({"marginal", "--r", "1.0", "--nu", "0.5"});
  CHECK(r.out.empty());
  CHECK(r.err.rfind("error: ", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("joint f(0,0) is 1 - r") {
  for (const char* m : {"qr", "ri", "cheb"}) {
    const auto r = run({"joint", "--r", "0.75", "--nu", "0.9", "--nmax", "5", "--mmax", "5", "--method", m});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    CHECK(rows[0][1] == "m0");
    CHECK(std::stod(rows[1][1]) == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("joint qr and ri agree to 8 decimals") {
  const auto a = csv(run({"joint", "--r", "0.75", "--nu", "0.9", "--method", "qr"}).out);
  const auto b = csv(run({"joint", "--r", "0.75", "--nu", "0.9", "--method", "ri"}).out);
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    for (std::size_t j = 1; j < a[i].size(); ++j) {
      const double x = std::stod(a[i][j]), y = std::stod(b[i][j]);
      if (x > 1e-20) worst = std::max(worst, std::fabs(std::log(x / y)));
    }
  }
  CHECK(-std::log10(worst) >= 8.0);
}

TEST_CASE("logmap transform") {
  const auto raw = csv(run({"joint", "--r", "0.75", "--nu", "0.9", "--nmax", "40", "--mmax", "40"}).out);
  const auto map = csv(run({"joint", "--r", "0.75", "--nu", "0.9", "--nmax", "40", "--mmax", "40", "--logmap"}).out);
  double f_max = 0.0;
  for (std::size_t i = 1; i < raw.size(); ++i) {
    for (std::size_t j = 1; j < raw[i].size(); ++j) f_max = std::max(f_max, std::stod(raw[i][j]));
  }
  for (std::size_t i = 1; i < raw.size(); ++i) {
    for (std::size_t j = 1; j < raw[i].size(); ++j) {
      const double f = std::stod(raw[i][j]);
      const double expect = std::max(0.0, 1.0 + std::log10(f / f_max) / 20.0);
      CHECK(std::stod(map[i][j]) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("csv and json carry the same values") {
  const auto c = csv(run({"joint", "--r", "0.9", "--nu", "0.3", "--nmax", "20", "--mmax", "10"}).out);
  const auto j = nlohmann::json::parse(
      run({"joint", "--r", "0.9", "--nu", "0.3", "--nmax", "20", "--mmax", "10", "--format", "json"}).out);
  CHECK(j["command"] == "joint");
  CHECK(j["version"] == npq::kVersion);
  for (int n = 0; n <= 20; ++n) {
    for (int m = 0; m <= 10; ++m) {
      CHECK(std::stod(c[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(m) + 1]) ==
            j["f"][static_cast<std::size_t>(n)][static_cast<std::size_t>(m)].get<double>());
    }
  }
  const auto mc = csv(run({"marginal", "--r", "0.9", "--nu", "0.3", "--nmax", "50"}).out);
  const auto mj =
      nlohmann::json::parse(run({"marginal", "--r", "0.9", "--nu", "0.3", "--nmax", "50", "--format", "json"}).out);
  for (std::size_t n = 0; n <= 50; ++n) CHECK(std::stod(mc[n + 1][1]) == mj["f_lo"][n].get<double>());
}

TEST_CASE("json keys are ordered") {
  const auto out = run({"marginal", "--r", "0.9", "--nu", "0.3", "--nmax", "2", "--format", "json"}).out;
  CHECK(out.rfind("{\"command\":\"marginal\",\"version\":", 0) == 0);
  CHECK(out.find("\"f_lo\"") < out.find("\"neglog10\""));
}

TEST_CASE("validate exit codes and records") {
  auto r = run({"validate", "--tests", "agg,xlo", "--r", "0.5,0.75", "--nu", "0.5", "--format", "json"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["xi"].get<double>() >= 8.0);
    CHECK(j["passed"] == true);
    ++count;
  }
  CHECK(count == 2 * 2 * 2);
  r = run({"validate", "--tests", "agg", "--r", "0.5", "--nu", "0.5", "--threshold", "17"});
  CHECK(r.code == 1);
  CHECK(csv(r.out).size() == 3);
}

TEST_CASE("validate quadratic and oracle records") {
  auto r = run({"validate", "--tests", "oracle", "--r", "0.5", "--nu", "0.5", "--format", "json"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["max_abs_diff"].get<double>() <= 1e-10);

  r = run({"validate", "--tests", "qr", "--r", "0.5", "--nu", "0.5", "--nlim", "100", "--format", "json"});
  CHECK(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j.contains("n_hi"));
  CHECK(j.contains("p_min"));
}

TEST_CASE("asymptote regime labels") {
  auto rows = csv(run({"asymptote", "--r", "0.5", "--nu", "0.5", "--nmin", "10", "--nmax", "20"}).out);
  CHECK(rows[0] == std::vector<std::string>{"n", "f_lo", "asym", "rel_error", "regime"});
  CHECK(rows.size() == 12);
  CHECK(rows[1][4] == "critical");
  rows = csv(run({"asymptote", "--r", "0.5", "--nu", "0.9", "--nmin", "10", "--nmax", "20"}).out);
  CHECK(rows[1][4] == "cut_only");
  rows = csv(run({"asymptote", "--r", "0.9", "--nu", "0.5", "--nmin", "10", "--nmax", "20"}).out);
  CHECK(rows[1][4] == "pole_plus_cut");
  const auto j = nlohmann::json::parse(
      run({"asymptote", "--r", "0.9", "--nu", "0.5", "--nmin", "990", "--nmax", "1000", "--format", "json"}).out);
  CHECK(j["regime"] == "pole_plus_cut");
  CHECK(j["points"].back()["rel_error"].get<double>() < 1e-3);
  CHECK(run({"asymptote", "--r", "0.9", "--nu", "1", "--nmax", "20"}).code == 2);
}

TEST_CASE("--out writes to a file") {
  const std::string path = "test_cli_out.csv";
  const auto r = run({"marginal", "--r", "0.5", "--nu", "0.5", "--nmax", "3", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(csv(ss.str()).size() == 5);
  std::remove(path.c_str());
  CHECK(run({"marginal", "--r", "0.5", "--nu", "0.5", "--out", "/nonexistent/dir/x.csv"}).code == 2);
}
