#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "specreg/cli.hpp"
#include "specreg/error.hpp"

using namespace specreg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  json body() const { return json::parse(out); }
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

// Nonzero exits must leave exactly one structured error line on stderr.
void check_error_line(const Run& r) {
  REQUIRE(r.code != 0);
  REQUIRE_FALSE(r.err.empty());
  CHECK(r.err.back() == '\n');
  CHECK(r.err.find('\n') == r.err.size() - 1);
  json e = json::parse(r.err);
  REQUIRE(e.contains("error"));
  CHECK(e["error"]["exit_code"] == r.code);
  CHECK(e["error"]["kind"].is_string());
  CHECK(e["error"]["message"].is_string());
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("specreg_test_" + name); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: help") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  for (const char* s : {"classify", "srho", "classical", "mp-check", "construct", "converge", "--config"})
    CHECK(r.out.find(s) != std::string::npos);
}

TEST_CASE("cli: usage errors exit 2") {
  check_error_line(run({}));
  check_error_line(run({"nonsense"}));
  check_error_line(run({"classify", "--no-such-flag"}));
  CHECK(run({}).code == kExitInput);
}

TEST_CASE("cli: classify examples") {
  auto a = run({"classify", "--filter", "tikhonov", "--order", "alpha"});
  CHECK(a.code == 0);
  CHECK(a.err.empty());
  CHECK(a.body()["report"]["level"] == "optimal");
  CHECK(a.body()["exit_code"] == 0);

  auto b = run({"classify", "--filter", "ex9", "--order", "exp(-1/sqrt(alpha))", "--require", "optimal"});
  CHECK(b.code == kExitNegative);
  CHECK(b.body()["report"]["level"] == "strong");
  check_error_line(b);

  auto c = run({"classify", "--filter", "tikhonov", "--order", "alpha^^"});
  CHECK(c.code == kExitInput);
  CHECK(c.out.empty());
  check_error_line(c);
  CHECK(json::parse(c.err)["error"]["kind"] == "syntax-error");
}

TEST_CASE("cli: srho examples") {
  auto a = run({"srho", "--filter", "tikhonov", "--order", "alpha", "--lambda", "0.1,1,10"});
  REQUIRE(a.code == 0);
  auto t = a.body()["table"];
  REQUIRE(t.size() == 3);
  double lam[] = {0.1, 1, 10};
  for (int i = 0; i < 3; ++i) {
    CHECK(t[i]["estimate"].get<double>() == doctest::Approx(lam[i]).epsilon(0.01));
    CHECK(t[i]["stabilized"] == true);
  }

  auto b = run({"srho", "--filter", "ex4", "--order", "-1/ln(alpha)", "--lambda", "1"});
  REQUIRE(b.code == 0);
  CHECK(b.body()["table"][0]["estimate"].get<double>() == doctest::Approx(0.5).epsilon(0.01));

  auto c = run({"srho", "--filter", "tsvd", "--order", "alpha", "--lambda", "1"});
  REQUIRE(c.code == 0);
  CHECK(c.body()["table"][0]["estimate"] == "+inf");

  auto d = run({"srho", "--filter", "tikhonov", "--order", "alpha*(-ln(alpha))^0.1", "--lambda", "1"});
  CHECK(d.code == kExitUnstable);
  CHECK(d.body()["table"][0]["stabilized"] == false);
  check_error_line(d);
}

TEST_CASE("cli: srho csv") {
  auto a = run({"srho", "--filter", "tikhonov", "--lambda", "geom:0.1:10:1", "--format", "csv"});
  REQUIRE(a.code == 0);
  CHECK(a.out.find('\r') == std::string::npos);
  std::istringstream is(a.out);
  std::string header, line;
  std::getline(is, header);
  CHECK(header.rfind("lambda,", 0) == 0);
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("cli: classical flags") {
  auto a = run({"classical", "--filter", "tikhonov"}).body()["mu0"];
  CHECK(a["low"].get<double>() >= 1.0);
  CHECK(a["high"].get<double>() <= 2.0);
  CHECK(a["zero"] == false);
  CHECK(a["infinite"] == false);
  CHECK(run({"classical", "--filter", "ex3"}).body()["mu0"]["infinite"] == true);
  CHECK(run({"classical", "--filter", "ex4"}).body()["mu0"]["zero"] == true);
}

TEST_CASE("cli: mp-check") {
  auto a = run({"mp-check", "--filter", "showalter", "--order", "exp(-1/sqrt(alpha))"});
  CHECK(a.code == kExitNegative);
  CHECK(a.body()["mp"]["passes"] == false);
  check_error_line(a);

  auto b = run({"mp-check", "--filter", "tikhonov", "--order", "alpha"});
  CHECK(b.code == 0);
  CHECK(b.body()["mp"]["passes"] == true);
  CHECK(b.body()["mp"]["gamma"].get<double>() <= 1.01);

  auto c = run({"mp-check", "--filter", "landweber", "--order", "(1-0.5*sqrt(alpha))^(1/alpha)"});
  auto comp = c.body()["weak_companion"];
  CHECK(comp["construct"]["holds"] == true);
  CHECK(comp["weak_pair"]["holds"] == true);
}

TEST_CASE("cli: construct") {
  for (const char* f : {"showalter", "tikhonov"}) {
    auto r = run({"construct", "--filter", f});
    CAPTURE(f);
    CHECK(r.code == 0);
    CHECK(r.body()["construction"]["certificate"]["holds"] == true);
  }
  auto e = run({"construct", "--filter", "ex8", "--param", "k=1"});
  CHECK(e.code == kExitNegative);
  check_error_line(e);
  auto w = json::parse(e.err)["error"]["witness"];
  CHECK(w["alpha"].get<double>() > 0);
  CHECK(w["lambda"].get<double>() > 0);
}

TEST_CASE("cli: converge") {
  auto a = run({"converge", "--filter", "tikhonov", "--source", "lambda^0.5"});
  REQUIRE(a.code == 0);
  auto fit = a.body()["fit"];
  CHECK(fit["slope"].get<double>() == doctest::Approx(0.5461).epsilon(1e-3));
  CHECK(fit["r_squared"].get<double>() >= 0.999);
  CHECK(a.body()["grid_meta"]["dim"] == 200);

  auto c = run({"converge", "--format", "csv", "--alpha-min", "1e-3"});
  REQUIRE(c.code == 0);
  CHECK(c.out.rfind("alpha,err,rho,ratio\n", 0) == 0);

  auto m = run({"converge", "--model", "/nonexistent/model.csv"});
  CHECK(m.code == kExitInput);
  check_error_line(m);
}

TEST_CASE("cli: config validation") {
  check_error_line(run({"classify", "--alpha-per-decade", "4"}));
  check_error_line(run({"converge", "--dim", "600"}));
  check_error_line(run({"classify", "--format", "xml"}));
  check_error_line(run({"classify", "--require", "best"}));
  check_error_line(run({"srho", "--lambda", "geom:1:0.1:4"}));
  check_error_line(run({"classify", "--param", "k"}));
  check_error_line(run({"classify", "--config", "/nonexistent/config.json"}));
}

TEST_CASE("cli: config precedence") {
  auto cfg = temp_file("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"filter": "ex4", "order": "alpha", "lambda": [1]})";
  }
  auto a = run({"srho", "--config", cfg.string()});
  REQUIRE(a.code == 0);
  CHECK(a.body()["filter"] == "ex4_log");
  CHECK(a.body()["rho"] == "alpha");

  auto b = run({"srho", "--config", cfg.string(), "--order", "-1/ln(alpha)"});
  REQUIRE(b.code == 0);
  CHECK(b.body()["filter"] == "ex4_log");
  CHECK(b.body()["table"][0]["estimate"].get<double>() == doctest::Approx(0.5).epsilon(0.01));

  {
    std::ofstream f(cfg);
    f << R"({"filter": "ex4", "colour": "red"})";
  }
  auto c = run({"srho", "--config", cfg.string()});
  CHECK(c.code == kExitInput);
  check_error_line(c);

  {
    std::ofstream f(cfg);
    f << "{not json";
  }
  check_error_line(run({"srho", "--config", cfg.string()}));
  fs::remove(cfg);
}

TEST_CASE("cli: identical configs give byte-identical output") {
  const std::vector<std::vector<std::string>> cmds = {
      {"classify", "--filter", "ex8", "--param", "k=1", "--seed", "7"},
      {"srho", "--filter", "ex10", "--order", "-1/ln(alpha)", "--format", "csv"},
      {"construct", "--filter", "showalter"},
      {"converge", "--filter", "tikhonov", "--format", "csv"},
  };
  for (const auto& c : cmds) {
    CAPTURE(c[0]);
    auto a = run(c), b = run(c);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
  }
}

TEST_CASE("cli: --out writes the same bytes as stdout") {
  auto path = temp_file("out.json");
  auto a = run({"classify", "--filter", "tikhonov"});
  auto b = run({"classify", "--filter", "tikhonov", "--out", path.string()});
  CHECK(b.code == 0);
  CHECK(b.out.empty());
  CHECK(slurp(path) == a.out);
  fs::remove(path);
}

TEST_CASE("parse_lambda_spec") {
  auto a = parse_lambda_spec("0.1,1,10");
  REQUIRE(a.size() == 3);
  CHECK(a[1] == 1.0);
  auto g = parse_lambda_spec("geom:0.01:10:4");
  CHECK(g.size() == 13);
  CHECK(g.front() == doctest::Approx(0.01));
  CHECK(g.back() == doctest::Approx(10));
  CHECK_THROWS_AS(parse_lambda_spec(""), InputError);
  CHECK_THROWS_AS(parse_lambda_spec("geom:1:2"), InputError);
  CHECK_THROWS_AS(parse_lambda_spec("1,x"), InputError);
}
