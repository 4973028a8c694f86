#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace specreg {

enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitInput = 2, kExitUnstable = 3 };

struct RunConfig {
  std::string command;
  std::string filter = "tikhonov";
  std::map<std::string, double> params;
  std::string order = "alpha";
  std::string source = "lambda";
  double alpha_min = 1e-7;
  double alpha_max = 0.0;  // 0: filter default
  int per_decade = 0;      // 0: filter default
  std::vector<double> lambda;  // empty: command default
  std::vector<double> mu_grid;  // empty: 2^-6..2^6
  std::string model = "j^-2";   // diag rule, or a .csv / .json path
  std::size_t dim = 200;
  std::string require;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
};

// λ list "0.1,1,10" or geometric spec "geom:lo:hi:per_decade".
std::vector<double> parse_lambda_spec(const std::string& spec);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specreg
