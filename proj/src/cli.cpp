#include "specreg/cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "specreg/error.hpp"
#include "specreg/experiments.hpp"
#include "specreg/grid.hpp"
#include "specreg/report.hpp"

namespace specreg {

namespace {

struct Outcome {
  json body;
  int code = kExitOk;
  std::string reason;  // stderr message for nonzero verdict codes
  std::string csv;     // set when the command produced tabular output
};

double parse_number(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("invalid number '" + s + "' in " + what);
  }
  if (pos != s.size()) throw InputError("invalid number '" + s + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, sep)) parts.push_back(p);
  return parts;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void load_config(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config file must hold a JSON object");
  try {
    for (auto& [key, v] : j.items()) {
      if (key == "filter") c.filter = v.get<std::string>();
      else if (key == "params") c.params = v.get<std::map<std::string, double>>();
      else if (key == "order") c.order = v.get<std::string>();
      else if (key == "source") c.source = v.get<std::string>();
      else if (key == "alpha_min") c.alpha_min = v.get<double>();
      else if (key == "alpha_max") c.alpha_max = v.get<double>();
      else if (key == "per_decade") c.per_decade = v.get<int>();
      else if (key == "lambda") c.lambda = v.is_string() ? parse_lambda_spec(v.get<std::string>()) : v.get<std::vector<double>>();
      else if (key == "mu_grid") c.mu_grid = v.get<std::vector<double>>();
      else if (key == "model") c.model = v.get<std::string>();
      else if (key == "dim") c.dim = v.get<std::size_t>();
      else if (key == "require") c.require = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else throw InputError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
}

void validate(const RunConfig& c) {
  if (!(c.alpha_min > 0)) throw InputError("alpha-min must be positive");
  if (c.alpha_max != 0 && !(c.alpha_max > c.alpha_min)) throw InputError("alpha-max must exceed alpha-min");
  if (c.per_decade != 0 && c.per_decade < 8) throw InputError("per-decade must be at least 8");
  for (double l : c.lambda)
    if (!(l > 0)) throw InputError("lambda values must be positive");
  for (double m : c.mu_grid)
    if (!(m > 0)) throw InputError("mu grid values must be positive");
  if (c.dim == 0 || c.dim > kMaxDimension) throw InputError("dim must lie in [1, 512]");
  if (c.format != "json" && c.format != "csv") throw InputError("format must be json or csv");
  if (!c.require.empty() && c.require != "none" && c.require != "weak" && c.require != "strong" &&
      c.require != "optimal")
    throw InputError("require must be one of none, weak, strong, optimal");
}

AlphaGrid alpha_grid(const RunConfig& c) { return {c.alpha_min, c.alpha_max, c.per_decade}; }

OrderFn checked_order(const std::string& text) {
  OrderFn rho = make_order(text);
  if (!rho.certified()) throw Uncertified("order function '" + text + "' is not certified: " + rho.info().failure);
  return rho;
}

SourceFn checked_source(const std::string& text) {
  SourceFn s = make_source(text);
  if (!s.certified()) throw Uncertified("source function '" + text + "' is not certified: " + s.info().failure);
  return s;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

SpectralModel load_model(const RunConfig& c) {
  if (ends_with(c.model, ".csv")) return svd_decompose(read_csv_matrix(c.model), 1e-12, c.model).model;
  if (ends_with(c.model, ".json")) {
    std::ifstream in(c.model);
    if (!in) throw InputError("cannot open model file '" + c.model + "'");
    try {
      return model_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw InputError(std::string("malformed model JSON: ") + e.what());
    }
  }
  std::string rule = c.model.rfind("diag:", 0) == 0 ? c.model.substr(5) : c.model;
  return make_diagonal_model(rule, c.dim);
}

int level_rank(const std::string& s) {
  if (s == "weak") return 1;
  if (s == "strong") return 2;
  if (s == "optimal") return 3;
  return 0;
}

json grid_meta(const RunConfig& c, const FilterFamily& f) {
  TailPlan p = make_tail_plan(f, alpha_grid(c));
  return {{"alpha_min", num(c.alpha_min)},
          {"alpha_max", num(std::exp(p.log_alpha_max))},
          {"per_decade", p.per_decade},
          {"tail_plan", to_json(p)},
          {"divergence_cap", num(kDivergenceCap)},
          {"positivity_floor", num(kPositivityFloor)},
          {"seed", c.seed}};
}

json header(const RunConfig& c, const FilterFamily& f) {
  json params = json::object();
  for (const auto& [k, v] : f.params()) params[k] = num(v);
  return {{"command", c.command}, {"filter", f.id()}, {"params", params}, {"alpha_max", num(f.alpha_max())}};
}

Outcome cmd_classify(const RunConfig& c) {
  FilterFamily f = make_filter(c.filter, c.params);
  OrderFn rho = checked_order(c.order);
  std::vector<double> lg = c.lambda.empty() ? default_lambda_grid(f) : c.lambda;
  QualificationReport r = classify(f, rho, lg, alpha_grid(c));
  Outcome o;
  o.body = header(c, f);
  o.body["report"] = to_json(r);
  o.body["grid_meta"] = grid_meta(c, f);
  o.body["grid_meta"]["lambda_grid"] = to_json(r).at("lambda_grid");
  o.body["grid_meta"]["mu_grid"] = [] {
    json a = json::array();
    for (double m : default_mu_grid()) a.push_back(m);
    return a;
  }();
  int want = level_rank(c.require);
  int got = level_rank(to_string(r.level));
  o.body["required"] = c.require.empty() ? "none" : c.require;
  if (got < want) {
    o.code = kExitNegative;
    o.reason = "level " + to_string(r.level) + " below required " + c.require;
  }
  return o;
}

Outcome cmd_srho(const RunConfig& c) {
  FilterFamily f = make_filter(c.filter, c.params);
  OrderFn rho = checked_order(c.order);
  std::vector<double> lg = c.lambda.empty() ? default_lambda_grid(f) : c.lambda;
  Outcome o;
  o.body = header(c, f);
  o.body["rho"] = rho.text();
  json table = json::array();
  std::ostringstream csv;
  csv << "lambda,estimate,stabilized,trend\n";
  bool all_stable = true;
  for (double l : lg) {
    LimitEstimate e = estimate_srho(f, rho, l, alpha_grid(c));
    all_stable = all_stable && e.stabilized;
    table.push_back({{"lambda", num(l)}, {"estimate", num(e.value)}, {"stabilized", e.stabilized},
                     {"detail", to_json(e)}});
    csv << fmt(l) << ',' << fmt(e.value) << ',' << (e.stabilized ? "true" : "false") << ',' << to_string(e.trend)
        << '\n';
  }
  o.body["table"] = table;
  o.body["grid_meta"] = grid_meta(c, f);
  o.csv = csv.str();
  if (!all_stable) {
    o.code = kExitUnstable;
    o.reason = "at least one s_rho estimate did not stabilize";
  }
  return o;
}

Outcome cmd_classical(const RunConfig& c) {
  FilterFamily f = make_filter(c.filter, c.params);
  std::vector<double> lg = c.lambda.empty() ? default_lambda_grid(f) : c.lambda;
  std::vector<double> mg = c.mu_grid.empty() ? default_mu_grid() : c.mu_grid;
  Mu0Interval m = estimate_classical_order(f, mg, lg, alpha_grid(c));
  Outcome o;
  o.body = header(c, f);
  o.body["mu0"] = to_json(m);
  o.body["grid_meta"] = grid_meta(c, f);
  return o;
}

Outcome cmd_mp_check(const RunConfig& c) {
  FilterFamily f = make_filter(c.filter, c.params);
  OrderFn rho = checked_order(c.order);
  double a = default_mp_a(f, rho);
  std::vector<double> lg = c.lambda.empty() ? default_mp_lambda_grid(a) : c.lambda;
  std::vector<double> ag;
  if (c.alpha_max != 0 || c.per_decade != 0 || c.alpha_min != 1e-7) {
    double hi = c.alpha_max != 0 ? c.alpha_max : std::min(a, f.alpha_max() / 2);
    for (double t : log_points_desc(std::log(hi), std::log(c.alpha_min), c.per_decade ? c.per_decade : 64))
      ag.push_back(std::exp(t));
  } else {
    ag = default_mp_alpha_grid(f, a);
  }
  MpVerdict mp = check_mp_qualification(f, rho, a, lg, ag);
  Outcome o;
  o.body = header(c, f);
  o.body["rho"] = rho.text();
  o.body["mp"] = to_json(mp);
  json companion;
  companion["weak_pair"] = to_json(check_weak_pair(f, make_source("lambda/(1+lambda)"), rho, default_lambda_grid(f)));
  try {
    companion["construct"] = to_json(construct_weak_qualification(f).certificate);
  } catch (const HypothesisViolation& e) {
    companion["construct"] = {{"holds", false}, {"note", e.what()},
                              {"witness", {{"alpha", num(e.alpha())}, {"lambda", num(e.lambda())}}}};
  }
  o.body["weak_companion"] = companion;
  o.body["grid_meta"] = {{"a", num(a)}, {"alpha_points", ag.size()}, {"alpha_hi", num(ag.front())},
                         {"alpha_lo", num(ag.back())}, {"lambda_points", lg.size()}, {"lambda_lo", num(lg.front())},
                         {"lambda_hi", num(lg.back())}, {"seed", c.seed}};
  if (!mp.passes) {
    o.code = kExitNegative;
    o.reason = "MP condition fails for rho = " + rho.text();
  }
  return o;
}

Outcome cmd_construct(const RunConfig& c) {
  FilterFamily f = make_filter(c.filter, c.params);
  std::vector<double> lg = c.lambda.empty() ? default_construct_lambda_grid(f) : c.lambda;
  std::vector<double> ag;
  for (double t : base_log_alpha_grid(f, alpha_grid(c))) ag.push_back(std::exp(t));
  Construction k = construct_weak_qualification(f, lg, ag);
  Outcome o;
  o.body = header(c, f);
  o.body["construction"] = to_json(k);
  o.body["grid_meta"] = grid_meta(c, f);
  std::ostringstream csv;
  csv << "alpha,h,z,rho_star\n";
  for (std::size_t i = 0; i < k.alpha.size(); ++i)
    csv << fmt(k.alpha[i]) << ',' << fmt(k.h[i]) << ',' << fmt(k.z[i]) << ',' << fmt(k.rho_star[i]) << '\n';
  o.csv = csv.str();
  if (!k.certificate.holds) {
    o.code = kExitNegative;
    o.reason = "sup-bound certificate does not hold";
  }
  return o;
}

Outcome cmd_converge(const RunConfig& c) {
  FilterFamily f = make_filter(c.filter, c.params);
  OrderFn rho = checked_order(c.order);
  SourceFn s = checked_source(c.source);
  SpectralModel model = load_model(c);
  std::vector<double> ag;
  if (c.alpha_max != 0 || c.per_decade != 0 || c.alpha_min != 1e-7) {
    double hi = c.alpha_max != 0 ? c.alpha_max : std::min(0.5, f.alpha_max() / 2);
    for (double t : log_points_desc(std::log(hi), std::log(c.alpha_min), c.per_decade ? c.per_decade : 16))
      ag.push_back(std::exp(t));
  } else {
    ag = default_study_alpha_grid(f);
  }
  SourceElement x = make_source_element(model, s, default_generator(model.dim()));
  ConvergenceStudy st = run_convergence(model, f, x, rho, ag);
  Outcome o;
  o.body = header(c, f);
  o.body["fit"] = to_json(fit_order(st));
  TailDiagnostics d = tail_diagnostics(st);
  o.body["tail"] = {{"bounded", d.bounded}, {"max_ratio", num(d.max_ratio)}, {"deep_fit", to_json(d.deep_fit)}};
  o.body["study"] = to_json(st);
  o.body["grid_meta"] = {{"alpha_points", ag.size()}, {"alpha_hi", num(ag.front())}, {"alpha_lo", num(ag.back())},
                         {"generator", "j^-0.6"}, {"dim", model.dim()}, {"seed", c.seed}};
  o.csv = study_to_csv(st);
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write output file '" + path + "'");
  f << text;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  json e = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  err << e.dump() << '\n';
}

int exit_code_for(const Error& e) {
  const std::string& k = e.kind();
  if (k == "hypothesis-violation" || k == "precondition-violation") return kExitNegative;
  if (k == "convergence-failure") return kExitUnstable;
  return kExitInput;
}

}  // namespace

std::vector<double> parse_lambda_spec(const std::string& spec) {
  if (spec.rfind("geom:", 0) == 0) {
    auto parts = split(spec.substr(5), ':');
    if (parts.size() != 3) throw InputError("geometric lambda spec must be geom:lo:hi:per_decade");
    double lo = parse_number(parts[0], "lambda spec"), hi = parse_number(parts[1], "lambda spec");
    double pd = parse_number(parts[2], "lambda spec");
    if (!(lo > 0 && hi >= lo && pd >= 1)) throw InputError("invalid geometric lambda spec '" + spec + "'");
    return geometric_ascending(lo, hi, static_cast<int>(pd));
  }
  std::vector<double> out;
  for (const auto& p : split(spec, ','))
    if (!p.empty()) out.push_back(parse_number(p, "lambda list"));
  if (out.empty()) throw InputError("empty lambda list");
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized qualification of spectral regularization methods"};
  app.require_subcommand(1, 1);

  std::string config_path, filter, order, source, model, require, out_path, format;
  std::vector<std::string> params, lambdas;
  double alpha_min = 0, alpha_max = 0;
  int per_decade = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;

  auto* o_config = app.add_option("--config", config_path, "JSON config file; flags override its values");
  auto* o_filter = app.add_option("--filter", filter, "filter id (default tikhonov)");
  auto* o_param = app.add_option("--param", params, "filter parameter k=v (repeatable)");
  auto* o_order = app.add_option("--order", order, "order function rho(alpha) (default alpha)");
  auto* o_source = app.add_option("--source", source, "source function s(lambda) (default lambda)");
  auto* o_amin = app.add_option("--alpha-min", alpha_min, "smallest alpha of the base grid (default 1e-7)");
  auto* o_amax = app.add_option("--alpha-max", alpha_max, "largest alpha (default alpha_max/2)");
  auto* o_pd = app.add_option("--alpha-per-decade", per_decade,
                              "alpha points per decade (default 64, 512 for oscillatory filters; >= 8)");
  auto* o_lambda = app.add_option("--lambda", lambdas,
                                  "lambda list a,b,c or geom:lo:hi:per_decade (default 1e-2..1e1, 4/decade)");
  auto* o_model = app.add_option("--model", model, "diag rule j^-2|j^-4|exp, or a .csv matrix / .json model (default j^-2)");
  auto* o_dim = app.add_option("--dim", dim, "model dimension for diag rules (default 200, <= 512)");
  auto* o_req = app.add_option("--require", require, "required level none|weak|strong|optimal (classify)");
  auto* o_out = app.add_option("--out", out_path, "output file (default stdout)");
  auto* o_fmt = app.add_option("--format", format, "json (default) or csv");
  auto* o_seed = app.add_option("--seed", seed, "seed recorded in the report (default 0)");

  const char* names[] = {"classify", "srho", "classical", "mp-check", "construct", "converge"};
  const char* help[] = {"classify the qualification level of (filter, rho)",
                        "tabulate the s_rho estimate over lambda",
                        "estimate the classical qualification order mu0",
                        "check the MP qualification condition with a weak-qualification companion",
                        "construct a weak qualification from the residual",
                        "run a convergence study on a spectral model"};
  for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i])->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage-error", e.what(), kExitInput);
    return kExitInput;
  }

  RunConfig c;
  Outcome o;
  try {
    if (*o_config) load_config(config_path, c);
    c.command = app.get_subcommands().front()->get_name();
    if (*o_filter) c.filter = filter;
    if (*o_param) {
      for (const auto& p : params) {
        auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--param expects k=v, got '" + p + "'");
        c.params[p.substr(0, eq)] = parse_number(p.substr(eq + 1), "--param " + p.substr(0, eq));
      }
    }
    if (*o_order) c.order = order;
    if (*o_source) c.source = source;
    if (*o_amin) c.alpha_min = alpha_min;
    if (*o_amax) c.alpha_max = alpha_max;
    if (*o_pd) c.per_decade = per_decade;
    if (*o_lambda) {
      c.lambda.clear();
      for (const auto& l : lambdas) {
        auto v = parse_lambda_spec(l);
        c.lambda.insert(c.lambda.end(), v.begin(), v.end());
      }
    }
    if (*o_model) c.model = model;
    if (*o_dim) c.dim = dim;
    if (*o_req) c.require = require;
    if (*o_out) c.out = out_path;
    if (*o_fmt) c.format = format;
    if (*o_seed) c.seed = seed;
    validate(c);

    if (c.command == "classify") o = cmd_classify(c);
    else if (c.command == "srho") o = cmd_srho(c);
    else if (c.command == "classical") o = cmd_classical(c);
    else if (c.command == "mp-check") o = cmd_mp_check(c);
    else if (c.command == "construct") o = cmd_construct(c);
    else o = cmd_converge(c);

    std::string text;
    if (c.format == "csv" && !o.csv.empty()) {
      text = o.csv;
    } else {
      o.body["exit_code"] = o.code;
      text = o.body.dump(2) + "\n";
    }
    if (c.out.empty()) out << text;
    else write_text(c.out, text);
  } catch (const HypothesisViolation& e) {
    json w = {{"error", {{"kind", e.kind()}, {"message", e.what()}, {"exit_code", int(kExitNegative)},
                         {"witness", {{"alpha", num(e.alpha())}, {"lambda", num(e.lambda())}}}}}};
    err << w.dump() << '\n';
    return kExitNegative;
  } catch (const Error& e) {
    int code = exit_code_for(e);
    emit_error(err, e.kind(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    emit_error(err, "internal-error", e.what(), kExitInput);
    return kExitInput;
  }
  if (o.code != kExitOk) emit_error(err, o.code == kExitUnstable ? "numerical-instability" : "verdict-negative",
                                    o.reason, o.code);
  return o.code;
}

}  // namespace specreg
