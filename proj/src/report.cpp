#include "specreg/report.hpp"

#include <cmath>

#include "specreg/error.hpp"

namespace specreg {

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

namespace {
json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json witnesses(const std::vector<Witness>& ws) {
  json a = json::array();
  for (const auto& w : ws) a.push_back({{"alpha", num(w.alpha)}, {"lambda", num(w.lambda)}});
  return a;
}

json pair_witness(const std::optional<std::pair<double, double>>& w) {
  if (!w) return nullptr;
  return {{"alpha", num(w->first)}, {"lambda", num(w->second)}};
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}
}  // namespace

json to_json(const LimitEstimate& e) {
  return {{"kind", to_string(e.kind)},
          {"value", num(e.value)},
          {"tail_min", num(e.tail_min)},
          {"tail_max", num(e.tail_max)},
          {"stabilized", e.stabilized},
          {"trend", to_string(e.trend)},
          {"window_movement", num(e.window_movement)},
          {"extension_movement", num(e.extension_movement)},
          {"grid_meta",
           {{"alpha_max", num(e.grid_meta.alpha_max)},
            {"log_alpha_min", num(e.grid_meta.log_alpha_min)},
            {"per_decade", e.grid_meta.per_decade},
            {"rounds", e.grid_meta.rounds},
            {"points", e.grid_meta.points},
            {"depth_exhausted", e.grid_meta.depth_exhausted}}}};
}

json to_json(const TailPlan& p) {
  return {{"log_alpha_max", num(p.log_alpha_max)},
          {"log_alpha_min", num(p.log_alpha_min)},
          {"per_decade", p.per_decade},
          {"log_alpha_floor", num(p.log_alpha_floor)},
          {"geometric_deep", p.geometric_deep}};
}

json to_json(const PairVerdict& v) {
  json j = {{"holds", v.holds}, {"source", v.source}, {"bound_k", opt(v.bound_k)}, {"gamma", opt(v.gamma)}};
  j["h"] = v.h_used ? json(*v.h_used) : json(nullptr);
  j["witnesses"] = witnesses(v.witnesses);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const Mu0Interval& m) {
  json tested = json::array();
  for (const auto& [mu, finite] : m.tested) tested.push_back({{"mu", num(mu)}, {"finite", finite}});
  return {{"low", num(m.low)}, {"high", num(m.high)}, {"zero", m.zero}, {"infinite", m.infinite}, {"tested", tested}};
}

json to_json(const MpVerdict& m) {
  return {{"passes", m.passes},
          {"a", num(m.a)},
          {"gamma", opt(m.gamma)},
          {"witness_alpha", opt(m.witness_alpha)},
          {"growth", num(m.growth)}};
}

json to_json(const QualificationReport& r) {
  json table = json::array();
  for (const auto& e : r.srho_table) table.push_back({{"lambda", num(e.lambda)}, {"estimate", to_json(e.estimate)}});
  return {{"filter", r.filter_id},
          {"rho", r.rho},
          {"level", to_string(r.level)},
          {"srho", table},
          {"classical_mu0", to_json(r.classical_mu0)},
          {"mp", to_json(r.mp)},
          {"weak_evidence", to_json(r.weak_evidence)},
          {"strong_evidence", to_json(r.strong_evidence)},
          {"optimal_evidence", to_json(r.optimal_evidence)},
          {"plan", to_json(r.plan)},
          {"lambda_grid", nums(r.lambda_grid)}};
}

json to_json(const Construction& c) {
  json rows = json::array();
  for (std::size_t i = 0; i < c.alpha.size(); ++i)
    rows.push_back({{"alpha", num(c.alpha[i])},
                    {"h", num(c.h[i])},
                    {"z", num(c.z[i])},
                    {"rho_star", num(c.rho_star[i])},
                    {"log_rho_star", num(c.log_rho_star[i])}});
  json lam = json::array();
  for (std::size_t i = 0; i < c.lambda.size(); ++i)
    lam.push_back({{"lambda", num(c.lambda[i])}, {"theta", num(c.theta[i])}, {"f", num(c.f[i])}});
  return {{"certificate", to_json(c.certificate)}, {"table", rows}, {"lambda_table", lam}};
}

json to_json(const AxiomReport& a) {
  return {{"h1_finite", a.h1_finite},
          {"h1_overflow_at_zero", a.h1_overflow_at_zero},
          {"h2_bounded", a.h2_bounded},
          {"h2_observed_sup", num(a.h2_observed_sup)},
          {"h3_checked", a.h3_checked},
          {"h3_pointwise", a.h3_pointwise},
          {"h3_worst_deviation", num(a.h3_worst_deviation)},
          {"h3_log_alpha", num(a.h3_log_alpha)},
          {"h1_witness", pair_witness(a.h1_witness)},
          {"h2_witness", pair_witness(a.h2_witness)},
          {"h3_witness", pair_witness(a.h3_witness)}};
}

json to_json(const SpectralModel& m) {
  return {{"eigenvalues", nums(m.eigenvalues)},
          {"reference_norm_sq", num(m.reference_norm_sq)},
          {"provenance", {{"kind", m.provenance.kind}, {"detail", m.provenance.detail}}}};
}

SpectralModel model_from_json(const json& j) {
  try {
    std::vector<double> ev = j.at("eigenvalues").get<std::vector<double>>();
    Provenance p{"json", ""};
    if (j.contains("provenance")) {
      p.kind = j["provenance"].value("kind", "json");
      p.detail = j["provenance"].value("detail", "");
    }
    return make_model(std::move(ev), p);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
}

json to_json(const SlopeFit& f) {
  return {{"slope", num(f.slope)},
          {"intercept", num(f.intercept)},
          {"r_squared", num(f.r_squared)},
          {"window", {{"alpha_lo", num(f.window.alpha_lo)}, {"alpha_hi", num(f.window.alpha_hi)}}},
          {"points", f.points}};
}

json to_json(const ConvergenceStudy& s) {
  json recs = json::array();
  for (const auto& r : s.records)
    recs.push_back({{"alpha", num(r.alpha)}, {"err", num(r.err)}, {"rho", num(r.rho)}, {"ratio", num(r.ratio)},
                    {"log_err", num(r.log_err)}, {"log_rho", num(r.log_rho)}, {"log_ratio", num(r.log_ratio)}});
  return {{"context",
           {{"filter", s.context.filter_id},
            {"model", {{"kind", s.context.model_provenance.kind}, {"detail", s.context.model_provenance.detail},
                       {"dim", s.context.model.dim()}}},
            {"source", s.context.source},
            {"rho", s.context.rho}}},
          {"records", recs}};
}

json to_json(const ConverseResult& c) {
  json m = {{"inside", c.verification.inside}, {"bound", num(c.verification.bound)},
            {"tail_share", num(c.verification.tail_share)}};
  m["witness"] = c.verification.witness ? json(*c.verification.witness) : json(nullptr);
  return {{"pair_certificate", to_json(c.pair_certificate)},
          {"prediction", c.prediction ? json(*c.prediction) : json(nullptr)},
          {"verification", m},
          {"tail", {{"bounded", c.tail.bounded}, {"max_ratio", num(c.tail.max_ratio)}, {"fit", to_json(c.tail.fit)},
                    {"deep_fit", to_json(c.tail.deep_fit)}}},
          {"agreement", c.agreement}};
}

json to_json(const MaximalSourceReport& r) {
  json cands = json::array();
  for (const auto& c : r.candidates) {
    json gens = json::array();
    for (const auto& g : c.generators)
      gens.push_back({{"generator", g.generator}, {"inside", g.inside},
                      {"witness", g.witness ? json(*g.witness) : json(nullptr)}});
    cands.push_back({{"source", c.source}, {"strong_pair", to_json(c.strong_pair)}, {"included", c.included},
                     {"k", opt(c.k)}, {"generators", gens}, {"inclusion_holds", c.inclusion_holds}});
  }
  return {{"filter", r.filter_id}, {"rho", r.rho}, {"level", to_string(r.level)},
          {"srho_on_spectrum", nums(r.srho_on_spectrum)}, {"candidates", cands}};
}

}  // namespace specreg
