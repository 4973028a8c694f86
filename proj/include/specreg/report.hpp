#pragma once

#include "json.hpp"

#include "specreg/experiments.hpp"
#include "specreg/filters.hpp"
#include "specreg/limits.hpp"
#include "specreg/operators.hpp"
#include "specreg/qualification.hpp"

namespace specreg {

using json = nlohmann::ordered_json;

// Finite doubles become numbers; ±inf and NaN become "+inf", "-inf", "nan".
json num(double v);

json to_json(const LimitEstimate& e);
json to_json(const TailPlan& p);
json to_json(const PairVerdict& v);
json to_json(const Mu0Interval& m);
json to_json(const MpVerdict& m);
json to_json(const QualificationReport& r);
json to_json(const Construction& c);
json to_json(const AxiomReport& a);
json to_json(const SpectralModel& m);
json to_json(const SlopeFit& f);
json to_json(const ConvergenceStudy& s);
json to_json(const ConverseResult& c);
json to_json(const MaximalSourceReport& r);

SpectralModel model_from_json(const json& j);

}  // namespace specreg
