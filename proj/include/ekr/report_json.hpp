#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "ekr/pair_stats.hpp"

namespace ekr {

using Json = nlohmann::json;

const char* version_string();

// Doubles that survive JSON transport: non-finite values become the strings
// "inf" / "-inf" / "nan". json_number undoes the encoding.
Json num(double v);
double json_number(const Json& j);

Json model_json(const ModelSpec& model);
Json threshold_json(const ThresholdReport& rep);
Json janson_json(const JansonReport& rep);
Json univariate_json(const UnivariateBound& b);
Json multivariate_json(const MultivariateBound& b);
Json admissible_json(const AdmissibleB& adm);
Json gap_json(const HyperPoissonGap& g);

Json meta_json(std::uint64_t seed, std::uint64_t trials);
// fixed top-level schema: {inputs, analytic, empirical, meta}
Json envelope_json(Json inputs, Json analytic, Json empirical, Json meta);

Json experiment_json(const EkrExperiment& e);
Json law_json(const LawExperiment& law);
// one report combining the zero-probability estimate with the law study that
// produced it
Json simulate_json(const EkrExperiment& est, const LawExperiment& law);
Json oracle_json(const OracleResult& res, std::uint64_t seed);

std::string sweep_csv_header();
std::string sweep_csv_row(const EkrExperiment& e);
// rows r,x,count,prob over every tracked marginal
std::string histogram_csv(const LawExperiment& law);

}  // namespace ekr
