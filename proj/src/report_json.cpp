#include "ekr/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "ekr/errors.hpp"

namespace ekr {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const char* version_string() { return EKRSIM_VERSION; }

Json num(double v) {
    if (std::isnan(v)) {
        return Json("nan");
    }
    if (std::isinf(v)) {
        return Json(v > 0 ? "inf" : "-inf");
    }
    return Json(v);
}

double json_number(const Json& j) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
        throw DomainError("json_number: unrecognized numeric string");
    }
    if (!j.is_number()) {
        throw DomainError("json_number: not a number");
    }
    return j.get<double>();
}

Json model_json(const ModelSpec& model) {
    if (const auto* ind = std::get_if<IndependentModel>(&model)) {
        return Json{{"type", "independent"}, {"p", num(ind->p)}};
    }
    return Json{{"type", "fixed"}, {"t", std::get<FixedSizeModel>(model).t}};
}

Json threshold_json(const ThresholdReport& rep) {
    Json j{{"n", rep.n},
           {"k", rep.k},
           {"r", rep.r},
           {"t0_exact", num(rep.t0_exact)},
           {"validity_upper", num(rep.validity_upper)},
           {"ratio_k_sqrt_n", num(rep.ratio_k_sqrt_n)},
           {"ratio_k_n23", num(rep.ratio_k_n23)},
           {"flag_k_above_sqrt_n", rep.flag_k_above_sqrt_n},
           {"flag_k_below_n23", rep.flag_k_below_n23},
           {"max_intersecting_log10", num(rep.max_intersecting_log10)}};
    j["t0_convenient"] =
        rep.t0_convenient ? num(*rep.t0_convenient) : Json(nullptr);
    return j;
}

Json janson_json(const JansonReport& rep) {
    return Json{{"n", rep.n},
                {"k", rep.k},
                {"r", rep.r},
                {"p", num(rep.p)},
                {"mu", num(rep.mu)},
                {"delta", num(rep.delta)},
                {"lower_bound", num(rep.lower_bound)},
                {"upper_bound", num(rep.upper_bound)},
                {"vacuous", rep.vacuous}};
}

Json univariate_json(const UnivariateBound& b) {
    return Json{{"n", b.n},
                {"k", b.k},
                {"r", b.r},
                {"p", num(b.p)},
                {"lambda", num(b.lambda)},
                {"tv_bound", num(b.tv_bound)},
                {"condition_ratio", num(b.condition_ratio)},
                {"applicable", b.applicable}};
}

Json multivariate_json(const MultivariateBound& b) {
    Json lambdas = Json::array();
    for (double l : b.lambdas) {
        lambdas.push_back(num(l));
    }
    return Json{{"n", b.n},
                {"k", b.k},
                {"b", b.b},
                {"p", num(b.p)},
                {"lambdas", lambdas},
                {"epsilon", num(b.epsilon)},
                {"condition_ratio", num(b.condition_ratio)},
                {"applicable", b.applicable}};
}

Json admissible_json(const AdmissibleB& adm) {
    Json j{{"boundary", adm.boundary}};
    j["b"] = adm.b ? Json(*adm.b) : Json(nullptr);
    return j;
}

Json gap_json(const HyperPoissonGap& g) {
    return Json{{"n", g.n},
                {"k", g.k},
                {"lambda", num(g.lambda)},
                {"gap", num(g.gap)},
                {"bound", num(g.bound)},
                {"within_bound", g.within_bound}};
}

Json meta_json(std::uint64_t seed, std::uint64_t trials) {
    return Json{{"seed", seed}, {"trials", trials}, {"version", version_string()}};
}

Json envelope_json(Json inputs, Json analytic, Json empirical, Json meta) {
    return Json{{"inputs", std::move(inputs)},
                {"analytic", std::move(analytic)},
                {"empirical", std::move(empirical)},
                {"meta", std::move(meta)}};
}

namespace {

Json estimate_inputs(const EkrExperiment& e) {
    return Json{{"n", e.base.n},
                {"k", e.base.k},
                {"r", e.r},
                {"model", model_json(e.base.model)}};
}

Json estimate_analytic(const EkrExperiment& e) {
    Json analytic{{"p_effective", num(e.p_effective)}};
    analytic["janson"] = e.janson ? janson_json(*e.janson) : Json(nullptr);
    analytic["realized_A"] = e.realized_A ? num(*e.realized_A) : Json(nullptr);
    analytic["limit_value"] = e.limit_value ? num(*e.limit_value) : Json(nullptr);
    return analytic;
}

Json estimate_empirical(const EkrExperiment& e) {
    return Json{{"trials", e.trials},
                {"hits", e.hits},
                {"estimate", num(e.ci.estimate)},
                {"ci_low", num(e.ci.low)},
                {"ci_high", num(e.ci.high)}};
}

Json tv_json(const TvEstimate& tv) {
    return Json{{"value", num(tv.value)},
                {"ci_low", num(tv.ci_low)},
                {"ci_high", num(tv.ci_high)},
                {"tail_band", num(tv.tail_band)}};
}

Json marginal_json(const MarginalLaw& m) {
    Json hist = Json::array();
    for (const auto& [x, c] : m.histogram) {
        hist.push_back(Json::array({x, c}));
    }
    return Json{{"r", m.r},
                {"lambda", num(m.lambda)},
                {"mean", num(m.mean)},
                {"histogram", hist},
                {"tv_poisson", tv_json(m.tv_poisson)},
                {"bound", univariate_json(m.bound)}};
}

Json joint_json(const JointLaw& j) {
    Json hist = Json::array();
    for (const auto& [key, c] : j.histogram) {
        hist.push_back(Json::array({Json(key), c}));
    }
    return Json{{"b", j.b},
                {"histogram", hist},
                {"tv_product", tv_json(j.tv_product)},
                {"bound", multivariate_json(j.bound)}};
}

Json law_empirical(const LawExperiment& law) {
    Json marginals = Json::array();
    for (const auto& m : law.marginals) {
        marginals.push_back(marginal_json(m));
    }
    return Json{{"trials", law.trials},
                {"marginals", marginals},
                {"joint", joint_json(law.joint)}};
}

}  // namespace

Json experiment_json(const EkrExperiment& e) {
    return envelope_json(estimate_inputs(e), estimate_analytic(e),
                         estimate_empirical(e),
                         meta_json(e.base.master_seed, e.trials));
}

Json law_json(const LawExperiment& law) {
    Json inputs{{"n", law.base.n},
                {"k", law.base.k},
                {"r_max", law.r_max},
                {"model", model_json(law.base.model)}};
    Json analytic{{"p_effective", num(law.p_effective)}};
    Json lambdas = Json::array();
    for (const auto& m : law.marginals) {
        lambdas.push_back(num(m.lambda));
    }
    analytic["lambdas"] = lambdas;
    analytic["joint_bound"] = multivariate_json(law.joint.bound);
    return envelope_json(std::move(inputs), std::move(analytic),
                         law_empirical(law),
                         meta_json(law.base.master_seed, law.trials));
}

Json simulate_json(const EkrExperiment& est, const LawExperiment& law) {
    Json inputs = estimate_inputs(est);
    inputs["r_max"] = law.r_max;
    Json analytic = estimate_analytic(est);
    Json lambdas = Json::array();
    for (const auto& m : law.marginals) {
        lambdas.push_back(num(m.lambda));
    }
    analytic["lambdas"] = lambdas;
    analytic["joint_bound"] = multivariate_json(law.joint.bound);
    Json empirical = estimate_empirical(est);
    empirical["marginals"] = law_empirical(law)["marginals"];
    empirical["joint"] = joint_json(law.joint);
    return envelope_json(std::move(inputs), std::move(analytic),
                         std::move(empirical),
                         meta_json(est.base.master_seed, est.trials));
}

Json oracle_json(const OracleResult& res, std::uint64_t seed) {
    Json inputs{{"n", res.n},
                {"k", res.k},
                {"model", model_json(res.model)},
                {"joint_b", res.joint_b}};
    Json lambdas = Json::array();
    for (double l : res.lambda) {
        lambdas.push_back(num(l));
    }
    Json analytic{{"p_effective", num(res.p_effective)}, {"lambdas", lambdas}};

    Json marginals = Json::array();
    for (const auto& d : res.marginals) {
        Json probs = Json::array();
        for (double p : d.probs) {
            probs.push_back(num(p));
        }
        marginals.push_back(Json{{"offset", d.support_offset}, {"probs", probs}});
    }
    Json joint = Json::array();
    for (const auto& [key, prob] : res.joint) {
        joint.push_back(Json{{"x", Json(key)}, {"prob", num(prob)}});
    }
    Json expected = Json::array();
    for (double e : res.expected) {
        expected.push_back(num(e));
    }
    Json tvs = Json::array();
    for (double t : res.tv_poisson) {
        tvs.push_back(num(t));
    }
    Json empirical{{"method", "exhaustive"},
                   {"families", res.families},
                   {"p_zero", num(res.p_zero)},
                   {"expected", expected},
                   {"tv_poisson", tvs},
                   {"joint_b", res.joint_b},
                   {"tv_joint_product", num(res.tv_joint_product)},
                   {"marginals", marginals},
                   {"joint", joint}};
    return envelope_json(std::move(inputs), std::move(analytic),
                         std::move(empirical), meta_json(seed, res.families));
}

std::string sweep_csv_header() {
    return "n,k,r,t,p,A,trials,estimate,ci_low,ci_high,janson_lo,janson_hi,"
           "limit_eA2";
}

std::string sweep_csv_row(const EkrExperiment& e) {
    std::string row;
    row += std::to_string(e.base.n);
    row += ',';
    row += std::to_string(e.base.k);
    row += ',';
    row += std::to_string(e.r);
    row += ',';
    if (const auto* fixed = std::get_if<FixedSizeModel>(&e.base.model)) {
        row += std::to_string(fixed->t);
    }
    row += ',';
    row += fmt_double(e.p_effective);
    row += ',';
    if (e.realized_A) {
        row += fmt_double(*e.realized_A);
    }
    row += ',';
    row += std::to_string(e.trials);
    row += ',';
    row += fmt_double(e.ci.estimate);
    row += ',';
    row += fmt_double(e.ci.low);
    row += ',';
    row += fmt_double(e.ci.high);
    row += ',';
    if (e.janson) {
        row += fmt_double(e.janson->lower_bound);
    }
    row += ',';
    if (e.janson) {
        row += fmt_double(e.janson->upper_bound);
    }
    row += ',';
    if (e.limit_value) {
        row += fmt_double(*e.limit_value);
    }
    return row;
}

std::string histogram_csv(const LawExperiment& law) {
    std::string out = "r,x,count,prob\n";
    for (const auto& m : law.marginals) {
        for (const auto& [x, c] : m.histogram) {
            out += std::to_string(m.r);
            out += ',';
            out += std::to_string(x);
            out += ',';
            out += std::to_string(c);
            out += ',';
            out += fmt_double(static_cast<double>(c) /
                              static_cast<double>(law.trials));
            out += '\n';
        }
    }
    return out;
}

}  // namespace ekr
