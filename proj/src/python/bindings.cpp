#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <vector>

#include "ekr/combinatorics.hpp"
#include "ekr/errors.hpp"
#include "ekr/pair_stats.hpp"
#include "ekr/report_json.hpp"
#include "ekr/sampler.hpp"
#include "ekr/stein_chen.hpp"
#include "ekr/thresholds.hpp"

namespace py = pybind11;
using namespace ekr;

namespace {

// Reports cross the boundary as plain python containers with the same layout
// the CLI prints. Non-finite doubles keep the string encoding ("inf", "nan").
py::object json_to_py(const Json& j) {
    switch (j.type()) {
        case Json::value_t::null:
            return py::none();
        case Json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case Json::value_t::number_integer:
            return py::int_(j.get<std::int64_t>());
        case Json::value_t::number_unsigned:
            return py::int_(j.get<std::uint64_t>());
        case Json::value_t::number_float:
            return py::float_(j.get<double>());
        case Json::value_t::string:
            return py::str(j.get<std::string>());
        case Json::value_t::array: {
            py::list out;
            for (const Json& item : j) out.append(json_to_py(item));
            return out;
        }
        case Json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it) {
                out[py::str(it.key())] = json_to_py(it.value());
            }
            return out;
        }
        default:
            throw DomainError("json_to_py: unsupported value");
    }
}

// Exactly one of p, t selects the model.
ModelConfig make_config(int n, int k, std::optional<double> p,
                        std::optional<std::uint64_t> t, std::uint64_t seed) {
    if (p.has_value() == t.has_value()) {
        throw DomainError("exactly one of p, t must be given");
    }
    ModelConfig cfg;
    cfg.n = n;
    cfg.k = k;
    if (p) {
        cfg.model = IndependentModel{*p};
    } else {
        cfg.model = FixedSizeModel{*t};
    }
    cfg.master_seed = seed;
    validate_model(cfg);
    return cfg;
}

Family family_from_lists(const std::vector<std::vector<int>>& sets, int n, int k) {
    Family f;
    f.model.n = n;
    f.model.k = k;
    for (const auto& elems : sets) {
        KSet s(n);
        for (int e : elems) {
            if (e < 0 || e >= n) throw DomainError("element outside universe");
            s.set(e);
        }
        f.sets.push_back(std::move(s));
    }
    return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Thresholds and Poisson approximation bounds for random k-set families";
    m.attr("__version__") = version_string();

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<SaturationError>(m, "SaturationError", PyExc_RuntimeError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_OverflowError);

    m.def(
        "threshold",
        [](int n, int k, int r) { return json_to_py(threshold_json(threshold(n, k, r))); },
        py::arg("n"), py::arg("k"), py::arg("r") = 0,
        "Zero-overlap threshold t0 and regime ratios for (n, k, r).");

    m.def("limit_probability", &limit_probability, py::arg("a"),
          "e^{-A^2}, the limiting zero-overlap probability at t = A t0.");

    m.def(
        "janson_bounds",
        [](int n, int k, int r, double p) {
            return json_to_py(janson_json(janson_bounds(n, k, r, p)));
        },
        py::arg("n"), py::arg("k"), py::arg("r"), py::arg("p"),
        "Janson sandwich for P(X_r = 0) in the independent model.");

    m.def("lambda_r", &lambda_r, py::arg("n"), py::arg("k"), py::arg("r"),
          py::arg("p"), "Poisson parameter (1/2) C(n,k) C(k,r) C(n-k,k-r) p^2.");

    m.def(
        "tv_bound_univariate",
        [](int n, int k, int r, double p) {
            return json_to_py(univariate_json(tv_bound_univariate(n, k, r, p)));
        },
        py::arg("n"), py::arg("k"), py::arg("r"), py::arg("p"),
        "Stein-Chen total variation bound for L(X_r) against Po(lambda_r).");

    m.def(
        "epsilon_multivariate",
        [](int n, int k, int b, double p) {
            return json_to_py(multivariate_json(epsilon_multivariate(n, k, b, p)));
        },
        py::arg("n"), py::arg("k"), py::arg("b"), py::arg("p"),
        "Joint Poisson approximation bound for (X_0, ..., X_b).");

    m.def(
        "max_admissible_b",
        [](int n, int k) { return json_to_py(admissible_json(max_admissible_b(n, k))); },
        py::arg("n"), py::arg("k"),
        "Largest b satisfying the joint approximation feasibility condition.");

    m.def(
        "hypergeometric_poisson_gap",
        [](int n, int k) { return json_to_py(gap_json(hypergeometric_poisson_gap(n, k))); },
        py::arg("n"), py::arg("k"),
        "Exact d_TV between the overlap-size law and Po(k^2/n), with the 3k/n bound.");

    m.def(
        "expected_pairs",
        [](int n, int k, int r, std::optional<double> p,
           std::optional<std::uint64_t> t) {
            return expected_pairs(make_config(n, k, p, t, 42), r);
        },
        py::arg("n"), py::arg("k"), py::arg("r"), py::arg("p") = py::none(),
        py::arg("t") = py::none(),
        "Exact E(X_r) under either sampling model.");

    m.def(
        "estimate",
        [](int n, int k, int r, std::optional<double> p,
           std::optional<std::uint64_t> t, std::uint64_t trials,
           std::uint64_t seed, int threads) {
            ModelConfig cfg = make_config(n, k, p, t, seed);
            EkrExperiment e = [&] {
                py::gil_scoped_release release;
                return estimate_zero_probability(cfg, r, trials, threads);
            }();
            return json_to_py(experiment_json(e));
        },
        py::arg("n"), py::arg("k"), py::arg("r") = 0, py::arg("p") = py::none(),
        py::arg("t") = py::none(), py::arg("trials") = 10000,
        py::arg("seed") = 42, py::arg("threads") = 1,
        "Monte Carlo estimate of P(X_r = 0) with Wilson interval and analytic "
        "companions. Output is identical for any thread count.");

    m.def(
        "empirical_law",
        [](int n, int k, int r_max, std::optional<double> p,
           std::optional<std::uint64_t> t, std::uint64_t trials,
           std::uint64_t seed, int threads) {
            ModelConfig cfg = make_config(n, k, p, t, seed);
            LawExperiment law = [&] {
                py::gil_scoped_release release;
                return empirical_law(cfg, r_max, trials, threads);
            }();
            return json_to_py(law_json(law));
        },
        py::arg("n"), py::arg("k"), py::arg("r_max") = 2, py::arg("p") = py::none(),
        py::arg("t") = py::none(), py::arg("trials") = 10000,
        py::arg("seed") = 42, py::arg("threads") = 1,
        "Sampled marginal and joint overlap laws with total variation "
        "distances to their Poisson references (bootstrap CIs).");

    m.def(
        "oracle",
        [](int n, int k, std::optional<double> p, std::optional<std::uint64_t> t,
           int joint_b) {
            ModelConfig cfg = make_config(n, k, p, t, 42);
            OracleResult res = [&] {
                py::gil_scoped_release release;
                return oracle_exact(cfg, joint_b);
            }();
            return json_to_py(oracle_json(res, 42));
        },
        py::arg("n"), py::arg("k"), py::arg("p") = py::none(),
        py::arg("t") = py::none(), py::arg("joint_b") = -1,
        "Exhaustive enumeration of the joint overlap law at tiny scale.");

    m.def(
        "sample_family",
        [](int n, int k, std::optional<double> p, std::optional<std::uint64_t> t,
           std::uint64_t seed, std::uint64_t trial) {
            ModelConfig cfg = make_config(n, k, p, t, seed);
            cfg.trial_index = trial;
            Family f = sample_family(cfg);
            std::vector<std::vector<int>> out;
            out.reserve(f.sets.size());
            for (const KSet& s : f.sets) out.push_back(s.elements());
            return out;
        },
        py::arg("n"), py::arg("k"), py::arg("p") = py::none(),
        py::arg("t") = py::none(), py::arg("seed") = 42, py::arg("trial") = 0,
        "One sampled family as sorted element lists; a pure function of "
        "(seed, trial).");

    m.def(
        "count_overlaps",
        [](const std::vector<std::vector<int>>& sets, int n, int k) {
            OverlapCounts oc = count_overlaps(family_from_lists(sets, n, k), k);
            py::dict out;
            out["counts"] = oc.counts;
            out["pairs"] = oc.pairs;
            return out;
        },
        py::arg("sets"), py::arg("n"), py::arg("k"),
        "Pairwise overlap histogram (X_0, ..., X_k) of an explicit family.");
}
