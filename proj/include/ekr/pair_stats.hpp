#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ekr/combinatorics.hpp"
#include "ekr/sampler.hpp"
#include "ekr/stein_chen.hpp"
#include "ekr/thresholds.hpp"

namespace ekr {

// counts[r] = number of unordered pairs of sets overlapping in exactly r
// elements. Invariant: sum_r counts[r] = size*(size-1)/2.
struct OverlapCounts {
    std::vector<std::uint64_t> counts;
    std::uint64_t pairs = 0;
};

// k_hint overrides the set size inferred from the family; required shape when
// the family may be empty.
OverlapCounts count_overlaps(const Family& f, int k_hint = -1);

struct WilsonInterval {
    double estimate = 0.0;
    double low = 0.0;
    double high = 0.0;

    double halfwidth() const { return 0.5 * (high - low); }
};

// 95% score interval for a binomial proportion.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials);

// Exact expectation of X_r under cfg. Equals the closed-form lambda_r for the
// independent model when r < k; the fixed-size model gives
// C(t,2) * C(k,r)C(n-k,k-r) / (C(n,k) - 1). Zero at r = k: distinct sets
// cannot share all k elements.
double expected_pairs(const ModelConfig& cfg, int r);

struct EkrExperiment {
    ModelConfig base;
    int r = 0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;  // trials with X_r = 0
    WilsonInterval ci;
    double p_effective = 0.0;  // independent p, or t / C(n,k)
    std::optional<JansonReport> janson;  // omitted when p_effective >= 1
    std::optional<double> realized_A;    // fixed model: t / t0_exact
    std::optional<double> limit_value;   // exp(-realized_A^2)
};

// Monte Carlo estimate of P(X_r = 0). The result is a pure function of
// (base, r, trials): trial i always draws from the stream keyed by i, so the
// worker count only changes scheduling.
EkrExperiment estimate_zero_probability(const ModelConfig& base, int r,
                                        std::uint64_t trials, int threads = 1);
// The EKR property is X_0 = 0.
EkrExperiment estimate_ekr_probability(const ModelConfig& base,
                                       std::uint64_t trials, int threads = 1);

struct TvEstimate {
    double value = 0.0;
    // percentile bootstrap over 1000 resamples
    double ci_low = 0.0;
    double ci_high = 0.0;
    // mass outside the compared windows, carried as uncertainty
    double tail_band = 0.0;
};

struct MarginalLaw {
    int r = 0;
    double lambda = 0.0;  // Poisson reference intensity: expected_pairs
    std::map<std::uint64_t, std::uint64_t> histogram;
    double mean = 0.0;
    TvEstimate tv_poisson;
    UnivariateBound bound;  // echoed at p_effective
};

struct JointLaw {
    int b = 0;  // coordinates 0..b; b = min(r_max, max_admissible_b, 4)
    std::map<std::vector<std::uint64_t>, std::uint64_t> histogram;
    TvEstimate tv_product;   // against the product of the marginal Poissons
    MultivariateBound bound; // echoed at p_effective
};

struct LawExperiment {
    ModelConfig base;
    std::uint64_t trials = 0;
    int r_max = 0;
    double p_effective = 0.0;
    std::vector<MarginalLaw> marginals;  // r = 0..r_max
    JointLaw joint;
};

LawExperiment empirical_law(const ModelConfig& base, int r_max,
                            std::uint64_t trials, int threads = 1);

// Reads the X_r = 0 estimate off an existing law experiment so a single
// sampling pass serves both reports. Requires r <= law.r_max.
EkrExperiment zero_estimate_from_law(const LawExperiment& law, int r);

struct OracleResult {
    int n = 0;
    int k = 0;
    ModelSpec model;
    double p_effective = 0.0;
    std::uint64_t families = 0;  // independent: 2^C(n,k); fixed: C(C(n,k),t)
    std::map<std::vector<int>, double> joint;  // full tuples (X_0,...,X_k)
    std::vector<DiscreteDist> marginals;       // r = 0..k
    std::vector<double> expected;              // E(X_r), exact
    std::vector<double> lambda;                // expected_pairs(cfg, r)
    double p_zero = 0.0;                       // P(X_0 = 0)
    std::vector<double> tv_poisson;            // d_TV(L(X_r), Po(lambda[r]))
    int joint_b = 0;
    double tv_joint_product = 0.0;  // joint of (X_0..X_joint_b) vs product
};

// Exhaustive enumeration. Independent mode sums over all 2^C(n,k) subsets of
// the k-set universe and requires C(n,k) <= 24; fixed mode enumerates all
// C(C(n,k), t) families and requires that count <= 1e7. joint_b < 0 selects
// min(k, 4).
OracleResult oracle_exact(const ModelConfig& cfg, int joint_b = -1);

}  // namespace ekr
