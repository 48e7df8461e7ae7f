#include "ekr/pair_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <variant>

#include "ekr/errors.hpp"

namespace ekr {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr int kBootstrapReps = 1000;
// percentile bootstrap indices for a 95% interval over 1000 sorted samples
constexpr int kBootLowIdx = 25;
constexpr int kBootHighIdx = 974;

constexpr int kOracleIndependentMaxSets = 24;
constexpr std::uint64_t kOracleMaxFamilies = 10000000;
constexpr std::uint64_t kOracleMaxWork = 500000000;
constexpr std::uint64_t kMaxHistogramWindow = 1 << 20;

double model_p_effective(const ModelConfig& cfg) {
    if (const auto* ind = std::get_if<IndependentModel>(&cfg.model)) {
        return ind->p;
    }
    return static_cast<double>(std::get<FixedSizeModel>(cfg.model).t) /
           binomial_double(cfg.n, cfg.k);
}

int clamp_workers(int threads, std::uint64_t trials) {
    int nw = threads < 1 ? 1 : threads;
    if (static_cast<std::uint64_t>(nw) > trials) {
        nw = static_cast<int>(trials);
    }
    return nw < 1 ? 1 : nw;
}

// body(worker, lo, hi) over a contiguous partition of [0, trials)
void run_partitioned(std::uint64_t trials, int workers,
                     const std::function<void(int, std::uint64_t, std::uint64_t)>& body) {
    if (workers <= 1) {
        body(0, 0, trials);
        return;
    }
    std::vector<std::exception_ptr> errs(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        std::uint64_t lo = trials * static_cast<std::uint64_t>(w) / workers;
        std::uint64_t hi = trials * static_cast<std::uint64_t>(w + 1) / workers;
        pool.emplace_back([&body, &errs, w, lo, hi] {
            try {
                body(w, lo, hi);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    for (auto& e : errs) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace

OverlapCounts count_overlaps(const Family& f, int k_hint) {
    int k = k_hint;
    if (k < 0) {
        k = f.sets.empty() ? 0 : f.sets.front().count();
    }
    OverlapCounts out;
    out.counts.assign(static_cast<size_t>(k) + 1, 0);
    const auto& s = f.sets;
    for (size_t i = 0; i < s.size(); ++i) {
        for (size_t j = i + 1; j < s.size(); ++j) {
            int r = s[i].intersection_count(s[j]);
            if (r > k) {
                throw DomainError("count_overlaps: overlap exceeds declared k");
            }
            ++out.counts[r];
        }
    }
    std::uint64_t t = s.size();
    out.pairs = t < 2 ? 0 : t * (t - 1) / 2;
    return out;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) {
        throw DomainError("wilson_interval: trials must be positive");
    }
    if (successes > trials) {
        throw DomainError("wilson_interval: successes exceed trials");
    }
    double t = static_cast<double>(trials);
    double phat = static_cast<double>(successes) / t;
    double z2t = kZ95 * kZ95 / t;
    double denom = 1.0 + z2t;
    double center = (phat + 0.5 * z2t) / denom;
    double half =
        kZ95 * std::sqrt(phat * (1.0 - phat) / t + 0.25 * z2t / t) / denom;
    WilsonInterval out;
    out.estimate = phat;
    out.low = std::max(0.0, center - half);
    out.high = std::min(1.0, center + half);
    return out;
}

double expected_pairs(const ModelConfig& cfg, int r) {
    if (r < 0 || r > cfg.k) {
        throw DomainError("expected_pairs: r out of range");
    }
    if (2 * cfg.k > cfg.n) {
        throw DomainError("expected_pairs: need 2k <= n");
    }
    if (r == cfg.k) {
        return 0.0;
    }
    if (const auto* ind = std::get_if<IndependentModel>(&cfg.model)) {
        return lambda_r(cfg.n, cfg.k, r, ind->p);
    }
    std::uint64_t t = std::get<FixedSizeModel>(cfg.model).t;
    if (t < 2) {
        return 0.0;
    }
    double c = binomial_double(cfg.n, cfg.k);
    double m = std::exp(log_binomial(cfg.k, r) +
                        log_binomial(cfg.n - cfg.k, cfg.k - r));
    double pairs = 0.5 * static_cast<double>(t) * static_cast<double>(t - 1);
    return pairs * m / (c - 1.0);
}

namespace {

EkrExperiment finish_estimate(const ModelConfig& base, int r,
                              std::uint64_t trials, std::uint64_t hits) {
    EkrExperiment out;
    out.base = base;
    out.r = r;
    out.trials = trials;
    out.hits = hits;
    out.ci = wilson_interval(hits, trials);
    out.p_effective = model_p_effective(base);
    if (2 * base.k <= base.n && out.p_effective < 1.0) {
        out.janson = janson_bounds(base.n, base.k, r, out.p_effective);
    }
    if (const auto* fixed = std::get_if<FixedSizeModel>(&base.model)) {
        if (base.k >= 1 && 2 * base.k <= base.n) {
            double t0 = threshold(base.n, base.k, r).t0_exact;
            double a = static_cast<double>(fixed->t) / t0;
            out.realized_A = a;
            if (a > 0.0) {
                out.limit_value = limit_probability(a);
            }
        }
    }
    return out;
}

}  // namespace

EkrExperiment estimate_zero_probability(const ModelConfig& base, int r,
                                        std::uint64_t trials, int threads) {
    validate_model(base);
    if (r < 0 || r > base.k) {
        throw DomainError("estimate_zero_probability: r out of range");
    }
    if (trials == 0) {
        throw DomainError("estimate_zero_probability: trials must be positive");
    }
    int nw = clamp_workers(threads, trials);
    std::vector<std::uint64_t> hits(nw, 0);
    run_partitioned(trials, nw, [&](int w, std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t h = 0;
        ModelConfig cfg = base;
        for (std::uint64_t i = lo; i < hi; ++i) {
            cfg.trial_index = i;
            Family fam = sample_family(cfg);
            OverlapCounts oc = count_overlaps(fam, base.k);
            if (oc.counts[r] == 0) {
                ++h;
            }
        }
        hits[w] = h;
    });
    std::uint64_t total =
        std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
    return finish_estimate(base, r, trials, total);
}

EkrExperiment zero_estimate_from_law(const LawExperiment& law, int r) {
    if (r < 0 || r > law.r_max) {
        throw DomainError("zero_estimate_from_law: r not tracked");
    }
    const auto& hist = law.marginals[r].histogram;
    auto it = hist.find(0);
    std::uint64_t hits = it == hist.end() ? 0 : it->second;
    return finish_estimate(law.base, r, law.trials, hits);
}

EkrExperiment estimate_ekr_probability(const ModelConfig& base,
                                       std::uint64_t trials, int threads) {
    return estimate_zero_probability(base, 0, trials, threads);
}

namespace {

struct MarginalBins {
    std::vector<std::uint64_t> values;  // sorted distinct X_r values
    std::vector<std::uint64_t> counts;
    std::vector<std::uint64_t> cum;     // inclusive prefix sums of counts
};

MarginalBins to_bins(const std::map<std::uint64_t, std::uint64_t>& hist) {
    MarginalBins b;
    b.values.reserve(hist.size());
    b.counts.reserve(hist.size());
    std::uint64_t run = 0;
    for (const auto& [v, c] : hist) {
        b.values.push_back(v);
        b.counts.push_back(c);
        run += c;
        b.cum.push_back(run);
    }
    return b;
}

size_t pick_bin(const std::vector<std::uint64_t>& cum, std::uint64_t u) {
    return static_cast<size_t>(
        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
}

DiscreteDist empirical_dist(const std::vector<std::uint64_t>& values,
                            const std::vector<std::uint64_t>& counts,
                            std::uint64_t trials) {
    std::uint64_t lo = values.front();
    std::uint64_t hi = values.back();
    if (hi - lo + 1 > kMaxHistogramWindow ||
        hi > static_cast<std::uint64_t>(1) << 30) {
        throw SaturationError("empirical_law: histogram window too wide");
    }
    DiscreteDist d;
    d.support_offset = static_cast<int>(lo);
    d.probs.assign(static_cast<size_t>(hi - lo + 1), 0.0);
    for (size_t i = 0; i < values.size(); ++i) {
        d.probs[static_cast<size_t>(values[i] - lo)] =
            static_cast<double>(counts[i]) / static_cast<double>(trials);
    }
    return d;
}

TvEstimate marginal_tv_bootstrap(const MarginalBins& bins, std::uint64_t trials,
                                 const DiscreteDist& reference,
                                 std::uint64_t seed, std::uint64_t slot) {
    TvEstimate out;
    TvDistance point =
        tv_distance(empirical_dist(bins.values, bins.counts, trials), reference);
    out.value = point.value;
    out.tail_band = point.tail_band;

    std::vector<double> samples(kBootstrapReps);
    std::vector<std::uint64_t> rc(bins.values.size());
    for (int rep = 0; rep < kBootstrapReps; ++rep) {
        RngStream stream = make_stream(
            seed, StreamPurpose::bootstrap,
            (slot << 32) | static_cast<std::uint64_t>(rep));
        std::fill(rc.begin(), rc.end(), 0);
        for (std::uint64_t d = 0; d < trials; ++d) {
            ++rc[pick_bin(bins.cum, stream.uniform_below(trials))];
        }
        samples[rep] =
            tv_distance(empirical_dist(bins.values, rc, trials), reference).value;
    }
    std::sort(samples.begin(), samples.end());
    out.ci_low = samples[kBootLowIdx];
    out.ci_high = samples[kBootHighIdx];
    return out;
}

double product_poisson_tv(const std::vector<std::vector<std::uint64_t>>& keys,
                          const std::vector<std::uint64_t>& counts,
                          std::uint64_t trials,
                          const std::vector<double>& lambdas) {
    KahanSum abs_diff;
    KahanSum qmass;
    for (size_t i = 0; i < keys.size(); ++i) {
        double q = 1.0;
        for (size_t j = 0; j < keys[i].size(); ++j) {
            if (keys[i][j] > static_cast<std::uint64_t>(1) << 30) {
                throw SaturationError("empirical_law: joint counts too large");
            }
            q *= poisson_pmf(lambdas[j], static_cast<int>(keys[i][j]));
        }
        abs_diff.add(
            std::fabs(static_cast<double>(counts[i]) / static_cast<double>(trials) - q));
        qmass.add(q);
    }
    double outside = std::max(0.0, 1.0 - qmass.value());
    return 0.5 * (abs_diff.value() + outside);
}

TvEstimate joint_tv_bootstrap(
    const std::map<std::vector<std::uint64_t>, std::uint64_t>& hist,
    std::uint64_t trials, const std::vector<double>& lambdas,
    std::uint64_t seed, std::uint64_t slot) {
    std::vector<std::vector<std::uint64_t>> keys;
    std::vector<std::uint64_t> counts;
    std::vector<std::uint64_t> cum;
    keys.reserve(hist.size());
    counts.reserve(hist.size());
    std::uint64_t run = 0;
    for (const auto& [k, c] : hist) {
        keys.push_back(k);
        counts.push_back(c);
        run += c;
        cum.push_back(run);
    }

    TvEstimate out;
    out.value = product_poisson_tv(keys, counts, trials, lambdas);
    out.tail_band = 0.0;  // reference mass off the observed support is exact

    std::vector<double> samples(kBootstrapReps);
    std::vector<std::uint64_t> rc(keys.size());
    for (int rep = 0; rep < kBootstrapReps; ++rep) {
        RngStream stream = make_stream(
            seed, StreamPurpose::bootstrap,
            (slot << 32) | static_cast<std::uint64_t>(rep));
        std::fill(rc.begin(), rc.end(), 0);
        for (std::uint64_t d = 0; d < trials; ++d) {
            ++rc[pick_bin(cum, stream.uniform_below(trials))];
        }
        samples[rep] = product_poisson_tv(keys, rc, trials, lambdas);
    }
    std::sort(samples.begin(), samples.end());
    out.ci_low = samples[kBootLowIdx];
    out.ci_high = samples[kBootHighIdx];
    return out;
}

struct LawAccum {
    std::vector<std::map<std::uint64_t, std::uint64_t>> hist;
    std::vector<uint128> sums;
    std::map<std::vector<std::uint64_t>, std::uint64_t> joint;
};

}  // namespace

LawExperiment empirical_law(const ModelConfig& base, int r_max,
                            std::uint64_t trials, int threads) {
    validate_model(base);
    if (r_max < 0 || r_max > base.k) {
        throw DomainError("empirical_law: r_max out of range");
    }
    if (2 * base.k > base.n) {
        throw DomainError("empirical_law: need 2k <= n");
    }
    if (trials == 0) {
        throw DomainError("empirical_law: trials must be positive");
    }

    AdmissibleB adm = max_admissible_b(base.n, base.k);
    int b_joint = std::min(r_max, std::min(adm.b.value_or(0), 4));

    int nw = clamp_workers(threads, trials);
    std::vector<LawAccum> acc(nw);
    for (auto& a : acc) {
        a.hist.resize(static_cast<size_t>(r_max) + 1);
        a.sums.assign(static_cast<size_t>(r_max) + 1, 0);
    }
    run_partitioned(trials, nw, [&](int w, std::uint64_t lo, std::uint64_t hi) {
        LawAccum& a = acc[w];
        ModelConfig cfg = base;
        std::vector<std::uint64_t> key(static_cast<size_t>(b_joint) + 1);
        for (std::uint64_t i = lo; i < hi; ++i) {
            cfg.trial_index = i;
            Family fam = sample_family(cfg);
            OverlapCounts oc = count_overlaps(fam, base.k);
            for (int r = 0; r <= r_max; ++r) {
                ++a.hist[r][oc.counts[r]];
                a.sums[r] += oc.counts[r];
            }
            for (int j = 0; j <= b_joint; ++j) {
                key[j] = oc.counts[j];
            }
            ++a.joint[key];
        }
    });

    // merge; all accumulators are integers so the result is order-free
    LawAccum total;
    total.hist.resize(static_cast<size_t>(r_max) + 1);
    total.sums.assign(static_cast<size_t>(r_max) + 1, 0);
    for (const auto& a : acc) {
        for (int r = 0; r <= r_max; ++r) {
            for (const auto& [v, c] : a.hist[r]) {
                total.hist[r][v] += c;
            }
            total.sums[r] += a.sums[r];
        }
        for (const auto& [k, c] : a.joint) {
            total.joint[k] += c;
        }
    }

    LawExperiment out;
    out.base = base;
    out.trials = trials;
    out.r_max = r_max;
    out.p_effective = model_p_effective(base);

    std::vector<double> lambdas(static_cast<size_t>(r_max) + 1);
    for (int r = 0; r <= r_max; ++r) {
        lambdas[r] = expected_pairs(base, r);
    }

    out.marginals.resize(static_cast<size_t>(r_max) + 1);
    for (int r = 0; r <= r_max; ++r) {
        MarginalLaw& m = out.marginals[r];
        m.r = r;
        m.lambda = lambdas[r];
        m.histogram = total.hist[r];
        m.mean = u128_to_double(total.sums[r]) / static_cast<double>(trials);
        m.bound = tv_bound_univariate(base.n, base.k, r, out.p_effective);
        MarginalBins bins = to_bins(total.hist[r]);
        DiscreteDist reference = poisson_dist(lambdas[r]);
        m.tv_poisson =
            marginal_tv_bootstrap(bins, trials, reference, base.master_seed,
                                  static_cast<std::uint64_t>(r));
    }

    out.joint.b = b_joint;
    out.joint.histogram = total.joint;
    out.joint.bound =
        epsilon_multivariate(base.n, base.k, b_joint, out.p_effective);
    std::vector<double> jl(lambdas.begin(), lambdas.begin() + b_joint + 1);
    out.joint.tv_product =
        joint_tv_bootstrap(total.joint, trials, jl, base.master_seed,
                           static_cast<std::uint64_t>(r_max) + 1);
    return out;
}

namespace {

// weighted walk over all subsets of the k-set universe; tuples are packed
// 16 bits per coordinate (C <= 24 forces k <= 3 when 2k <= n, and pair
// counts stay below C(24,2) = 276)
struct IndependentOracleDfs {
    int total_sets = 0;
    std::array<std::array<std::uint8_t, kOracleIndependentMaxSets>,
               kOracleIndependentMaxSets>
        overlap{};
    std::vector<long double> weight_by_size;
    std::array<std::uint8_t, kOracleIndependentMaxSets> included{};
    std::unordered_map<std::uint64_t, long double> acc;

    void run(int idx, int cnt, std::uint64_t packed) {
        if (idx == total_sets) {
            acc[packed] += weight_by_size[cnt];
            return;
        }
        run(idx + 1, cnt, packed);
        std::uint64_t with = packed;
        for (int j = 0; j < cnt; ++j) {
            with += std::uint64_t{1} << (16 * overlap[idx][included[j]]);
        }
        included[cnt] = static_cast<std::uint8_t>(idx);
        run(idx + 1, cnt + 1, with);
    }
};

OracleResult finish_oracle(const ModelConfig& cfg,
                           std::map<std::vector<int>, double> joint,
                           std::uint64_t families, int joint_b) {
    int k = cfg.k;
    OracleResult out;
    out.n = cfg.n;
    out.k = k;
    out.model = cfg.model;
    out.p_effective = model_p_effective(cfg);
    out.families = families;
    out.joint = std::move(joint);

    out.lambda.resize(static_cast<size_t>(k) + 1);
    for (int r = 0; r <= k; ++r) {
        out.lambda[r] = expected_pairs(cfg, r);
    }

    std::vector<int> max_val(static_cast<size_t>(k) + 1, 0);
    for (const auto& [key, prob] : out.joint) {
        (void)prob;
        for (int r = 0; r <= k; ++r) {
            max_val[r] = std::max(max_val[r], key[r]);
        }
    }
    out.marginals.assign(static_cast<size_t>(k) + 1, DiscreteDist{});
    out.expected.assign(static_cast<size_t>(k) + 1, 0.0);
    for (int r = 0; r <= k; ++r) {
        out.marginals[r].support_offset = 0;
        out.marginals[r].probs.assign(static_cast<size_t>(max_val[r]) + 1, 0.0);
    }
    std::vector<KahanSum> means(static_cast<size_t>(k) + 1);
    KahanSum zero_mass;
    for (const auto& [key, prob] : out.joint) {
        for (int r = 0; r <= k; ++r) {
            out.marginals[r].probs[static_cast<size_t>(key[r])] += prob;
            means[r].add(key[r] * prob);
        }
        if (key[0] == 0) {
            zero_mass.add(prob);
        }
    }
    out.p_zero = zero_mass.value();
    out.tv_poisson.resize(static_cast<size_t>(k) + 1);
    for (int r = 0; r <= k; ++r) {
        out.expected[r] = means[r].value();
        out.tv_poisson[r] = tv_against_poisson(out.marginals[r], out.lambda[r]);
    }

    if (joint_b < 0) {
        joint_b = std::min(k, 4);
    }
    joint_b = std::min(joint_b, k);
    out.joint_b = joint_b;
    std::map<std::vector<int>, double> collapsed;
    for (const auto& [key, prob] : out.joint) {
        std::vector<int> sub(key.begin(), key.begin() + joint_b + 1);
        collapsed[sub] += prob;
    }
    KahanSum abs_diff;
    KahanSum qmass;
    for (const auto& [key, prob] : collapsed) {
        double q = 1.0;
        for (int j = 0; j <= joint_b; ++j) {
            q *= poisson_pmf(out.lambda[j], key[j]);
        }
        abs_diff.add(std::fabs(prob - q));
        qmass.add(q);
    }
    out.tv_joint_product =
        0.5 * (abs_diff.value() + std::max(0.0, 1.0 - qmass.value()));
    return out;
}

}  // namespace

OracleResult oracle_exact(const ModelConfig& cfg, int joint_b) {
    validate_model(cfg);
    if (2 * cfg.k > cfg.n) {
        throw DomainError("oracle_exact: need 2k <= n");
    }
    auto universe = try_binomial_exact(cfg.n, cfg.k);
    if (!universe || *universe > 1000000) {
        throw SaturationError("oracle_exact: set universe too large");
    }
    int total_sets = static_cast<int>(static_cast<std::uint64_t>(*universe));

    if (const auto* ind = std::get_if<IndependentModel>(&cfg.model)) {
        if (total_sets > kOracleIndependentMaxSets) {
            throw SaturationError(
                "oracle_exact: independent oracle limited to C(n,k) <= 24");
        }
        if (cfg.k > 3) {
            throw SaturationError("oracle_exact: tuple packing needs k <= 3");
        }
        std::vector<KSet> sets = enumerate_ksets(cfg.n, cfg.k);
        IndependentOracleDfs dfs;
        dfs.total_sets = total_sets;
        for (int i = 0; i < total_sets; ++i) {
            for (int j = 0; j < total_sets; ++j) {
                dfs.overlap[i][j] =
                    static_cast<std::uint8_t>(sets[i].intersection_count(sets[j]));
            }
        }
        dfs.weight_by_size.resize(static_cast<size_t>(total_sets) + 1);
        long double p = ind->p;
        for (int s = 0; s <= total_sets; ++s) {
            dfs.weight_by_size[s] =
                powl(p, s) * powl(1.0L - p, total_sets - s);
        }
        dfs.acc.reserve(1u << 12);
        dfs.run(0, 0, 0);

        std::map<std::vector<int>, double> joint;
        for (const auto& [packed, w] : dfs.acc) {
            std::vector<int> key(static_cast<size_t>(cfg.k) + 1);
            for (int r = 0; r <= cfg.k; ++r) {
                key[r] = static_cast<int>((packed >> (16 * r)) & 0xFFFF);
            }
            joint[key] = static_cast<double>(w);
        }
        std::uint64_t families = std::uint64_t{1} << total_sets;
        return finish_oracle(cfg, std::move(joint), families, joint_b);
    }

    std::uint64_t t = std::get<FixedSizeModel>(cfg.model).t;
    auto fam_count = try_binomial_exact(total_sets, static_cast<int>(t));
    if (!fam_count || *fam_count > kOracleMaxFamilies) {
        throw SaturationError("oracle_exact: family space too large");
    }
    std::uint64_t families = static_cast<std::uint64_t>(*fam_count);
    std::uint64_t pair_ops = t < 2 ? 1 : t * (t - 1) / 2;
    if (families > kOracleMaxWork / pair_ops) {
        throw SaturationError("oracle_exact: enumeration too expensive");
    }

    std::vector<KSet> sets = enumerate_ksets(cfg.n, cfg.k);
    std::map<std::vector<int>, std::uint64_t> counts;
    std::vector<int> key(static_cast<size_t>(cfg.k) + 1);
    if (t == 0) {
        counts[std::vector<int>(static_cast<size_t>(cfg.k) + 1, 0)] = 1;
    } else {
        std::vector<int> idx(static_cast<size_t>(t));
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            std::fill(key.begin(), key.end(), 0);
            for (size_t a = 0; a < idx.size(); ++a) {
                for (size_t b = a + 1; b < idx.size(); ++b) {
                    ++key[sets[idx[a]].intersection_count(sets[idx[b]])];
                }
            }
            ++counts[key];
            int i = static_cast<int>(t) - 1;
            while (i >= 0 && idx[i] == total_sets - static_cast<int>(t) + i) {
                --i;
            }
            if (i < 0) {
                break;
            }
            ++idx[i];
            for (size_t j = static_cast<size_t>(i) + 1; j < idx.size(); ++j) {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    double total = u128_to_double(*fam_count);
    std::map<std::vector<int>, double> joint;
    for (const auto& [tuple, c] : counts) {
        joint[tuple] = static_cast<double>(c) / total;
    }
    return finish_oracle(cfg, std::move(joint), families, joint_b);
}

}  // namespace ekr
