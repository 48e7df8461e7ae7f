#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "ekr/combinatorics.hpp"
#include "ekr/errors.hpp"
#include "ekr/sampler.hpp"

using namespace ekr;

TEST_CASE("kset basics") {
    KSet s(10);
    CHECK(s.count() == 0);
    s.set(0);
    s.set(7);
    s.set(9);
    CHECK(s.count() == 3);
    CHECK(s.test(7));
    CHECK_FALSE(s.test(3));
    CHECK_FALSE(s.test(-1));
    CHECK_FALSE(s.test(10));
    CHECK(s.elements() == std::vector<int>{0, 7, 9});

    KSet t(10);
    t.set(7);
    t.set(8);
    CHECK(s.intersection_count(t) == 1);
    CHECK(t.intersection_count(s) == 1);

    CHECK_THROWS_AS(s.set(10), DomainError);
    CHECK_THROWS_AS(KSet(-1), DomainError);
    CHECK_THROWS_AS(KSet(1025), CapacityError);
    CHECK(KSet(1024).universe_size() == 1024);
}

TEST_CASE("kset integer ordering") {
    KSet a(8), b(8), c(8);
    a.set(0);
    a.set(1);  // 0b00000011
    b.set(0);
    b.set(2);  // 0b00000101
    c.set(3);  // 0b00001000
    CHECK(a < b);
    CHECK(b < c);
    CHECK(a < c);
    CHECK_FALSE(b < a);
    CHECK(a == a);
    CHECK_FALSE(a == b);

    KSet hi(100), lo(100);
    hi.set(99);
    lo.set(0);
    lo.set(1);
    lo.set(64);
    CHECK(lo < hi);
}

TEST_CASE("rng stream determinism") {
    RngStream a = make_stream(42, StreamPurpose::trial, 17);
    RngStream b = make_stream(42, StreamPurpose::trial, 17);
    for (int i = 0; i < 16; ++i) {
        CHECK(a.next() == b.next());
    }

    RngStream c = make_stream(42, StreamPurpose::trial, 18);
    RngStream d = make_stream(42, StreamPurpose::bootstrap, 17);
    RngStream e = make_stream(43, StreamPurpose::trial, 17);
    RngStream base = make_stream(42, StreamPurpose::trial, 17);
    uint64_t v = base.next();
    CHECK(v != c.next());
    CHECK(v != d.next());
    CHECK(v != e.next());
}

TEST_CASE("rng uniform helpers") {
    RngStream s = make_stream(7, StreamPurpose::trial, 0);
    for (int i = 0; i < 1000; ++i) {
        double u = s.next_unit_open();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    CHECK(s.uniform_below(1) == 0);
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) {
        uint64_t v = s.uniform_below(10);
        CHECK(v < 10);
        mean += static_cast<double>(v);
    }
    mean /= 20000.0;
    CHECK(std::fabs(mean - 4.5) < 0.1);
    CHECK_THROWS_AS(s.uniform_below(0), DomainError);
}

TEST_CASE("random_kset shape and uniformity") {
    RngStream s = make_stream(42, StreamPurpose::trial, 0);
    for (auto [n, k] : std::vector<std::pair<int, int>>{
             {1, 1}, {5, 2}, {10, 0}, {10, 10}, {64, 32}, {1024, 3}}) {
        KSet ks = random_kset(n, k, s);
        CHECK(ks.count() == k);
        CHECK(ks.universe_size() == n);
    }
    KSet full = random_kset(6, 6, s);
    CHECK(full.elements() == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK_THROWS_AS(random_kset(4, 5, s), DomainError);
    CHECK_THROWS_AS(random_kset(2000, 2, s), CapacityError);

    // frequency of each of the C(5,2)=10 subsets within 5 sigma of 1/10
    const int draws = 100000;
    std::map<uint64_t, int> freq;
    for (int i = 0; i < draws; ++i) {
        KSet ks = random_kset(5, 2, s);
        freq[ks.words()[0]] += 1;
    }
    CHECK(freq.size() == 10);
    double sigma = std::sqrt(0.1 * 0.9 / draws);
    for (const auto& [key, count] : freq) {
        double f = static_cast<double>(count) / draws;
        CHECK(std::fabs(f - 0.1) < 5.0 * sigma);
    }
}

TEST_CASE("enumerate_ksets") {
    auto sets = enumerate_ksets(4, 2);
    CHECK(sets.size() == 6);
    auto sets63 = enumerate_ksets(6, 3);
    CHECK(sets63.size() == 20);
    for (const KSet& s : sets63) CHECK(s.count() == 3);
    for (size_t i = 1; i < sets63.size(); ++i) {
        CHECK(sets63[i - 1] < sets63[i]);
    }
    auto empty = enumerate_ksets(5, 0);
    CHECK(empty.size() == 1);
    CHECK(empty[0].count() == 0);
    CHECK_THROWS_AS(enumerate_ksets(100, 50), CapacityError);
}

TEST_CASE("sample_family fixed size") {
    ModelConfig cfg;
    cfg.n = 4;
    cfg.k = 2;
    cfg.model = FixedSizeModel{0};
    CHECK(sample_family(cfg).size() == 0);

    cfg.model = FixedSizeModel{6};
    Family all = sample_family(cfg);
    CHECK(all.size() == 6);
    auto sorted = all.sets;
    std::sort(sorted.begin(), sorted.end());
    auto expect = enumerate_ksets(4, 2);
    CHECK(sorted.size() == expect.size());
    for (size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == expect[i]);

    cfg.model = FixedSizeModel{7};
    CHECK_THROWS_AS(sample_family(cfg), InfeasibleError);

    cfg.model = FixedSizeModel{3};
    cfg.master_seed = 99;
    cfg.trial_index = 5;
    Family f1 = sample_family(cfg);
    Family f2 = sample_family(cfg);
    REQUIRE(f1.size() == 3);
    for (size_t i = 0; i < 3; ++i) CHECK(f1.sets[i] == f2.sets[i]);

    ModelConfig big;
    big.n = 1024;
    big.k = 512;
    big.model = FixedSizeModel{5};
    Family bf = sample_family(big);
    CHECK(bf.size() == 5);
    for (const KSet& s : bf.sets) CHECK(s.count() == 512);
}

TEST_CASE("sample_family independent") {
    ModelConfig cfg;
    cfg.n = 6;
    cfg.k = 3;
    cfg.model = IndependentModel{0.0};
    CHECK(sample_family(cfg).size() == 0);
    CHECK_FALSE(uses_poisson_count_approx(cfg));

    cfg.model = IndependentModel{1.0};
    Family all = sample_family(cfg);
    CHECK(all.size() == 20);

    cfg.model = IndependentModel{0.1};
    cfg.trial_index = 11;
    Family f1 = sample_family(cfg);
    Family f2 = sample_family(cfg);
    REQUIRE(f1.size() == f2.size());
    for (size_t i = 0; i < f1.size(); ++i) CHECK(f1.sets[i] == f2.sets[i]);

    // mean family size matches p*C(6,3) = 2 within 4 standard errors
    const int trials = 2000;
    double total = 0.0;
    for (int i = 0; i < trials; ++i) {
        cfg.trial_index = static_cast<uint64_t>(i);
        Family f = sample_family(cfg);
        total += static_cast<double>(f.size());
        for (const KSet& s : f.sets) CHECK(s.count() == 3);
    }
    double mean = total / trials;
    double se = std::sqrt(20.0 * 0.1 * 0.9 / trials);
    CHECK(std::fabs(mean - 2.0) < 4.0 * se);

    cfg.model = IndependentModel{1.5};
    CHECK_THROWS_AS(sample_family(cfg), DomainError);
}

TEST_CASE("sample_family poisson fallback at huge universe") {
    ModelConfig cfg;
    cfg.n = 400;
    cfg.k = 40;
    double q = 0.011708626746436489;  // C(360,40)/C(400,40)
    double t0 = 13.06959160420028;
    cfg.model = IndependentModel{13.0 / std::exp(log_binomial(400, 40))};
    CHECK(uses_poisson_count_approx(cfg));
    (void)q;
    (void)t0;

    Family f1 = sample_family(cfg);
    Family f2 = sample_family(cfg);
    REQUIRE(f1.size() == f2.size());
    for (size_t i = 0; i < f1.size(); ++i) CHECK(f1.sets[i] == f2.sets[i]);
    CHECK(f1.size() < 100);
    for (const KSet& s : f1.sets) CHECK(s.count() == 40);

    cfg.model = IndependentModel{0.9};
    CHECK_THROWS_AS(sample_family(cfg), SaturationError);
}

TEST_CASE("family size distribution is binomial at small universe") {
    // universe C(4,2)=6, p=0.5: size histogram vs Binomial(6, 0.5)
    ModelConfig cfg;
    cfg.n = 4;
    cfg.k = 2;
    cfg.model = IndependentModel{0.5};
    const int trials = 40000;
    std::vector<int> hist(7, 0);
    for (int i = 0; i < trials; ++i) {
        cfg.trial_index = static_cast<uint64_t>(i);
        hist[sample_family(cfg).size()] += 1;
    }
    double chi2 = 0.0;
    for (int s = 0; s <= 6; ++s) {
        double expect = trials * binomial_double(6, s) * std::pow(0.5, 6);
        double diff = hist[s] - expect;
        chi2 += diff * diff / expect;
    }
    CHECK(chi_square_survival(6, chi2) > 1e-4);
}

TEST_CASE("fixed-size single draw matches enumeration uniformly") {
    ModelConfig cfg;
    cfg.n = 5;
    cfg.k = 2;
    cfg.model = FixedSizeModel{1};
    const int draws = 100000;
    std::map<uint64_t, int> freq;
    for (int i = 0; i < draws; ++i) {
        cfg.trial_index = static_cast<uint64_t>(i);
        Family f = sample_family(cfg);
        REQUIRE(f.size() == 1);
        freq[f.sets[0].words()[0]] += 1;
    }
    REQUIRE(freq.size() == 10);
    double chi2 = 0.0;
    for (const auto& [key, count] : freq) {
        double diff = count - draws / 10.0;
        chi2 += diff * diff / (draws / 10.0);
    }
    CHECK(chi_square_survival(9, chi2) > 1e-4);
}

TEST_CASE("family serialization round trip") {
    ModelConfig cfg;
    cfg.n = 6;
    cfg.k = 3;
    cfg.model = FixedSizeModel{4};
    cfg.master_seed = 7;
    cfg.trial_index = 3;
    Family f = sample_family(cfg);
    Family g = parse_family(serialize_family(f));
    CHECK(g.model.n == 6);
    CHECK(g.model.k == 3);
    CHECK(g.model.master_seed == 7);
    CHECK(g.model.trial_index == 3);
    CHECK(std::get<FixedSizeModel>(g.model.model).t == 4);
    REQUIRE(g.size() == f.size());
    for (size_t i = 0; i < f.size(); ++i) CHECK(f.sets[i] == g.sets[i]);

    cfg.model = IndependentModel{0.25};
    Family fi = sample_family(cfg);
    Family gi = parse_family(serialize_family(fi));
    CHECK(std::get<IndependentModel>(gi.model.model).p == 0.25);
    REQUIRE(gi.size() == fi.size());
    for (size_t i = 0; i < fi.size(); ++i) CHECK(fi.sets[i] == gi.sets[i]);
}

TEST_CASE("parse_family rejects malformed input") {
    CHECK_THROWS_AS(parse_family(""), DomainError);
    CHECK_THROWS_AS(parse_family("6 3 bogus 42 0\n"), DomainError);
    CHECK_THROWS_AS(parse_family("6 3\n"), DomainError);
    CHECK_THROWS_AS(parse_family("6 3 fixed:2 42 0\n0,1\n"), DomainError);
    CHECK_THROWS_AS(parse_family("6 3 fixed:2 42 0\n0,1,1\n"), DomainError);
    CHECK_THROWS_AS(parse_family("6 3 fixed:2 42 0\n0,1,x\n"), DomainError);
    CHECK_THROWS_AS(parse_family("6 3 fixed:2 42 0\n0,1,2\n0,1,2\n"), DomainError);
    CHECK_THROWS_AS(parse_family("6 3 fixed:99 42 0\n"), InfeasibleError);
}
