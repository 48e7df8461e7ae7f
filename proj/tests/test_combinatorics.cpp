#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "ekr/combinatorics.hpp"
#include "ekr/errors.hpp"

using namespace ekr;

namespace {

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}

}  // namespace

TEST_CASE("binomial_exact small values") {
    CHECK(binomial_exact(0, 0) == 1);
    CHECK(binomial_exact(6, 3) == 20);
    CHECK(binomial_exact(10, 5) == 252);
    CHECK(binomial_exact(52, 5) == 2598960);
    CHECK(binomial_exact(5, 7) == 0);
    CHECK(binomial_exact(5, -1) == 0);
    CHECK_THROWS_AS(binomial_exact(-1, 0), DomainError);
}

TEST_CASE("binomial_exact pascal recurrence") {
    for (int n = 1; n <= 40; ++n) {
        for (int k = 1; k <= n; ++k) {
            CHECK(binomial_exact(n, k) ==
                  binomial_exact(n - 1, k - 1) + binomial_exact(n - 1, k));
        }
    }
}

TEST_CASE("binomial_exact capacity") {
    CHECK_THROWS_AS(binomial_exact(400, 40), CapacityError);
    CHECK_FALSE(try_binomial_exact(400, 40).has_value());

    auto v = try_binomial_exact(128, 64);
    REQUIRE(v.has_value());
    // C(128,64) = 23951146041928082866135587776380551750, split into 64-bit words
    uint128 want = (static_cast<uint128>(1298394228608800905ULL) << 64) |
                   static_cast<uint128>(13075353597415539270ULL);
    CHECK(*v == want);
}

TEST_CASE("log_binomial values and edges") {
    CHECK(log_binomial(6, 0) == 0.0);
    CHECK(log_binomial(6, 6) == 0.0);
    CHECK(log_binomial(5, 7) == -std::numeric_limits<double>::infinity());
    CHECK(log_binomial(5, -1) == -std::numeric_limits<double>::infinity());
    CHECK(rel_err(log_binomial(6, 3), 2.995732273553991) < 1e-12);
    CHECK(rel_err(log_binomial(1000, 500), 689.467261567851) < 1e-12);
    CHECK_THROWS_AS(log_binomial(-1, 0), DomainError);
}

TEST_CASE("log and exact binomial agree") {
    for (int n = 0; n <= 300; n += 7) {
        for (int k = 0; k <= n; ++k) {
            auto exact = try_binomial_exact(n, k);
            if (!exact || *exact == 0) continue;
            double want = static_cast<double>(*exact);
            CHECK(rel_err(std::exp(log_binomial(n, k)), want) < 1e-10);
        }
    }
}

TEST_CASE("binomial_double") {
    CHECK(binomial_double(52, 5) == 2598960.0);
    CHECK(binomial_double(5, 7) == 0.0);
    CHECK(rel_err(binomial_double(400, 40), std::exp(log_binomial(400, 40))) < 1e-10);
    CHECK(rel_err(binomial_double(128, 64), 2.3951146041928085e+37) < 1e-14);
}

TEST_CASE("log factorial cache increments") {
    LogFactorialCache cache(4096);
    CHECK(cache.log_factorial(0) == 0.0);
    CHECK(cache.log_factorial(1) == 0.0);
    for (int m : {2, 3, 17, 100, 1234, 4096}) {
        double inc = cache.log_factorial(m) - cache.log_factorial(m - 1);
        CHECK(rel_err(inc, std::log(static_cast<double>(m))) < 1e-12);
        CHECK(cache.log_factorial(m) > cache.log_factorial(m - 1));
    }
    CHECK_THROWS_AS(cache.log_factorial(4097), CapacityError);
    CHECK_THROWS_AS(cache.log_factorial(-1), DomainError);
    CHECK_THROWS_AS(LogFactorialCache(100000), CapacityError);
}

TEST_CASE("hypergeometric pmf") {
    CHECK(rel_err(hypergeometric_pmf(6, 3, 1), 0.45) < 1e-12);
    CHECK(rel_err(hypergeometric_pmf(6, 3, 0), 0.05) < 1e-12);
    CHECK(rel_err(hypergeometric_pmf(10, 3, 0), 35.0 / 120.0) < 1e-12);
    CHECK(rel_err(hypergeometric_pmf(10, 3, 1), 63.0 / 120.0) < 1e-12);
    CHECK(rel_err(hypergeometric_pmf(10, 3, 2), 21.0 / 120.0) < 1e-12);
    CHECK(rel_err(hypergeometric_pmf(10, 3, 3), 1.0 / 120.0) < 1e-12);
    CHECK(hypergeometric_pmf(10, 3, 4) == 0.0);
    CHECK(hypergeometric_pmf(10, 3, -1) == 0.0);
    // k - r exceeds n - k: overlap below 2k - n is impossible
    CHECK(hypergeometric_pmf(4, 3, 1) == 0.0);
    CHECK_THROWS_AS(hypergeometric_pmf(4, 5, 0), DomainError);
    CHECK_THROWS_AS(hypergeometric_pmf(-1, 0, 0), DomainError);
}

TEST_CASE("hypergeometric dist sums to one, unimodal, mode near k^2/n") {
    for (int n : {10, 20, 50, 100, 200, 400, 900}) {
        for (int k = 1; k <= n / 2; k += (n > 50 ? 7 : 1)) {
            DiscreteDist d = hypergeometric_dist(n, k);
            KahanSum s;
            for (double p : d.probs) s.add(p);
            CHECK(std::fabs(s.value() - 1.0) < 1e-9);
            CHECK(d.tail_mass == 0.0);

            int mode = d.min_x();
            for (int x = d.min_x(); x <= d.max_x(); ++x) {
                if (d.prob_at(x) > d.prob_at(mode)) mode = x;
            }
            CHECK(std::fabs(mode - static_cast<double>(k) * k / n) <= 1.0);

            bool seen_peak = false;
            for (int x = d.min_x() + 1; x <= d.max_x(); ++x) {
                if (d.prob_at(x) < d.prob_at(x - 1)) {
                    seen_peak = true;
                } else if (d.prob_at(x) > d.prob_at(x - 1)) {
                    CHECK_FALSE(seen_peak);
                }
            }
        }
    }
}

TEST_CASE("ratio of disjoint-pair coefficients dominates its exponential bound") {
    // Holds for k up to n/3; near n/2 the bound is cleanly violated (see below).
    for (int n : {9, 12, 30, 60, 100, 300, 999}) {
        for (int k = 1; k <= n / 3; ++k) {
            double lhs = log_binomial(n - k, k) - log_binomial(n, k);
            double rhs = -static_cast<double>(k) * k / n -
                         2.0 * std::pow(static_cast<double>(k), 3) / (static_cast<double>(n) * n);
            CHECK(lhs >= rhs - 1e-12);
        }
    }
    // n = 8, k = 4: C(4,4)/C(8,4) = 1/70 < exp(-2 - 2) = e^-4
    double lhs = log_binomial(4, 4) - log_binomial(8, 4);
    CHECK(lhs < -4.0);
}

TEST_CASE("poisson pmf") {
    CHECK(rel_err(poisson_pmf(1.0, 0), 0.36787944117144233) < 1e-12);
    CHECK(poisson_pmf(0.0, 0) == 1.0);
    CHECK(poisson_pmf(0.0, 3) == 0.0);
    CHECK(poisson_pmf(2.0, -1) == 0.0);
    CHECK(rel_err(poisson_pmf(4.0, 4), 0.1953668148131647) < 1e-12);
    CHECK_THROWS_AS(poisson_pmf(-1.0, 0), DomainError);
}

TEST_CASE("poisson dist truncation") {
    DiscreteDist d = poisson_dist(4.0);
    KahanSum s;
    for (double p : d.probs) s.add(p);
    CHECK(std::fabs(s.value() + d.tail_mass - 1.0) < 1e-12);
    CHECK(d.tail_mass <= 2e-12);
    for (int x = 0; x <= d.max_x(); ++x) {
        CHECK(d.prob_at(x) == poisson_pmf(4.0, x));
    }

    DiscreteDist zero = poisson_dist(0.0);
    CHECK(zero.probs.size() == 1);
    CHECK(zero.prob_at(0) == 1.0);

    // smallest prefix reaching the cut: for lambda=1, pmf(0)+pmf(1) first crosses 0.5
    DiscreteDist half = poisson_dist(1.0, 0.5);
    CHECK(half.probs.size() == 2);
    CHECK_THROWS_AS(poisson_dist(-0.5), DomainError);
}

TEST_CASE("tv_distance") {
    DiscreteDist po1 = poisson_dist(1.0);
    TvDistance self = tv_distance(po1, po1);
    CHECK(self.value == 0.0);

    DiscreteDist point0;
    point0.support_offset = 0;
    point0.probs = {1.0};
    TvDistance t = tv_distance(point0, po1);
    CHECK(std::fabs(t.value - 0.6321205588285577) < 1e-12);
    CHECK(t.tail_band < 1e-12);

    DiscreteDist point1;
    point1.support_offset = 1;
    point1.probs = {1.0};
    CHECK(tv_distance(point0, point1).value == 1.0);
}

TEST_CASE("tv_distance symmetric, bounded, triangle inequality") {
    std::mt19937 gen(12345);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto random_dist = [&]() {
        DiscreteDist d;
        d.support_offset = static_cast<int>(gen() % 4);
        size_t len = 2 + gen() % 6;
        double total = 0.0;
        for (size_t i = 0; i < len; ++i) {
            d.probs.push_back(unif(gen));
            total += d.probs.back();
        }
        for (double& p : d.probs) p /= total;
        return d;
    };
    for (int rep = 0; rep < 200; ++rep) {
        DiscreteDist a = random_dist(), b = random_dist(), c = random_dist();
        double ab = tv_distance(a, b).value;
        double ba = tv_distance(b, a).value;
        double ac = tv_distance(a, c).value;
        double cb = tv_distance(c, b).value;
        CHECK(std::fabs(ab - ba) < 1e-15);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-15);
        CHECK(ab <= ac + cb + 1e-12);
    }
}

TEST_CASE("tv_against_poisson exact identity") {
    CHECK(rel_err(tv_against_poisson(hypergeometric_dist(4, 2), 1.0),
                  0.29878722549522435) < 1e-12);
    CHECK(tv_against_poisson(poisson_dist(3.0), 3.0) < 2e-12);
    CHECK(rel_err(tv_against_poisson(hypergeometric_dist(400, 40), 4.0),
                  0.05257237567017724) < 1e-10);

    DiscreteDist leaky;
    leaky.probs = {0.9};
    leaky.tail_mass = 0.1;
    CHECK_THROWS_AS(tv_against_poisson(leaky, 1.0), DomainError);
}

TEST_CASE("regularized gamma and chi-square survival") {
    CHECK(regularized_gamma_q(2.5, 0.0) == 1.0);
    CHECK(rel_err(regularized_gamma_q(1.0, 2.5), std::exp(-2.5)) < 1e-12);
    CHECK(std::fabs(chi_square_survival(1, 3.841458820694124) - 0.05) < 1e-9);
    CHECK(std::fabs(chi_square_survival(9, 16.918977604620448) - 0.05) < 1e-9);
    CHECK(rel_err(chi_square_survival(4, 2.0), 0.7357588823428847) < 1e-10);
    CHECK(chi_square_survival(3, 0.0) == 1.0);
    CHECK(chi_square_survival(3, -1.0) == 1.0);
    CHECK_THROWS_AS(chi_square_survival(0, 1.0), DomainError);

    // Poisson cdf identity: P(Po(lambda) <= m) = Q(m+1, lambda)
    double cdf = 0.0;
    for (int x = 0; x <= 6; ++x) cdf += poisson_pmf(4.0, x);
    CHECK(rel_err(regularized_gamma_q(7.0, 4.0), cdf) < 1e-12);
}

TEST_CASE("kahan summation") {
    KahanSum s;
    for (int i = 0; i < 10; ++i) s.add(0.1);
    CHECK(std::fabs(s.value() - 1.0) < 1e-15);

    KahanSum t;
    for (int i = 0; i < 1000000; ++i) t.add(1e-6);
    CHECK(std::fabs(t.value() - 1.0) < 1e-12);
}
