#include "ekr/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>

#include "ekr/errors.hpp"

namespace ekr {

namespace {

constexpr int kMaxCachedN = 65536;

const double kNegInf = -std::numeric_limits<double>::infinity();

std::mutex cache_mutex;
std::shared_ptr<const LogFactorialCache> shared_cache;

std::shared_ptr<const LogFactorialCache> cache_for(int n) {
    if (n > kMaxCachedN) {
        throw CapacityError("log_factorial: n exceeds cache cap 65536");
    }
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (!shared_cache || shared_cache->max_n() < n) {
        int want = std::max(n, 256);
        if (shared_cache) {
            want = std::max(want, 2 * shared_cache->max_n());
        }
        want = std::min(want, kMaxCachedN);
        shared_cache = std::make_shared<const LogFactorialCache>(want);
    }
    return shared_cache;
}

}  // namespace

LogFactorialCache::LogFactorialCache(int max_n) {
    if (max_n < 0) {
        throw DomainError("LogFactorialCache: max_n must be >= 0");
    }
    if (max_n > kMaxCachedN) {
        throw CapacityError("LogFactorialCache: max_n exceeds cap 65536");
    }
    table_.resize(static_cast<size_t>(max_n) + 1);
    long double acc = 0.0L;
    table_[0] = 0.0;
    for (int m = 1; m <= max_n; ++m) {
        acc += logl(static_cast<long double>(m));
        table_[m] = static_cast<double>(acc);
    }
}

double LogFactorialCache::log_factorial(int n) const {
    if (n < 0) {
        throw DomainError("log_factorial: n must be >= 0");
    }
    if (n > max_n()) {
        throw CapacityError("log_factorial: n beyond cache size");
    }
    return table_[n];
}

double LogFactorialCache::log_binomial(int n, int k) const {
    if (n < 0) {
        throw DomainError("log_binomial: n must be >= 0");
    }
    if (k < 0 || k > n) {
        return kNegInf;
    }
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_factorial(int n) {
    if (n < 0) {
        throw DomainError("log_factorial: n must be >= 0");
    }
    return cache_for(n)->log_factorial(n);
}

double log_binomial(int n, int k) {
    if (n < 0) {
        throw DomainError("log_binomial: n must be >= 0");
    }
    if (k < 0 || k > n) {
        return kNegInf;
    }
    return cache_for(n)->log_binomial(n, k);
}

namespace {

// Multiplicative recurrence with gcd reduction, so the running value never
// exceeds the final coefficient and the overflow test is exact.
std::optional<uint128> binomial_exact_impl(int n, int k) noexcept {
    if (k < 0 || k > n) {
        return static_cast<uint128>(0);
    }
    k = std::min(k, n - k);
    uint128 r = 1;
    for (int i = 1; i <= k; ++i) {
        uint64_t num = static_cast<uint64_t>(n - k + i);
        uint64_t den = static_cast<uint64_t>(i);
        uint64_t g = std::gcd(num, den);
        num /= g;
        den /= g;
        uint128 q = r / den;
        if (num != 0 && q > ~static_cast<uint128>(0) / num) {
            return std::nullopt;
        }
        r = q * num;
    }
    return r;
}

}  // namespace

uint128 binomial_exact(int n, int k) {
    if (n < 0) {
        throw DomainError("binomial_exact: n must be >= 0");
    }
    auto r = binomial_exact_impl(n, k);
    if (!r) {
        throw CapacityError("binomial_exact: value overflows 128-bit integer");
    }
    return *r;
}

std::optional<uint128> try_binomial_exact(int n, int k) noexcept {
    if (n < 0) {
        return std::nullopt;
    }
    return binomial_exact_impl(n, k);
}

double binomial_double(int n, int k) {
    if (n < 0) {
        throw DomainError("binomial_double: n must be >= 0");
    }
    if (k < 0 || k > n) {
        return 0.0;
    }
    if (auto exact = try_binomial_exact(n, k)) {
        return u128_to_double(*exact);
    }
    return std::exp(log_binomial(n, k));
}

double hypergeometric_pmf(int n, int k, int r) {
    if (n < 0 || k < 0 || k > n) {
        throw DomainError("hypergeometric_pmf: need 0 <= k <= n");
    }
    if (r < 0 || r > k || k - r > n - k) {
        return 0.0;
    }
    double lp = log_binomial(k, r) + log_binomial(n - k, k - r) - log_binomial(n, k);
    return std::exp(lp);
}

double poisson_pmf(double lambda, int x) {
    if (!(lambda >= 0.0)) {
        throw DomainError("poisson_pmf: lambda must be >= 0");
    }
    if (x < 0) {
        return 0.0;
    }
    if (lambda == 0.0) {
        return x == 0 ? 1.0 : 0.0;
    }
    return std::exp(-lambda + x * std::log(lambda) - log_factorial(x));
}

double DiscreteDist::prob_at(int x) const {
    if (x < min_x() || x > max_x()) {
        return 0.0;
    }
    return probs[static_cast<size_t>(x - support_offset)];
}

DiscreteDist hypergeometric_dist(int n, int k) {
    if (n < 0 || k < 0 || k > n) {
        throw DomainError("hypergeometric_dist: need 0 <= k <= n");
    }
    DiscreteDist d;
    d.support_offset = std::max(0, 2 * k - n);
    for (int r = d.support_offset; r <= k; ++r) {
        d.probs.push_back(hypergeometric_pmf(n, k, r));
    }
    d.tail_mass = 0.0;
    return d;
}

DiscreteDist poisson_dist(double lambda, double quantile_cut) {
    if (!(lambda >= 0.0)) {
        throw DomainError("poisson_dist: lambda must be >= 0");
    }
    double cut = std::min(quantile_cut, 1.0 - 1e-15);
    DiscreteDist d;
    d.support_offset = 0;
    KahanSum cum;
    int x = 0;
    while (true) {
        double p = poisson_pmf(lambda, x);
        d.probs.push_back(p);
        cum.add(p);
        if (cum.value() >= cut) {
            break;
        }
        if (x > 20000000) {
            throw SaturationError("poisson_dist: support window exceeds cap");
        }
        ++x;
    }
    d.tail_mass = std::max(0.0, 1.0 - cum.value());
    return d;
}

TvDistance tv_distance(const DiscreteDist& a, const DiscreteDist& b) {
    int lo = std::min(a.min_x(), b.min_x());
    int hi = std::max(a.max_x(), b.max_x());
    KahanSum abs_diff;
    for (int x = lo; x <= hi; ++x) {
        abs_diff.add(std::fabs(a.prob_at(x) - b.prob_at(x)));
    }
    TvDistance tv;
    tv.value = 0.5 * abs_diff.value();
    tv.tail_band = 0.5 * (a.tail_mass + b.tail_mass);
    return tv;
}

double tv_against_poisson(const DiscreteDist& d, double lambda) {
    if (d.tail_mass > 1e-12) {
        throw DomainError("tv_against_poisson: distribution must have no tail mass");
    }
    if (!(lambda >= 0.0)) {
        throw DomainError("tv_against_poisson: lambda must be >= 0");
    }
    KahanSum abs_diff;
    for (int x = d.min_x(); x <= d.max_x(); ++x) {
        abs_diff.add(std::fabs(d.prob_at(x) - poisson_pmf(lambda, x)));
    }
    // Poisson mass outside the window, from tails of the gamma integral so
    // there is no 1 - (sum near 1) cancellation.
    double outside = 0.0;
    if (d.min_x() > 0) {
        outside += regularized_gamma_q(static_cast<double>(d.min_x()), lambda);
    }
    outside += 1.0 - regularized_gamma_q(static_cast<double>(d.max_x()) + 1.0, lambda);
    return 0.5 * (abs_diff.value() + outside);
}

namespace {

double gamma_p_series(double a, double x) {
    constexpr int kItMax = 10000;
    constexpr double kEps = 3e-15;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kItMax; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw SaturationError("regularized_gamma_q: series failed to converge");
}

double gamma_q_contfrac(double a, double x) {
    constexpr int kItMax = 10000;
    constexpr double kEps = 3e-15;
    constexpr double kFpMin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kItMax; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw SaturationError("regularized_gamma_q: continued fraction failed to converge");
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw DomainError("regularized_gamma_q: need a > 0 and x >= 0");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return 1.0 - gamma_p_series(a, x);
    }
    return gamma_q_contfrac(a, x);
}

double chi_square_survival(int df, double x) {
    if (df < 1) {
        throw DomainError("chi_square_survival: df must be >= 1");
    }
    if (x <= 0.0) {
        return 1.0;
    }
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace ekr
