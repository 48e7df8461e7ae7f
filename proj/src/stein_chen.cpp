#include "ekr/stein_chen.hpp"

#include <cmath>
#include <limits>

#include "ekr/combinatorics.hpp"
#include "ekr/errors.hpp"

namespace ekr {

namespace {

void check_domain(int n, int k, int r, double p) {
    if (n < 0 || k < 0 || k > n || r < 0 || r > k) {
        throw DomainError("need 0 <= r <= k <= n");
    }
    if (2 * k > n) {
        throw DomainError("need 2k <= n: disjoint k-sets must exist");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("need p in [0,1]");
    }
}

}  // namespace

double lambda_r(int n, int k, int r, double p) {
    check_domain(n, k, r, p);
    if (p == 0.0) {
        return 0.0;
    }
    return std::exp(log_binomial(n, k) + log_binomial(k, r) +
                    log_binomial(n - k, k - r) + 2.0 * std::log(p) -
                    std::log(2.0));
}

UnivariateBound tv_bound_univariate(int n, int k, int r, double p) {
    check_domain(n, k, r, p);
    UnivariateBound rep;
    rep.n = n;
    rep.k = k;
    rep.r = r;
    rep.p = p;
    rep.lambda = lambda_r(n, k, r, p);
    double m = std::exp(log_binomial(k, r) + log_binomial(n - k, k - r));
    // identical to 2Mp + (1-2M)p^2, arranged so both terms stay nonnegative
    rep.tv_bound = 2.0 * m * p * (1.0 - p) + p * p;
    rep.condition_ratio = m * p;
    rep.applicable = rep.condition_ratio < 1.0;
    return rep;
}

MultivariateBound epsilon_multivariate(int n, int k, int b, double p) {
    check_domain(n, k, b, p);
    MultivariateBound rep;
    rep.n = n;
    rep.k = k;
    rep.b = b;
    rep.p = p;
    double log_s = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= b; ++j) {
        rep.lambdas.push_back(lambda_r(n, k, j, p));
        double log_term = log_binomial(k, j) + log_binomial(n - k, k - j);
        double hi = std::max(log_s, log_term);
        log_s = hi + std::log(std::exp(log_s - hi) + std::exp(log_term - hi));
    }
    if (p == 0.0) {
        rep.applicable = true;
        return rep;
    }
    double log_c = log_binomial(n, k);
    double log_p = std::log(p);
    double quartic = std::exp(log_c + 4.0 * log_p + log_s - std::log(2.0));
    double cubic = std::exp(log_c + 3.0 * log_p + 2.0 * log_s + std::log(2.0));
    rep.epsilon = quartic + cubic;
    rep.condition_ratio = std::exp(log_p + (log_c + 2.0 * log_s) / 3.0);
    rep.applicable = rep.condition_ratio < 1.0;
    return rep;
}

HyperPoissonGap hypergeometric_poisson_gap(int n, int k) {
    check_domain(n, k, 0, 0.0);
    if (n == 0) {
        throw DomainError("hypergeometric_poisson_gap: n must be positive");
    }
    HyperPoissonGap rep;
    rep.n = n;
    rep.k = k;
    rep.lambda = static_cast<double>(k) * k / n;
    rep.gap = tv_against_poisson(hypergeometric_dist(n, k), rep.lambda);
    rep.bound = 3.0 * k / n;
    rep.within_bound = rep.gap <= rep.bound;
    return rep;
}

}  // namespace ekr
