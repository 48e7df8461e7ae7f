#include "ekr/thresholds.hpp"

#include <cmath>
#include <limits>

#include "ekr/combinatorics.hpp"
#include "ekr/errors.hpp"

namespace ekr {

namespace {

void check_pair_domain(int n, int k, int r) {
    if (n < 0 || k < 0 || k > n || r < 0 || r > k) {
        throw DomainError("need 0 <= r <= k <= n");
    }
    if (2 * k > n) {
        throw DomainError("need 2k <= n: disjoint k-sets must exist");
    }
}

bool mul_overflows(uint128 a, uint128 b, uint128& out) {
    if (a != 0 && b > ~static_cast<uint128>(0) / a) {
        return true;
    }
    out = a * b;
    return false;
}

}  // namespace

ThresholdReport threshold(int n, int k, int r) {
    check_pair_domain(n, k, r);
    if (k == 0) {
        throw DomainError("threshold: k must be positive");
    }
    ThresholdReport rep;
    rep.n = n;
    rep.k = k;
    rep.r = r;
    double log_m = log_binomial(k, r) + log_binomial(n - k, k - r);
    rep.t0_exact = std::exp(0.5 * (std::log(2.0) + log_binomial(n, k) - log_m));
    if (r == 0) {
        rep.t0_convenient =
            std::sqrt(2.0) * std::exp(0.5 * static_cast<double>(k) * k / n);
    }
    rep.validity_upper = std::exp(log_binomial(n, k) - std::log(2.0) - log_m);
    rep.ratio_k_sqrt_n = k / std::sqrt(static_cast<double>(n));
    rep.ratio_k_n23 = k / std::pow(static_cast<double>(n), 2.0 / 3.0);
    rep.flag_k_above_sqrt_n = rep.ratio_k_sqrt_n >= 2.0;
    rep.flag_k_below_n23 = rep.ratio_k_n23 <= 0.5;
    rep.max_intersecting_log10 = log_binomial(n - 1, k - 1) / std::log(10.0);
    return rep;
}

double limit_probability(double A) {
    if (!(A > 0.0)) {
        throw DomainError("limit_probability: A must be positive");
    }
    return std::exp(-A * A);
}

JansonReport janson_bounds(int n, int k, int r, double p) {
    check_pair_domain(n, k, r);
    if (!(p >= 0.0 && p < 1.0)) {
        throw DomainError("janson_bounds: need p in [0,1)");
    }
    JansonReport rep;
    rep.n = n;
    rep.k = k;
    rep.r = r;
    rep.p = p;
    if (p == 0.0) {
        return rep;
    }
    double log_m = log_binomial(k, r) + log_binomial(n - k, k - r);
    double log_p = std::log(p);
    rep.mu = std::exp(log_binomial(n, k) + log_m + 2.0 * log_p - std::log(2.0));
    rep.delta = std::exp(log_binomial(n, k) + 2.0 * log_m + 3.0 * log_p);
    double q = 1.0 - p * p;
    rep.lower_bound = std::exp(-rep.mu / q);
    double m = std::exp(log_m);
    double factor = 1.0 - p * p - m * p;
    if (factor <= 0.0) {
        rep.vacuous = true;
        rep.upper_bound = 1.0;
    } else {
        rep.upper_bound = std::min(1.0, std::exp(-rep.mu * factor / q));
    }
    return rep;
}

AdmissibleB max_admissible_b(int n, int k) {
    check_pair_domain(n, k, 0);
    AdmissibleB result;

    auto cnk = try_binomial_exact(n, k);
    auto cmk = try_binomial_exact(n - k, k);
    uint128 lhs = 0;
    bool lhs_exact = false;
    bool lhs_huge = false;
    if (cnk && cmk) {
        uint128 sq, cube;
        if (!mul_overflows(*cmk, *cmk, sq) && !mul_overflows(sq, *cmk, cube) &&
            !mul_overflows(*cnk, cube, lhs)) {
            lhs_exact = true;
        } else {
            lhs_huge = true;  // product exceeds 128 bits, so it beats any exact rhs
        }
    }
    double log_lhs =
        0.5 * log_binomial(n, k) + 1.5 * log_binomial(n - k, k);

    uint128 s_exact = 0;
    bool s_ok = true;
    double log_s = -std::numeric_limits<double>::infinity();
    for (int b = 0; b <= k; ++b) {
        auto term_a = try_binomial_exact(k, b);
        auto term_b = try_binomial_exact(n - k, k - b);
        uint128 term;
        if (s_ok && term_a && term_b && !mul_overflows(*term_a, *term_b, term) &&
            term <= ~static_cast<uint128>(0) - s_exact) {
            s_exact += term;
        } else {
            s_ok = false;
        }
        double log_term = log_binomial(k, b) + log_binomial(n - k, k - b);
        double hi = std::max(log_s, log_term);
        log_s = hi + std::log(std::exp(log_s - hi) + std::exp(log_term - hi));

        bool holds;
        bool near = false;
        uint128 s2, s4;
        if (s_ok && (lhs_exact || lhs_huge) && !mul_overflows(s_exact, s_exact, s2) &&
            !mul_overflows(s2, s2, s4)) {
            holds = lhs_huge || lhs >= s4;
        } else {
            double margin = log_lhs - 2.0 * log_s;
            holds = margin >= 0.0;
            near = std::fabs(margin) <= 1e-9;
        }
        if (!holds) {
            if (near) {
                result.boundary = true;
            }
            break;
        }
        result.b = b;
        if (near) {
            result.boundary = true;
        }
    }
    return result;
}

}  // namespace ekr
