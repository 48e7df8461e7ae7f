#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ekr {

using uint128 = unsigned __int128;

// Cumulative table of ln(m!), m <= max_n. Entries are accumulated in long
// double so that adjacent differences reproduce ln(m) to ~1e-12 relative.
class LogFactorialCache {
public:
    explicit LogFactorialCache(int max_n);

    double log_factorial(int n) const;
    double log_binomial(int n, int k) const;
    int max_n() const { return static_cast<int>(table_.size()) - 1; }

private:
    std::vector<double> table_;
};

// Shared process-wide cache, grown on demand. Hard cap 65536.
double log_factorial(int n);
// Returns -inf when k < 0 or k > n; requires n >= 0.
double log_binomial(int n, int k);

// Exact binomial coefficient; throws CapacityError when the value
// overflows unsigned __int128.
uint128 binomial_exact(int n, int k);
std::optional<uint128> try_binomial_exact(int n, int k) noexcept;

double binomial_double(int n, int k);

// The built-in 128-to-64 float conversion truncates; route through the
// 64-bit-mantissa long double so the result is correctly rounded.
inline double u128_to_double(uint128 v) {
    return static_cast<double>(static_cast<long double>(v));
}

// P(|A ∩ B| = r) for independent uniform k-subsets of [n].
double hypergeometric_pmf(int n, int k, int r);
double poisson_pmf(double lambda, int x);

// Finite distribution on {support_offset, ..., support_offset + probs.size() - 1}.
// tail_mass is probability intentionally left outside the stored window.
struct DiscreteDist {
    int support_offset = 0;
    std::vector<double> probs;
    double tail_mass = 0.0;

    int min_x() const { return support_offset; }
    int max_x() const { return support_offset + static_cast<int>(probs.size()) - 1; }
    double prob_at(int x) const;
};

DiscreteDist hypergeometric_dist(int n, int k);
// Smallest prefix of the Poisson pmf with mass >= quantile_cut.
DiscreteDist poisson_dist(double lambda, double quantile_cut = 1.0 - 1e-12);

// value is the total-variation distance over the stored supports;
// tail_band bounds the contribution of mass outside them.
struct TvDistance {
    double value = 0.0;
    double tail_band = 0.0;
};

TvDistance tv_distance(const DiscreteDist& a, const DiscreteDist& b);
// Exact: the Poisson tail beyond the finite support of d is folded into value.
double tv_against_poisson(const DiscreteDist& d, double lambda);

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Q(a, x) = Gamma(a, x) / Gamma(a), the upper regularized incomplete gamma.
double regularized_gamma_q(double a, double x);
// P(Chi2_df > x).
double chi_square_survival(int df, double x);

}  // namespace ekr
