#pragma once

#include <optional>

namespace ekr {

struct ThresholdReport {
    int n = 0;
    int k = 0;
    int r = 0;
    // sqrt(2 C(n,k) / (C(k,r) C(n-k,k-r)))
    double t0_exact = 0.0;
    // sqrt(2) e^{k^2/(2n)}, defined for r = 0 only
    std::optional<double> t0_convenient;
    // C(n,k) / (2 C(k,r) C(n-k,k-r)), where the upper Janson bound stops biting
    double validity_upper = 0.0;
    // Finite-n surrogates for the asymptotic regime k >> sqrt(n), k = o(n^{2/3})
    double ratio_k_sqrt_n = 0.0;
    double ratio_k_n23 = 0.0;
    bool flag_k_above_sqrt_n = false;  // ratio_k_sqrt_n >= 2
    bool flag_k_below_n23 = false;     // ratio_k_n23 <= 0.5
    // log10 of C(n-1,k-1), the largest intersecting family
    double max_intersecting_log10 = 0.0;
};

ThresholdReport threshold(int n, int k, int r = 0);

// e^{-A^2}, the limiting probability of the zero-overlap event at t = A t0
double limit_probability(double A);

struct JansonReport {
    int n = 0;
    int k = 0;
    int r = 0;
    double p = 0.0;
    double mu = 0.0;     // (1/2) C(n,k) C(k,r) C(n-k,k-r) p^2
    double delta = 0.0;  // C(n,k) (C(k,r) C(n-k,k-r))^2 p^3
    double lower_bound = 1.0;
    double upper_bound = 1.0;
    bool vacuous = false;  // 1 - p^2 - M p <= 0; upper bound clamped to 1
};

JansonReport janson_bounds(int n, int k, int r, double p);

struct AdmissibleB {
    std::optional<int> b;
    // Decision fell inside the log-space comparison slack (1e-9)
    bool boundary = false;
};

// Largest b in [0,k] with C(n,k) C(n-k,k)^3 >= (sum_{j<=b} C(k,j) C(n-k,k-j))^4,
// exact integers when they fit, log-space comparison otherwise.
AdmissibleB max_admissible_b(int n, int k);

}  // namespace ekr
