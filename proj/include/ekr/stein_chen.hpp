#pragma once

#include <vector>

namespace ekr {

// (1/2) C(n,k) C(k,r) C(n-k,k-r) p^2, the Poisson parameter for X_r.
double lambda_r(int n, int k, int r, double p);

struct UnivariateBound {
    int n = 0;
    int k = 0;
    int r = 0;
    double p = 0.0;
    double lambda = 0.0;
    // 2Mp + (1-2M)p^2 with M = C(k,r) C(n-k,k-r)
    double tv_bound = 0.0;
    // M p; the bound is only informative when this is << 1
    double condition_ratio = 0.0;
    bool applicable = false;
};

UnivariateBound tv_bound_univariate(int n, int k, int r, double p);

struct MultivariateBound {
    int n = 0;
    int k = 0;
    int b = 0;
    double p = 0.0;
    std::vector<double> lambdas;  // lambda_0 .. lambda_b
    // (1/2) C(n,k) p^4 S + 2 C(n,k) p^3 S^2 with S = sum_{j<=b} C(k,j) C(n-k,k-j)
    double epsilon = 0.0;
    // p (C(n,k) S^2)^{1/3}
    double condition_ratio = 0.0;
    bool applicable = false;
};

MultivariateBound epsilon_multivariate(int n, int k, int b, double p);

struct HyperPoissonGap {
    int n = 0;
    int k = 0;
    double lambda = 0.0;  // k^2/n
    double gap = 0.0;     // exact d_TV(hypergeometric(n,k), Po(lambda))
    double bound = 0.0;   // 3k/n
    bool within_bound = false;
};

HyperPoissonGap hypergeometric_poisson_gap(int n, int k);

}  // namespace ekr
