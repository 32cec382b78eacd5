#ifndef RSHD_NUMERICS_HPP
#define RSHD_NUMERICS_HPP

#include <vector>

#include "errors.hpp"

namespace rshd {

// Standard Gaussian upper tail P(N(0,1) >= x). Relative error below 1e-12
// over |x| <= 8 (complementary error function route).
double gauss_upper_tail(double x);

// Inverse of gauss_upper_tail on (0,1), safeguarded Newton over the tail
// function itself, so the pair is consistent to ~1e-14 relative.
double gauss_upper_quantile(Probability p);

// Upper quantile of a Binomial(n, 1/2):
//   max{ k in {0..n} | 2^-n sum_{i=k}^n C(n,i) >= eta }.
// Tail sums are exact integer arithmetic for n <= 52 and compensated
// log-domain sums beyond that (safe past n = 10^4). eta in (0,1].
int binom_upper_quantile(int n, double eta);

// gamma_1(eta) = (2 B(n, eta/2) - n) / n, the quantile-threshold remainder
// factor. Always within [-1,1]; eta in (0,1].
double gamma1(int n, double eta);

// gamma_k = n^-k prod_{i<k} (2 B(n, alpha_i*delta/2) - n) for k = 1..J.
// gamma_1 of the result coincides with gamma1(n, alphas[0]*delta).
std::vector<double> gammak_sequence(int n, const std::vector<double>& alphas,
                                    double delta);

// C_n = sqrt(2/n) Gamma(n/2) / Gamma((n-1)/2), via log-Gamma differences.
double cn_constant(int n);

} // namespace rshd

#endif
