#pragma once

namespace fermat {

// eigenvalues lambda_n = a n^x, n = 1, 2, ...
struct PowerSpectrumOperator {
    double a = 1.0;
    double x = 0.0;
};

// exp(-zeta_A'(0)) = (2 pi)^(x/2) / sqrt(a)
double regularized_det(const PowerSpectrumOperator& op);

// same determinant assembled from zeta_A(s) = a^-s zeta(x s) and the supplied zeta(0), zeta'(0)
double regularized_det_from(const PowerSpectrumOperator& op, double zeta0, double zeta_prime0);

struct ZetaConstants {
    double zeta0 = 0.0;
    double zeta_prime0 = 0.0;
};

// Riemann zeta(s) and zeta'(s) by Euler-Maclaurin summation, N terms plus `corrections` Bernoulli terms
double zeta_euler_maclaurin(double s, int N = 10, int corrections = 8);
double zeta_prime_at_zero_euler_maclaurin(int N = 10, int corrections = 8);

// zeta(0) and zeta'(0) from the Euler-Maclaurin continuation; AccuracyError unless they match
// -1/2 and -log(2 pi)/2 to 1e-10
ZetaConstants zeta_constants();

// Det d^2/dtau^2 on [0, T] with Dirichlet ends = 2T, cross-checked against regularized_det((pi/T)^2, 2)
double fp_determinant(double T);

// log prod_{n <= N} a n^x (diverges with N for x > 0)
double log_partial_product(const PowerSpectrumOperator& op, long N);

}  // namespace fermat
