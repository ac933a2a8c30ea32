#include "fermat/zetareg.hpp"

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <sstream>

#include "fermat/errors.hpp"

namespace fermat {

namespace {

constexpr double two_pi = boost::math::constants::two_pi<double>();

void check(const PowerSpectrumOperator& op) {
    if (!(op.a > 0)) throw UsageError("power spectrum scale a must be positive");
}

}  // namespace

double regularized_det(const PowerSpectrumOperator& op) {
    check(op);
    return std::pow(two_pi, 0.5 * op.x) / std::sqrt(op.a);
}

double regularized_det_from(const PowerSpectrumOperator& op, double zeta0, double zeta_prime0) {
    check(op);
    // zeta_A'(0) = -log(a) zeta(0) + x zeta'(0)
    return std::exp(std::log(op.a) * zeta0 - op.x * zeta_prime0);
}

double zeta_euler_maclaurin(double s, int N, int corrections) {
    if (s == 1.0) throw UsageError("zeta has a pole at s = 1");
    if (N < 1 || corrections < 0) throw UsageError("Euler-Maclaurin needs N >= 1 and corrections >= 0");
    const double n = N;
    double sum = 0.0;
    for (int k = 1; k < N; ++k) sum += std::pow(k, -s);
    sum += std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
    double rising = s;  // s (s+1) ... (s+2k-2)
    double fact = 2.0;  // (2k)!
    for (int k = 1; k <= corrections; ++k) {
        sum += boost::math::bernoulli_b2n<double>(k) / fact * rising * std::pow(n, 1.0 - s - 2.0 * k);
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    return sum;
}

double zeta_prime_at_zero_euler_maclaurin(int N, int corrections) {
    if (N < 1 || corrections < 0) throw UsageError("Euler-Maclaurin needs N >= 1 and corrections >= 0");
    const double n = N;
    double sum = 0.0;
    for (int k = 2; k < N; ++k) sum -= std::log(static_cast<double>(k));
    sum += n * std::log(n) - n - 0.5 * std::log(n);
    for (int k = 1; k <= corrections; ++k)
        sum += boost::math::bernoulli_b2n<double>(k) / ((2.0 * k) * (2.0 * k - 1.0) * std::pow(n, 2.0 * k - 1.0));
    return sum;
}

ZetaConstants zeta_constants() {
    ZetaConstants z;
    z.zeta0 = zeta_euler_maclaurin(0.0);
    z.zeta_prime0 = zeta_prime_at_zero_euler_maclaurin();
    const double closed0 = -0.5;
    const double closed1 = -0.5 * std::log(two_pi);
    if (std::abs(z.zeta0 - closed0) > 1e-10 || std::abs(z.zeta_prime0 - closed1) > 1e-10) {
        std::ostringstream os;
        os.precision(17);
        os << "zeta continuation disagrees with the closed form: zeta(0) = " << z.zeta0
           << ", zeta'(0) = " << z.zeta_prime0;
        throw AccuracyError(os.str());
    }
    return z;
}

double fp_determinant(double T) {
    if (!(T > 0)) throw UsageError("fp_determinant requires T > 0");
    const double pi = boost::math::constants::pi<double>();
    const double det = 2.0 * T;
    const double via_zeta = regularized_det({(pi / T) * (pi / T), 2.0});
    if (std::abs(via_zeta - det) > 1e-14 * det) {
        std::ostringstream os;
        os.precision(17);
        os << "regularized determinant " << via_zeta << " differs from 2T = " << det;
        throw AccuracyError(os.str());
    }
    return det;
}

double log_partial_product(const PowerSpectrumOperator& op, long N) {
    check(op);
    if (N < 1) throw UsageError("log_partial_product needs N >= 1");
    return static_cast<double>(N) * std::log(op.a) + op.x * std::lgamma(static_cast<double>(N) + 1.0);
}

}  // namespace fermat
