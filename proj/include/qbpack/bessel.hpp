#pragma once

// Bessel functions of the first kind for small integer order.  The power
// series converges quickly up to |x| = 12; past that the alternating terms
// lose too many digits, so a downward (Miller) recurrence takes over,
// normalized through sum_n J_n(x)^2 = 1.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qbpack {

namespace detail {

inline double bessel_series(int n, double x) {
    // term_k = (-1)^k (x/2)^{n+2k} / (k! (n+k)!), accumulated in long double
    // because the leading terms reach ~4e3 at x = 12 while the sum is O(1).
    const long double half = 0.5L * x;
    long double term = 1.0L;
    for (int i = 1; i <= n; ++i) term *= half / i;
    long double sum = term;
    for (int k = 1; k <= 60; ++k) {
        term *= -(half * half) / (static_cast<long double>(k) * (n + k));
        sum += term;
        if (std::abs(term) < 1e-22L * (std::abs(sum) + 1e-30L) && k > 4) break;
    }
    return static_cast<double>(sum);
}

inline double bessel_miller(int n, double x) {
    const int start = static_cast<int>(x + 6.0 * std::cbrt(x)) + 40;
    std::vector<double> j(start + 2, 0.0);
    j[start + 1] = 0.0;
    j[start] = 1e-30;
    for (int k = start; k >= 1; --k)
        j[k - 1] = (2.0 * k / x) * j[k] - j[k + 1];
    long double norm2 = static_cast<long double>(j[0]) * j[0];
    for (int k = 1; k <= start; ++k)
        norm2 += 2.0L * static_cast<long double>(j[k]) * j[k];
    const double scale = 1.0 / static_cast<double>(std::sqrt(norm2));
    return j[n] * scale;
}

}  // namespace detail

inline double bessel_j(int n, double x) {
    if (n < 0 || n > 8) throw std::invalid_argument("bessel_j: order must be in [0, 8]");
    if (!(std::abs(x) <= 50.0)) throw std::invalid_argument("bessel_j: |x| must be <= 50");
    const double ax = std::abs(x);
    double v;
    if (ax == 0.0)
        v = (n == 0) ? 1.0 : 0.0;
    else if (ax <= 12.0)
        v = detail::bessel_series(n, ax);
    else
        v = detail::bessel_miller(n, ax);
    // J_n(-x) = (-1)^n J_n(x)
    if (x < 0.0 && (n & 1)) v = -v;
    return v;
}

}  // namespace qbpack
