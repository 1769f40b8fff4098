#pragma once

// Closed-form saturation laws for the three special drive geometries:
// parallel (no charging), circular transverse (exact Rabi form), and the
// single-axis cosine drive treated in the counter-rotating hybridized
// rotating-wave approximation (CHRWA).
//
// All of them hold for every pack size N: the Hamiltonians are linear in
// the collective spin, so the Bloch vector of the initial coherent state
// follows the same classical precession regardless of N.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qbpack/bessel.hpp"

namespace qbpack {

struct NoRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Plain bisection; callers bracket the root first.  Deliberately not
// Newton: f' of the regulating equation vanishes near flat stretches.
template <class F>
inline double bisect(F&& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Drive along z only commutes with Jz; the uncharged state just picks up
// phase and the pack never charges.
inline double eta_parallel(double /*t*/) { return 0.0; }

// Circular transverse drive of total strength A at frequency w:
//   eta(t) = A^2 / (4 Omega^2) * (1 - cos(Omega t)),
//   Omega  = sqrt((omega0 - w)^2 + A^2/2).
// On resonance this reaches 1 at t = sqrt(2) pi / A.
inline double eta_circular(double a_total, double w, double omega0, double t) {
    if (a_total == 0.0) return 0.0;
    const double det = omega0 - w;
    const double om2 = det * det + 0.5 * a_total * a_total;
    const double om = std::sqrt(om2);
    return a_total * a_total / (4.0 * om2) * (1.0 - std::cos(om * t));
}

inline double circular_t_min(double a_total) {
    if (!(a_total > 0.0)) throw std::invalid_argument("circular_t_min: A must be > 0");
    return std::numbers::sqrt2 * std::numbers::pi / a_total;
}

struct ChrwaParams {
    double a_total = 0.0;   // drive strength A
    double w = 0.0;         // drive frequency
    double omega0 = 0.0;
    double xi = 0.0;        // splitting fraction from the regulating equation
    double z = 0.0;         // A xi / w
    double a_eff = 0.0;     // A (1 - xi)
    double detuning = 0.0;  // omega0 J0(z) - w
    double rabi = 0.0;      // sqrt(detuning^2 + a_eff^2)
};

// Splitting fraction xi solves A (1 - xi) = 2 omega0 J1(A xi / w) on [0, 1].
inline ChrwaParams chrwa_solve_xi(double a_total, double w, double omega0) {
    if (!(a_total > 0.0) || !(w > 0.0) || !(omega0 > 0.0))
        throw std::invalid_argument("chrwa_solve_xi: A, w, omega0 must be positive");

    auto f = [&](double xi) { return a_total * (1.0 - xi) - 2.0 * omega0 * bessel_j(1, a_total * xi / w); };

    // First sign change on a fine grid, then bisection.  f(0) = A > 0.
    const int grid = 10000;
    double lo = 0.0, flo = f(0.0), root = -1.0;
    for (int i = 1; i <= grid; ++i) {
        const double xi = static_cast<double>(i) / grid;
        const double fx = f(xi);
        if ((flo > 0.0) != (fx > 0.0)) {
            root = detail::bisect(f, lo, xi, flo);
            break;
        }
        lo = xi;
        flo = fx;
    }
    if (root < 0.0)
        throw NoRoot("chrwa_solve_xi: regulating equation has no root in [0, 1]");

    ChrwaParams p;
    p.a_total = a_total;
    p.w = w;
    p.omega0 = omega0;
    p.xi = root;
    p.z = a_total * root / w;
    p.a_eff = a_total * (1.0 - root);
    p.detuning = omega0 * bessel_j(0, p.z) - w;
    p.rabi = std::hypot(p.detuning, p.a_eff);
    return p;
}

// CHRWA saturation for H = omega0 Jz + A cos(w t) Jx:
//   eta(t) = 1/2 [ 1 - cos(ph)
//                  + sin(Or t)/Or * At cos(w t) sin(ph)
//                  + (cos(Or t) - 1)/Or^2 * (At Dt sin(w t) sin(ph) - At^2 cos(ph)) ]
// with ph = z sin(w t), At = a_eff, Dt = detuning, Or = rabi.
inline double eta_chrwa(const ChrwaParams& p, double t) {
    const double ph = p.z * std::sin(p.w * t);
    const double cph = std::cos(ph), sph = std::sin(ph);
    double s_or, c_or;  // sin(Or t)/Or and (cos(Or t) - 1)/Or^2
    if (p.rabi < 1e-9) {
        s_or = t;
        c_or = -0.5 * t * t;
    } else {
        s_or = std::sin(p.rabi * t) / p.rabi;
        c_or = (std::cos(p.rabi * t) - 1.0) / (p.rabi * p.rabi);
    }
    return 0.5 * (1.0 - cph + s_or * p.a_eff * std::cos(p.w * t) * sph +
                  c_or * (p.a_eff * p.detuning * std::sin(p.w * t) * sph -
                          p.a_eff * p.a_eff * cph));
}

inline double eta_chrwa(double a_total, double w, double omega0, double t) {
    return eta_chrwa(chrwa_solve_xi(a_total, w, omega0), t);
}

struct OptimalChrwa {
    int k = 1;
    double z = 0.0;       // first positive root of J0(z) = 2k J1(z)
    double a_total = 0.0; // omega0 J0(z) (z + 1/k)
    double w = 0.0;       // omega0 J0(z)
    double t_min = 0.0;   // k pi / (omega0 J0(z)) = pi / (2 omega0 J1(z))
};

inline double j0_first_zero() {
    auto f = [](double z) { return bessel_j(0, z); };
    return detail::bisect(f, 2.0, 3.0, f(2.0));
}

// Fastest single-axis charging on the branch where the drive completes k
// half-turns per Rabi half-period.  Full charge needs w t = k pi and
// rabi t = pi simultaneously, so t_min = k pi / w; k = 1 is the fastest
// branch because J1 grows on (0, 1.84) and the k = 1 root is largest.
inline OptimalChrwa optimal_chrwa_params(double omega0, int k = 1) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("optimal_chrwa_params: omega0 must be > 0");
    if (k < 1) throw std::invalid_argument("optimal_chrwa_params: k must be >= 1");

    auto g = [&](double z) { return bessel_j(0, z) - 2.0 * k * bessel_j(1, z); };
    // g(0+) = 1 and g < 0 at the first zero of J0, so the root is bracketed.
    const double hi = j0_first_zero();
    const double z = detail::bisect(g, 1e-12, hi, g(1e-12));

    OptimalChrwa o;
    o.k = k;
    o.z = z;
    o.w = omega0 * bessel_j(0, z);
    o.a_total = o.w * (z + 1.0 / k);
    o.t_min = k * std::numbers::pi / o.w;
    return o;
}

}  // namespace qbpack
