#pragma once

// Collective-spin operators for a pack of N identical two-level units,
// restricted to the maximal-spin sector s = N/2.  Basis vectors are the
// Dicke states |s,m> ordered by descending m, so index 0 is the fully
// charged state (m = +s) and index N the uncharged one (m = -s).

#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace qbpack {

using cxd = std::complex<double>;

struct SpinOperators {
    int n_units = 0;
    int dim = 0;             // N + 1
    Eigen::MatrixXcd jx, jy, jz;
};

struct StateVector {
    int n_units = 0;
    Eigen::VectorXcd amplitudes;
};

// m value of basis index i under the descending ordering.
inline double dicke_m(int n_units, int i) {
    return 0.5 * n_units - i;
}

inline SpinOperators build_operators(int n_units) {
    if (n_units < 1) throw std::invalid_argument("build_operators: n_units must be >= 1");
    const int dim = n_units + 1;
    const double s = 0.5 * n_units;

    Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double m = dicke_m(n_units, i);
        jz(i, i) = m;
        // J+ |s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>; |s,m+1> sits at index i-1.
        if (i > 0) jp(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    Eigen::MatrixXcd jm = jp.adjoint();

    SpinOperators ops;
    ops.n_units = n_units;
    ops.dim = dim;
    ops.jx = 0.5 * (jp + jm);
    ops.jy = cxd(0.0, -0.5) * (jp - jm);
    ops.jz = jz;
    return ops;
}

inline StateVector uncharged_state(int n_units) {
    if (n_units < 1) throw std::invalid_argument("uncharged_state: n_units must be >= 1");
    StateVector st;
    st.n_units = n_units;
    st.amplitudes = Eigen::VectorXcd::Zero(n_units + 1);
    st.amplitudes(n_units) = 1.0;   // |s, -s>
    return st;
}

inline double jz_expectation(const StateVector& st) {
    double acc = 0.0;
    for (int i = 0; i < st.amplitudes.size(); ++i)
        acc += dicke_m(st.n_units, i) * std::norm(st.amplitudes(i));
    return acc;
}

// eta = <Jz>/N + 1/2: 0 for the uncharged state, 1 at full charge.
inline double saturation(const StateVector& st) {
    return jz_expectation(st) / st.n_units + 0.5;
}

inline double stored_energy(const StateVector& st, const StateVector& initial, double omega0) {
    return omega0 * (jz_expectation(st) - jz_expectation(initial));
}

// Conjugation rule e^{i a.J} (b.J) e^{-i a.J} = b'.J.  Each application of
// the commutator maps b to -a x b, so b' is b rotated by |a| about -a.
inline Eigen::Vector3d rotate_generator(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double t = a.norm();
    if (t < 1e-300) return b;
    const Eigen::Vector3d axb = a.cross(b);
    const Eigen::Vector3d axaxb = a.cross(axb);
    // sin(t)/t and (1-cos t)/t^2 stay well conditioned near t = 0.
    double sc, cc;
    if (t < 1e-4) {
        sc = 1.0 - t * t / 6.0;
        cc = 0.5 - t * t / 24.0;
    } else {
        sc = std::sin(t) / t;
        cc = (1.0 - std::cos(t)) / (t * t);
    }
    return b - sc * axb + cc * axaxb;
}

// e^{i s H} for Hermitian H.  The 2x2 case uses the closed-form Pauli
// decomposition; larger blocks go through a full eigendecomposition.
// Both paths give an exactly unitary result up to roundoff.
inline Eigen::MatrixXcd expi_hermitian(const Eigen::MatrixXcd& h, double s) {
    const int n = static_cast<int>(h.rows());
    if (n == 2) {
        const double a = 0.5 * (h(0, 0).real() + h(1, 1).real());
        const double bz = 0.5 * (h(0, 0).real() - h(1, 1).real());
        const double bx = h(0, 1).real();
        const double by = -h(0, 1).imag();
        const double r = std::sqrt(bx * bx + by * by + bz * bz);
        const double c = std::cos(s * r);
        const double sn = (r < 1e-300) ? s : std::sin(s * r) / r;
        const cxd phase = std::polar(1.0, s * a);
        Eigen::MatrixXcd u(2, 2);
        u(0, 0) = phase * cxd(c, sn * bz);
        u(1, 1) = phase * cxd(c, -sn * bz);
        u(0, 1) = phase * (cxd(0.0, sn) * cxd(bx, -by));
        u(1, 0) = phase * (cxd(0.0, sn) * cxd(bx, by));
        return u;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("expi_hermitian: eigendecomposition failed");
    Eigen::VectorXcd ph(n);
    for (int i = 0; i < n; ++i) ph(i) = std::polar(1.0, s * es.eigenvalues()(i));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace qbpack
