#pragma once

// Frequency-space treatment of a time-periodic drive.  The Fourier blocks
// H_n of a commensurate drive assemble into the extended Hermitian matrix
//
//   (H_F)[r, c] = H_{r - c} + delta_{rc} (r w) I,   r, c in [-n_max, n_max],
//
// whose eigenpairs give quasienergies and Floquet modes.  Physical bands
// are the N+1 eigenpairs inside the first zone [-w/2, w/2) with dominant
// weight in the central Fourier blocks; everything else is either a zone
// replica or a truncation-edge artifact.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbpack/common.hpp"
#include "qbpack/drive_model.hpp"
#include "qbpack/spin_algebra.hpp"

namespace qbpack {

struct BandSelectionAmbiguous : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularModeMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WrongN : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Eigen::MatrixXcd build_floquet_hamiltonian(const FourierComponents& fc, int n_max) {
    if (n_max < fc.max_harmonic)
        throw std::invalid_argument("build_floquet_hamiltonian: n_max below the highest drive harmonic");
    const int dim = fc.n_units + 1;
    const int nb = 2 * n_max + 1;
    Eigen::MatrixXcd hf = Eigen::MatrixXcd::Zero(nb * dim, nb * dim);
    for (int r = -n_max; r <= n_max; ++r) {
        for (int c = -n_max; c <= n_max; ++c) {
            const auto it = fc.blocks.find(r - c);
            if (it == fc.blocks.end()) continue;
            hf.block((r + n_max) * dim, (c + n_max) * dim, dim, dim) = it->second;
        }
        const int off = (r + n_max) * dim;
        for (int i = 0; i < dim; ++i)
            hf(off + i, off + i) += r * fc.base_frequency;
    }
    return hf;
}

struct FloquetDecomposition {
    int n_units = 0;
    int n_max = 0;
    double base_frequency = 0.0;
    double period = 0.0;
    Eigen::VectorXd quasi_energies;           // ascending, inside [-w/2, w/2)
    Eigen::VectorXd central_weights;
    // modes[alpha] is dim x (2 n_max + 1); column n + n_max holds the
    // Fourier block Phi_alpha^n.
    std::vector<Eigen::MatrixXcd> modes;

    Eigen::VectorXcd mode_at_time(int alpha, double t) const {
        const auto& m = modes[alpha];
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(m.rows());
        for (int n = -n_max; n <= n_max; ++n)
            v += m.col(n + n_max) * std::polar(1.0, n * base_frequency * t);
        return v;
    }

    Eigen::VectorXcd summed_blocks(int alpha) const { return modes[alpha].rowwise().sum(); }
};

inline FloquetDecomposition decompose(const FourierComponents& fc, int n_max) {
    const int dim = fc.n_units + 1;
    const double w = fc.base_frequency;
    const Eigen::MatrixXcd hf = build_floquet_hamiltonian(fc, n_max);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hf);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("decompose: eigendecomposition failed");

    // Half-open zone with a 1e-12 shift so an eigenvalue sitting exactly on
    // +w/2 counts through its replica at -w/2 instead of appearing twice.
    const double zlo = -0.5 * w - 1e-12;
    const double zhi = 0.5 * w - 1e-12;
    const int half = n_max / 2;

    struct Cand {
        int idx;
        double eps;
        double weight;
    };
    std::vector<Cand> cands;
    const int total = static_cast<int>(hf.rows());
    for (int i = 0; i < total; ++i) {
        const double e = es.eigenvalues()(i);
        if (e < zlo || e >= zhi) continue;
        double cw = 0.0;
        for (int n = -half; n <= half; ++n)
            cw += es.eigenvectors().col(i).segment((n + n_max) * dim, dim).squaredNorm();
        cands.push_back({i, e, cw});
    }

    if (static_cast<int>(cands.size()) < dim)
        throw BandSelectionAmbiguous("only " + std::to_string(cands.size()) + " of " +
                                     std::to_string(dim) +
                                     " quasienergies found in the first zone; raise n_max");

    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.idx < b.idx;
    });
    if (static_cast<int>(cands.size()) > dim &&
        cands[dim - 1].weight - cands[dim].weight < 1e-6)
        throw BandSelectionAmbiguous(
            "central-weight gap between selected and rejected bands is below 1e-6; raise n_max");

    cands.resize(dim);
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.eps != b.eps) return a.eps < b.eps;
        return a.idx < b.idx;
    });

    FloquetDecomposition d;
    d.n_units = fc.n_units;
    d.n_max = n_max;
    d.base_frequency = w;
    d.period = 2.0 * std::numbers::pi / w;
    d.quasi_energies.resize(dim);
    d.central_weights.resize(dim);
    d.modes.reserve(dim);
    for (int a = 0; a < dim; ++a) {
        d.quasi_energies(a) = cands[a].eps;
        d.central_weights(a) = cands[a].weight;
        Eigen::VectorXcd full = es.eigenvectors().col(cands[a].idx);
        full /= full.norm();
        Eigen::MatrixXcd m(dim, 2 * n_max + 1);
        for (int n = -n_max; n <= n_max; ++n)
            m.col(n + n_max) = full.segment((n + n_max) * dim, dim);
        d.modes.push_back(std::move(m));
    }
    return d;
}

struct InitialCoefficients {
    Eigen::VectorXcd c;
    double condition = 0.0;
};

// Expansion coefficients of a state over the t = 0 Floquet modes, via the
// inverse of the matrix whose columns are the summed Fourier blocks.  With
// adequate truncation that matrix is near-unitary; a large condition number
// means the selected bands do not span the physical space.
inline InitialCoefficients initial_coefficients(const FloquetDecomposition& d,
                                                const StateVector& psi0) {
    if (psi0.n_units != d.n_units)
        throw std::invalid_argument("initial_coefficients: state size mismatch");
    const int dim = d.n_units + 1;
    Eigen::MatrixXcd m(dim, dim);
    for (int a = 0; a < dim; ++a) m.col(a) = d.summed_blocks(a);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw SingularModeMatrix("mode matrix condition number " +
                                 format_sig(smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity(), 3) +
                                 "; selected bands are not independent");
    InitialCoefficients out;
    out.condition = smax / smin;
    out.c = svd.solve(psi0.amplitudes);
    return out;
}

// State at time t rebuilt from the decomposition:
//   psi(t) = sum_alpha c_alpha e^{-i eps_alpha t} sum_n Phi_alpha^n e^{i n w t}.
inline Eigen::VectorXcd reconstruct_state(const FloquetDecomposition& d,
                                          const Eigen::VectorXcd& c, double t) {
    const int dim = d.n_units + 1;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    for (int a = 0; a < dim; ++a)
        psi += c(a) * std::polar(1.0, -d.quasi_energies(a) * t) * d.mode_at_time(a, t);
    return psi;
}

inline double eta_from_amplitudes(const Eigen::VectorXcd& psi, int n_units) {
    double acc = 0.0;
    for (int i = 0; i < psi.size(); ++i) acc += dicke_m(n_units, i) * std::norm(psi(i));
    return std::clamp(acc / n_units + 0.5, 0.0, 1.0);
}

inline std::vector<double> eta_floquet_trace(const FloquetDecomposition& d,
                                             const std::vector<double>& times) {
    const auto ic = initial_coefficients(d, uncharged_state(d.n_units));
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(eta_from_amplitudes(reconstruct_state(d, ic.c, t), d.n_units));
    return out;
}

inline double eta_floquet(const FloquetDecomposition& d, double t) {
    return eta_floquet_trace(d, {t})[0];
}

// Propagator U(t) = sum_alpha e^{-i eps_alpha t} |Phi_alpha(t)><Phi_alpha(0)|.
// Unitary up to truncation error since the t = 0 modes are near-orthonormal.
inline Eigen::MatrixXcd floquet_propagator(const FloquetDecomposition& d, double t) {
    const int dim = d.n_units + 1;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a)
        u += std::polar(1.0, -d.quasi_energies(a) * t) * d.mode_at_time(a, t) *
             d.summed_blocks(a).adjoint();
    return u;
}

// Literal four-index spectral sum for eta(t); algebraically identical to
// reconstruct_state but exponentially more expensive.  Kept as a debug
// cross-check on small systems.
inline double eta_floquet_literal(const FloquetDecomposition& d, double t) {
    const int dim = d.n_units + 1;
    const auto ic = initial_coefficients(d, uncharged_state(d.n_units));
    const SpinOperators ops = build_operators(d.n_units);
    cxd acc = 0.0;
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
            cxd inner = 0.0;
            for (int n = -d.n_max; n <= d.n_max; ++n) {
                for (int m = -d.n_max; m <= d.n_max; ++m) {
                    const cxd me =
                        d.modes[b].col(m + d.n_max).dot(ops.jz * d.modes[a].col(n + d.n_max));
                    inner += me * std::polar(1.0, (n - m) * d.base_frequency * t);
                }
            }
            acc += ic.c(a) * std::conj(ic.c(b)) *
                   std::polar(1.0, -(d.quasi_energies(a) - d.quasi_energies(b)) * t) * inner;
        }
    }
    return std::clamp(acc.real() / d.n_units + 0.5, 0.0, 1.0);
}

struct StroboscopicLaw {
    double period = 0.0;
    double delta_eps = 0.0;  // eps_2 - eps_1, in (0, w) for a split pair
    double c11 = 0.0, c22 = 0.0;
    double c12_abs = 0.0, c12_arg = 0.0;

    // eta(k T) = 2 |C12| cos(k dEps T - arg) + C11 + C22 + 1/2
    double eta_at(long k) const {
        return 2.0 * c12_abs * std::cos(k * delta_eps * period - c12_arg) + c11 + c22 + 0.5;
    }
};

// Single-unit stroboscopic charging law.  The two-band interference term
// collapses at t = k T into one cosine in k.
inline StroboscopicLaw stroboscopic_law(const FloquetDecomposition& d) {
    if (d.n_units != 1)
        throw WrongN("stroboscopic_law applies to a single unit (n_units == 1)");
    const auto ic = initial_coefficients(d, uncharged_state(1));
    const Eigen::VectorXcd s1 = d.summed_blocks(0), s2 = d.summed_blocks(1);
    Eigen::Matrix2cd jz;
    jz << 0.5, 0.0, 0.0, -0.5;

    const cxd g11 = s1.dot(jz * s1);
    const cxd g22 = s2.dot(jz * s2);
    const cxd g21 = s2.dot(jz * s1);  // <s2|Jz|s1>

    StroboscopicLaw law;
    law.period = d.period;
    law.delta_eps = d.quasi_energies(1) - d.quasi_energies(0);
    law.c11 = (ic.c(0) * std::conj(ic.c(0)) * g11).real();
    law.c22 = (ic.c(1) * std::conj(ic.c(1)) * g22).real();
    const cxd c12 = ic.c(0) * std::conj(ic.c(1)) * g21;  // pairs with e^{+i dEps k T}
    law.c12_abs = std::abs(c12);
    law.c12_arg = -std::arg(c12);
    return law;
}

inline double stroboscopic_eta(const FloquetDecomposition& d, long k) {
    return stroboscopic_law(d).eta_at(k);
}

inline void write_csv(const FloquetDecomposition& d, std::ostream& os) {
    os << "alpha,quasienergy,central_weight\n";
    for (int a = 0; a < d.quasi_energies.size(); ++a)
        os << a << ',' << format_sig(d.quasi_energies(a)) << ','
           << format_sig(d.central_weights(a)) << '\n';
}

}  // namespace qbpack
