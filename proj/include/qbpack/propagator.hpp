#pragma once

// Direct integration of the driven pack.  Each step applies the midpoint
// exponential exp(-i H(t+dt/2) dt), which is unitary by construction and
// second-order accurate in dt.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbpack/common.hpp"
#include "qbpack/drive_model.hpp"
#include "qbpack/spin_algebra.hpp"

namespace qbpack {

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SaturationTrace {
    std::vector<double> times;
    std::vector<double> eta;
    std::vector<double> energy;
    std::string config_hash;
    bool renormalized = false;
};

// 200 steps per period of the fastest scale in the problem.
inline double default_time_step(const DriveConfig& c) {
    const double a_total = std::sqrt(c.ax * c.ax + c.ay * c.ay + c.az * c.az);
    const double wmax = std::max({c.omega0, c.wx, c.wy, c.wz, a_total});
    return (2.0 * std::numbers::pi / wmax) / 200.0;
}

namespace detail {

// Norm drift from matvec roundoff; renormalize only past this so traces
// record whether it ever happened.
constexpr double norm_drift_limit = 1e-10;

inline bool step_through(const DriveConfig& c, const SpinOperators& ops, Eigen::VectorXcd& psi,
                         double t0, long n_steps, double dt) {
    bool renormalized = false;
    for (long k = 0; k < n_steps; ++k) {
        const double tm = t0 + (k + 0.5) * dt;
        psi = expi_hermitian(hamiltonian_at(c, ops, tm), -dt) * psi;
        const double nrm = psi.norm();
        if (std::abs(nrm - 1.0) > norm_drift_limit) {
            psi /= nrm;
            renormalized = true;
        }
    }
    return renormalized;
}

}  // namespace detail

inline StateVector evolve_state(const DriveConfig& c, const StateVector& initial, double t_final,
                                double dt = 0.0) {
    if (initial.n_units != c.n_units)
        throw std::invalid_argument("evolve_state: initial state size does not match n_units");
    if (t_final < 0.0) throw std::invalid_argument("evolve_state: t_final must be >= 0");
    if (dt <= 0.0) dt = default_time_step(c);

    const SpinOperators ops = build_operators(c.n_units);
    StateVector st = initial;
    const long full = static_cast<long>(std::floor(t_final / dt + 1e-12));
    detail::step_through(c, ops, st.amplitudes, 0.0, full, dt);
    const double rest = t_final - full * dt;
    if (rest > 1e-15 * std::max(1.0, t_final))
        detail::step_through(c, ops, st.amplitudes, full * dt, 1, rest);
    return st;
}

struct EvolveOptions {
    // When set, the run is repeated with dt halved twice and the final eta
    // must agree within this tolerance, otherwise NonConvergence is thrown.
    std::optional<double> convergence_tol;
};

inline SaturationTrace evolve(const DriveConfig& c, double t_final, double dt = 0.0,
                              const EvolveOptions& opts = {}) {
    if (t_final < 0.0) throw std::invalid_argument("evolve: t_final must be >= 0");
    if (dt <= 0.0) dt = default_time_step(c);

    const SpinOperators ops = build_operators(c.n_units);
    const long n_steps = (t_final == 0.0)
                             ? 0
                             : static_cast<long>(std::ceil(t_final / dt - 1e-9));

    SaturationTrace tr;
    tr.config_hash = config_hash(c);
    tr.times.reserve(n_steps + 1);
    tr.eta.reserve(n_steps + 1);
    tr.energy.reserve(n_steps + 1);

    StateVector st = uncharged_state(c.n_units);
    auto record = [&](double t) {
        const double e = std::clamp(saturation(st), 0.0, 1.0);
        tr.times.push_back(t);
        tr.eta.push_back(e);
        tr.energy.push_back(c.n_units * c.omega0 * e);  // E = N w0 eta since eta(0) = 0
    };
    record(0.0);
    for (long k = 0; k < n_steps; ++k) {
        if (detail::step_through(c, ops, st.amplitudes, k * dt, 1, dt)) tr.renormalized = true;
        record((k + 1) * dt);
    }

    if (opts.convergence_tol) {
        // Reference run with dt halved twice; the final eta must not move.
        StateVector ref = uncharged_state(c.n_units);
        detail::step_through(c, ops, ref.amplitudes, 0.0, 4 * n_steps, dt / 4.0);
        const double shift = std::abs(tr.eta.back() - std::clamp(saturation(ref), 0.0, 1.0));
        if (shift > *opts.convergence_tol)
            throw NonConvergence("final eta moved by " + format_sig(shift, 3) +
                                 " after halving dt twice (tolerance " +
                                 format_sig(*opts.convergence_tol, 3) + ")");
    }
    return tr;
}

inline void write_csv(const SaturationTrace& tr, std::ostream& os) {
    os << "t,eta,energy\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        os << format_sig(tr.times[i]) << ',' << format_sig(tr.eta[i]) << ','
           << format_sig(tr.energy[i]) << '\n';
}

}  // namespace qbpack
