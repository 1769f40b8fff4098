#pragma once

// Tri-axial harmonic drive on top of the level splitting omega0:
//
//   H(t) = omega0*Jz + sum_i A_i cos(w_i t + ph_i) J_i,   i in {x,y,z}.
//
// Configs are Cartesian internally; spherical strengths (A, Theta, Phi)
// are accepted on input with A >= 0, Theta in [-pi/2, pi/2), Phi in [0, 2pi).

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qbpack/common.hpp"
#include "qbpack/spin_algebra.hpp"

namespace qbpack {

struct IncommensurateFrequencies : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DriveConfig {
    int n_units = 1;
    double omega0 = 1.0;
    double ax = 0.0, ay = 0.0, az = 0.0;
    double wx = 0.0, wy = 0.0, wz = 0.0;
    double phx = 0.0, phy = 0.0, phz = 0.0;
};

inline std::array<double, 3> spherical_to_cartesian(double a, double theta, double phi) {
    if (!(a >= 0.0)) throw std::invalid_argument("spherical strength must satisfy A >= 0");
    return {a * std::cos(theta) * std::cos(phi),
            a * std::cos(theta) * std::sin(phi),
            a * std::sin(theta)};
}

inline Eigen::MatrixXcd hamiltonian_at(const DriveConfig& c, const SpinOperators& ops, double t) {
    Eigen::MatrixXcd h = c.omega0 * ops.jz;
    if (c.ax != 0.0) h += c.ax * std::cos(c.wx * t + c.phx) * ops.jx;
    if (c.ay != 0.0) h += c.ay * std::cos(c.wy * t + c.phy) * ops.jy;
    if (c.az != 0.0) h += c.az * std::cos(c.wz * t + c.phz) * ops.jz;
    return h;
}

struct BaseFrequency {
    double omega = 0.0;
    std::array<int, 3> harmonics = {0, 0, 0};  // 0 for silent or static axes
};

// Largest omega with every active frequency an integer multiple of it.
// Candidate bases are w_min/d; d up to 64 covers every rational ratio with
// denominator <= 64, which is far beyond any drive scheme used here.
inline BaseFrequency common_base_frequency(const DriveConfig& c, double tol = 1e-9) {
    const std::array<double, 3> amp = {c.ax, c.ay, c.az};
    const std::array<double, 3> frq = {c.wx, c.wy, c.wz};

    double wmin = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int i = 0; i < 3; ++i) {
        if (amp[i] != 0.0 && frq[i] > 0.0) {
            any = true;
            wmin = std::min(wmin, frq[i]);
        }
    }
    if (!any)
        throw std::invalid_argument("common_base_frequency: no active axis with w > 0");

    for (int d = 1; d <= 64; ++d) {
        const double cand = wmin / d;
        BaseFrequency out;
        out.omega = cand;
        bool ok = true;
        for (int i = 0; i < 3; ++i) {
            if (amp[i] == 0.0 || frq[i] == 0.0) continue;
            const double r = frq[i] / cand;
            const int n = static_cast<int>(std::lround(r));
            if (n < 1 || std::abs(frq[i] - n * cand) > tol * frq[i]) {
                ok = false;
                break;
            }
            out.harmonics[i] = n;
        }
        if (ok) return out;
    }
    throw IncommensurateFrequencies(
        "drive frequencies share no common base with denominator <= 64 at tolerance " +
        format_sig(tol, 3));
}

struct FourierComponents {
    int n_units = 0;
    double base_frequency = 0.0;
    std::array<int, 3> harmonics = {0, 0, 0};
    int max_harmonic = 0;
    std::map<int, Eigen::MatrixXcd> blocks;  // n -> H_n, with H_{-n} = H_n^dagger
};

// H(t) = sum_n H_n e^{i n w t}.  A cos(n w t + ph) J contributes
// (A/2) e^{+i ph} J at +n and (A/2) e^{-i ph} J at -n; static terms join H_0.
// A config with no oscillating axis is periodic for any base; 2*omega0 keeps
// the one-unit quasienergies +-omega0/2 inside the zone without folding.
inline FourierComponents fourier_components(const DriveConfig& c, const SpinOperators& ops,
                                            double tol = 1e-9) {
    const bool oscillating = (c.ax != 0.0 && c.wx > 0.0) || (c.ay != 0.0 && c.wy > 0.0) ||
                             (c.az != 0.0 && c.wz > 0.0);
    const BaseFrequency base =
        oscillating ? common_base_frequency(c, tol) : BaseFrequency{2.0 * c.omega0, {0, 0, 0}};

    FourierComponents fc;
    fc.n_units = c.n_units;
    fc.base_frequency = base.omega;
    fc.harmonics = base.harmonics;

    fc.blocks[0] = c.omega0 * ops.jz;

    const std::array<double, 3> amp = {c.ax, c.ay, c.az};
    const std::array<double, 3> frq = {c.wx, c.wy, c.wz};
    const std::array<double, 3> pha = {c.phx, c.phy, c.phz};
    const std::array<const Eigen::MatrixXcd*, 3> gen = {&ops.jx, &ops.jy, &ops.jz};

    for (int i = 0; i < 3; ++i) {
        if (amp[i] == 0.0) continue;
        if (frq[i] == 0.0) {
            fc.blocks[0] += amp[i] * std::cos(pha[i]) * (*gen[i]);
            continue;
        }
        const int n = base.harmonics[i];
        const cxd half_pos = 0.5 * amp[i] * std::polar(1.0, pha[i]);
        const cxd half_neg = std::conj(half_pos);
        auto add = [&](int key, const cxd& coef) {
            auto it = fc.blocks.find(key);
            if (it == fc.blocks.end())
                fc.blocks.emplace(key, coef * (*gen[i]));
            else
                it->second += coef * (*gen[i]);
        };
        add(+n, half_pos);
        add(-n, half_neg);
        fc.max_harmonic = std::max(fc.max_harmonic, n);
    }
    return fc;
}

// ---- serialization ----------------------------------------------------

// Zero-strength axes carry no information; normalizing their frequency and
// phase to zero makes physically identical configs hash identically.
inline DriveConfig canonical(DriveConfig c) {
    if (c.ax == 0.0) { c.ax = 0.0; c.wx = 0.0; c.phx = 0.0; }
    if (c.ay == 0.0) { c.ay = 0.0; c.wy = 0.0; c.phy = 0.0; }
    if (c.az == 0.0) { c.az = 0.0; c.wz = 0.0; c.phz = 0.0; }
    return c;
}

inline nlohmann::json to_json(const DriveConfig& cfg) {
    const DriveConfig c = canonical(cfg);
    return nlohmann::json{
        {"n_units", c.n_units}, {"omega0", c.omega0},
        {"ax", c.ax}, {"ay", c.ay}, {"az", c.az},
        {"wx", c.wx}, {"wy", c.wy}, {"wz", c.wz},
        {"phx", c.phx}, {"phy", c.phy}, {"phz", c.phz}};
}

inline std::string config_hash(const DriveConfig& cfg) {
    const DriveConfig c = canonical(cfg);
    std::string s;
    s += std::to_string(c.n_units);
    for (double v : {c.omega0, c.ax, c.ay, c.az, c.wx, c.wy, c.wz, c.phx, c.phy, c.phz}) {
        s += ',';
        s += format_exact(v);
    }
    return to_hex(fnv1a(s));
}

inline double require_finite(const nlohmann::json& j, const char* key) {
    if (!j.at(key).is_number())
        throw std::invalid_argument(std::string("config field '") + key + "' must be a number");
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("config field '") + key + "' must be finite");
    return v;
}

inline DriveConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("drive config must be a JSON object");

    DriveConfig c;
    if (j.contains("n_units")) {
        if (!j.at("n_units").is_number_integer())
            throw std::invalid_argument("n_units must be an integer");
        c.n_units = j.at("n_units").get<int>();
    }
    if (c.n_units < 1) throw std::invalid_argument("n_units must be >= 1");
    if (j.contains("omega0")) c.omega0 = require_finite(j, "omega0");
    if (!(c.omega0 > 0.0)) throw std::invalid_argument("omega0 must be positive");

    const bool cart = j.contains("ax") || j.contains("ay") || j.contains("az");
    const bool sph = j.contains("a") || j.contains("theta") || j.contains("phi");
    if (cart && sph)
        throw std::invalid_argument("config mixes cartesian (ax,ay,az) and spherical (a,theta,phi) strengths");
    if (sph) {
        const double a = j.contains("a") ? require_finite(j, "a") : 0.0;
        const double theta = j.contains("theta") ? require_finite(j, "theta") : 0.0;
        const double phi = j.contains("phi") ? require_finite(j, "phi") : 0.0;
        if (a < 0.0) throw std::invalid_argument("spherical strength a must be >= 0");
        constexpr double half_pi = std::numbers::pi / 2.0;
        if (theta < -half_pi || theta >= half_pi)
            throw std::invalid_argument("theta must lie in [-pi/2, pi/2)");
        if (phi < 0.0 || phi >= 2.0 * std::numbers::pi)
            throw std::invalid_argument("phi must lie in [0, 2pi)");
        const auto xyz = spherical_to_cartesian(a, theta, phi);
        c.ax = xyz[0]; c.ay = xyz[1]; c.az = xyz[2];
    } else {
        if (j.contains("ax")) c.ax = require_finite(j, "ax");
        if (j.contains("ay")) c.ay = require_finite(j, "ay");
        if (j.contains("az")) c.az = require_finite(j, "az");
    }

    if (j.contains("wx")) c.wx = require_finite(j, "wx");
    if (j.contains("wy")) c.wy = require_finite(j, "wy");
    if (j.contains("wz")) c.wz = require_finite(j, "wz");
    if (c.wx < 0.0 || c.wy < 0.0 || c.wz < 0.0)
        throw std::invalid_argument("drive frequencies must be >= 0");
    if (j.contains("phx")) c.phx = require_finite(j, "phx");
    if (j.contains("phy")) c.phy = require_finite(j, "phy");
    if (j.contains("phz")) c.phz = require_finite(j, "phz");
    return c;
}

// Circularly polarized transverse drive resonant with the splitting; the
// workhorse configuration throughout.  Per-axis strength is sqrt(2)/2 * A.
inline DriveConfig h_system(double a_total, double w, double omega0 = 1.0, int n_units = 1,
                            double phase = 0.0) {
    DriveConfig c;
    c.n_units = n_units;
    c.omega0 = omega0;
    c.ax = c.ay = a_total * 0.5 * std::sqrt(2.0);
    c.wx = c.wy = w;
    c.phx = phase;
    c.phy = phase - std::numbers::pi / 2.0;  // sin(wt+phase) on Jy
    return c;
}

}  // namespace qbpack
