#pragma once

// Drive-parameter scans around the circular transverse baseline, and an
// exhaustive grid search for the fastest climb to a target saturation.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbpack/common.hpp"
#include "qbpack/drive_model.hpp"
#include "qbpack/propagator.hpp"

namespace qbpack {

enum class SweepFamily {
    phi_distribution,      // transverse strength split A cos(p) / A sin(p)
    theta_parallel,        // tilt p of the strength vector toward z
    phiz_scan,             // z-drive phase
    omegaz_scan,           // z-drive frequency
    perturb_wx,            // wx -> wx + p
    perturb_wy,            // wy -> wy + p
    perturb_wxy_opposite,  // wx -> wx + p, wy -> wy - p
    perturb_phx,           // phx -> phx + p
    perturb_phy,           // phy -> phy + p
    perturb_phxy_opposite, // phx -> phx + p, phy -> phy - p
};

inline const char* family_name(SweepFamily f) {
    switch (f) {
        case SweepFamily::phi_distribution: return "phi_distribution";
        case SweepFamily::theta_parallel: return "theta_parallel";
        case SweepFamily::phiz_scan: return "phiz_scan";
        case SweepFamily::omegaz_scan: return "omegaz_scan";
        case SweepFamily::perturb_wx: return "perturb_wx";
        case SweepFamily::perturb_wy: return "perturb_wy";
        case SweepFamily::perturb_wxy_opposite: return "perturb_wxy_opposite";
        case SweepFamily::perturb_phx: return "perturb_phx";
        case SweepFamily::perturb_phy: return "perturb_phy";
        case SweepFamily::perturb_phxy_opposite: return "perturb_phxy_opposite";
    }
    throw std::invalid_argument("unknown sweep family");
}

inline SweepFamily family_from_name(const std::string& s) {
    for (SweepFamily f :
         {SweepFamily::phi_distribution, SweepFamily::theta_parallel, SweepFamily::phiz_scan,
          SweepFamily::omegaz_scan, SweepFamily::perturb_wx, SweepFamily::perturb_wy,
          SweepFamily::perturb_wxy_opposite, SweepFamily::perturb_phx, SweepFamily::perturb_phy,
          SweepFamily::perturb_phxy_opposite})
        if (s == family_name(f)) return f;
    throw std::invalid_argument("unknown sweep family '" + s + "'");
}

// Instantiate one scan point.  For the perturbation families and
// theta_parallel, the neutral parameter p = 0 reproduces the base config
// bit for bit (adding 0.0 and scaling by cos(0) are identities), so a
// neutral sweep row shares the base trace exactly.  phi_distribution's
// neutral point pi/4 reproduces it only to rounding.
inline DriveConfig make_config(SweepFamily f, const DriveConfig& base, double p) {
    if (!std::isfinite(p)) throw std::domain_error("sweep parameter must be finite");
    DriveConfig c = base;
    constexpr double pi = std::numbers::pi;
    switch (f) {
        case SweepFamily::phi_distribution: {
            if (p < -pi / 4.0 - 1e-12 || p > 3.0 * pi / 4.0 + 1e-12)
                throw std::domain_error("phi_distribution parameter outside [-pi/4, 3pi/4]");
            const double a = std::hypot(base.ax, base.ay);
            c.ax = a * std::cos(p);
            c.ay = a * std::sin(p);
            c.az = 0.0;
            break;
        }
        case SweepFamily::theta_parallel: {
            if (p < -pi / 2.0 || p >= pi / 2.0)
                throw std::domain_error("theta_parallel parameter outside [-pi/2, pi/2)");
            const double a = std::hypot(base.ax, base.ay);
            c.ax = base.ax * std::cos(p);
            c.ay = base.ay * std::cos(p);
            c.az = a * std::sin(p);
            break;
        }
        case SweepFamily::phiz_scan: c.phz = p; break;
        case SweepFamily::omegaz_scan:
            if (p < 0.0) throw std::domain_error("omegaz_scan parameter must be >= 0");
            c.wz = p;
            break;
        case SweepFamily::perturb_wx: c.wx = base.wx + p; break;
        case SweepFamily::perturb_wy: c.wy = base.wy + p; break;
        case SweepFamily::perturb_wxy_opposite:
            c.wx = base.wx + p;
            c.wy = base.wy - p;
            break;
        case SweepFamily::perturb_phx: c.phx = base.phx + p; break;
        case SweepFamily::perturb_phy: c.phy = base.phy + p; break;
        case SweepFamily::perturb_phxy_opposite:
            c.phx = base.phx + p;
            c.phy = base.phy - p;
            break;
    }
    if (c.wx < 0.0 || c.wy < 0.0 || c.wz < 0.0)
        throw std::domain_error("sweep parameter drives a frequency negative");
    return c;
}

struct SweepSpec {
    SweepFamily family = SweepFamily::phi_distribution;
    DriveConfig base;
    std::vector<double> param_grid;
    std::vector<double> t_grid;
};

inline nlohmann::json to_json(const SweepSpec& s) {
    return nlohmann::json{{"family", family_name(s.family)},
                          {"base", to_json(s.base)},
                          {"param_grid", s.param_grid},
                          {"t_grid", s.t_grid}};
}

inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("sweep spec must be a JSON object");
    for (const char* k : {"family", "base", "param_grid", "t_grid"})
        if (!j.contains(k))
            throw std::invalid_argument(std::string("sweep spec missing field '") + k + "'");
    SweepSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    s.base = config_from_json(j.at("base"));
    s.param_grid = j.at("param_grid").get<std::vector<double>>();
    s.t_grid = j.at("t_grid").get<std::vector<double>>();
    if (s.param_grid.empty()) throw std::invalid_argument("sweep spec has an empty param_grid");
    if (s.t_grid.empty()) throw std::invalid_argument("sweep spec has an empty t_grid");
    for (double p : s.param_grid)
        if (!std::isfinite(p)) throw std::invalid_argument("param_grid contains a non-finite value");
    for (std::size_t i = 0; i < s.t_grid.size(); ++i) {
        if (!std::isfinite(s.t_grid[i]) || s.t_grid[i] < 0.0)
            throw std::invalid_argument("t_grid values must be finite and >= 0");
        if (i > 0 && s.t_grid[i] <= s.t_grid[i - 1])
            throw std::invalid_argument("t_grid must be strictly increasing");
    }
    return s;
}

struct SaturationMap {
    SweepSpec spec;
    std::vector<std::string> row_hashes;        // config hash per parameter row
    std::vector<std::vector<double>> values;    // values[i][j] = eta(param i, t j)
};

// Rows are evaluated and emitted in grid order; sampling picks the nearest
// integration step, which is at most dt/2 away from the requested time.
inline SaturationMap run_sweep(const SweepSpec& spec, double dt = 0.0) {
    SaturationMap map;
    map.spec = spec;
    const double t_final = spec.t_grid.back();
    for (double p : spec.param_grid) {
        const DriveConfig cfg = make_config(spec.family, spec.base, p);
        const SaturationTrace tr = evolve(cfg, t_final, dt);
        const double step = tr.times.size() > 1 ? tr.times[1] - tr.times[0] : 1.0;
        std::vector<double> row;
        row.reserve(spec.t_grid.size());
        for (double t : spec.t_grid) {
            auto idx = static_cast<std::size_t>(std::llround(t / step));
            if (idx >= tr.eta.size()) idx = tr.eta.size() - 1;
            row.push_back(tr.eta[idx]);
        }
        map.row_hashes.push_back(config_hash(cfg));
        map.values.push_back(std::move(row));
    }
    return map;
}

inline void write_csv(const SaturationMap& m, std::ostream& os) {
    os << "param,t,eta\n";
    for (std::size_t i = 0; i < m.spec.param_grid.size(); ++i)
        for (std::size_t j = 0; j < m.spec.t_grid.size(); ++j)
            os << format_sig(m.spec.param_grid[i]) << ',' << format_sig(m.spec.t_grid[j]) << ','
               << format_sig(m.values[i][j]) << '\n';
}

// First time the trace reaches the threshold, linearly interpolated between
// samples.  A 1e-9 detection slack keeps analytically full charging (eta
// touching 1 exactly) reachable despite the integrator's finite accuracy.
inline std::optional<double> time_to_threshold(const std::vector<double>& times,
                                               const std::vector<double>& eta, double threshold) {
    if (!(threshold > 0.0) || threshold > 1.0)
        throw std::domain_error("threshold must lie in (0, 1]");
    if (times.size() != eta.size() || times.empty())
        throw std::invalid_argument("time_to_threshold: malformed trace");
    const double detect = threshold - 1e-9;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if (eta[i] < detect) continue;
        if (i == 0) return times[0];
        const double de = eta[i] - eta[i - 1];
        double t = times[i];
        if (de > 0.0) {
            t = times[i - 1] + (threshold - eta[i - 1]) / de * (times[i] - times[i - 1]);
            t = std::clamp(t, times[i - 1], times[i]);
        }
        return t;
    }
    return std::nullopt;
}

struct FamilyGrid {
    SweepFamily family;
    std::vector<double> param_grid;
};

struct OptimizeResult {
    SweepFamily family;
    double p = 0.0;
    double time = 0.0;
};

inline nlohmann::json to_json(const OptimizeResult& r) {
    return nlohmann::json{{"family", family_name(r.family)}, {"p", r.p}, {"time", r.time}};
}

// Exhaustive search over every (family, parameter) pair for the earliest
// threshold crossing.  Ties go to the smaller |p|, then to the family
// listed first.
inline std::optional<OptimizeResult> grid_optimize(const DriveConfig& base,
                                                   const std::vector<FamilyGrid>& grids,
                                                   double threshold, double t_final,
                                                   double dt = 0.0) {
    std::optional<OptimizeResult> best;
    constexpr double tie = 1e-12;
    for (const auto& g : grids) {
        for (double p : g.param_grid) {
            const DriveConfig cfg = make_config(g.family, base, p);
            const SaturationTrace tr = evolve(cfg, t_final, dt);
            const auto t = time_to_threshold(tr.times, tr.eta, threshold);
            if (!t) continue;
            const bool wins = !best || *t < best->time - tie ||
                              (std::abs(*t - best->time) <= tie && std::abs(p) < std::abs(best->p));
            if (wins) best = OptimizeResult{g.family, p, *t};
        }
    }
    return best;
}

}  // namespace qbpack
