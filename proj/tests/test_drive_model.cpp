#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <qbpack/drive_model.hpp>

using namespace qbpack;
using Catch::Approx;
using nlohmann::json;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Direct evaluation of the Fourier sum at time t.
Eigen::MatrixXcd fourier_sum(const FourierComponents& fc, double t) {
    const int dim = fc.n_units + 1;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [n, block] : fc.blocks)
        h += block * std::polar(1.0, n * fc.base_frequency * t);
    return h;
}

}  // namespace

TEST_CASE("hamiltonian_at is Hermitian", "[drive]") {
    std::vector<DriveConfig> configs;
    configs.push_back(h_system(1.53, 0.81));
    {
        DriveConfig c;
        c.n_units = 3;
        c.ax = 0.7;
        c.wx = 1.0;
        c.phx = 0.4;
        c.az = 0.4;
        c.wz = 2.0;
        c.phz = 0.9;
        configs.push_back(c);
    }
    {
        DriveConfig c;  // no drive at all
        c.omega0 = 2.0;
        configs.push_back(c);
    }

    for (const auto& c : configs) {
        const SpinOperators ops = build_operators(c.n_units);
        for (double t : {0.0, 0.37, 2.9, 11.0}) {
            const Eigen::MatrixXcd h = hamiltonian_at(c, ops, t);
            CHECK(max_abs(h - h.adjoint()) < 1e-14);
        }
    }
}

TEST_CASE("spherical strengths keep their norm", "[drive]") {
    const double pi = std::numbers::pi;
    for (double a : {0.0, 0.3, 1.53}) {
        for (double theta : {-pi / 2, -0.7, 0.0, 0.4, 1.2}) {
            for (double phi : {0.0, 0.9, pi, 5.1}) {
                const auto v = spherical_to_cartesian(a, theta, phi);
                const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                CHECK(std::abs(norm - a) < 1e-14);
            }
        }
    }
    CHECK_THROWS_AS(spherical_to_cartesian(-0.1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("Fourier blocks rebuild the Hamiltonian", "[drive]") {
    std::vector<DriveConfig> configs;
    configs.push_back(h_system(1.53, 0.81));
    {
        DriveConfig c;  // single axis
        c.ax = 1.0;
        c.wx = 1.0;
        configs.push_back(c);
    }
    {
        DriveConfig c;  // two commensurate axes, one of them parallel
        c.ax = 0.7;
        c.wx = 1.0;
        c.az = 0.4;
        c.wz = 2.0;
        c.phz = 0.9;
        c.n_units = 2;
        configs.push_back(c);
    }
    {
        DriveConfig c;  // static tilt: az cos(phz) joins the level splitting
        c.ax = 1.0;
        c.wx = 1.0;
        c.az = 0.5;
        c.wz = 0.0;
        c.phz = 0.3;
        configs.push_back(c);
    }

    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> tdist(0.0, 20.0);

    for (const auto& c : configs) {
        const SpinOperators ops = build_operators(c.n_units);
        const FourierComponents fc = fourier_components(c, ops);

        for (int trial = 0; trial < 100; ++trial) {
            const double t = tdist(gen);
            REQUIRE(max_abs(fourier_sum(fc, t) - hamiltonian_at(c, ops, t)) < 1e-12);
        }

        // H_{-n} must be the adjoint of H_n for the sum to stay Hermitian.
        for (const auto& [n, block] : fc.blocks) {
            REQUIRE(fc.blocks.count(-n) == 1);
            CHECK(max_abs(fc.blocks.at(-n) - block.adjoint()) < 1e-15);
        }
    }
}

TEST_CASE("common base frequency of commensurate drives", "[drive]") {
    DriveConfig c;
    c.ax = c.ay = c.az = 1.0;
    c.wx = 1.0;
    c.wy = 1.0;
    c.wz = 2.0;
    BaseFrequency b = common_base_frequency(c);
    CHECK(b.omega == Approx(1.0).epsilon(1e-12));
    CHECK(b.harmonics == std::array<int, 3>{1, 1, 2});

    c.wy = 1.5;
    c.wz = 1.0;
    b = common_base_frequency(c);
    CHECK(b.omega == Approx(0.5).epsilon(1e-12));
    CHECK(b.harmonics == std::array<int, 3>{2, 3, 2});

    // Tolerance window: a 1e-12 relative offset still counts as commensurate.
    c.wy = 1.0 + 1e-12;
    c.wz = 1.0;
    b = common_base_frequency(c);
    CHECK(b.harmonics == std::array<int, 3>{1, 1, 1});

    DriveConfig single;
    single.ax = 1.0;
    single.wx = 0.81;
    b = common_base_frequency(single);
    CHECK(b.omega == Approx(0.81).epsilon(1e-12));
    CHECK(b.harmonics == std::array<int, 3>{1, 0, 0});

    DriveConfig bad;
    bad.ax = bad.ay = 1.0;
    bad.wx = 1.0;
    bad.wy = std::numbers::sqrt2;
    CHECK_THROWS_AS(common_base_frequency(bad), IncommensurateFrequencies);

    DriveConfig silent;  // amplitude zero means the axis is inactive
    silent.ax = 0.0;
    silent.wx = 3.0;
    CHECK_THROWS_AS(common_base_frequency(silent), std::invalid_argument);
}

TEST_CASE("static configs still get Fourier components", "[drive]") {
    DriveConfig c;
    c.omega0 = 1.3;
    const SpinOperators ops = build_operators(1);

    const FourierComponents fc = fourier_components(c, ops);
    CHECK(fc.base_frequency == Approx(2.6));
    CHECK(fc.blocks.size() == 1);
    CHECK(fc.max_harmonic == 0);
    CHECK(max_abs(fc.blocks.at(0) - 1.3 * ops.jz) < 1e-15);

    // A static tilt with no oscillating axis folds into the zero block too.
    DriveConfig tilt = c;
    tilt.az = 0.5;
    tilt.wz = 0.0;
    tilt.phz = 0.3;
    const FourierComponents ft = fourier_components(tilt, ops);
    CHECK(ft.blocks.size() == 1);
    const Eigen::MatrixXcd expect = (1.3 + 0.5 * std::cos(0.3)) * ops.jz;
    CHECK(max_abs(ft.blocks.at(0) - expect) < 1e-14);
}

TEST_CASE("canonical form and hashing ignore silent axes", "[drive]") {
    DriveConfig a = h_system(1.53, 0.81);
    DriveConfig b = a;
    b.wz = 5.0;   // meaningless: az = 0
    b.phz = 2.0;

    const DriveConfig cb = canonical(b);
    CHECK(cb.wz == 0.0);
    CHECK(cb.phz == 0.0);
    CHECK(config_hash(a) == config_hash(b));

    DriveConfig d = a;
    d.ax += 1e-9;
    CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("config JSON round trip", "[drive]") {
    const DriveConfig a = h_system(1.53, 0.81, 1.0, 4);
    const DriveConfig back = config_from_json(to_json(a));
    CHECK(config_hash(a) == config_hash(back));

    const json spherical{{"n_units", 1}, {"omega0", 1.0}, {"a", 1.53},
                         {"theta", 0.2},  {"phi", 1.0},    {"wx", 1.0},
                         {"wy", 1.0},     {"wz", 1.0}};
    const DriveConfig s = config_from_json(spherical);
    const auto v = spherical_to_cartesian(1.53, 0.2, 1.0);
    CHECK(s.ax == Approx(v[0]).margin(1e-15));
    CHECK(s.ay == Approx(v[1]).margin(1e-15));
    CHECK(s.az == Approx(v[2]).margin(1e-15));
}

TEST_CASE("config JSON validation rejects bad input", "[drive]") {
    const double pi = std::numbers::pi;
    CHECK_THROWS_AS(config_from_json(json::array()), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"n_units", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"n_units", 1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"omega0", -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"omega0", 0.0}}), std::invalid_argument);

    // Mixing the two strength conventions is ambiguous.
    CHECK_THROWS_AS(config_from_json(json{{"ax", 1.0}, {"a", 1.0}, {"theta", 0.0}, {"phi", 0.0}}),
                    std::invalid_argument);

    CHECK_THROWS_AS(config_from_json(json{{"a", -1.0}, {"theta", 0.0}, {"phi", 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"a", 1.0}, {"theta", pi / 2}, {"phi", 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"a", 1.0}, {"theta", 0.0}, {"phi", 2 * pi}}),
                    std::invalid_argument);

    CHECK_THROWS_AS(config_from_json(json{{"ax", 1.0}, {"wx", -0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"ax", std::numeric_limits<double>::infinity()}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"ax", "one"}}), std::invalid_argument);
}

TEST_CASE("transverse pair helper uses quarter-period lag", "[drive]") {
    const double A = 1.53, w = 0.81;
    const DriveConfig c = h_system(A, w);
    CHECK(c.ax == Approx(A * std::sqrt(0.5)).margin(1e-15));
    CHECK(c.ay == c.ax);
    CHECK(c.az == 0.0);

    const SpinOperators ops = build_operators(1);
    for (double t : {0.0, 0.7, 3.1}) {
        const Eigen::MatrixXcd h = hamiltonian_at(c, ops, t);
        const Eigen::MatrixXcd expect = ops.jz * c.omega0 +
                                        A * std::sqrt(0.5) * std::cos(w * t) * ops.jx +
                                        A * std::sqrt(0.5) * std::sin(w * t) * ops.jy;
        CHECK(max_abs(h - expect) < 1e-14);
    }
}
