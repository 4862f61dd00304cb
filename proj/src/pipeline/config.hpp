#pragma once

#include "asymptotics.hpp"
#include "distorted.hpp"
#include "dynamics.hpp"
#include "io.hpp"
#include "potential.hpp"

#include <cstdint>
#include <string>

namespace nlsdist {

struct ScatterSettings {
    double dk = 0.01;
    double k_max = 10.0;
    int derivative_order = 1;
    int romberg_levels = 3;
    bool write_jost = false;
    std::size_t jost_stride = 4; // x subsampling of the dumped field
};

struct DataSettings {
    double epsilon0 = 0.1;
    double sigma = 2.5;
    double center = 0.0;
};

struct SnapshotSettings {
    double t_min = 1.0;
    std::size_t per_decade = 10;
    rvec extra{25.0, 50.0, 100.0, 200.0};
};

struct AsymptoticSettings {
    double kappa = kappa_unitary;
    double alpha = 0.2;
    double rho = 0.019;
    double ode_dt = 0.05;
    rvec ode_seeds{25.0, 50.0};
    double t_min_asymptotic = 20.0;
    rvec residual_times{50.0, 100.0, 200.0};
    double residual_weight_exponent = 0.3;
    // remainder exponents from the analysis; recorded only
    double p0 = 0.01;
    double epsilon1_exponent = 2.0 / 3.0;
};

struct VerifySettings {
    double conservation_dt = 1e-3;
    double conservation_t_max = 50.0;
    double decay_t_lo = 5.0;
};

struct Config {
    PotentialSpec potential;
    ScatterSettings scatter;
    UniformGrid x_grid{-600.0, 600.0, 16384};
    BasisOptions basis;
    DataSettings data;
    RunConfig run;
    SnapshotSettings snapshots;
    AsymptoticSettings asymptotics;
    VerifySettings verify;
    std::uint64_t seed = 1;
    int threads = 0;
    bool strict = false;

    Config();
};

// missing keys keep their defaults; unknown keys are rejected
Config config_from_json(const json& j);
json config_to_json(const Config& c);
Config load_config(const std::string& path);

// canonical serialization hash (sorted keys, shortest round-trip numbers)
std::string config_hash(const Config& c);

json potential_to_json(const PotentialSpec& p);
PotentialSpec potential_from_json(const json& j);

// snapshot list implied by the settings (t = 0 included, sorted, unique, <= t_max)
rvec snapshot_times(const SnapshotSettings& s, double t_max);

cvec initial_data(const DataSettings& d, const UniformGrid& x);

} // namespace nlsdist
