#pragma once

#include "common.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>

namespace nlsdist {

enum class PotentialFamily { gaussian_barrier, sech2_barrier, square_barrier, custom_samples };

std::string family_name(PotentialFamily f);
PotentialFamily family_from_name(const std::string& name);

struct PotentialSpec {
    PotentialFamily family = PotentialFamily::gaussian_barrier;
    double amplitude = 0.0;
    double width = 1.0; // half_width for the square barrier
    double gamma = 7.0;
    UniformGrid grid{-20.0, 20.0, 1025};
    rvec samples; // custom_samples only, one per grid node

    // pointwise value; custom samples are linearly interpolated, zero off-grid
    double operator()(double x) const;
    bool is_zero() const;
    bool has_closed_form() const { return family != PotentialFamily::custom_samples; }
    // smallest symmetric-ish interval outside which |V| < rel_tol * max|V|
    std::pair<double, double> support(double rel_tol = 1e-17) const;
    void validate() const;
};

rvec sample_potential(const PotentialSpec& spec);
rvec sample_on(const PotentialSpec& spec, const UniformGrid& grid);

struct NormEstimate {
    double value = 0.0;
    double error = 0.0;  // Richardson estimate plus tail bound
    double tail = 0.0;   // tail bound beyond the grid, NaN when unavailable
};

struct HypothesisReport {
    double gamma = 0.0;
    NormEstimate l1_gamma;                // int <x>^gamma |V|
    std::map<int, NormEstimate> moments;  // int <x>^s |V| for s = 0..4
    NormEstimate w21;                     // int |V| + |V'| + |V''|
    bool w21_finite = true;
    bool positivity = true;
    bool gamma_main = false;     // gamma > 6
    bool gamma_lemcoeff = false; // gamma >= 4
    bool gamma_isometry = false; // gamma >= 1
    std::vector<std::string> violations;

    bool full_compliance() const { return violations.empty(); }
};

HypothesisReport hypothesis_report(const PotentialSpec& spec, const rvec& V);

struct WeightFunctions {
    rvec x;
    std::array<rvec, 5> plus;  // int_x^inf <y>^s |V|
    std::array<rvec, 5> minus; // int_-inf^x <y>^s |V|
};

WeightFunctions weight_functions(const UniformGrid& grid, const rvec& V);

// composite Simpson on a uniform grid (3/8 rule on the last panel for even n)
double simpson(const rvec& f, double h);
NormEstimate simpson_richardson(const rvec& f, double h);

} // namespace nlsdist
