#pragma once

#include "common.hpp"
#include "distorted.hpp"

#include <string>

namespace nlsdist {

enum class Scheme { distorted_exact_linear, flat_strang };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct RunConfig {
    double dt = 5e-3;
    double t_max = 200.0;
    Scheme scheme = Scheme::distorted_exact_linear;
    double epsilon0 = 0.1;
    rvec snapshot_times;
    bool nonlinear = true;
    double blowup_factor = 10.0;
    double edge_tol = 1e-8;
    bool check_boundary_reach = true;
    double max_boundary_fraction = 0.1; // error above, warning above 1e-6
    bool keep_spectra = true; // store distorted spectra at snapshots (distorted scheme)
    // smooth damping on the outer fraction of each half-line; 0 disables
    double absorber_width = 0.1;
    double absorber_strength = 1.5;
};

// damping rate sigma(x) >= 0 of the edge absorber on grid x (zero when disabled)
rvec absorber_profile(const UniformGrid& x, double width, double strength);
// interior half-width not touched by the absorber
double interior_half_width(const UniformGrid& x, double width);
// largest |k| whose content stays well inside the interior up to t_max (group velocity 2k, 20% margin)
double retained_k_max(const UniformGrid& x, double absorber_width, double t_max);

// e^{-i |u|^2 tau}: the local nonlinear flow over time tau
inline cplx nonlinear_phase(double abs2, double tau)
{
    return {std::cos(abs2 * tau), -std::sin(abs2 * tau)};
}
void nonlinear_substep(cvec& u, double tau);

struct FieldState {
    double t = 0.0;
    cvec u;
};

struct Trajectory {
    std::vector<FieldState> snapshots;
    std::vector<cvec> spectra; // u~ (not the profile) at each snapshot, when kept
    std::vector<std::string> warnings;
    std::size_t steps = 0;
};

// geometric snapshot times t_min * r^i plus t = 0, ending exactly at t_max
rvec geometric_times(double t_min, double t_max, std::size_t per_decade);

// L2 fraction of u~0 fast enough (|k| > x_max / 2 t_max) to reach the grid edge
double boundary_reach_fraction(const cvec& u0, const DistortedBasis& basis, double t_max);

Trajectory evolve(const cvec& u0, const RunConfig& cfg, const DistortedBasis& basis, const rvec& V);

struct Conserved {
    double mass = 0.0;
    double hamiltonian = 0.0;     // 1/2 int |u'|^2 + 1/2 int V|u|^2 - 1/4 int |u|^4
    double hamiltonian_alt = 0.0; // same with + 1/4 int |u|^4
    double kinetic = 0.0, potential = 0.0, quartic = 0.0;
};

Conserved conserved_quantities(const FieldState& s, const rvec& V, double h);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    std::size_t points = 0;
};

// least squares of log ||u||_inf on |x| <= window_frac * x_max against log t
DecayFit decay_fit(const Trajectory& tr, const UniformGrid& x, double t_lo, double t_hi, double window_frac = 0.5);

} // namespace nlsdist
