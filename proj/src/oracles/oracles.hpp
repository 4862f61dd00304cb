#pragma once

// Independent reference computations used by the verification suite and tests.
// Nothing here shares code paths with the production solvers.

#include "common.hpp"
#include "potential.hpp"

#include <array>
#include <cstdint>
#include <functional>

namespace nlsdist::oracles {

// m_+(x, k) from m'' + 2ik m' = V m, integrated downward from x_max with m = 1, m' = 0
// (adaptive Dormand-Prince); breakpoints split the integration at jumps of V
cvec jost_plus_ode(const std::function<double(double)>& V, double x_max, const rvec& x_out, double k,
                   const rvec& breakpoints = {}, double tol = 1e-13);

// transmission and reflection for piecewise-constant V by transfer matrices;
// pieces are (x_left, x_right, value), contiguous and increasing
struct PlaneWaveResult {
    cplx T, R_minus; // incident from the left: e^{ikx} + R_- e^{-ikx} -> T e^{ikx}
};
PlaneWaveResult piecewise_constant_scattering(const std::vector<std::array<double, 3>>& pieces, double k);
double square_barrier_T2(double amplitude, double half_width, double k);

// free evolution i u_t = u_xx of u0 = exp(-(x-c)^2/(2 s^2)) e^{i k0 x}
cplx free_gaussian(double t, double x, double s, double c, double k0);
// its unitary Fourier transform (1/sqrt(2 pi)) int e^{-ikx} u0 dx
cplx gaussian_fourier(double k, double s, double c, double k0);

// int_a^b f by adaptive Gauss-Kronrod
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);
// int_0^inf f
double integrate_half_line(const std::function<double(double)>& f, double tol = 1e-12);

// c(t, y) = (1/sqrt(2 pi)) p.v. int e^{i(2xy + x^2)} phi(|x|/X) / (ix) dx by direct symmetrized quadrature
// on [0, 1.6 X]; phi is the cutoff supplied by the caller
cplx oscillatory_c_direct(double y, double X, const std::function<double(double)>& phi, std::size_t panels = 0);

// deterministic uniform doubles in [0, 1) from a 64-bit seed
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    double uniform();
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::uint64_t s_;
};

} // namespace nlsdist::oracles
