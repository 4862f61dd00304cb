#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>

namespace nlsdist::oracles {

namespace odeint = boost::numeric::odeint;

cvec jost_plus_ode(const std::function<double(double)>& V, double x_max, const rvec& x_out, double k,
                   const rvec& breakpoints, double tol)
{
    // state (m, m') as four reals
    using State = std::array<double, 4>;
    auto rhs = [&](const State& s, State& d, double x) {
        cplx m(s[0], s[1]), mp(s[2], s[3]);
        cplx mpp = V(x) * m - cplx(0.0, 2.0 * k) * mp;
        d = {mp.real(), mp.imag(), mpp.real(), mpp.imag()};
    };
    // stops in decreasing x: outputs, breakpoints
    std::vector<std::pair<double, long>> stops;
    for (std::size_t i = 0; i < x_out.size(); ++i) {
        require(x_out[i] <= x_max, "jost_plus_ode: output beyond x_max");
        stops.push_back({x_out[i], long(i)});
    }
    for (double b : breakpoints)
        if (b < x_max) stops.push_back({b, -1});
    std::sort(stops.begin(), stops.end(), [](auto& a, auto& b) { return a.first > b.first; });

    cvec out(x_out.size());
    State s{1.0, 0.0, 0.0, 0.0};
    double x = x_max;
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
    for (auto& [xs, id] : stops) {
        if (xs < x) {
            odeint::integrate_adaptive(stepper, rhs, s, x, xs, -1e-3);
            x = xs;
        }
        if (id >= 0) out[std::size_t(id)] = {s[0], s[1]};
    }
    return out;
}

namespace {

// (psi, psi') across a constant piece: entire in q^2 = k^2 - V, no division by q
std::array<cplx, 4> piece_matrix(double k, double v, double L)
{
    cplx q = std::sqrt(cplx(k * k - v, 0.0));
    cplx c = std::cos(q * L);
    cplx sinc = std::abs(q * L) < 1e-8 ? cplx(L) * (1.0 - q * q * L * L / 6.0) : std::sin(q * L) / q;
    return {c, sinc, -q * q * sinc, c};
}

} // namespace

PlaneWaveResult piecewise_constant_scattering(const std::vector<std::array<double, 3>>& pieces, double k)
{
    require(!pieces.empty() && k > 0.0, "piecewise_constant_scattering: need pieces and k > 0");
    double a = pieces.front()[0], b = pieces.back()[1];
    // start from the right with T = 1: psi = e^{ikx}
    const cplx ik(0.0, k);
    cplx p = std::exp(ik * b), dp = ik * p;
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
        double L = (*it)[1] - (*it)[0];
        auto m = piece_matrix(k, (*it)[2], -L); // backward across the piece
        cplx np = m[0] * p + m[1] * dp, ndp = m[2] * p + m[3] * dp;
        p = np;
        dp = ndp;
    }
    // on the left: psi = A e^{ikx} + B e^{-ikx}
    cplx A = 0.5 * (p + dp / ik) * std::exp(-ik * a);
    cplx B = 0.5 * (p - dp / ik) * std::exp(ik * a);
    return {1.0 / A, B / A};
}

double square_barrier_T2(double amplitude, double half_width, double k)
{
    return std::norm(piecewise_constant_scattering({{-half_width, half_width, amplitude}}, k).T);
}

cplx free_gaussian(double t, double x, double s, double c, double k0)
{
    // u^(k, t) = e^{i t k^2} u^(k, 0); Gaussian integral over k with a = s^2 - 2it
    cplx a(s * s, -2.0 * t);
    double z = x - c + 2.0 * t * k0;
    return std::sqrt(cplx(s * s) / a) * std::exp(-z * z / (2.0 * a) + cplx(0.0, k0 * x + t * k0 * k0));
}

cplx gaussian_fourier(double k, double s, double c, double k0)
{
    double d = k - k0;
    return s * std::exp(cplx(-0.5 * s * s * d * d, -d * c));
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol)
{
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol, &err);
}

double integrate_half_line(const std::function<double(double)>& f, double tol)
{
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate(f, tol);
}

cplx oscillatory_c_direct(double y, double X, const std::function<double(double)>& phi, std::size_t panels)
{
    // p.v. int_R e^{i(2xy+x^2)} g(x)/(ix) dx = int_0^inf e^{ix^2} 2 sin(2xy) phi / x dx for even g = phi
    double L = 1.6 * X;
    if (panels == 0) panels = std::size_t(std::ceil(L * (2.0 * std::abs(y) + 2.0 * L) * 4.0)) + 64;
    auto g = [&](double x) -> cplx {
        double s = x == 0.0 ? 2.0 * y : std::sin(2.0 * x * y) / x;
        return std::exp(cplx(0.0, x * x)) * (2.0 * s) * phi(x / X);
    };
    // composite Gauss-Legendre, 8 nodes per panel
    static const double xg[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
    static const double wg[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    double h = L / double(panels);
    cplx acc = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        double m = (double(p) + 0.5) * h;
        for (int i = 0; i < 4; ++i) {
            double d = 0.5 * h * xg[i];
            acc += wg[i] * (g(m - d) + g(m + d));
        }
    }
    return acc * (0.5 * h) / sqrt_2pi;
}

Rng::Rng(std::uint64_t seed) : s_(seed) {}

double Rng::uniform()
{
    // splitmix64
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return double(z >> 11) * 0x1.0p-53;
}

} // namespace nlsdist::oracles
