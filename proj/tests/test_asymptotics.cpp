#include "asymptotics.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace nlsdist;
using testutil::make;

namespace {

const ScatteringData& barrier_data()
{
    static ScatteringData sd = [] {
        PotentialSpec p = make(PotentialFamily::gaussian_barrier, 1.0, 1.0, {-20.0, 20.0, 1025});
        JostOptions jo;
        jo.store_stride = 0;
        return compute_TR(solve_m(p, p.grid, testutil::staggered(0.02, 4.0), JostSide::both, jo));
    }();
    return sd;
}

ProfileHistory synthetic(const rvec& times, const rvec& k, oracles::Rng& rng)
{
    ProfileHistory ph;
    ph.times = times;
    ph.k = k;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<Vec2> row(k.size());
        for (auto& z : row) z = {cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)), cplx(rng.uniform(-1, 1), rng.uniform(-1, 1))};
        ph.Z.push_back(row);
    }
    return ph;
}

} // namespace

TEST_CASE("oscillatory coefficient matches direct quadrature")
{
    OscillatoryParams p;
    for (double t : {30.0, 100.0}) {
        double X = std::pow(t, 2.0 * p.alpha - 2.0 * p.rho);
        rvec y{0.0, 0.05, 0.3, 1.0, 2.5, 4.0, 7.5};
        OscillatoryCoeffs oc = oscillatory_coeffs(t, y, p);
        for (std::size_t i = 0; i < y.size(); ++i) {
            cplx ref = oracles::oscillatory_c_direct(y[i], X, cutoff_phi);
            CHECK(std::abs(oc.c[i] - ref) < 1e-7);
        }
    }
}

TEST_CASE("h is odd in y")
{
    rvec y;
    for (int i = -800; i <= 800; ++i) y.push_back(0.0125 * i);
    OscillatoryCoeffs oc = oscillatory_coeffs(50.0, y);
    double odd = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) odd = std::max(odd, std::abs(oc.h[i] + oc.h[y.size() - 1 - i]));
    CHECK(odd < 1e-8);
}

TEST_CASE("b approaches its limits for large |y|")
{
    const double top = 1.0 / (2.0 * sqrt_2pi);
    OscillatoryCoeffs oc = oscillatory_coeffs(100.0, {-50.0, 50.0});
    CHECK(std::abs(oc.b[0]) < 0.15);
    CHECK(std::abs(oc.b[1] - top) < 0.15);
    double y = 50.0;
    OscillatoryCoeffs on = oscillatory_coeffs(-100.0, {-y, y});
    cplx e = std::exp(cplx(0.0, -2.0 * y * y));
    CHECK(std::abs(on.b[1] - (1.0 - e) / (4.0 * sqrt_2pi)) < 0.15);
    CHECK(std::abs(on.b[0] - (1.0 + e) / (4.0 * sqrt_2pi)) < 0.15);
}

TEST_CASE("table interpolation agrees with direct coefficients")
{
    OscillatoryTable table(20.0, 200.0, 12.0);
    for (double t : {20.0, 63.0, 200.0}) {
        rvec y{-11.0, -3.3, 0.0, 0.7, 5.0};
        OscillatoryCoeffs oc = oscillatory_coeffs(t, y);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(table.c(t, y[i]) - oc.c[i]) < 2e-3);
    }
    CHECK_THROWS_AS(table.c(300.0, 1.0), Error);
}

TEST_CASE("cutoff is even, flat near zero and compactly supported")
{
    for (double x = 0.0; x < 2.0; x += 0.01) CHECK(cutoff_phi(x) == cutoff_phi(-x));
    CHECK(cutoff_phi(1.2) == 1.0);
    CHECK(cutoff_phi(1.6) == 0.0);
    CHECK(cutoff_phi(1.4) > 0.0);
    CHECK(cutoff_phi(1.4) < 1.0);
}

TEST_CASE("log weights integrate linear functions exactly")
{
    for (auto [a, b] : {std::pair{0.0, 1.0}, {3.0, 7.5}, {100.0, 200.0}}) {
        auto [wa, wb] = log_weights(a, b);
        double ga = 0.7, gb = -1.3;
        double ref = oracles::integrate(
            [&](double s) { return (ga + (gb - ga) * (s - a) / (b - a)) / (1.0 + s); }, a, b);
        CHECK(std::abs(wa * ga + wb * gb - ref) < 1e-12);
    }
}

TEST_CASE("constant profile picks up the logarithmic phase")
{
    oracles::Rng rng(5);
    ProfileHistory ph = synthetic({0.0, 1.0, 10.0, 100.0}, {0.5}, rng);
    for (auto& row : ph.Z) row = ph.Z.front();
    double kappa = 0.5;
    ModifiedProfile mp = correct_plus(ph, kappa);
    for (std::size_t i = 0; i < ph.nt(); ++i)
        for (int c = 0; c < 2; ++c) {
            cplx z = ph.Z[i][0][c];
            cplx w = z * std::exp(I1 * (kappa * std::norm(z) * std::log1p(ph.times[i])));
            CHECK(std::abs(mp.W[i][0][c] - w) < 1e-13);
        }
}

TEST_CASE("plus and minus corrections preserve moduli and unitarity")
{
    oracles::Rng rng(9);
    rvec k = testutil::staggered(0.02, 3.0);
    ProfileHistory ph = synthetic({1.0, 2.0, 4.0, 8.0, 16.0}, k, rng);
    ModifiedProfile mp = correct_plus(ph);
    CHECK(mp.max_modulus_defect < 1e-14);

    ProfileHistory pm = synthetic({-1.0, -2.0, -4.0, -8.0, -16.0}, k, rng);
    ModifiedProfile mm = correct_minus(pm, barrier_data());
    CHECK(mm.max_unitarity_defect < 1e-10);
    for (std::size_t i = 0; i < pm.nt(); ++i)
        for (std::size_t j = 0; j < k.size(); ++j) {
            double a = std::hypot(std::abs(pm.Z[i][j][0]), std::abs(pm.Z[i][j][1]));
            double b = std::hypot(std::abs(mm.W[i][j][0]), std::abs(mm.W[i][j][1]));
            CHECK(std::abs(a - b) < 1e-12);
        }
}

TEST_CASE("intensity matrices are Hermitian and agree for a flat scattering matrix")
{
    oracles::Rng rng(21);
    ScatteringMatrix flat = scattering_matrix(ScatteringData::Coeffs{1.0, 0.0, 0.0});
    for (int n = 0; n < 50; ++n) {
        Vec2 Z{cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)), cplx(rng.uniform(-1, 1), rng.uniform(-1, 1))};
        Mat2 s0 = intensity_S0(Z, 0.5);
        Mat2 s1 = intensity_S1(Z, scattering_matrix(barrier_data(), 0.9), 0.5);
        CHECK((s0 - s0.adjoint()).max_abs() < 1e-14);
        CHECK((s1 - s1.adjoint()).max_abs() < 1e-12);
        CHECK((intensity_S1(Z, flat, 0.5) - s0).max_abs() < 1e-14);
        // below the moving threshold the regime is S0
        MinusOptions mo;
        double t = -100.0, kth = std::pow(100.0, -mo.rho);
        CHECK((intensity_S(Z, scattering_matrix(barrier_data(), 0.5 * kth), 0.5 * kth, t, mo) - s0).max_abs() == 0.0);
    }
}

TEST_CASE("physical asymptotics of a free Gaussian")
{
    // prefactor and stationary point checked against the exact free solution
    rvec k = testutil::staggered(0.005, 6.0);
    ScatteringData flat;
    flat.k = k;
    flat.T.assign(k.size(), 1.0);
    flat.R_plus.assign(k.size(), 0.0);
    flat.R_minus.assign(k.size(), 0.0);
    double s = 1.0, c = 1.0, k0 = 0.5;
    double err[2];
    int n = 0;
    for (double t : {100.0, 400.0}) {
        ProfileHistory ph;
        ph.times = {t};
        ph.k = k;
        std::vector<Vec2> row;
        for (double q : k) row.push_back({oracles::gaussian_fourier(q, s, c, k0), oracles::gaussian_fourier(-q, s, c, k0)});
        ph.Z.push_back(row);
        rvec x;
        for (double v = -4.0 * t; v <= 4.0 * t; v += t / 50.0) x.push_back(v);
        cvec pred = physical_asymptotics(ph, 0, flat, x);
        double e = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(pred[i] - oracles::free_gaussian(t, x[i], s, c, k0)));
        err[n++] = e;
    }
    CHECK(err[0] < 1e-3);
    CHECK(err[1] / err[0] < 0.2);
}

TEST_CASE("reduced ODE keeps the l2 norm of each pair")
{
    oracles::Rng rng(4);
    rvec k = testutil::staggered(0.05, 1.0);
    std::vector<Vec2> z0(k.size());
    for (auto& z : z0) z = {cplx(rng.uniform(-0.2, 0.2), 0.1), cplx(0.05, rng.uniform(-0.2, 0.2))};
    OscillatoryTable table(10.0, 40.0, std::sqrt(40.0) * 1.0 + 1.0);
    auto out = reduced_ode_evolve(z0, k, barrier_data(), table, 10.0, {20.0, 40.0});
    REQUIRE(out.size() == 2);
    for (std::size_t j = 0; j < k.size(); ++j) {
        double a = std::norm(z0[j][0]) + std::norm(z0[j][1]);
        double b = std::norm(out[1][j][0]) + std::norm(out[1][j][1]);
        CHECK(std::isfinite(b));
        CHECK(std::abs(a - b) < 0.05 * a);
    }
}

TEST_CASE("kappa conventions")
{
    CHECK(kappa_unitary == 0.5);
    CHECK(kappa_published() == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 * pi))));
}
