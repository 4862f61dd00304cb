#include "helpers.hpp"
#include "oracles.hpp"
#include "scattering.hpp"

#include <doctest.h>

using namespace nlsdist;
using testutil::make;

TEST_CASE("unitarity defect decreases under grid refinement")
{
    rvec k = testutil::staggered(0.25, 8.0);
    double prev = 1e300;
    for (std::size_t n : {61u, 121u, 241u}) {
        PotentialSpec p = make(PotentialFamily::gaussian_barrier, 2.0, 1.0, {-15.0, 15.0, n});
        JostOptions jo;
        jo.derivative_order = 0;
        jo.store_stride = 0;
        ScatteringData sd = compute_TR(solve_m(p, p.grid, k, JostSide::both, jo));
        double d = sd.max_unitarity_defect();
        MESSAGE("n = " << n << ": unitarity defect " << d);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("square barrier matches transfer matrices")
{
    double a = 1.0, L = 1.0;
    PotentialSpec p = make(PotentialFamily::square_barrier, a, L, {-5.0, 5.0, 1001});
    JostOptions jo;
    jo.derivative_order = 0;
    jo.store_stride = 0;
    rvec k{0.3, 0.7, 1.5, 4.0};
    ScatteringData sd = compute_TR(solve_m(p, p.grid, k, JostSide::both, jo));
    for (std::size_t j = 0; j < k.size(); ++j) {
        auto ref = oracles::piecewise_constant_scattering({{{-L, L, a}}}, k[j]);
        CHECK(std::abs(sd.T[j] - ref.T) < 1e-6);
        CHECK(std::abs(sd.R_minus[j] - ref.R_minus) < 1e-6);
        CHECK(std::abs(std::norm(sd.T[j]) - oracles::square_barrier_T2(a, L, k[j])) < 1e-6);
        // symmetric barrier: R_+ = R_-
        CHECK(std::abs(sd.R_plus[j] - sd.R_minus[j]) < 1e-8);
    }
}

TEST_CASE("asymmetric step pair matches transfer matrices")
{
    PotentialSpec p;
    p.family = PotentialFamily::custom_samples;
    p.grid = {-4.0, 4.0, 1601};
    for (std::size_t i = 0; i < p.grid.n; ++i) {
        double x = p.grid.at(i);
        p.samples.push_back(x >= -1.0 && x < 0.0 ? 2.0 : (x >= 0.0 && x <= 1.5 ? 0.5 : 0.0));
    }
    // trapezoid on samples: jumps resolved to O(h); compare loosely
    JostOptions jo;
    jo.derivative_order = 0;
    jo.store_stride = 0;
    ScatteringData sd = compute_TR(solve_m(p.samples, p.grid, {0.8, 2.0}, JostSide::both, jo));
    for (std::size_t j = 0; j < 2; ++j) {
        auto ref = oracles::piecewise_constant_scattering({{{-1.0, 0.0, 2.0}}, {{0.0, 1.5, 0.5}}}, sd.k[j]);
        CHECK(std::abs(sd.T[j] - ref.T) < 2e-2);
        CHECK(std::abs(sd.R_minus[j] - ref.R_minus) < 2e-2);
    }
}

TEST_CASE("negative k follows by conjugation")
{
    PotentialSpec p = make(PotentialFamily::sech2_barrier, 1.0, 1.0, {-20.0, 20.0, 1001});
    JostOptions jo;
    jo.store_stride = 0;
    ScatteringData sd = compute_TR(solve_m(p, p.grid, testutil::staggered(0.05, 3.0), JostSide::both, jo));
    for (double k : {0.4, 1.1, 2.7}) {
        auto a = sd.at(k), b = sd.at(-k);
        CHECK(std::abs(a.T - std::conj(b.T)) == 0.0);
        CHECK(std::abs(a.R_plus - std::conj(b.R_plus)) == 0.0);
    }
    // cross identity T conj(R_+) + R_- conj(T) = 0
    for (std::size_t j = 0; j < sd.size(); ++j)
        CHECK(std::abs(sd.T[j] * std::conj(sd.R_plus[j]) + sd.R_minus[j] * std::conj(sd.T[j])) < 1e-8);
}

TEST_CASE("f_+ is recovered from f_-")
{
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 2.0, 1.0, {-15.0, 15.0, 1501});
    rvec k{0.2, 1.0, 3.0};
    JostField m = solve_m(p, p.grid, k, JostSide::both);
    ScatteringData sd = compute_TR(m);
    double e = 0.0;
    for (std::size_t ik = 0; ik < k.size(); ++ik)
        for (std::size_t i = 0; i <= m.nx() / 2; ++i) {
            double x = m.x_grid.at(i);
            cplx fp = std::exp(I1 * (k[ik] * x)) * m.m_plus[m.idx(ik, i)];
            cplx fm = std::exp(-I1 * (k[ik] * x)) * m.m_minus[m.idx(ik, i)]; // f_-(x, k)
            cplx fm_neg = std::conj(fm);                                      // f_-(x, -k)
            e = std::max(e, std::abs(fp - (fm_neg + sd.R_minus[ik] * fm) / sd.T[ik]));
        }
    CHECK(e < 1e-6);
}

TEST_CASE("<k> |dT/dk| is finite and stable under refinement")
{
    rvec k = testutil::staggered(0.05, 10.0);
    double prev = -1.0;
    for (std::size_t n : {801u, 1601u}) {
        PotentialSpec p = make(PotentialFamily::gaussian_barrier, 2.0, 1.0, {-15.0, 15.0, n});
        JostOptions jo;
        jo.store_stride = 0;
        ScatteringData sd = compute_TR(solve_m(p, p.grid, k, JostSide::both, jo));
        double b = 0.0;
        for (std::size_t j = 0; j < sd.size(); ++j) b = std::max(b, japanese(k[j]) * std::abs(sd.dk_T[j]));
        CHECK(std::isfinite(b));
        if (prev > 0.0) CHECK(std::abs(b - prev) < 1e-4 * prev);
        prev = b;
    }
}

TEST_CASE("derivatives of T and R match finite differences")
{
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 1.0, 1.0, {-15.0, 15.0, 1501});
    double k = 1.3, h = 1e-4;
    JostOptions jo;
    jo.store_stride = 0;
    ScatteringData sd = compute_TR(solve_m(p, p.grid, {k - h, k, k + h}, JostSide::both, jo));
    CHECK(std::abs((sd.T[2] - sd.T[0]) / (2 * h) - sd.dk_T[1]) < 1e-7);
    CHECK(std::abs((sd.R_plus[2] - sd.R_plus[0]) / (2 * h) - sd.dk_R_plus[1]) < 1e-7);
    CHECK(std::abs((sd.R_minus[2] - sd.R_minus[0]) / (2 * h) - sd.dk_R_minus[1]) < 1e-7);
}

TEST_CASE("barriers are generic, the zero potential is not")
{
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 2.0, 1.0, {-20.0, 20.0, 2001});
    JostOptions jo;
    jo.store_stride = 0;
    JostField m = solve_m(p, p.grid, testutil::staggered(0.01, 0.05), JostSide::both, jo);
    GenericityReport g = genericity_report(m, compute_TR(m));
    CHECK(g.is_generic);
    CHECK(std::abs(g.integral_at_zero) > 0.1);

    PotentialSpec z = make(PotentialFamily::gaussian_barrier, 0.0, 1.0, p.grid);
    JostField mz = solve_m(z, z.grid, testutil::staggered(0.01, 0.05), JostSide::both, jo);
    GenericityReport gz = genericity_report(mz, compute_TR(mz));
    CHECK_FALSE(gz.is_generic);
    CHECK(std::abs(gz.T_at_k_min - 1.0) < 1e-12);
}

TEST_CASE("scattering matrix is unitary and inverts")
{
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 2.0, 1.0, {-15.0, 15.0, 1501});
    JostOptions jo;
    jo.store_stride = 0;
    ScatteringData sd = compute_TR(solve_m(p, p.grid, testutil::staggered(0.1, 4.0), JostSide::both, jo));
    // grid nodes, so no interpolation error enters
    for (double k : {-2.05, -0.35, 0.35, 2.05}) {
        ScatteringMatrix s = scattering_matrix(sd, k);
        CHECK((s.S * s.S_inv - Mat2::identity()).max_abs() < 1e-6);
        CHECK((s.S.adjoint() * s.S - Mat2::identity()).max_abs() < 1e-6);
    }
}
