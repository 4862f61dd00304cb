#include "asymptotics.hpp"
#include "dynamics.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace nlsdist;
using testutil::make;

namespace {

cvec gaussian(const UniformGrid& x, double amp, double s, double c = 0.0, double k0 = 0.0)
{
    cvec f(x.n);
    for (std::size_t i = 0; i < x.n; ++i) {
        double d = (x.at(i) - c) / s;
        f[i] = amp * std::exp(cplx(-0.5 * d * d, k0 * x.at(i)));
    }
    return f;
}

RunConfig short_run(double t_max, double dt)
{
    RunConfig r;
    r.t_max = t_max;
    r.dt = dt;
    r.absorber_width = 0.0;
    r.check_boundary_reach = false;
    r.snapshot_times = {0.0, t_max};
    return r;
}

} // namespace

TEST_CASE("nonlinear substep preserves every modulus")
{
    oracles::Rng rng(3);
    cvec u(200);
    for (auto& v : u) v = cplx(rng.uniform(-2, 2), rng.uniform(-2, 2));
    cvec w = u;
    nonlinear_substep(w, 0.37);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(std::abs(w[i]) - std::abs(u[i])) < 1e-15 * 4);
}

TEST_CASE("linear flow with V = 0 matches the exact Gaussian solution")
{
    UniformGrid x{-100.0, 100.0, 2048};
    PotentialSpec zero = make(PotentialFamily::gaussian_barrier, 0.0, 1.0, {-20.0, 20.0, 101});
    DistortedBasis b = make_basis(zero, x);
    RunConfig r = short_run(5.0, 0.01);
    r.nonlinear = false;
    r.snapshot_times = {1.0, 5.0};
    Trajectory tr = evolve(gaussian(x, 1.0, 1.0, 2.0, 1.0), r, b, rvec(x.n, 0.0));
    for (const auto& s : tr.snapshots) {
        double e = 0.0;
        for (std::size_t i = 0; i < x.n; ++i)
            e = std::max(e, std::abs(s.u[i] - oracles::free_gaussian(s.t, x.at(i), 1.0, 2.0, 1.0)));
        CHECK(e < 1e-9);
    }
}

TEST_CASE("split-step NLS conserves mass and energy")
{
    UniformGrid x{-60.0, 60.0, 1024};
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 1.0, 1.0, {-20.0, 20.0, 1025});
    DistortedBasis b = make_basis(p, x);
    rvec V = sample_on(p, x);
    cvec u0 = gaussian(x, 0.5, 2.0);
    double dH[2];
    int i = 0;
    for (double dt : {2e-3, 1e-3}) {
        Trajectory tr = evolve(u0, short_run(4.0, dt), b, V);
        Conserved a = conserved_quantities(tr.snapshots.front(), V, x.step());
        Conserved z = conserved_quantities(tr.snapshots.back(), V, x.step());
        CHECK(std::abs(z.mass - a.mass) < 1e-10 * a.mass);
        dH[i++] = std::abs(z.hamiltonian - a.hamiltonian);
    }
    CHECK(dH[1] < 1e-6);
    CHECK(dH[0] / dH[1] > 3.0);
}

TEST_CASE("distorted and flat Strang schemes agree")
{
    UniformGrid x{-60.0, 60.0, 1024};
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 1.0, 1.0, {-20.0, 20.0, 1025});
    DistortedBasis b = make_basis(p, x);
    rvec V = sample_on(p, x);
    cvec u0 = gaussian(x, 0.3, 2.0, -1.0, 0.5);
    RunConfig r = short_run(2.0, 5e-4);
    Trajectory a = evolve(u0, r, b, V);
    r.scheme = Scheme::flat_strang;
    Trajectory c = evolve(u0, r, b, V);
    CHECK(testutil::sup_diff(a.snapshots.back().u, c.snapshots.back().u) < 1e-5);
}

TEST_CASE("evolution is deterministic")
{
    UniformGrid x{-60.0, 60.0, 512};
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 1.0, 1.0, {-20.0, 20.0, 1025});
    DistortedBasis b = make_basis(p, x);
    rvec V = sample_on(p, x);
    Trajectory a = evolve(gaussian(x, 0.3, 2.0), short_run(1.0, 1e-2), b, V);
    Trajectory c = evolve(gaussian(x, 0.3, 2.0), short_run(1.0, 1e-2), b, V);
    CHECK(a.snapshots.back().u == c.snapshots.back().u);
}

TEST_CASE("time reversal conjugates the field")
{
    UniformGrid x{-60.0, 60.0, 512};
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 1.0, 1.0, {-20.0, 20.0, 1025});
    DistortedBasis b = make_basis(p, x);
    RunConfig r = short_run(1.0, 1e-2);
    r.snapshot_times = {0.0, 0.5, 1.0};
    Trajectory tr = evolve(gaussian(x, 0.3, 2.0, 0.0, 0.4), r, b, sample_on(p, x));
    Trajectory back = time_reversed(tr, b);
    REQUIRE(back.snapshots.size() == 3);
    CHECK(back.snapshots[1].t == -0.5);
    for (std::size_t i = 0; i < x.n; ++i) CHECK(back.snapshots[2].u[i] == std::conj(tr.snapshots[2].u[i]));
    // the reversed spectrum is the forward transform of the reversed field
    cvec s(b.fft_size());
    b.forward(back.snapshots[2].u.data(), s.data());
    CHECK(testutil::sup_diff(s, back.spectra[2]) < 1e-12);
}

TEST_CASE("invalid run settings are rejected")
{
    UniformGrid x{-60.0, 60.0, 256};
    DistortedBasis b = DistortedBasis::flat(x);
    RunConfig r = short_run(1.0, 0.0);
    CHECK_THROWS_AS(evolve(gaussian(x, 0.1, 2.0), r, b, rvec(x.n, 0.0)), Error);
    r = short_run(1.0, 0.01);
    r.snapshot_times = {0.5, 0.2};
    CHECK_THROWS_AS(evolve(gaussian(x, 0.1, 2.0), r, b, rvec(x.n, 0.0)), Error);
    r = short_run(1.0, 0.01);
    r.snapshot_times = {2.0};
    CHECK_THROWS_AS(evolve(gaussian(x, 0.1, 2.0), r, b, rvec(x.n, 0.0)), Error);
}

TEST_CASE("absorber is zero in the interior and smooth at its inner edge")
{
    UniformGrid x{-100.0, 100.0, 2001};
    rvec s = absorber_profile(x, 0.1, 1.5);
    double inner = interior_half_width(x, 0.1);
    CHECK(inner == doctest::Approx(90.0));
    for (std::size_t i = 0; i < x.n; ++i) {
        if (std::abs(x.at(i)) <= inner) CHECK(s[i] == 0.0);
        CHECK(s[i] >= 0.0);
        CHECK(s[i] <= 1.5);
    }
    CHECK(s.front() == doctest::Approx(1.5));
    CHECK(retained_k_max(x, 0.1, 100.0) == doctest::Approx(0.8 * 90.0 / 200.0));
}

TEST_CASE("geometric snapshot times")
{
    rvec t = geometric_times(1.0, 200.0, 10);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 200.0);
    CHECK(std::is_sorted(t.begin(), t.end()));
    CHECK(t[1] == 1.0);
}

TEST_CASE("decay fit recovers a known power law")
{
    UniformGrid x{-50.0, 50.0, 101};
    Trajectory tr;
    for (double t = 5.0; t <= 640.0; t *= 2.0) tr.snapshots.push_back({t, cvec(x.n, cplx(std::pow(t, -0.5), 0.0))});
    DecayFit f = decay_fit(tr, x, 5.0, 640.0);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.points == 8);
}
