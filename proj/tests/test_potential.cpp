#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace nlsdist;
using testutil::make;

TEST_CASE("weighted tails add up to the total norm at every x")
{
    for (auto f : {PotentialFamily::gaussian_barrier, PotentialFamily::sech2_barrier, PotentialFamily::square_barrier}) {
        PotentialSpec p = make(f, 1.5, 1.0, {-20.0, 20.0, 2001});
        rvec V = sample_potential(p);
        WeightFunctions w = weight_functions(p.grid, V);
        for (int s = 0; s <= 4; ++s) {
            double total = w.plus[s].front();
            for (std::size_t i = 0; i < w.x.size(); ++i)
                CHECK(std::abs(w.plus[s][i] + w.minus[s][i] - total) <= 1e-10 * total);
        }
    }
}

TEST_CASE("norms are stable under grid doubling within the reported error")
{
    for (auto f : {PotentialFamily::gaussian_barrier, PotentialFamily::sech2_barrier}) {
        PotentialSpec a = make(f, 2.0, 1.0, {-30.0, 30.0, 1201});
        PotentialSpec b = a;
        b.grid.n = 2 * a.grid.n - 1;
        HypothesisReport ha = hypothesis_report(a, sample_potential(a));
        HypothesisReport hb = hypothesis_report(b, sample_potential(b));
        CHECK(std::abs(ha.l1_gamma.value - hb.l1_gamma.value) <= ha.l1_gamma.error);
        CHECK(std::abs(ha.w21.value - hb.w21.value) <= ha.w21.error);
        for (int s = 0; s <= 4; ++s)
            CHECK(std::abs(ha.moments.at(s).value - hb.moments.at(s).value) <= ha.moments.at(s).error);
    }
}

TEST_CASE("gamma-weighted norm matches adaptive quadrature")
{
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 2.0, 1.0, {-30.0, 30.0, 2001});
    HypothesisReport h = hypothesis_report(p, sample_potential(p));
    double g = p.gamma;
    // the Gaussian is below 1e-300 past |x| = 30
    double ref = 2.0 * oracles::integrate([&](double x) { return std::pow(1.0 + x * x, g / 2) * std::abs(p(x)); }, 0.0, 30.0);
    CHECK(std::abs(h.l1_gamma.value - ref) <= 1e-8 * ref);

    PotentialSpec s = make(PotentialFamily::sech2_barrier, 1.0, 1.0, {-40.0, 40.0, 4001});
    HypothesisReport hs = hypothesis_report(s, sample_potential(s));
    double ref1 = 2.0 * oracles::integrate(
                            [&](double x) { return std::sqrt(1.0 + x * x) * std::abs(s(x)); }, 0.0, 40.0) ;
    // tail beyond the grid is part of the estimate
    CHECK(std::abs(hs.moments.at(1).value - ref1) <= hs.moments.at(1).error + 1e-10);
}

TEST_CASE("square barrier is admitted but flagged outside W^{2,1}")
{
    PotentialSpec p = make(PotentialFamily::square_barrier, 1.0, 1.0, {-10.0, 10.0, 1001});
    HypothesisReport h = hypothesis_report(p, sample_potential(p));
    CHECK_FALSE(h.w21_finite);
    CHECK_FALSE(h.full_compliance());
    CHECK(h.positivity);
    CHECK(h.gamma_main);
}

TEST_CASE("negative potentials fail the positivity hypothesis")
{
    PotentialSpec p;
    p.family = PotentialFamily::custom_samples;
    p.grid = {-20.0, 20.0, 1001};
    for (std::size_t i = 0; i < p.grid.n; ++i) p.samples.push_back(-std::exp(-p.grid.at(i) * p.grid.at(i)));
    CHECK_THROWS_AS(make(PotentialFamily::gaussian_barrier, -1.0, 1.0, p.grid).validate(), Error);
    HypothesisReport h = hypothesis_report(p, sample_potential(p));
    CHECK_FALSE(h.positivity);
    CHECK_FALSE(h.full_compliance());
}

TEST_CASE("gamma thresholds are reported separately")
{
    PotentialSpec p = make(PotentialFamily::gaussian_barrier, 1.0, 1.0, {-20.0, 20.0, 1001});
    p.gamma = 5.0;
    HypothesisReport h = hypothesis_report(p, sample_potential(p));
    CHECK_FALSE(h.gamma_main);
    CHECK(h.gamma_lemcoeff);
    CHECK(h.gamma_isometry);
}

TEST_CASE("Simpson is exact for cubics on odd and even node counts")
{
    for (std::size_t n : {11u, 12u}) {
        UniformGrid g{0.0, 2.0, n};
        rvec f(n);
        for (std::size_t i = 0; i < n; ++i) {
            double x = g.at(i);
            f[i] = x * x * x - 2.0 * x + 1.0;
        }
        CHECK(simpson(f, g.step()) == doctest::Approx(4.0 - 4.0 + 2.0).epsilon(1e-13));
    }
}

TEST_CASE("custom samples interpolate linearly and vanish off the grid")
{
    PotentialSpec p;
    p.family = PotentialFamily::custom_samples;
    p.grid = {-8.0, 8.0, 17};
    p.samples.assign(17, 0.0);
    p.samples[8] = 2.0;
    p.validate();
    CHECK(p(0.5) == doctest::Approx(1.0));
    CHECK(p(9.5) == 0.0);
    p.samples = {0.0, 1.0};
    CHECK_THROWS_AS(p.validate(), Error);
}
