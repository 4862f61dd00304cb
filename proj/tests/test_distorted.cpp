#include "distorted.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace nlsdist;
using testutil::make;

namespace {

const PotentialSpec& barrier()
{
    static PotentialSpec p = make(PotentialFamily::gaussian_barrier, 2.0, 1.0, {-20.0, 20.0, 1025});
    return p;
}

const DistortedBasis& basis40()
{
    static DistortedBasis b = make_basis(barrier(), {-40.0, 40.0, 1024});
    return b;
}

cvec packet(const UniformGrid& x, double c, double s, double k0)
{
    cvec f(x.n);
    for (std::size_t i = 0; i < x.n; ++i) {
        double d = (x.at(i) - c) / s;
        f[i] = std::exp(cplx(-0.5 * d * d, k0 * x.at(i)));
    }
    return f;
}

} // namespace

TEST_CASE("isometry on random smooth packets")
{
    const DistortedBasis& b = basis40();
    oracles::Rng rng(11);
    for (int n = 0; n < 20; ++n) {
        cvec f = packet(b.x_grid(), rng.uniform(-8, 8), rng.uniform(0.7, 2.5), rng.uniform(-3, 3));
        double nf = l2_norm(f, b.x_weight());
        DistortedSpectrum s = b.forward(f);
        CHECK(std::abs(l2_norm(s.values, b.k_weight()) - nf) / nf < 1e-6);
    }
}

TEST_CASE("fast transform equals the dense eigenfunction sum")
{
    const DistortedBasis& b = basis40();
    cvec f = packet(b.x_grid(), 1.0, 1.2, 0.7);
    DistortedSpectrum s = b.forward(f);
    std::size_t M = b.k_grid().size();
    for (std::size_t idx : {M / 2, M / 2 + 13, M / 2 - 40, M / 2 + 150, std::size_t(M / 2 - 201)}) {
        cplx dense = 0.0;
        for (std::size_t n = 0; n < b.x_grid().n; ++n) dense += std::conj(b.psi(n, idx)) * f[n];
        dense *= b.x_weight();
        CHECK(std::abs(dense - s.values[idx]) < 1e-10);
    }
}

TEST_CASE("eigenfunction splits into its three parts")
{
    const DistortedBasis& b = basis40();
    std::size_t M = b.k_grid().size();
    double e = 0.0;
    for (std::size_t n = b.window_begin(); n <= b.window_end(); n += 5)
        for (std::size_t idx = M / 2 - 300; idx < M / 2 + 300; idx += 37)
            e = std::max(e, std::abs(sqrt_2pi * b.psi(n, idx) - (b.psi_S(n, idx) + b.psi_L(n, idx) + b.psi_R(n, idx))));
    CHECK(e < 1e-12);
}

TEST_CASE("psi_R decays at the gamma rate")
{
    const DistortedBasis& b = basis40();
    double g = barrier().gamma;
    std::size_t M = b.k_grid().size();
    for (std::size_t idx : {M / 2 + 3, M / 2 + 100, M / 2 - 60}) {
        double inner = 0.0, outer = 0.0;
        for (std::size_t n = 0; n < b.x_grid().n; ++n) {
            double x = b.x_grid().at(n);
            double w = std::abs(b.psi_R(n, idx)) * std::pow(japanese(x), g - 1.0);
            (std::abs(x) < 10.0 ? inner : outer) = std::max(std::abs(x) < 10.0 ? inner : outer, w);
        }
        CHECK(std::isfinite(inner));
        CHECK(outer <= inner);
    }
}

TEST_CASE("kinetic energy identity ||k u~||^2 = <L u, u>")
{
    const DistortedBasis& b = basis40();
    rvec V = sample_on(barrier(), b.x_grid());
    double h = b.x_weight();
    for (double c : {-3.0, 0.0, 2.0}) {
        cvec f = packet(b.x_grid(), c, 1.5, 0.5);
        DistortedSpectrum s = b.forward(f);
        double lhs = 0.0;
        for (std::size_t idx = 0; idx < s.values.size(); ++idx)
            lhs += std::norm(s.grid.at(idx) * s.values[idx]) * b.k_weight();
        cvec Lf = apply_L(f, V, h);
        double rhs = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) rhs += (std::conj(f[i]) * Lf[i]).real() * h;
        CHECK(std::abs(lhs - rhs) < 1e-6 * rhs);
        // bound of the regularity-to-decay type
        double h1 = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) h1 += std::norm(f[i]) * h;
        double l1 = simpson(sample_potential(barrier()), barrier().grid.step());
        CHECK(std::sqrt(lhs) <= (1.0 + std::sqrt(l1)) * std::sqrt(rhs + h1));
    }
}

TEST_CASE("weighted bound ratio is finite and stable under refinement")
{
    auto ratio = [](std::size_t n, double c, double s) {
        DistortedBasis b = make_basis(barrier(), {-40.0, 40.0, n});
        cvec f = packet(b.x_grid(), c, s, 0.0);
        DistortedSpectrum sp = b.forward(f);
        double dk = b.k_weight(), num = 0.0, den = 0.0;
        for (std::size_t i = 1; i + 1 < sp.values.size(); ++i)
            num += std::norm((sp.values[i + 1] - sp.values[i - 1]) / (2.0 * dk)) * dk;
        for (std::size_t i = 0; i < f.size(); ++i) den += std::norm(japanese(b.x_grid().at(i)) * f[i]) * b.x_weight();
        return std::sqrt(num / den);
    };
    for (auto [c, s] : {std::pair{0.0, 1.0}, {4.0, 0.8}, {-6.0, 2.0}}) {
        double a = ratio(1024, c, s), r = ratio(2048, c, s);
        CHECK(std::isfinite(a));
        CHECK(a < 10.0);
        CHECK(std::abs(a - r) < 0.01 * a);
    }
}

TEST_CASE("flat basis reproduces the Fourier transform of a Gaussian")
{
    UniformGrid x{-40.0, 40.0, 2048};
    DistortedBasis b = DistortedBasis::flat(x);
    cvec f = packet(x, 1.5, 1.0, -2.0);
    DistortedSpectrum s = b.forward(f);
    double e = 0.0;
    for (std::size_t idx = 0; idx < s.values.size(); ++idx)
        e = std::max(e, std::abs(s.values[idx] - oracles::gaussian_fourier(s.grid.at(idx), 1.0, 1.5, -2.0)));
    CHECK(e < 1e-10);
}

TEST_CASE("linear propagation is reversible")
{
    const DistortedBasis& b = basis40();
    DistortedSpectrum s = b.forward(packet(b.x_grid(), 0.0, 1.0, 1.0));
    DistortedSpectrum back = linear_propagate(linear_propagate(s, 0.37), -0.37);
    CHECK(testutil::sup_diff(back.values, s.values) < 1e-12);
    DistortedSpectrum p = linear_propagate(s, 3.0);
    for (std::size_t i = 0; i < s.values.size(); ++i)
        CHECK(std::abs(std::abs(p.values[i]) - std::abs(s.values[i])) <= 1e-15 * (1.0 + std::abs(s.values[i])));
}

TEST_CASE("diagonalization residual converges at fourth order")
{
    rvec res;
    for (std::size_t n : {500u, 1000u}) {
        UniformGrid x{-50.0, 50.0, n + 1};
        DistortedBasis b = make_basis(barrier(), x);
        cvec f(x.n);
        for (std::size_t i = 0; i < x.n; ++i) f[i] = x.at(i) * std::exp(-x.at(i) * x.at(i));
        res.push_back(diagonalization_residual(f, b, sample_on(barrier(), x)));
    }
    CHECK(std::log2(res[0] / res[1]) > 3.5);
}

TEST_CASE("smooth partition of unity")
{
    for (double x = -3.0; x <= 3.0; x += 0.01) {
        CHECK(chi_plus(x) + chi_minus(x) == doctest::Approx(1.0));
        CHECK(chi_plus(x) >= 0.0);
        CHECK(chi_plus(x) <= 1.0);
    }
    CHECK(chi_plus(-2.0) == 0.0);
    CHECK(chi_plus(2.0) == 1.0);
    CHECK(std::abs(chi_plus(0.3) + chi_plus(-0.3) - 1.0) < 1e-14);
}

TEST_CASE("fft size honours the oversampling factor")
{
    for (std::size_t n : {1000u, 1024u, 16384u}) {
        std::size_t M = fft_size_for(n, 1.25);
        CHECK(M % 2 == 0);
        CHECK(double(M) >= 1.25 * double(n) - 1.0);
    }
}
