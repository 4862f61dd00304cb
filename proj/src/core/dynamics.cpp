#include "dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace nlsdist {

std::string scheme_name(Scheme s)
{
    return s == Scheme::distorted_exact_linear ? "distorted_exact_linear" : "flat_strang";
}

Scheme scheme_from_name(const std::string& name)
{
    if (name == "distorted_exact_linear") return Scheme::distorted_exact_linear;
    if (name == "flat_strang") return Scheme::flat_strang;
    fail(ErrorKind::invalid_argument, "unknown scheme '" + name + "'");
}

rvec geometric_times(double t_min, double t_max, std::size_t per_decade)
{
    require(t_min > 0.0 && t_max > t_min && per_decade > 0, "geometric_times: need 0 < t_min < t_max");
    rvec t{0.0};
    double r = std::pow(10.0, 1.0 / double(per_decade));
    for (double s = t_min; s < t_max * (1.0 - 1e-9); s *= r) t.push_back(s);
    t.push_back(t_max);
    return t;
}

namespace {

const cplx I1(0.0, 1.0);

double sup_abs(const cvec& u)
{
    double m = 0.0;
    for (auto v : u) m = std::max(m, std::abs(v));
    return m;
}

// flat periodic wavenumbers in FFT order
rvec fft_wavenumbers(std::size_t n, double h)
{
    rvec k(n);
    double dk = 2.0 * pi / (double(n) * h);
    for (std::size_t m = 0; m < n; ++m) k[m] = dk * (m < (n + 1) / 2 ? double(m) : double(m) - double(n));
    return k;
}

} // namespace

double boundary_reach_fraction(const cvec& u0, const DistortedBasis& basis, double t_max)
{
    // group velocity 2k: content above k_reach leaves the grid before t_max
    const auto& g = basis.x_grid();
    double xm = 0.5 * (g.x_max - g.x_min);
    double k_reach = xm / (2.0 * t_max);
    DistortedSpectrum s = basis.forward(u0);
    double tot = 0.0, out = 0.0;
    for (std::size_t idx = 0; idx < s.values.size(); ++idx) {
        double a = std::norm(s.values[idx]);
        tot += a;
        if (std::abs(s.grid.at(idx)) > k_reach) out += a;
    }
    return tot > 0.0 ? std::sqrt(out / tot) : 0.0;
}

rvec absorber_profile(const UniformGrid& x, double width, double strength)
{
    require(width >= 0.0 && width < 1.0 && strength >= 0.0, "absorber: width must be in [0, 1) and strength >= 0");
    rvec sig(x.n, 0.0);
    if (width == 0.0 || strength == 0.0) return sig;
    double inner = interior_half_width(x, width);
    double outer = std::max(-x.x_min, x.x_max);
    for (std::size_t i = 0; i < x.n; ++i) {
        double d = std::abs(x.at(i)) - inner;
        if (d <= 0.0) continue;
        double s = std::min(1.0, d / (outer - inner));
        sig[i] = strength * s * s * s;
    }
    return sig;
}

double interior_half_width(const UniformGrid& x, double width)
{
    return (1.0 - width) * std::min(-x.x_min, x.x_max);
}

double retained_k_max(const UniformGrid& x, double absorber_width, double t_max)
{
    require(t_max > 0.0, "retained_k_max: t_max must be positive");
    return 0.8 * interior_half_width(x, absorber_width) / (2.0 * t_max);
}

void nonlinear_substep(cvec& u, double tau)
{
    for (auto& v : u) v *= nonlinear_phase(std::norm(v), tau);
}

Trajectory evolve(const cvec& u0, const RunConfig& cfg, const DistortedBasis& basis, const rvec& V)
{
    const auto& g = basis.x_grid();
    const std::size_t n = g.n;
    require(u0.size() == n && V.size() == n, "evolve: data and potential must be sampled on the basis grid");
    require(cfg.dt > 0.0 && cfg.t_max > 0.0, "evolve: dt and t_max must be positive");
    require(std::is_sorted(cfg.snapshot_times.begin(), cfg.snapshot_times.end()),
            "evolve: snapshot_times must be sorted");
    for (double t : cfg.snapshot_times)
        require(t >= 0.0 && t <= cfg.t_max * (1.0 + 1e-12), "evolve: snapshot time outside [0, t_max]");
    for (auto v : u0) require(std::isfinite(v.real()) && std::isfinite(v.imag()), "evolve: non-finite data");

    Trajectory tr;
    if (cfg.epsilon0 > 0.5) tr.warnings.push_back("epsilon0 above 0.5: small-data regime not guaranteed");
    double u0max = sup_abs(u0);
    if (u0max > 0.0) {
        double edge = 0.0;
        for (std::size_t i = 0; i < 8; ++i) edge = std::max({edge, std::abs(u0[i]), std::abs(u0[n - 1 - i])});
        if (edge > cfg.edge_tol * u0max) tr.warnings.push_back("initial data does not decay at the grid boundary");
        if (cfg.check_boundary_reach) {
            double frac = boundary_reach_fraction(u0, basis, cfg.t_max);
            if (cfg.absorber_width == 0.0 && frac > cfg.max_boundary_fraction)
                fail(ErrorKind::invalid_argument,
                     "evolve: domain too small for t_max, spectral fraction " + std::to_string(frac) +
                         " reaches the grid edge");
            if (frac > 1e-6)
                tr.warnings.push_back("spectral fraction " + std::to_string(frac) + " reaches the grid edge by t_max" +
                                      (cfg.absorber_width > 0.0 ? " (absorbed)" : ""));
        }
    }
    if (cfg.scheme == Scheme::distorted_exact_linear && !propagation_resolved(basis, cfg.t_max))
        tr.warnings.push_back("k spacing does not resolve exp(i t k^2) up to t_max (dk rule)");

    const std::size_t steps = std::size_t(std::llround(cfg.t_max / cfg.dt));
    const double dt = cfg.dt;
    std::vector<std::size_t> snap_steps;
    for (double t : cfg.snapshot_times) snap_steps.push_back(std::size_t(std::llround(t / dt)));

    const std::size_t M = basis.fft_size();
    cvec u = u0, spec(M);
    cvec lin_phase, flat_phase, pot_phase;
    rvec kflat;
    std::shared_ptr<FftPlan> flat_plan;
    if (cfg.scheme == Scheme::distorted_exact_linear) {
        lin_phase.resize(M);
        for (std::size_t idx = 0; idx < M; ++idx) {
            double k = basis.k_grid().at(idx);
            lin_phase[idx] = std::exp(I1 * (dt * k * k));
        }
    } else {
        flat_plan = std::make_shared<FftPlan>(n);
        kflat = fft_wavenumbers(n, g.step());
        flat_phase.resize(n);
        for (std::size_t m = 0; m < n; ++m) flat_phase[m] = std::exp(I1 * (dt * kflat[m] * kflat[m])) / double(n);
        pot_phase.resize(n);
        for (std::size_t i = 0; i < n; ++i) pot_phase[i] = std::exp(I1 * (0.5 * dt * V[i]));
    }

    rvec damp = absorber_profile(g, cfg.absorber_width, cfg.absorber_strength);
    bool absorbing = false;
    for (auto& d : damp) {
        absorbing = absorbing || d > 0.0;
        d = std::exp(-0.5 * dt * d);
    }

    // half step of the local flows: nonlinear e^{-i|u|^2 dt/2}, plus e^{iV dt/2} in the flat scheme
    auto half_step = [&](cvec& w) {
        for (std::size_t i = 0; i < n; ++i) {
            cplx f = absorbing ? damp[i] : 1.0;
            if (cfg.nonlinear) f *= nonlinear_phase(std::norm(w[i]), 0.5 * dt);
            if (!pot_phase.empty()) f *= pot_phase[i];
            w[i] *= f;
        }
    };

    FftwBuffer tmp(std::max(M, n));
    auto record = [&](std::size_t s) {
        tr.snapshots.push_back({double(s) * dt, u});
        if (cfg.keep_spectra && cfg.scheme == Scheme::distorted_exact_linear) {
            basis.forward(u.data(), spec.data());
            tr.spectra.push_back(spec);
        }
        double um = sup_abs(u);
        double edge = 0.0;
        for (std::size_t i = 0; i < 8; ++i) edge = std::max({edge, std::abs(u[i]), std::abs(u[n - 1 - i])});
        if (um > 0.0 && edge > cfg.edge_tol * um &&
            std::find(tr.warnings.begin(), tr.warnings.end(), "boundary contamination") == tr.warnings.end())
            tr.warnings.push_back("boundary contamination");
    };

    std::size_t next = 0;
    if (!cfg.nonlinear && cfg.scheme == Scheme::distorted_exact_linear) {
        // the linear flow is diagonal in k: jump straight to each snapshot
        DistortedSpectrum s0 = basis.forward(u0);
        for (std::size_t sstep : snap_steps) {
            double t = double(sstep) * dt;
            for (std::size_t idx = 0; idx < M; ++idx) {
                double k = basis.k_grid().at(idx);
                spec[idx] = s0.values[idx] * std::exp(I1 * (t * k * k));
            }
            basis.inverse(spec.data(), u.data());
            record(sstep);
        }
        tr.steps = steps;
        return tr;
    }
    while (next < snap_steps.size() && snap_steps[next] == 0) {
        record(0);
        ++next;
    }
    for (std::size_t s = 1; s <= steps; ++s) {
        half_step(u);
        if (cfg.scheme == Scheme::distorted_exact_linear) {
            basis.forward(u.data(), spec.data());
            for (std::size_t idx = 0; idx < M; ++idx) spec[idx] *= lin_phase[idx];
            basis.inverse(spec.data(), u.data());
        } else {
            flat_plan->forward(u.data(), tmp.ptr);
            for (std::size_t m = 0; m < n; ++m) tmp[m] *= flat_phase[m];
            flat_plan->backward(tmp.ptr, u.data());
        }
        half_step(u);
        if (s % 16 == 0 || s == steps) {
            double um = sup_abs(u);
            if (!std::isfinite(um))
                fail(ErrorKind::convergence, "evolve: non-finite field at t = " + std::to_string(double(s) * dt));
            if (u0max > 0.0 && um > cfg.blowup_factor * u0max)
                fail(ErrorKind::convergence, "evolve: blow-up guard triggered at t = " + std::to_string(double(s) * dt));
        }
        while (next < snap_steps.size() && snap_steps[next] == s) {
            record(s);
            ++next;
        }
    }
    tr.steps = steps;
    return tr;
}

Conserved conserved_quantities(const FieldState& s, const rvec& V, double h)
{
    std::size_t n = s.u.size();
    require(V.size() == n, "conserved_quantities: size mismatch");
    Conserved c;
    if (n == 0) return c;
    // spectral derivative on the periodic grid; the field vanishes at the edges
    FftPlan plan(n);
    FftwBuffer a(n), b(n);
    std::copy(s.u.begin(), s.u.end(), a.ptr);
    plan.forward(a.ptr, b.ptr);
    rvec k = fft_wavenumbers(n, h);
    if (n % 2 == 0) k[n / 2] = 0.0;
    for (std::size_t m = 0; m < n; ++m) b[m] *= I1 * k[m] / double(n);
    plan.backward(b.ptr, a.ptr);
    for (std::size_t i = 0; i < n; ++i) {
        double p = std::norm(s.u[i]);
        c.mass += h * p;
        c.kinetic += 0.5 * h * std::norm(a[i]);
        c.potential += 0.5 * h * V[i] * p;
        c.quartic += 0.25 * h * p * p;
    }
    c.hamiltonian = c.kinetic + c.potential - c.quartic;
    c.hamiltonian_alt = c.kinetic + c.potential + c.quartic;
    return c;
}

DecayFit decay_fit(const Trajectory& tr, const UniformGrid& x, double t_lo, double t_hi, double window_frac)
{
    double xc = 0.5 * (x.x_min + x.x_max);
    double half = window_frac * 0.5 * (x.x_max - x.x_min);
    rvec lt, lu;
    for (const auto& s : tr.snapshots) {
        if (s.t < t_lo * (1.0 - 1e-9) || s.t > t_hi * (1.0 + 1e-9) || s.t <= 0.0) continue;
        double m = 0.0;
        for (std::size_t i = 0; i < x.n; ++i)
            if (std::abs(x.at(i) - xc) <= half) m = std::max(m, std::abs(s.u[i]));
        if (m <= 0.0) continue;
        lt.push_back(std::log(s.t));
        lu.push_back(std::log(m));
    }
    require(lt.size() >= 8, "decay_fit: need at least 8 snapshots in the window");
    require(lt.back() - lt.front() >= std::log(10.0) - 1e-9, "decay_fit: window must span a decade in t");
    double n = double(lt.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        mx += lt[i];
        my += lu[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sxx += (lt[i] - mx) * (lt[i] - mx);
        sxy += (lt[i] - mx) * (lu[i] - my);
    }
    DecayFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.t_lo = std::exp(lt.front());
    f.t_hi = std::exp(lt.back());
    f.points = lt.size();
    return f;
}

} // namespace nlsdist
