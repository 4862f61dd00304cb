#include "potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlsdist {

std::string family_name(PotentialFamily f)
{
    switch (f) {
    case PotentialFamily::gaussian_barrier: return "gaussian_barrier";
    case PotentialFamily::sech2_barrier: return "sech2_barrier";
    case PotentialFamily::square_barrier: return "square_barrier";
    case PotentialFamily::custom_samples: return "custom_samples";
    }
    return "unknown";
}

PotentialFamily family_from_name(const std::string& name)
{
    if (name == "gaussian_barrier") return PotentialFamily::gaussian_barrier;
    if (name == "sech2_barrier") return PotentialFamily::sech2_barrier;
    if (name == "square_barrier") return PotentialFamily::square_barrier;
    if (name == "custom_samples") return PotentialFamily::custom_samples;
    fail(ErrorKind::invalid_argument, "unknown potential family '" + name + "'");
}

double PotentialSpec::operator()(double x) const
{
    switch (family) {
    case PotentialFamily::gaussian_barrier: {
        double s = x / width;
        return amplitude * std::exp(-s * s);
    }
    case PotentialFamily::sech2_barrier: {
        double c = std::cosh(x / width);
        return amplitude / (c * c);
    }
    case PotentialFamily::square_barrier: {
        double ax = std::abs(x);
        double edge = 1e-12 * std::max(1.0, width);
        if (std::abs(ax - width) <= edge) return 0.5 * amplitude; // midpoint value at the jump
        return ax < width ? amplitude : 0.0;
    }
    case PotentialFamily::custom_samples: {
        if (samples.empty() || x < grid.x_min || x > grid.x_max) return 0.0;
        double h = grid.step();
        double s = (x - grid.x_min) / h;
        auto i = std::min<std::size_t>(std::size_t(s), grid.n - 2);
        double w = s - double(i);
        return (1.0 - w) * samples[i] + w * samples[i + 1];
    }
    }
    return 0.0;
}

bool PotentialSpec::is_zero() const
{
    if (family == PotentialFamily::custom_samples)
        return std::all_of(samples.begin(), samples.end(), [](double v) { return v == 0.0; });
    return amplitude == 0.0;
}

std::pair<double, double> PotentialSpec::support(double rel_tol) const
{
    if (is_zero()) return {0.0, 0.0};
    switch (family) {
    case PotentialFamily::gaussian_barrier: {
        double r = width * std::sqrt(std::log(1.0 / rel_tol));
        return {-r, r};
    }
    case PotentialFamily::sech2_barrier: {
        double r = 0.5 * width * std::log(4.0 / rel_tol);
        return {-r, r};
    }
    case PotentialFamily::square_barrier: return {-width, width};
    case PotentialFamily::custom_samples: {
        double vmax = 0.0;
        for (double v : samples) vmax = std::max(vmax, std::abs(v));
        std::size_t lo = 0, hi = samples.size() - 1;
        while (lo < hi && std::abs(samples[lo]) <= rel_tol * vmax) ++lo;
        while (hi > lo && std::abs(samples[hi]) <= rel_tol * vmax) --hi;
        return {grid.at(lo == 0 ? 0 : lo - 1), grid.at(std::min(hi + 1, grid.n - 1))};
    }
    }
    return {0.0, 0.0};
}

void PotentialSpec::validate() const
{
    require(grid.n >= 16, "potential grid needs n_x >= 16");
    require(grid.x_min < 0.0 && grid.x_max > 0.0, "potential grid must satisfy x_min < 0 < x_max");
    require(std::isfinite(gamma), "gamma must be finite");
    if (family == PotentialFamily::custom_samples) {
        require(samples.size() == grid.n, "custom_samples: sample count does not match grid n_x");
        for (double v : samples) require(std::isfinite(v), "custom_samples: NaN or infinite sample");
    } else {
        require(std::isfinite(amplitude) && amplitude >= 0.0,
                "catalog potentials need a finite amplitude >= 0");
        require(width > 0.0, "width must be positive");
    }
}

rvec sample_on(const PotentialSpec& spec, const UniformGrid& grid)
{
    if (spec.family == PotentialFamily::custom_samples && grid.n == spec.grid.n &&
        grid.x_min == spec.grid.x_min && grid.x_max == spec.grid.x_max)
        return spec.samples;
    rvec v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = spec(grid.at(i));
    return v;
}

rvec sample_potential(const PotentialSpec& spec)
{
    spec.validate();
    return sample_on(spec, spec.grid);
}

double simpson(const rvec& f, double h)
{
    std::size_t n = f.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (f[0] + f[1]);
    if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
    std::size_t end = n - 1; // number of intervals
    double tail = 0.0;
    if (end % 2 == 1) {
        // 3/8 rule on the last three intervals
        tail = 3.0 * h / 8.0 * (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1]);
        end -= 3;
    }
    double s = f[0] + f[end];
    for (std::size_t i = 1; i < end; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0 + tail;
}

NormEstimate simpson_richardson(const rvec& f, double h)
{
    NormEstimate e;
    e.value = simpson(f, h);
    if (f.size() < 9) {
        e.error = std::abs(e.value);
        return e;
    }
    // coarse pass on every other node; drop a trailing node so both cover the same interval
    std::size_t m = (f.size() - 1) / 2 * 2 + 1;
    rvec fine(f.begin(), f.begin() + long(m));
    rvec coarse;
    for (std::size_t i = 0; i < m; i += 2) coarse.push_back(f[i]);
    double sf = simpson(fine, h);
    double sc = simpson(coarse, 2.0 * h);
    e.error = std::abs(sf - sc) / 15.0 + std::abs(e.value - sf);
    // summation round-off floor
    double mag = 0.0;
    for (double v : f) mag += std::abs(v);
    e.error += double(f.size()) * std::numeric_limits<double>::epsilon() * mag * h;
    return e;
}

namespace {

// bound on int_X^inf <x>^s |V| for the catalog tails, NaN if unavailable
double tail_bound(const PotentialSpec& spec, double X, double s)
{
    double A = spec.amplitude;
    double w = spec.width;
    if (A == 0.0) return 0.0;
    X = std::max(X, 1.0);
    // <x>^s <= 2^{s/2} x^s for x >= 1
    double c = std::pow(2.0, 0.5 * s);
    switch (spec.family) {
    case PotentialFamily::square_barrier: return X >= w ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    case PotentialFamily::gaussian_barrier: {
        // x^s e^{-x^2/w^2} decays at least like exp(-(2X/w^2 - s/X)(x-X)) beyond X
        double rate = 2.0 * X / (w * w) - s / X;
        if (rate <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        return c * A * std::exp(s * std::log(X) - X * X / (w * w)) / rate;
    }
    case PotentialFamily::sech2_barrier: {
        double rate = 2.0 / w - s / X;
        if (rate <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        return c * 4.0 * A * std::exp(s * std::log(X) - 2.0 * X / w) / rate;
    }
    case PotentialFamily::custom_samples: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

NormEstimate weighted_norm(const PotentialSpec& spec, const rvec& V, double s)
{
    const auto& g = spec.grid;
    rvec f(V.size());
    for (std::size_t i = 0; i < V.size(); ++i) f[i] = std::pow(japanese(g.at(i)), s) * std::abs(V[i]);
    NormEstimate e = simpson_richardson(f, g.step());
    if (spec.is_zero()) return e;
    if (spec.family == PotentialFamily::custom_samples) {
        // samples end at the grid: no tail beyond it, but flag a non-vanishing edge
        double edge = std::max(f.front(), f.back());
        e.tail = edge > 1e-12 * std::max(e.value, 1e-300) ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    } else {
        double tl = tail_bound(spec, -g.x_min, s);
        double tr = tail_bound(spec, g.x_max, s);
        e.tail = tl + tr;
    }
    if (std::isfinite(e.tail)) e.error += e.tail;
    return e;
}

} // namespace

HypothesisReport hypothesis_report(const PotentialSpec& spec, const rvec& V)
{
    require(V.size() == spec.grid.n, "hypothesis_report: sample count does not match grid");
    HypothesisReport r;
    r.gamma = spec.gamma;
    const auto& g = spec.grid;
    double h = g.step();

    for (int s = 0; s <= 4; ++s) r.moments[s] = weighted_norm(spec, V, double(s));
    r.l1_gamma = weighted_norm(spec, V, spec.gamma);

    for (double v : V)
        if (v < 0.0) r.positivity = false;

    // W^{2,1}: analytic derivatives for smooth catalog entries, differences otherwise
    std::size_t n = V.size();
    rvec d1(n, 0.0), d2(n, 0.0);
    if (spec.family == PotentialFamily::gaussian_barrier) {
        double w2 = spec.width * spec.width;
        for (std::size_t i = 0; i < n; ++i) {
            double x = g.at(i);
            d1[i] = -2.0 * x / w2 * V[i];
            d2[i] = (4.0 * x * x / (w2 * w2) - 2.0 / w2) * V[i];
        }
    } else if (spec.family == PotentialFamily::sech2_barrier) {
        double w = spec.width;
        for (std::size_t i = 0; i < n; ++i) {
            double x = g.at(i);
            double sc = 1.0 / std::cosh(x / w), th = std::tanh(x / w);
            double s2 = sc * sc;
            d1[i] = -2.0 * spec.amplitude * s2 * th / w;
            d2[i] = 2.0 * spec.amplitude * s2 * (2.0 * th * th - s2) / (w * w);
        }
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            d1[i] = (V[i + 1] - V[i - 1]) / (2.0 * h);
            d2[i] = (V[i + 1] - 2.0 * V[i] + V[i - 1]) / (h * h);
        }
    }
    rvec f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::abs(V[i]) + std::abs(d1[i]) + std::abs(d2[i]);
    r.w21 = simpson_richardson(f, h);
    // |g| has a kink at each sign change of g; Richardson assumes smoothness there
    for (const rvec* c : {&V, static_cast<const rvec*>(&d1), static_cast<const rvec*>(&d2)})
        for (std::size_t i = 0; i + 1 < n; ++i)
            if ((*c)[i] * (*c)[i + 1] < 0.0) r.w21.error += h * std::max(std::abs((*c)[i]), std::abs((*c)[i + 1]));

    if (spec.family == PotentialFamily::square_barrier && spec.amplitude > 0.0) {
        r.w21_finite = false;
        r.violations.push_back("V is not in W^{2,1}: jump discontinuity at |x| = half_width");
    } else if (spec.family == PotentialFamily::custom_samples) {
        // a jump makes int|V''| grow like 1/h; compare with the half-resolution estimate
        rvec fc;
        for (std::size_t i = 2; i + 2 < n; i += 2) {
            double a = (V[i + 2] - V[i - 2]) / (4.0 * h);
            double b = (V[i + 2] - 2.0 * V[i] + V[i - 2]) / (4.0 * h * h);
            fc.push_back(std::abs(V[i]) + std::abs(a) + std::abs(b));
        }
        double coarse = simpson(fc, 2.0 * h);
        if (coarse > 0.0 && r.w21.value > 1.6 * coarse) {
            r.w21_finite = false;
            r.violations.push_back("W^{2,1} estimate grows under refinement (possible discontinuity)");
        }
    }

    r.gamma_main = spec.gamma > 6.0;
    r.gamma_lemcoeff = spec.gamma >= 4.0;
    r.gamma_isometry = spec.gamma >= 1.0;
    if (!r.gamma_main) r.violations.push_back("gamma <= 6: main decay hypothesis not met");
    if (!r.positivity) r.violations.push_back("V takes negative values: bound states not excluded");
    if (!std::isfinite(r.l1_gamma.tail))
        r.violations.push_back("weighted L1 norm: tail beyond the grid cannot be bounded");
    return r;
}

WeightFunctions weight_functions(const UniformGrid& grid, const rvec& V)
{
    require(V.size() == grid.n, "weight_functions: sample count does not match grid");
    WeightFunctions wf;
    wf.x = grid.points();
    std::size_t n = grid.n;
    double h = grid.step();
    for (int s = 0; s <= 4; ++s) {
        rvec f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::pow(japanese(wf.x[i]), s) * std::abs(V[i]);
        rvec& p = wf.plus[std::size_t(s)];
        rvec& m = wf.minus[std::size_t(s)];
        p.assign(n, 0.0);
        m.assign(n, 0.0);
        for (std::size_t i = n - 1; i-- > 0;) p[i] = p[i + 1] + 0.5 * h * (f[i] + f[i + 1]);
        for (std::size_t i = 1; i < n; ++i) m[i] = m[i - 1] + 0.5 * h * (f[i] + f[i - 1]);
    }
    return wf;
}

} // namespace nlsdist
