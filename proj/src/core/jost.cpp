#include "jost.hpp"

#include <algorithm>
#include <cmath>

namespace nlsdist {

cplx kernel_d(double k, double x, int p)
{
    const cplx I(0.0, 1.0);
    double theta = 2.0 * k * x;
    if (std::abs(theta) <= 0.5) {
        // (2i)^p x^{p+1} sum_n (i theta)^n / (n! (n+p+1))
        cplx term(1.0, 0.0), sum(0.0, 0.0);
        for (int n = 0; n < 30; ++n) {
            cplx add = term / double(n + p + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
            term *= I * theta / double(n + 1);
        }
        cplx pref = std::pow(2.0 * I, p) * std::pow(x, p + 1);
        return pref * sum;
    }
    cplx E = std::exp(I * theta);
    switch (p) {
    case 0: return (E - 1.0) / (2.0 * I * k);
    case 1: return x * E / k - (E - 1.0) / (2.0 * I * k * k);
    default: return 2.0 * I * x * x * E / k - 2.0 * x * E / (k * k) + (E - 1.0) / (I * k * k * k);
    }
}

namespace {

struct LevelResult {
    cvec m, dm, d2m; // stored nodes only
    cplx I0, I1, dI0, dI1;
};

// One backward trapezoid pass for m_+ on nodes x_i = x0 + i h, i = 0..n-1.
// With prev == nullptr the pass is self-consistent (explicit, since D(0) = 0);
// otherwise the forcing uses the previous iterate (Picard step).
template <int order>
void plus_pass_t(const double* V, std::size_t n, double h, double x0, double k, const LevelResult* prev_full,
                 LevelResult& full)
{
    const cplx I(0.0, 1.0);
    const cplx E = std::exp(2.0 * I * k * h);
    const cplx E1 = 2.0 * I * h * E;
    const cplx E2 = (2.0 * I * h) * (2.0 * I * h) * E;
    const cplx D0 = kernel_d(k, h, 0);
    const cplx D1 = order >= 1 ? kernel_d(k, h, 1) : cplx{};
    const cplx D2 = order >= 2 ? kernel_d(k, h, 2) : cplx{};

    full.m.assign(n, cplx{});
    if (order >= 1) full.dm.assign(n, cplx{});
    if (order >= 2) full.d2m.assign(n, cplx{});

    const std::size_t N = n - 1;
    // forcing at the right end: m = 1, derivatives 0
    auto forcing = [&](std::size_t i, cplx& g0, cplx& g1, cplx& g2) {
        const LevelResult& src = prev_full ? *prev_full : full;
        g0 = V[i] * src.m[i];
        if constexpr (order >= 1) g1 = V[i] * src.dm[i];
        if constexpr (order >= 2) g2 = V[i] * src.d2m[i];
    };
    full.m[N] = 1.0;
    cplx gN0, gN1, gN2;
    forcing(N, gN0, gN1, gN2);

    // running sums over i > j: P = sum g, a{p}[g] = sum D^{(p)}((i-j)h) g_i
    cplx P0, P1, P2;
    cplx a0g, a1g, a2g; // kernel derivatives applied to g0 = V m
    cplx a0p, a1p;      // applied to g1 = V m'
    cplx a0q;           // applied to g2 = V m''
    cplx g0n = gN0, g1n = gN1, g2n = gN2;
    cplx dl0, dl1, dl2;

    for (std::size_t j = N; j-- > 0;) {
        P0 += g0n;
        if constexpr (order >= 1) P1 += g1n;
        if constexpr (order >= 2) P2 += g2n;
        if constexpr (order >= 2) {
            a2g = D2 * P0 + E2 * a0g + 2.0 * E1 * a1g + E * a2g;
            a1p = D1 * P1 + E1 * a0p + E * a1p;
            a0q = D0 * P2 + E * a0q;
        }
        if constexpr (order >= 1) {
            a1g = D1 * P0 + E1 * a0g + E * a1g;
            a0p = D0 * P1 + E * a0p;
        }
        a0g = D0 * P0 + E * a0g;

        // D^{(p)}((N-j)h) by the same recurrence as the running sums
        if constexpr (order >= 2) dl2 = D2 + E2 * dl0 + 2.0 * E1 * dl1 + E * dl2;
        if constexpr (order >= 1) dl1 = D1 + E1 * dl0 + E * dl1;
        dl0 = D0 + E * dl0;
        full.m[j] = 1.0 + h * a0g - 0.5 * h * dl0 * gN0;
        if constexpr (order >= 1) {
            full.dm[j] = h * (a1g + a0p) - 0.5 * h * (dl1 * gN0 + dl0 * gN1);
            if constexpr (order >= 2)
                full.d2m[j] = h * (a2g + 2.0 * a1p + a0q) - 0.5 * h * (dl2 * gN0 + 2.0 * dl1 * gN1 + dl0 * gN2);
        }
        forcing(j, g0n, g1n, g2n);
    }

    // trapezoid integrals over the whole grid
    cplx I0, I1, dI0, dI1;
    cplx e = std::exp(2.0 * I * k * x0);
    cplx rot = std::exp(2.0 * I * k * h);
    for (std::size_t i = 0; i <= N; ++i) {
        if (i % 1024 == 0) e = std::exp(2.0 * I * k * (x0 + double(i) * h)); // limit drift
        double w = (i == 0 || i == N) ? 0.5 * h : h;
        double x = x0 + double(i) * h;
        cplx vm = V[i] * full.m[i];
        I0 += w * vm;
        I1 += w * e * vm;
        if (order >= 1) {
            cplx vdm = V[i] * full.dm[i];
            dI0 += w * vdm;
            dI1 += w * (2.0 * I * x * e * vm + e * vdm);
        }
        e *= rot;
    }
    full.I0 = I0;
    full.I1 = I1;
    full.dI0 = dI0;
    full.dI1 = dI1;
}

void plus_pass(const double* V, std::size_t n, double h, double x0, double k, int order,
               const LevelResult* prev_full, LevelResult& full)
{
    switch (order) {
    case 0: plus_pass_t<0>(V, n, h, x0, k, prev_full, full); break;
    case 1: plus_pass_t<1>(V, n, h, x0, k, prev_full, full); break;
    default: plus_pass_t<2>(V, n, h, x0, k, prev_full, full); break;
    }
}

LevelResult solve_level(const double* V, std::size_t n, double h, double x0, double k, int order,
                        const JostOptions& opt)
{
    LevelResult full;
    if (opt.mode == JostMode::sweep) {
        plus_pass(V, n, h, x0, k, order, nullptr, full);
        return full;
    }
    LevelResult prev;
    prev.m.assign(n, cplx(1.0, 0.0));
    if (order >= 1) prev.dm.assign(n, cplx{});
    if (order >= 2) prev.d2m.assign(n, cplx{});
    for (int it = 0; it < opt.picard_max_iter; ++it) {
        plus_pass(V, n, h, x0, k, order, &prev, full);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diff = std::max(diff, std::abs(full.m[i] - prev.m[i]));
            scale = std::max(scale, std::abs(full.m[i]));
            if (order >= 1) diff = std::max(diff, std::abs(full.dm[i] - prev.dm[i]));
            if (order >= 2) diff = std::max(diff, std::abs(full.d2m[i] - prev.d2m[i]));
        }
        if (diff <= opt.picard_tol * std::max(1.0, scale)) return full;
        std::swap(prev, full);
    }
    fail(ErrorKind::convergence, "Picard iteration for the Jost modifier did not converge at k = " +
                                     std::to_string(k));
}

void extrapolate(std::vector<cvec>& levels)
{
    // Richardson on even powers of h, in place: result in levels[0]
    std::size_t L = levels.size();
    for (std::size_t col = 1; col < L; ++col) {
        double f = std::pow(4.0, double(col));
        for (std::size_t l = 0; l + col < L; ++l) {
            cvec& a = levels[l];
            const cvec& b = levels[l + 1];
            for (std::size_t i = 0; i < a.size(); ++i) a[i] = (f * b[i] - a[i]) / (f - 1.0);
        }
    }
}

struct SideResult {
    cvec m, dm, d2m; // stored nodes, in the original (unreflected) orientation
    cplx I0, I1, dI0, dI1;
};

// Solve m_+ for one k with Romberg over refined grids; `reflect` solves m_- via V(-x)
SideResult solve_side(const std::vector<rvec>& V_levels, const UniformGrid& g, double k, bool reflect,
                      std::size_t stride, const JostOptions& opt)
{
    int order = opt.derivative_order;
    std::size_t L = V_levels.size();
    std::size_t n_store = stride == 0 ? 0 : (g.n - 1) / stride + 1;
    std::vector<cvec> m(L), dm(L), d2m(L);
    std::vector<cvec> ints(L, cvec(4));
    for (std::size_t l = 0; l < L; ++l) {
        std::size_t r = std::size_t(1) << l;
        const rvec& V = V_levels[l];
        double h = g.step() / double(r);
        double x0 = reflect ? -g.x_max : g.x_min;
        LevelResult res = solve_level(V.data(), V.size(), h, x0, k, order, opt);
        ints[l] = {res.I0, res.I1, res.dI0, res.dI1};
        if (n_store == 0) continue;
        m[l].resize(n_store);
        if (order >= 1) dm[l].resize(n_store);
        if (order >= 2) d2m[l].resize(n_store);
        for (std::size_t s = 0; s < n_store; ++s) {
            std::size_t node = s * stride * r;
            std::size_t out = reflect ? n_store - 1 - s : s;
            m[l][out] = res.m[node];
            if (order >= 1) dm[l][out] = res.dm[node];
            if (order >= 2) d2m[l][out] = res.d2m[node];
        }
    }
    extrapolate(ints);
    SideResult out;
    out.I0 = ints[0][0];
    out.I1 = ints[0][1];
    out.dI0 = ints[0][2];
    out.dI1 = ints[0][3];
    if (n_store) {
        extrapolate(m);
        out.m = std::move(m[0]);
        if (order >= 1) {
            extrapolate(dm);
            out.dm = std::move(dm[0]);
        }
        if (order >= 2) {
            extrapolate(d2m);
            out.d2m = std::move(d2m[0]);
        }
    }
    return out;
}

} // namespace

JostField solve_m(const PotentialSampler& sampler, const UniformGrid& x_grid, const rvec& k, JostSide side,
                  const JostOptions& opt)
{
    require(x_grid.n >= 3 && x_grid.x_max > x_grid.x_min, "solve_m: invalid x grid");
    require(opt.derivative_order >= 0 && opt.derivative_order <= 2, "solve_m: derivative_order must be 0..2");
    require(opt.romberg_levels >= 1 && opt.romberg_levels <= 5, "solve_m: romberg_levels must be 1..5");
    require(!k.empty(), "solve_m: empty k grid");
    for (double kk : k) require(kk != 0.0 && std::isfinite(kk), "solve_m: k grid must avoid k = 0");

    JostField f;
    f.solve_grid = x_grid;
    f.k = k;
    f.has_plus = side != JostSide::minus;
    f.has_minus = side != JostSide::plus;
    f.derivative_order = opt.derivative_order;
    f.store_stride = opt.store_stride;
    f.romberg_levels = opt.romberg_levels;
    std::size_t stride = opt.store_stride;
    if (stride) {
        require((x_grid.n - 1) % stride == 0, "solve_m: store_stride must divide n_x - 1");
        f.x_grid = {x_grid.x_min, x_grid.x_max, (x_grid.n - 1) / stride + 1};
    } else {
        f.x_grid = {x_grid.x_min, x_grid.x_max, 2};
    }

    std::vector<rvec> Vp, Vm;
    for (int l = 0; l < opt.romberg_levels; ++l) {
        std::size_t r = std::size_t(1) << l;
        UniformGrid gl{x_grid.x_min, x_grid.x_max, (x_grid.n - 1) * r + 1};
        rvec v = sampler(gl);
        require(v.size() == gl.n, "solve_m: sampler returned the wrong number of samples");
        for (double x : v) require(std::isfinite(x), "solve_m: non-finite potential sample");
        if (f.has_plus) Vp.push_back(v);
        if (f.has_minus) {
            std::reverse(v.begin(), v.end());
            Vm.push_back(std::move(v));
        }
    }

    std::size_t nk = k.size(), ns = stride ? f.x_grid.n : 0;
    int order = opt.derivative_order;
    auto alloc = [&](cvec& a, bool on) {
        if (on) a.assign(nk * ns, cplx{});
    };
    alloc(f.m_plus, f.has_plus);
    alloc(f.m_minus, f.has_minus);
    alloc(f.dk_m_plus, f.has_plus && order >= 1);
    alloc(f.dk_m_minus, f.has_minus && order >= 1);
    alloc(f.d2k_m_plus, f.has_plus && order >= 2);
    alloc(f.d2k_m_minus, f.has_minus && order >= 2);
    if (f.has_plus) {
        f.int_vm_plus.resize(nk);
        f.int_osc_plus.resize(nk);
        f.dk_int_vm_plus.resize(nk);
        f.dk_int_osc_plus.resize(nk);
    }
    if (f.has_minus) {
        f.int_vm_minus.resize(nk);
        f.int_osc_minus.resize(nk);
        f.dk_int_vm_minus.resize(nk);
        f.dk_int_osc_minus.resize(nk);
    }

    auto copy_rows = [&](std::size_t ik, const SideResult& r, cvec& m, cvec& dm, cvec& d2m) {
        if (!ns) return;
        std::copy(r.m.begin(), r.m.end(), m.begin() + long(ik * ns));
        if (order >= 1) std::copy(r.dm.begin(), r.dm.end(), dm.begin() + long(ik * ns));
        if (order >= 2) std::copy(r.d2m.begin(), r.d2m.end(), d2m.begin() + long(ik * ns));
    };

#pragma omp parallel for schedule(dynamic, 4)
    for (long ik = 0; ik < long(nk); ++ik) {
        std::size_t i = std::size_t(ik);
        if (f.has_plus) {
            SideResult r = solve_side(Vp, x_grid, k[i], false, stride, opt);
            copy_rows(i, r, f.m_plus, f.dk_m_plus, f.d2k_m_plus);
            f.int_vm_plus[i] = r.I0;
            f.int_osc_plus[i] = r.I1;
            f.dk_int_vm_plus[i] = r.dI0;
            f.dk_int_osc_plus[i] = r.dI1;
        }
        if (f.has_minus) {
            SideResult r = solve_side(Vm, x_grid, k[i], true, stride, opt);
            copy_rows(i, r, f.m_minus, f.dk_m_minus, f.d2k_m_minus);
            // the reflected problem integrates e^{2ikx'} with x' = -x, which is e^{-2ikx}
            f.int_vm_minus[i] = r.I0;
            f.int_osc_minus[i] = r.I1;
            f.dk_int_vm_minus[i] = r.dI0;
            f.dk_int_osc_minus[i] = r.dI1;
        }
    }
    return f;
}

JostField solve_m(const PotentialSpec& spec, const UniformGrid& x_grid, const rvec& k, JostSide side,
                  const JostOptions& opt)
{
    return solve_m([&spec](const UniformGrid& g) { return sample_on(spec, g); }, x_grid, k, side, opt);
}

JostField solve_m(const rvec& V, const UniformGrid& x_grid, const rvec& k, JostSide side, JostOptions opt)
{
    require(V.size() == x_grid.n, "solve_m: sample count does not match grid");
    opt.romberg_levels = 1;
    return solve_m([&V](const UniformGrid&) { return V; }, x_grid, k, side, opt);
}

double volterra_residual(const JostField& f, const rvec& V)
{
    // direct O(n^2) evaluation of the discrete Volterra identity on the stored nodes
    require(f.has_plus && !f.m_plus.empty(), "volterra_residual: m_+ not stored");
    require(V.size() == f.x_grid.n, "volterra_residual: V must be sampled on the stored grid");
    std::size_t n = f.x_grid.n;
    double h = f.x_grid.step();
    double res = 0.0;
    for (std::size_t ik = 0; ik < f.nk(); ++ik) {
        double k = f.k[ik];
        const cplx* m = &f.m_plus[f.idx(ik, 0)];
        for (std::size_t j = 0; j < n; ++j) {
            cplx s;
            for (std::size_t i = j + 1; i < n; ++i) {
                double w = (i == n - 1) ? 0.5 * h : h;
                s += w * kernel_d(k, double(i - j) * h, 0) * V[i] * m[i];
            }
            res = std::max(res, std::abs(m[j] - 1.0 - s));
        }
    }
    return res;
}

LemmaBoundReport check_lemma_bounds(const JostField& f, const WeightFunctions& w)
{
    require(w.x.size() == f.x_grid.n, "check_lemma_bounds: weight functions must use the stored grid");
    LemmaBoundReport r;
    int smax = std::min(f.derivative_order, 2);
    std::size_t n = f.x_grid.n;
    for (int s = 0; s <= smax; ++s) {
        const cvec* fields_p[] = {&f.m_plus, &f.dk_m_plus, &f.d2k_m_plus};
        const cvec* fields_m[] = {&f.m_minus, &f.dk_m_minus, &f.d2k_m_minus};
        for (int side = 0; side < 2; ++side) {
            bool plus = side == 0;
            if ((plus && !f.has_plus) || (!plus && !f.has_minus)) continue;
            const cvec& fld = plus ? *fields_p[s] : *fields_m[s];
            const rvec& W = plus ? w.plus[std::size_t(s + 1)] : w.minus[std::size_t(s + 1)];
            double wmax = *std::max_element(W.begin(), W.end());
            double good = 0.0, bad = 0.0;
            for (std::size_t ik = 0; ik < f.nk(); ++ik) {
                double jk = japanese(f.k[ik]);
                for (std::size_t ix = 0; ix < n; ++ix) {
                    double x = w.x[ix];
                    cplx v = fld[f.idx(ik, ix)];
                    if (s == 0) v -= 1.0;
                    double a = std::abs(v) * jk;
                    double sx = plus ? x : -x;
                    if (sx >= -1.0 && W[ix] > 1e-13 * wmax) good = std::max(good, a / W[ix]);
                    if (sx <= 1.0) bad = std::max(bad, a / std::pow(japanese(x), s + 1));
                }
            }
            (plus ? r.good_plus : r.good_minus).push_back(good);
            (plus ? r.bad_plus : r.bad_minus).push_back(bad);
            if (!std::isfinite(good) || !std::isfinite(bad)) r.finite = false;
        }
    }
    return r;
}

} // namespace nlsdist
