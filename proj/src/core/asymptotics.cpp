#include "asymptotics.hpp"

#include "fft.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace nlsdist {

namespace {

const cplx I1(0.0, 1.0);

// linear interpolation of samples (xs increasing) at q; q must lie in range
template <class V>
V interp(const rvec& xs, const std::vector<V>& ys, double q)
{
    auto it = std::lower_bound(xs.begin(), xs.end(), q);
    if (it == xs.begin()) return ys.front();
    if (it == xs.end()) return ys.back();
    std::size_t j = std::size_t(it - xs.begin());
    double w = (q - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - w) * ys[j - 1] + w * ys[j];
}

Mat2 diag_mod(const Vec2& v) { return Mat2::diag(std::norm(v[0]), std::norm(v[1])); }

double unitarity_defect(const Mat2& U) { return (U.adjoint() * U - Mat2::identity()).max_abs(); }

} // namespace

Trajectory time_reversed(const Trajectory& tr, const DistortedBasis& basis)
{
    Trajectory r;
    r.warnings = tr.warnings;
    r.steps = tr.steps;
    for (const auto& s : tr.snapshots) {
        FieldState q{-s.t, s.u};
        for (auto& v : q.u) v = std::conj(v);
        r.snapshots.push_back(std::move(q));
    }
    // conjugation mixes +k and -k through the scattering matrix, so transform afresh
    if (!tr.spectra.empty())
        for (const auto& s : r.snapshots) {
            cvec sp(basis.fft_size());
            basis.forward(s.u.data(), sp.data());
            r.spectra.push_back(std::move(sp));
        }
    return r;
}

cplx ProfileHistory::profile_at(std::size_t it, double q) const
{
    require(it < nt() && !k.empty(), "profile_at: no such snapshot");
    double a = std::abs(q);
    if (a > k.back() * (1.0 + 1e-12)) fail(ErrorKind::invalid_argument, "profile_at: k outside the profile range");
    const auto& z = Z[it];
    if (a < k.front()) {
        // between -k_0 and k_0
        double w = (q + k.front()) / (2.0 * k.front());
        return (1.0 - w) * z.front()[1] + w * z.front()[0];
    }
    auto p = std::lower_bound(k.begin(), k.end(), a);
    std::size_t j = std::min<std::size_t>(std::size_t(p - k.begin()), k.size() - 1);
    int c = q >= 0.0 ? 0 : 1;
    if (j == 0 || k[j] == a) return z[j][c];
    double w = (a - k[j - 1]) / (k[j] - k[j - 1]);
    return (1.0 - w) * z[j - 1][c] + w * z[j][c];
}

double ProfileHistory::sup_profile(std::size_t it) const
{
    double m = 0.0;
    for (const auto& v : Z.at(it)) m = std::max({m, std::abs(v[0]), std::abs(v[1])});
    return m;
}

ProfileHistory extract_profiles(const Trajectory& tr, const DistortedBasis& basis)
{
    const KGrid& g = basis.k_grid();
    const std::size_t M = basis.fft_size();
    require(tr.spectra.empty() || tr.spectra.size() == tr.snapshots.size(),
            "extract_profiles: spectra and snapshots disagree");
    ProfileHistory ph;
    for (std::size_t idx = M / 2; idx < M; ++idx) {
        if (!basis.in_band(idx)) continue;
        ph.k.push_back(g.at(idx));
        ph.idx_pos.push_back(idx);
        ph.idx_neg.push_back(g.mirror(idx));
    }
    cvec spec(M);
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        const auto& s = tr.snapshots[i];
        const cvec* sp = nullptr;
        if (!tr.spectra.empty()) {
            require(tr.spectra[i].size() == M, "extract_profiles: spectrum does not match the basis");
            sp = &tr.spectra[i];
        } else {
            require(s.u.size() == basis.x_grid().n, "extract_profiles: snapshot does not match the basis grid");
            basis.forward(s.u.data(), spec.data());
            sp = &spec;
        }
        std::vector<Vec2> z(ph.k.size());
        for (std::size_t j = 0; j < ph.k.size(); ++j) {
            double k = ph.k[j];
            cplx ph_ = std::exp(-I1 * (s.t * k * k));
            z[j] = {ph_ * (*sp)[ph.idx_pos[j]], ph_ * (*sp)[ph.idx_neg[j]]};
        }
        ph.times.push_back(s.t);
        ph.Z.push_back(std::move(z));
    }
    return ph;
}

std::pair<double, double> log_weights(double a, double b)
{
    require(a >= 0.0 && b > a, "log_weights: need 0 <= a < b");
    double z = (b - a) / (1.0 + a);
    double r = std::log1p(z);
    // wb = 1 - log1p(z)/z, series near 0 to avoid cancellation
    double wb = z < 1e-4 ? z * (0.5 - z * (1.0 / 3.0 - z * 0.25)) : 1.0 - r / z;
    return {r - wb, wb};
}

ModifiedProfile correct_plus(const ProfileHistory& ph, double kappa)
{
    ModifiedProfile mp;
    mp.kind = CorrectionKind::plus_scalar;
    mp.times = ph.times;
    mp.k = ph.k;
    const std::size_t nt = ph.nt(), nk = ph.nk();
    for (std::size_t i = 0; i < nt; ++i) {
        require(ph.times[i] >= 0.0, "correct_plus: times must be non-negative");
        if (i) require(ph.times[i] > ph.times[i - 1], "correct_plus: times must increase");
    }
    mp.W.assign(nt, std::vector<Vec2>(nk));
    mp.phase.assign(nt, std::vector<Mat2>(nk));
    std::vector<std::array<double, 2>> acc(nk, {0.0, 0.0});
    for (std::size_t i = 0; i < nt; ++i) {
        if (i == 0) {
            // constant extrapolation back to t = 0
            double w = std::log1p(ph.times[0]);
            for (std::size_t j = 0; j < nk; ++j)
                for (int c = 0; c < 2; ++c) acc[j][c] = w * std::norm(ph.Z[0][j][c]);
        } else {
            auto [wa, wb] = log_weights(ph.times[i - 1], ph.times[i]);
            for (std::size_t j = 0; j < nk; ++j)
                for (int c = 0; c < 2; ++c)
                    acc[j][c] += wa * std::norm(ph.Z[i - 1][j][c]) + wb * std::norm(ph.Z[i][j][c]);
        }
        for (std::size_t j = 0; j < nk; ++j) {
            Vec2 w;
            for (int c = 0; c < 2; ++c) w[c] = std::exp(I1 * (kappa * acc[j][c])) * ph.Z[i][j][c];
            mp.W[i][j] = w;
            mp.phase[i][j] = Mat2::diag(kappa * acc[j][0], kappa * acc[j][1]);
            mp.max_modulus_defect = std::max(mp.max_modulus_defect, std::abs(norm2(w) - norm2(ph.Z[i][j])));
        }
    }
    return mp;
}

Mat2 intensity_S0(const Vec2& Z, double kappa) { return diag_mod(Z) * kappa; }

Mat2 intensity_S1(const Vec2& Z, const ScatteringMatrix& S, double kappa)
{
    return (S.S_inv * diag_mod(S.S * Z) * S.S) * kappa;
}

Mat2 intensity_S(const Vec2& Z, const ScatteringMatrix& S, double k, double t, const MinusOptions& opt)
{
    Mat2 s0 = intensity_S0(Z, opt.kappa);
    if (k <= std::pow(std::abs(t), -opt.rho)) return s0;
    return (s0 + intensity_S1(Z, S, opt.kappa)) * 0.5;
}

ModifiedProfile correct_minus(const ProfileHistory& ph, const ScatteringData& sd, const MinusOptions& opt)
{
    ModifiedProfile mp;
    mp.kind = CorrectionKind::minus_matrix;
    mp.times = ph.times;
    mp.k = ph.k;
    const std::size_t nt = ph.nt(), nk = ph.nk();
    for (std::size_t i = 0; i < nt; ++i) {
        require(ph.times[i] <= 0.0, "correct_minus: times must be non-positive");
        if (i) require(ph.times[i] < ph.times[i - 1], "correct_minus: |t| must increase");
    }
    mp.W.assign(nt, std::vector<Vec2>(nk));
    mp.phase.assign(nt, std::vector<Mat2>(nk));
    std::vector<double> udef(nk, 0.0), mdef(nk, 0.0);
    std::atomic<bool> bad{false};

#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < nk; ++j) {
        ScatteringMatrix S = scattering_matrix(sd, ph.k[j]);
        auto herm = [&](const Vec2& z, double t) {
            Mat2 s = intensity_S(z, S, ph.k[j], t, opt);
            Mat2 d = s - s.adjoint();
            if (d.max_abs() > opt.hermitian_tol * std::max(s.max_abs(), 1e-300)) bad = true;
            return (s + s.adjoint()) * 0.5;
        };
        Mat2 U = Mat2::identity(), acc{0.0, 0.0, 0.0, 0.0};
        Mat2 prev = herm(ph.Z[0][j], ph.times[0]);
        {
            double w = -std::log1p(-ph.times[0]);
            acc = prev * w;
            U = expm_i_hermitian(prev, w);
        }
        for (std::size_t i = 0; i < nt; ++i) {
            if (i) {
                Mat2 cur = herm(ph.Z[i][j], ph.times[i]);
                auto [wa, wb] = log_weights(-ph.times[i - 1], -ph.times[i]);
                // ds = -d|s| on the negative axis
                Mat2 delta = (prev * wa + cur * wb) * -1.0;
                acc = acc + delta;
                U = expm_i_hermitian(delta, 1.0) * U;
                prev = cur;
            }
            Vec2 w = U * ph.Z[i][j];
            mp.W[i][j] = w;
            mp.phase[i][j] = acc;
            udef[j] = std::max(udef[j], unitarity_defect(U));
            mdef[j] = std::max(mdef[j], std::abs(norm2(w) - norm2(ph.Z[i][j])));
        }
    }
    if (bad) fail(ErrorKind::invalid_argument, "correct_minus: intensity matrix is not self-adjoint (check S data)");
    for (std::size_t j = 0; j < nk; ++j) {
        mp.max_unitarity_defect = std::max(mp.max_unitarity_defect, udef[j]);
        mp.max_modulus_defect = std::max(mp.max_modulus_defect, mdef[j]);
    }
    return mp;
}

double cauchy_difference(const ModifiedProfile& mp, double t_a, double t_b, double k_max)
{
    auto nearest = [&](double t) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < mp.times.size(); ++i)
            if (std::abs(mp.times[i] - t) < std::abs(mp.times[best] - t)) best = i;
        require(std::abs(mp.times[best] - t) <= 1e-6 * std::max(1.0, std::abs(t)),
                "cauchy_difference: time not among the snapshots");
        return best;
    };
    std::size_t a = nearest(t_a), b = nearest(t_b);
    double d = 0.0;
    for (std::size_t j = 0; j < mp.k.size() && mp.k[j] <= k_max; ++j)
        for (int c = 0; c < 2; ++c) d = std::max(d, std::abs(mp.W[b][j][c] - mp.W[a][j][c]));
    return d;
}

// ---- oscillatory coefficients ----

double cutoff_phi(double x)
{
    double a = std::abs(x);
    if (a <= 1.25) return 1.0;
    if (a >= 1.6) return 0.0;
    double s = (a - 1.25) / 0.35;
    return chi_minus(4.0 * s - 2.0);
}

namespace {

struct CRow {
    double dy;
    std::size_t half;
    cvec c; // y = (i - half) dy
};

// c(t, y) on the grid y_m = m pi / (N dx): erf part exact, smooth remainder by one FFT
CRow make_c_row(double t_abs, double dx, std::size_t N, const OscillatoryParams& p)
{
    double X = std::pow(t_abs, 2.0 * p.alpha - 2.0 * p.rho);
    require(1.6 * X + 10.0 < 0.5 * double(N) * dx, "oscillatory coefficients: cutoff too wide for the quadrature box");
    FftwBuffer r(N), R(N);
    for (std::size_t n = 0; n < N; ++n) {
        double x = (double(n) - double(N / 2)) * dx;
        if (n == N / 2 || n == 0) {
            r[n] = 0.0;
            continue;
        }
        cplx num = std::exp(I1 * (x * x)) * cutoff_phi(x / X) - std::exp(-x * x);
        r[n] = num / (I1 * x);
    }
    FftPlan plan(N);
    plan.backward(r.ptr, R.ptr);
    CRow row;
    row.dy = pi / (double(N) * dx);
    row.half = N / 2 - 1; // keep m in [-(N/2 - 1), N/2 - 1], symmetric
    row.c.resize(2 * row.half + 1);
    const double s = dx / sqrt_2pi;
    for (std::size_t i = 0; i < row.c.size(); ++i) {
        long m = long(i) - long(row.half);
        std::size_t q = std::size_t((m % long(N) + long(N)) % long(N));
        double sign = (m % 2 == 0) ? 1.0 : -1.0;
        double y = double(m) * row.dy;
        row.c[i] = std::sqrt(pi / 2.0) * std::erf(y) + s * sign * R[q];
    }
    return row;
}

// 4-point Lagrange in y on a uniform grid
cplx cubic(const cvec& c, double dy, std::size_t half, double y)
{
    double u = y / dy + double(half);
    long i = long(std::floor(u));
    require(i >= 1 && std::size_t(i + 2) < c.size(), "oscillatory coefficients: y outside the tabulated range");
    double f = u - double(i);
    double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    double w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    double w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    double w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
    return w0 * c[i - 1] + w1 * c[i] + w2 * c[i + 1] + w3 * c[i + 2];
}

void choose_box(double y_max, double X, double& dx, std::size_t& N)
{
    // y resolution pi / (N dx) about 2e-3, Nyquist in y above y_max
    dx = std::min(0.0125, 0.4 * pi / (2.0 * (y_max + 1.0)));
    double L = std::max(1600.0, 4.0 * (1.6 * X + 10.0));
    N = 1;
    while (double(N) * dx < L) N <<= 1;
}

cplx c_negative_time(cplx c_pos, double y) { return -std::exp(-2.0 * I1 * (y * y)) * std::conj(c_pos); }

} // namespace

OscillatoryCoeffs oscillatory_coeffs(double t, const rvec& y, const OscillatoryParams& p)
{
    require(t != 0.0, "oscillatory_coeffs: t must be nonzero");
    require(p.rho > 0.0 && p.rho < p.alpha / 10.0 && p.alpha < 0.25, "oscillatory_coeffs: need 0 < rho < alpha/10 < 1/40");
    double ym = 0.0;
    for (double v : y) ym = std::max(ym, std::abs(v));
    double dx;
    std::size_t N;
    double X = std::pow(std::abs(t), 2.0 * p.alpha - 2.0 * p.rho);
    choose_box(ym, X, dx, N);
    CRow row = make_c_row(std::abs(t), dx, N, p);
    OscillatoryCoeffs oc;
    oc.t = t;
    oc.params = p;
    oc.y = y;
    for (double v : y) {
        cplx c = cubic(row.c, row.dy, row.half, v);
        if (t < 0.0) c = c_negative_time(c, v);
        cplx h = I1 * std::exp(I1 * (v * v)) * c;
        oc.c.push_back(c);
        oc.h.push_back(h);
        oc.b.push_back((std::sqrt(pi / 2.0) + c) / (4.0 * pi));
    }
    return oc;
}

OscillatoryTable::OscillatoryTable(double t_lo, double t_hi, double y_max, const OscillatoryParams& p,
                                   std::size_t per_decade)
    : p_(p), y_max_(y_max)
{
    require(t_lo > 0.0 && t_hi >= t_lo && per_decade > 0, "OscillatoryTable: need 0 < t_lo <= t_hi");
    require(p.rho > 0.0 && p.rho < p.alpha / 10.0 && p.alpha < 0.25, "OscillatoryTable: need 0 < rho < alpha/10 < 1/40");
    double X = std::pow(t_hi, 2.0 * p.alpha - 2.0 * p.rho);
    double dx;
    std::size_t N;
    choose_box(y_max, X, dx, N);
    std::size_t n = std::max<std::size_t>(2, std::size_t(std::ceil(std::log10(t_hi / t_lo) * double(per_decade))) + 1);
    for (std::size_t i = 0; i < n; ++i)
        logt_.push_back(std::log(t_lo) + (std::log(t_hi) - std::log(t_lo)) * double(i) / double(n - 1));
    std::size_t keep = 0;
    for (std::size_t i = 0; i < n; ++i) {
        CRow row = make_c_row(std::exp(logt_[i]), dx, N, p);
        dy_ = row.dy;
        // trim to |y| <= y_max plus a margin for the stencil
        keep = std::min(row.half, std::size_t(std::ceil(y_max / dy_)) + 4);
        cvec c(row.c.begin() + long(row.half - keep), row.c.begin() + long(row.half + keep + 1));
        c_.push_back(std::move(c));
    }
    ny_half_ = keep;
}

cplx OscillatoryTable::c_row(std::size_t it, double y) const { return cubic(c_[it], dy_, ny_half_, y); }

cplx OscillatoryTable::c(double t, double y) const
{
    require(t != 0.0, "OscillatoryTable: t must be nonzero");
    double lt = std::log(std::abs(t));
    require(lt >= logt_.front() - 1e-12 && lt <= logt_.back() + 1e-12, "OscillatoryTable: t outside the table");
    auto p = std::lower_bound(logt_.begin(), logt_.end(), lt);
    std::size_t i = std::min<std::size_t>(std::max<std::size_t>(std::size_t(p - logt_.begin()), 1), logt_.size() - 1);
    double w = std::clamp((lt - logt_[i - 1]) / (logt_[i] - logt_[i - 1]), 0.0, 1.0);
    cplx c = (1.0 - w) * c_row(i - 1, y) + w * c_row(i, y);
    return t < 0.0 ? c_negative_time(c, y) : c;
}

cplx OscillatoryTable::b(double t, double y) const { return (std::sqrt(pi / 2.0) + c(t, y)) / (4.0 * pi); }

// ---- reduced ODE ----

std::vector<std::vector<Vec2>> reduced_ode_evolve(const std::vector<Vec2>& Z0, const rvec& k, const ScatteringData& sd,
                                                  const OscillatoryTable& table, double t_start, const rvec& out_times,
                                                  const ReducedOdeOptions& opt)
{
    require(Z0.size() == k.size(), "reduced_ode_evolve: Z and k sizes differ");
    require(std::abs(t_start) >= 1.0, "reduced_ode_evolve: |t_start| must be at least 1");
    require(opt.dt > 0.0, "reduced_ode_evolve: dt must be positive");
    const double sgn = t_start > 0.0 ? 1.0 : -1.0;
    double last = std::abs(t_start);
    for (double t : out_times) {
        require(t * sgn > 0.0 && std::abs(t) >= last, "reduced_ode_evolve: output times must move away from 0");
        last = std::abs(t);
    }
    const double scale = opt.kappa * 2.0 * sqrt_2pi; // b -> kappa as y -> +inf
    std::vector<std::vector<Vec2>> out(out_times.size(), std::vector<Vec2>(k.size()));
    std::atomic<bool> grew{false};

#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t j = 0; j < k.size(); ++j) {
        ScatteringMatrix S = scattering_matrix(sd, k[j]);
        auto rhs = [&](double t, const Vec2& z) {
            double y = std::sqrt(std::abs(t)) * k[j];
            cplx bp = table.b(t, y), bm = table.b(t, -y);
            Vec2 a = diag_mod(z) * z;
            Vec2 sz = S.S * z;
            Vec2 c = S.S_inv * (diag_mod(sz) * sz);
            double f = scale / std::abs(t);
            return Vec2{-I1 * f * (bp * a[0] + bm * c[0]), -I1 * f * (bp * a[1] + bm * c[1])};
        };
        Vec2 z = Z0[j];
        double n0 = norm2(z);
        double t = t_start;
        for (std::size_t o = 0; o < out_times.size(); ++o) {
            double target = out_times[o];
            std::size_t n = std::size_t(std::ceil(std::abs(target - t) / opt.dt - 1e-9));
            double h = n ? (target - t) / double(n) : 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                Vec2 f1 = rhs(t, z);
                Vec2 zm{z[0] + 0.5 * h * f1[0], z[1] + 0.5 * h * f1[1]};
                Vec2 f2 = rhs(t + 0.5 * h, zm);
                z = {z[0] + h * f2[0], z[1] + h * f2[1]};
                t += h;
            }
            t = target;
            out[o][j] = z;
            if (norm2(z) > (1.0 + opt.growth_guard) * n0 + 1e-300) grew = true;
        }
    }
    if (grew) fail(ErrorKind::convergence, "reduced_ode_evolve: |Z| grew beyond the guard, reduce dt");
    return out;
}

// ---- physical space ----

namespace {

cplx free_prefactor(double t, double x)
{
    return std::exp(-I1 * (x * x / (4.0 * t))) / std::sqrt(cplx(0.0, -2.0 * t));
}

} // namespace

cvec physical_asymptotics(const ProfileHistory& ph, std::size_t it, const ScatteringData& sd, const rvec& x)
{
    require(it < ph.nt(), "physical_asymptotics: no such snapshot");
    double t = ph.times[it];
    require(t != 0.0, "physical_asymptotics: t must be nonzero");
    cvec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double k0 = -x[i] / (2.0 * t);
        cplx pre = free_prefactor(t, x[i]);
        if (t > 0.0) {
            out[i] = pre * ph.profile_at(it, k0);
            continue;
        }
        double kc = std::max(std::abs(k0), sd.k.front());
        cplx fp = ph.profile_at(it, k0), fm = ph.profile_at(it, -k0);
        if (x[i] >= 0.0) {
            auto c = sd.at(kc); // k0 >= 0
            out[i] = pre * (c.T * fp + c.R_plus * fm);
        } else {
            auto c = sd.at(kc); // -k0 > 0
            out[i] = pre * (c.T * fp + c.R_minus * fm);
        }
    }
    return out;
}

cvec physical_asymptotics_log(const std::vector<Vec2>& W_inf, const rvec& k, double t, const rvec& x, double kappa)
{
    require(t >= 1.0, "physical_asymptotics_log: needs t >= 1");
    require(W_inf.size() == k.size() && !k.empty(), "physical_asymptotics_log: size mismatch");
    cvec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double k0 = -x[i] / (2.0 * t);
        double a = std::abs(k0);
        require(a <= k.back() * (1.0 + 1e-12), "physical_asymptotics_log: k outside the profile range");
        cplx w;
        if (a < k.front()) {
            double s = (k0 + k.front()) / (2.0 * k.front());
            w = (1.0 - s) * W_inf.front()[1] + s * W_inf.front()[0];
        } else {
            int c = k0 >= 0.0 ? 0 : 1;
            auto p = std::lower_bound(k.begin(), k.end(), a);
            std::size_t j = std::min<std::size_t>(std::size_t(p - k.begin()), k.size() - 1);
            if (j == 0 || k[j] == a)
                w = W_inf[j][c];
            else {
                double s = (a - k[j - 1]) / (k[j] - k[j - 1]);
                w = (1.0 - s) * W_inf[j - 1][c] + s * W_inf[j][c];
            }
        }
        out[i] = free_prefactor(t, x[i]) * std::exp(-I1 * (kappa * std::norm(w) * std::log(t))) * w;
    }
    return out;
}

} // namespace nlsdist
