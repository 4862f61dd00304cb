#include "distorted.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <cmath>

namespace nlsdist {

namespace {
const cplx I1(0.0, 1.0);
}

double chi_plus(double x)
{
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    // integral of the normalized C^2 bump 140 s^3 (1-s)^3 / 4 on [-2, 2]
    double s = (x + 2.0) / 4.0;
    double s2 = s * s;
    return s2 * s2 * (35.0 - 84.0 * s + 70.0 * s2 - 20.0 * s2 * s);
}

void DistortedBasis::init_grids(const UniformGrid& x, const BasisOptions& opt)
{
    require(x.n >= 16, "distorted basis: grid too small");
    require(opt.oversample >= 1.0, "distorted basis: oversample must be >= 1");
    require(opt.max_band_fraction > 0.0 && opt.max_band_fraction <= 1.0, "distorted basis: max_band_fraction must be in (0, 1]");
    x_ = x;
    opt_ = opt;
    N_ = x.n;
    M_ = fft_size_for(N_, opt.oversample);
    kg_.dk = 2.0 * pi / (double(M_) * x.step());
    kg_.n_half = M_ / 2;
    nb_ = 0;
    const double kc = effective_k_cut(x, opt);
    while (nb_ < kg_.n_half && kg_.positive(nb_) <= kc) ++nb_;
    require(nb_ > 0, "distorted basis: k_cut leaves no frequencies");

    twist_.resize(N_);
    for (std::size_t n = 0; n < N_; ++n) twist_[n] = std::exp(-I1 * (pi * double(n) / double(M_)));
    phase_.resize(M_);
    for (std::size_t idx = 0; idx < M_; ++idx) phase_[idx] = std::exp(-I1 * (kg_.at(idx) * x.x_min));
    plan_ = std::make_shared<FftPlan>(M_);
}

DistortedBasis DistortedBasis::flat(const UniformGrid& x, const BasisOptions& opt)
{
    DistortedBasis b;
    b.init_grids(x, opt);
    b.has_window_ = false;
    b.sd_.k.resize(b.nb_);
    for (std::size_t j = 0; j < b.nb_; ++j) b.sd_.k[j] = b.kg_.positive(j);
    b.sd_.T.assign(b.nb_, cplx(1.0, 0.0));
    b.sd_.R_plus.assign(b.nb_, cplx{});
    b.sd_.R_minus.assign(b.nb_, cplx{});
    b.sd_.inv_T_mismatch.assign(b.nb_, 0.0);
    return b;
}

DistortedBasis::DistortedBasis(const UniformGrid& x, const JostField& window, const ScatteringData& sd,
                               const BasisOptions& opt)
{
    init_grids(x, opt);
    require(window.has_plus && window.has_minus && !window.m_plus.empty() && !window.m_minus.empty(),
            "build_basis: window Jost data needs stored m_+ and m_-");
    double h = x.step();
    double off = (window.x_grid.x_min - x.x_min) / h;
    require(std::abs(off - std::round(off)) < 1e-8 && std::abs(window.x_grid.step() - h) < 1e-10 * h,
            "build_basis: window grid is not aligned with the propagation grid");
    w0_ = std::size_t(std::llround(off));
    nw_ = window.x_grid.n;
    w1_ = w0_ + nw_ - 1;
    require(w0_ >= 1 && w1_ + 1 < N_, "build_basis: window must lie strictly inside the grid");
    require(sd.size() == nb_ && window.nk() == nb_, "build_basis: scattering data does not cover the k band");
    for (std::size_t j = 0; j < nb_; ++j)
        require(std::abs(sd.k[j] - kg_.positive(j)) < 1e-9 * kg_.dk &&
                    std::abs(window.k[j] - kg_.positive(j)) < 1e-9 * kg_.dk,
                "build_basis: k grid mismatch");
    has_window_ = true;
    sd_ = sd;
    m_plus_.resize(nb_ * nw_);
    m_minus_.resize(nb_ * nw_);
    for (rvec* v : {&kp_re_, &kp_im_, &km_re_, &km_im_}) v->resize(nb_ * nw_);
    for (std::size_t j = 0; j < nb_; ++j) {
        double k = kg_.positive(j);
        cplx T = sd_.T[j];
        for (std::size_t i = 0; i < nw_; ++i) {
            double xi = x.at(w0_ + i);
            cplx mp = window.m_plus[window.idx(j, i)];
            cplx mm = window.m_minus[window.idx(j, i)];
            m_plus_[j * nw_ + i] = mp;
            m_minus_[j * nw_ + i] = mm;
            cplx kp = std::conj(T * mp * std::exp(I1 * (k * xi)));
            cplx km = std::conj(T * mm * std::exp(-I1 * (k * xi)));
            kp_re_[j * nw_ + i] = kp.real();
            kp_im_[j * nw_ + i] = kp.imag();
            km_re_[j * nw_ + i] = km.real();
            km_im_[j * nw_ + i] = km.imag();
        }
    }
}

bool DistortedBasis::in_band(std::size_t idx) const { return pos_index(idx) < nb_; }

std::size_t DistortedBasis::pos_index(std::size_t idx) const
{
    std::size_t h = M_ / 2;
    return idx >= h ? idx - h : h - 1 - idx;
}

cplx DistortedBasis::m_plus(std::size_t n, std::size_t j) const
{
    require(n < N_ && j < nb_, "m_plus: index out of range");
    if (!has_window_ || n > w1_) return 1.0;
    if (n >= w0_) return m_plus_[j * nw_ + (n - w0_)];
    double k = kg_.positive(j);
    cplx T = sd_.T[j];
    return 1.0 / T + sd_.R_minus[j] / T * std::exp(-2.0 * I1 * (k * x_.at(n)));
}

cplx DistortedBasis::m_minus(std::size_t n, std::size_t j) const
{
    require(n < N_ && j < nb_, "m_minus: index out of range");
    if (!has_window_ || n < w0_) return 1.0;
    if (n <= w1_) return m_minus_[j * nw_ + (n - w0_)];
    double k = kg_.positive(j);
    cplx T = sd_.T[j];
    return 1.0 / T + sd_.R_plus[j] / T * std::exp(2.0 * I1 * (k * x_.at(n)));
}

cplx DistortedBasis::psi(std::size_t n, std::size_t idx) const
{
    require(idx < M_ && in_band(idx), "psi: k index outside the basis band");
    std::size_t j = pos_index(idx);
    double k = kg_.at(idx);
    cplx e = std::exp(I1 * (k * x_.at(n)));
    cplx v = k > 0.0 ? sd_.T[j] * m_plus(n, j) * e : sd_.T[j] * m_minus(n, j) * e;
    return v / sqrt_2pi;
}

cplx DistortedBasis::psi_S(std::size_t n, std::size_t idx) const
{
    require(idx < M_, "psi_S: k index out of range");
    double x = x_.at(n), k = kg_.at(idx);
    cplx d = std::exp(I1 * (k * x)) - std::exp(-I1 * (k * x));
    return (k > 0.0 ? chi_minus(x) : chi_plus(x)) * d;
}

cplx DistortedBasis::psi_L(std::size_t n, std::size_t idx) const
{
    require(idx < M_ && in_band(idx), "psi_L: k index outside the basis band");
    std::size_t j = pos_index(idx);
    double x = x_.at(n), k = kg_.at(idx);
    cplx ep = std::exp(I1 * (k * x)), em = std::exp(-I1 * (k * x));
    if (k > 0.0) return chi_plus(x) * sd_.T[j] * ep + chi_minus(x) * (sd_.R_minus[j] + 1.0) * em;
    return chi_minus(x) * sd_.T[j] * ep + chi_plus(x) * (sd_.R_plus[j] + 1.0) * em;
}

cplx DistortedBasis::psi_R(std::size_t n, std::size_t idx) const
{
    require(idx < M_ && in_band(idx), "psi_R: k index outside the basis band");
    std::size_t j = pos_index(idx);
    double x = x_.at(n), k = kg_.at(idx);
    cplx ep = std::exp(I1 * (k * x)), em = std::exp(-I1 * (k * x));
    cplx T = sd_.T[j];
    if (k > 0.0) {
        cplx mp = m_plus(n, j), mm = m_minus(n, j);
        return chi_plus(x) * T * (mp - 1.0) * ep +
               chi_minus(x) * ((std::conj(mm) - 1.0) * ep + sd_.R_minus[j] * (mm - 1.0) * em);
    }
    // k < 0: m(x, -k) = m(x, q) with q = |k|, m(x, k) = conj(m(x, q))
    cplx mm = m_minus(n, j), mp = m_plus(n, j);
    return chi_minus(x) * T * (mm - 1.0) * ep +
           chi_plus(x) * ((std::conj(mp) - 1.0) * ep + sd_.R_plus[j] * (mp - 1.0) * em);
}

namespace {

// sum_i (kr + i ki)(fr + i fi)
cplx window_dot(const double* kr, const double* ki, const double* fr, const double* fi, std::size_t n)
{
    double sr = 0.0, si = 0.0;
#pragma omp simd reduction(+ : sr, si)
    for (std::size_t i = 0; i < n; ++i) {
        sr += kr[i] * fr[i] - ki[i] * fi[i];
        si += kr[i] * fi[i] + ki[i] * fr[i];
    }
    return {sr, si};
}

// per-thread work arrays reused across calls; large fresh allocations cost page faults every step
cplx* scratch(std::size_t slot, std::size_t n)
{
    thread_local std::array<std::unique_ptr<FftwBuffer>, 4> bufs;
    auto& b = bufs.at(slot);
    if (!b || b->size < n) b = std::make_unique<FftwBuffer>(n);
    return b->ptr;
}

} // namespace

cplx DistortedBasis::region_S(const cplx* X, std::size_t idx) const
{
    return phase_[idx] * X[(idx + M_ / 2) % M_];
}

void DistortedBasis::forward(const cplx* f, cplx* out) const
{
    const double scale = x_.step() / sqrt_2pi;
    const std::size_t half = M_ / 2;
    if (!has_window_) {
        cplx* a = scratch(0, M_);
        cplx* X = scratch(1, M_);
        for (std::size_t n = 0; n < M_; ++n) a[n] = n < N_ ? f[n] * twist_[n] : cplx{};
        plan_->forward(a, X);
        for (std::size_t idx = 0; idx < M_; ++idx)
            out[idx] = in_band(idx) ? scale * region_S(X, idx) : cplx{};
        return;
    }
    cplx* a = scratch(0, M_);
    cplx* b = scratch(1, M_);
    cplx* XL = scratch(2, M_);
    cplx* XR = scratch(3, M_);
    for (std::size_t n = 0; n < M_; ++n) {
        cplx v = n < N_ ? f[n] * twist_[n] : cplx{};
        a[n] = n < w0_ ? v : cplx{};
        b[n] = (n > w1_ && n < N_) ? v : cplx{};
    }
    plan_->forward(a, XL);
    plan_->forward(b, XR);
    rvec fr(nw_), fi(nw_);
    for (std::size_t i = 0; i < nw_; ++i) {
        fr[i] = f[w0_ + i].real();
        fi[i] = f[w0_ + i].imag();
    }
    for (std::size_t idx = 0; idx < M_; ++idx) {
        std::size_t j = pos_index(idx);
        if (j >= nb_) {
            out[idx] = 0.0;
            continue;
        }
        std::size_t mir = M_ - 1 - idx;
        cplx v;
        const double *kr, *ki;
        if (idx >= half) {
            v = std::conj(sd_.T[j]) * region_S(XR, idx) + region_S(XL, idx) +
                std::conj(sd_.R_minus[j]) * region_S(XL, mir);
            kr = &kp_re_[j * nw_];
            ki = &kp_im_[j * nw_];
        } else {
            v = region_S(XR, idx) + std::conj(sd_.R_plus[j]) * region_S(XR, mir) +
                std::conj(sd_.T[j]) * region_S(XL, idx);
            kr = &km_re_[j * nw_];
            ki = &km_im_[j * nw_];
        }
        out[idx] = scale * (v + window_dot(kr, ki, fr.data(), fi.data(), nw_));
    }
}

void DistortedBasis::inverse(const cplx* in, cplx* out) const
{
    const double scale = kg_.dk / sqrt_2pi;
    const std::size_t half = M_ / 2;
    auto load = [&](cplx* buf, std::size_t idx, cplx c) {
        buf[(idx + half) % M_] = c * std::conj(phase_[idx]);
    };
    if (!has_window_) {
        cplx* a = scratch(0, M_);
        cplx* s = scratch(1, M_);
        for (std::size_t idx = 0; idx < M_; ++idx) load(a, idx, in_band(idx) ? in[idx] : cplx{});
        plan_->backward(a, s);
        for (std::size_t n = 0; n < N_; ++n) out[n] = scale * std::conj(twist_[n]) * s[n];
        return;
    }
    cplx* cL = scratch(0, M_);
    cplx* cR = scratch(1, M_);
    cplx* sL = scratch(2, M_);
    cplx* sR = scratch(3, M_);
    for (std::size_t idx = 0; idx < M_; ++idx) {
        std::size_t j = pos_index(idx);
        if (j >= nb_) {
            load(cL, idx, 0.0);
            load(cR, idx, 0.0);
            continue;
        }
        std::size_t mir = M_ - 1 - idx;
        if (idx >= half) {
            load(cR, idx, sd_.T[j] * in[idx] + sd_.R_plus[j] * in[mir]);
            load(cL, idx, in[idx]);
        } else {
            load(cR, idx, in[idx]);
            load(cL, idx, sd_.T[j] * in[idx] + sd_.R_minus[j] * in[mir]);
        }
    }
    plan_->backward(cL, sL);
    plan_->backward(cR, sR);
    for (std::size_t n = 0; n < w0_; ++n) out[n] = scale * std::conj(twist_[n]) * sL[n];
    for (std::size_t n = w1_ + 1; n < N_; ++n) out[n] = scale * std::conj(twist_[n]) * sR[n];
    rvec ar(nw_, 0.0), ai(nw_, 0.0);
    for (std::size_t j = 0; j < nb_; ++j) {
        // conj(K) u summed over +k_j and -k_j
        double upr = in[half + j].real(), upi = in[half + j].imag();
        double umr = in[half - 1 - j].real(), umi = in[half - 1 - j].imag();
        const double* pr = &kp_re_[j * nw_];
        const double* pi_ = &kp_im_[j * nw_];
        const double* mr = &km_re_[j * nw_];
        const double* mi = &km_im_[j * nw_];
#pragma omp simd
        for (std::size_t i = 0; i < nw_; ++i) {
            ar[i] += pr[i] * upr + pi_[i] * upi + mr[i] * umr + mi[i] * umi;
            ai[i] += pr[i] * upi - pi_[i] * upr + mr[i] * umi - mi[i] * umr;
        }
    }
    for (std::size_t i = 0; i < nw_; ++i) out[w0_ + i] = scale * cplx(ar[i], ai[i]);
}

DistortedSpectrum DistortedBasis::forward(const cvec& f) const
{
    require(f.size() == N_, "forward: sample count does not match the basis grid");
    DistortedSpectrum s{kg_, cvec(M_)};
    forward(f.data(), s.values.data());
    return s;
}

cvec DistortedBasis::inverse(const DistortedSpectrum& s) const
{
    require(s.values.size() == M_, "inverse: spectrum size does not match the basis");
    cvec f(N_);
    inverse(s.values.data(), f.data());
    return f;
}

DistortedBasis build_basis(const UniformGrid& x, const JostField& window, const ScatteringData& sd,
                           const BasisOptions& opt)
{
    return DistortedBasis(x, window, sd, opt);
}

double effective_k_cut(const UniformGrid& x, const BasisOptions& opt)
{
    return std::min(opt.k_cut, opt.max_band_fraction * pi / x.step());
}

std::size_t fft_size_for(std::size_t n, double oversample)
{
    std::size_t M = 2 * std::size_t(std::llround(0.5 * oversample * double(n)));
    return std::max<std::size_t>(M, n + n % 2);
}

WindowPlan plan_window(const PotentialSpec& spec, const UniformGrid& x, const BasisOptions& opt)
{
    WindowPlan w;
    double h = x.step();
    auto [a, b] = spec.support(opt.support_tol);
    a -= opt.window_pad;
    b += opt.window_pad;
    require(a > x.at(1) && b < x.at(x.n - 2), "distorted basis: potential support exceeds the propagation grid");
    w.w0 = std::size_t(std::floor((a - x.x_min) / h));
    w.w1 = std::size_t(std::ceil((b - x.x_min) / h));
    w.w1 = std::max(w.w1, w.w0 + 2);

    std::size_t M = fft_size_for(x.n, opt.oversample);
    double dk = 2.0 * pi / (double(M) * h);
    const double kc = effective_k_cut(x, opt);
    for (std::size_t j = 0; j < M / 2 && (double(j) + 0.5) * dk <= kc; ++j) w.k.push_back((double(j) + 0.5) * dk);
    double kmax = w.k.empty() ? 1.0 : w.k.back();
    double hf = std::min(opt.fine_step_max, opt.fine_kh / kmax);
    w.refine = std::max<std::size_t>(1, std::size_t(std::ceil(h / hf)));
    w.solve_grid = {x.at(w.w0), x.at(w.w1), (w.w1 - w.w0) * w.refine + 1};
    return w;
}

DistortedBasis make_basis(const PotentialSpec& spec, const UniformGrid& x, const BasisOptions& opt)
{
    if (spec.is_zero()) return DistortedBasis::flat(x, opt);
    WindowPlan w = plan_window(spec, x, opt);
    JostOptions jo;
    jo.derivative_order = 0;
    jo.romberg_levels = opt.romberg_levels;
    jo.store_stride = w.refine;
    JostField f = solve_m(spec, w.solve_grid, w.k, JostSide::both, jo);
    // the stored grid must coincide with propagation nodes
    f.x_grid = {x.at(w.w0), x.at(w.w1), w.w1 - w.w0 + 1};
    ScatteringData sd = compute_TR(f);
    return DistortedBasis(x, f, sd, opt);
}

cvec apply_L(const cvec& f, const rvec& V, double h)
{
    require(f.size() == V.size(), "apply_L: size mismatch");
    std::size_t n = f.size();
    auto at = [&](long i) { return (i < 0 || i >= long(n)) ? cplx{} : f[std::size_t(i)]; };
    cvec out(n);
    double c = 1.0 / (12.0 * h * h);
    for (long i = 0; i < long(n); ++i) {
        cplx d2 = c * (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) + 16.0 * at(i - 1) - at(i - 2));
        out[std::size_t(i)] = -d2 + V[std::size_t(i)] * f[std::size_t(i)];
    }
    return out;
}

double diagonalization_residual(const cvec& f, const DistortedBasis& basis, const rvec& V)
{
    double fmax = 0.0;
    for (auto v : f) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) return 0.0;
    DistortedSpectrum a = basis.forward(apply_L(f, V, basis.x_grid().step()));
    DistortedSpectrum b = basis.forward(f);
    double num = 0.0, den = 0.0;
    for (std::size_t idx = 0; idx < b.values.size(); ++idx) {
        double k = b.grid.at(idx);
        cplx kb = k * k * b.values[idx];
        num += std::norm(a.values[idx] - kb);
        den += std::norm(kb);
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

DistortedSpectrum linear_propagate(const DistortedSpectrum& s, double t)
{
    DistortedSpectrum o = s;
    for (std::size_t idx = 0; idx < o.values.size(); ++idx) {
        double k = o.grid.at(idx);
        o.values[idx] *= std::exp(I1 * (t * k * k));
    }
    return o;
}

bool propagation_resolved(const DistortedBasis& b, double t_max)
{
    double xm = std::max(std::abs(b.x_grid().x_min), std::abs(b.x_grid().x_max));
    return b.k_weight() * (2.0 * t_max * b.k_band_max() + xm) < pi / 4.0;
}

double l2_norm(const cvec& f, double w)
{
    double s = 0.0;
    for (auto v : f) s += std::norm(v);
    return std::sqrt(w * s);
}

} // namespace nlsdist
