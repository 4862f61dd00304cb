#include "scattering.hpp"

#include <algorithm>
#include <cmath>

namespace nlsdist {

double ScatteringData::unitarity_defect(std::size_t j) const
{
    double t2 = std::norm(T[j]);
    double a = std::abs(t2 + std::norm(R_plus[j]) - 1.0);
    double b = std::abs(t2 + std::norm(R_minus[j]) - 1.0);
    double c = std::abs(T[j] * std::conj(R_minus[j]) + R_plus[j] * std::conj(T[j]));
    return std::max({a, b, c});
}

double ScatteringData::max_unitarity_defect(double k_lo, double k_hi) const
{
    double m = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j)
        if (k[j] >= k_lo && k[j] <= k_hi) m = std::max(m, unitarity_defect(j));
    return m;
}

double ScatteringData::max_inv_T_mismatch() const
{
    double m = 0.0;
    for (double v : inv_T_mismatch) m = std::max(m, v);
    return m;
}

ScatteringData::Coeffs ScatteringData::at(double kq) const
{
    require(!k.empty(), "scattering data is empty");
    double a = std::abs(kq);
    require(a >= k.front() - 1e-12 && a <= k.back() + 1e-12, "k outside the scattering grid range");
    auto it = std::lower_bound(k.begin(), k.end(), a);
    std::size_t j = std::size_t(it - k.begin());
    Coeffs c;
    if (j == 0 || (it != k.end() && *it == a)) {
        j = std::min(j, k.size() - 1);
        c = {T[j], R_plus[j], R_minus[j]};
    } else {
        if (j >= k.size()) j = k.size() - 1;
        double w = (a - k[j - 1]) / (k[j] - k[j - 1]);
        c = {(1.0 - w) * T[j - 1] + w * T[j], (1.0 - w) * R_plus[j - 1] + w * R_plus[j],
             (1.0 - w) * R_minus[j - 1] + w * R_minus[j]};
    }
    if (kq < 0.0) c = {std::conj(c.T), std::conj(c.R_plus), std::conj(c.R_minus)};
    return c;
}

ScatteringData compute_TR(const JostField& f)
{
    require(f.has_plus && f.has_minus, "compute_TR needs both m_+ and m_-");
    const cplx I(0.0, 1.0);
    ScatteringData d;
    std::size_t n = f.nk();
    for (std::size_t j = 0; j < n; ++j) require(f.k[j] > 0.0, "compute_TR expects positive k");
    for (std::size_t j = 1; j < n; ++j) require(f.k[j] > f.k[j - 1], "compute_TR expects increasing k");
    d.k = f.k;
    d.T.resize(n);
    d.R_plus.resize(n);
    d.R_minus.resize(n);
    d.inv_T_mismatch.resize(n);
    bool deriv = f.derivative_order >= 1;
    if (deriv) {
        d.dk_T.resize(n);
        d.dk_R_plus.resize(n);
        d.dk_R_minus.resize(n);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double k = f.k[j];
        cplx c = 1.0 / (2.0 * I * k);
        cplx invT = 1.0 - c * f.int_vm_plus[j];
        cplx invT_m = 1.0 - c * f.int_vm_minus[j];
        d.inv_T_mismatch[j] = std::abs(invT - invT_m);
        cplx T = 1.0 / invT;
        cplx rm_t = c * f.int_osc_plus[j];  // R_-/T
        cplx rp_t = c * f.int_osc_minus[j]; // R_+/T
        d.T[j] = T;
        d.R_minus[j] = rm_t * T;
        d.R_plus[j] = rp_t * T;
        if (deriv) {
            // d/dk (1/(2ik)) = -1/(2ik^2)
            cplx dc = -1.0 / (2.0 * I * k * k);
            cplx d_invT = -(dc * f.int_vm_plus[j] + c * f.dk_int_vm_plus[j]);
            cplx dT = -T * T * d_invT;
            cplx d_rm_t = dc * f.int_osc_plus[j] + c * f.dk_int_osc_plus[j];
            cplx d_rp_t = dc * f.int_osc_minus[j] + c * f.dk_int_osc_minus[j];
            d.dk_T[j] = dT;
            d.dk_R_minus[j] = d_rm_t * T + rm_t * dT;
            d.dk_R_plus[j] = d_rp_t * T + rp_t * dT;
        }
    }
    return d;
}

ScatteringMatrix scattering_matrix(const ScatteringData::Coeffs& c)
{
    ScatteringMatrix m;
    m.S = {c.T, c.R_plus, c.R_minus, c.T};
    m.S_inv = {std::conj(c.T), std::conj(c.R_minus), std::conj(c.R_plus), std::conj(c.T)};
    return m;
}

ScatteringMatrix scattering_matrix(const ScatteringData& d, double k) { return scattering_matrix(d.at(k)); }

namespace {

// value at 0 of the quadratic through (x_i, y_i)
cplx lagrange_at_zero(const double* x, const cplx* y)
{
    cplx s;
    for (int i = 0; i < 3; ++i) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
        s += w * y[i];
    }
    return s;
}

cplx linear_at_zero(const double* x, const cplx* y) { return y[0] - x[0] * (y[1] - y[0]) / (x[1] - x[0]); }

} // namespace

GenericityReport genericity_report(const JostField& f, const ScatteringData& d)
{
    require(f.has_plus && f.nk() >= 3 && d.size() >= 3, "genericity_report needs at least three k values");
    GenericityReport g;
    double ks[3] = {f.k[0], f.k[1], f.k[2]};
    cplx I0[3] = {f.int_vm_plus[0], f.int_vm_plus[1], f.int_vm_plus[2]};
    g.integral_at_zero = lagrange_at_zero(ks, I0);
    g.integral_error = std::abs(g.integral_at_zero - linear_at_zero(ks, I0));

    double kd[3] = {d.k[0], d.k[1], d.k[2]};
    cplx tk[3] = {d.T[0] / kd[0], d.T[1] / kd[1], d.T[2] / kd[2]};
    g.T_slope_at_zero = lagrange_at_zero(kd, tk);
    g.k_min = d.k[0];
    g.T_at_k_min = d.T[0];
    g.R_plus_at_k_min = d.R_plus[0];
    g.R_minus_at_k_min = d.R_minus[0];

    double mag = std::abs(g.integral_at_zero);
    g.inconclusive = mag <= g.integral_error;
    g.is_generic = !g.inconclusive && mag > 1e-8;
    return g;
}

} // namespace nlsdist
