#pragma once

#include "common.hpp"
#include "jost.hpp"
#include "linalg2.hpp"

namespace nlsdist {

// T, R_+ and R_- on positive k; negative k by conjugation
struct ScatteringData {
    rvec k;
    cvec T, R_plus, R_minus;
    cvec dk_T, dk_R_plus, dk_R_minus; // empty unless derivatives were solved
    rvec inv_T_mismatch;              // |1/T from m_+ - 1/T from m_-|

    std::size_t size() const { return k.size(); }
    double unitarity_defect(std::size_t j) const;
    double max_unitarity_defect(double k_lo = 0.0, double k_hi = 1e300) const;
    double max_inv_T_mismatch() const;

    struct Coeffs {
        cplx T, R_plus, R_minus;
    };
    // linear interpolation on the grid; negative k by conjugation
    Coeffs at(double k) const;
};

ScatteringData compute_TR(const JostField& f);

struct ScatteringMatrix {
    Mat2 S, S_inv;
};

ScatteringMatrix scattering_matrix(const ScatteringData::Coeffs& c);
ScatteringMatrix scattering_matrix(const ScatteringData& d, double k);

struct GenericityReport {
    cplx integral_at_zero;   // int V m(x, 0) dx, extrapolated
    double integral_error = 0.0;
    cplx T_slope_at_zero;    // T'(0)
    double k_min = 0.0;
    cplx T_at_k_min, R_plus_at_k_min, R_minus_at_k_min;
    bool is_generic = false;
    bool inconclusive = false;
};

GenericityReport genericity_report(const JostField& f, const ScatteringData& d);

} // namespace nlsdist
