#pragma once

#include "common.hpp"
#include "distorted.hpp"
#include "dynamics.hpp"
#include "linalg2.hpp"
#include "scattering.hpp"

#include <limits>
#include <string>

namespace nlsdist {

// kappa multiplies |f~|^2 in the profile phase; 1/2 for the unitary distorted transform
inline constexpr double kappa_unitary = 0.5;
inline double kappa_published() { return 1.0 / (2.0 * sqrt_2pi); }

// u(t) -> conj(u)(-t); spectra are recomputed when the input has them
Trajectory time_reversed(const Trajectory& tr, const DistortedBasis& basis);

struct ProfileHistory {
    rvec times;
    rvec k;                            // positive in-band k, increasing
    std::vector<std::size_t> idx_pos;  // k grid index of +k_j
    std::vector<std::size_t> idx_neg;  // k grid index of -k_j
    std::vector<std::vector<Vec2>> Z;  // Z[it][j] = (f~(t, k_j), f~(t, -k_j))

    std::size_t nt() const { return times.size(); }
    std::size_t nk() const { return k.size(); }
    // f~(t_it, q) for any q in [-k.back(), k.back()], linear in q
    cplx profile_at(std::size_t it, double q) const;
    double sup_profile(std::size_t it) const;
};

ProfileHistory extract_profiles(const Trajectory& tr, const DistortedBasis& basis);

enum class CorrectionKind { plus_scalar, minus_matrix };

struct ModifiedProfile {
    CorrectionKind kind = CorrectionKind::plus_scalar;
    rvec times;
    rvec k;
    std::vector<std::vector<Vec2>> W;
    std::vector<std::vector<Mat2>> phase;   // accumulated int S ds/(1+|s|) (plus: diagonal)
    double max_unitarity_defect = 0.0;      // max ||U*U - I||
    double max_modulus_defect = 0.0;        // max | |W| - |Z| |
};

// t >= 0
ModifiedProfile correct_plus(const ProfileHistory& ph, double kappa = kappa_unitary);

struct MinusOptions {
    double kappa = kappa_unitary;
    double rho = 0.019;
    double hermitian_tol = 1e-8;
};

// intensity matrices at one (t, k)
Mat2 intensity_S0(const Vec2& Z, double kappa);
Mat2 intensity_S1(const Vec2& Z, const ScatteringMatrix& S, double kappa);
Mat2 intensity_S(const Vec2& Z, const ScatteringMatrix& S, double k, double t, const MinusOptions& opt);

// t <= 0 (times from a time-reversed run, |t| increasing)
ModifiedProfile correct_minus(const ProfileHistory& ph, const ScatteringData& sd, const MinusOptions& opt = {});

// sup over |k| <= k_max of |W(t_b, k) - W(t_a, k)| between two stored times
double cauchy_difference(const ModifiedProfile& mp, double t_a, double t_b,
                         double k_max = std::numeric_limits<double>::infinity());

// int_{a}^{b} g(tau) dtau / (1 + tau) for g linear on [a, b], 0 <= a < b: returns weights of g(a), g(b)
std::pair<double, double> log_weights(double a, double b);

struct OscillatoryParams {
    double alpha = 0.2;
    double rho = 0.019;
};

// c(t, y) = -i e^{-iy^2} h(t, y); b = (sqrt(pi/2) + c) / 4 pi
struct OscillatoryCoeffs {
    double t = 0.0;
    OscillatoryParams params;
    rvec y;
    cvec c, b, h;
};

// smooth even cutoff: 1 on [-5/4, 5/4], 0 outside [-8/5, 8/5]
double cutoff_phi(double x);

OscillatoryCoeffs oscillatory_coeffs(double t, const rvec& y, const OscillatoryParams& p = {});

// c on a fine uniform y grid for a ladder of |t| values; b(t, y) by interpolation
class OscillatoryTable {
public:
    OscillatoryTable(double t_lo, double t_hi, double y_max, const OscillatoryParams& p = {},
                     std::size_t per_decade = 16);
    cplx c(double t, double y) const;
    cplx b(double t, double y) const;
    double y_max() const { return y_max_; }

private:
    OscillatoryParams p_;
    rvec logt_;
    double dy_ = 0.0, y_max_ = 0.0;
    std::size_t ny_half_ = 0;
    std::vector<cvec> c_; // c_[it][iy], y = (iy - ny_half_) dy
    cplx c_row(std::size_t it, double y) const;
};

struct ReducedOdeOptions {
    double dt = 0.05;
    double kappa = kappa_unitary;
    double growth_guard = 0.01;
};

// integrate i dZ/dt = (1/|t|) A(t, k) Z from t_start to each of out_times (same sign, |t| increasing)
std::vector<std::vector<Vec2>> reduced_ode_evolve(const std::vector<Vec2>& Z0, const rvec& k, const ScatteringData& sd,
                                                  const OscillatoryTable& table, double t_start, const rvec& out_times,
                                                  const ReducedOdeOptions& opt = {});

enum class AsymptoticVariant { leading, log_phase };

// predicted u(t, x) on the given points; |x / 2t| must stay inside the profile k range
cvec physical_asymptotics(const ProfileHistory& ph, std::size_t it, const ScatteringData& sd, const rvec& x);
// t > 0 with the limit profile W_inf (pairs over ph.k) and the log-phase correction
cvec physical_asymptotics_log(const std::vector<Vec2>& W_inf, const rvec& k, double t, const rvec& x,
                              double kappa = kappa_unitary);

} // namespace nlsdist
