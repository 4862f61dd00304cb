#pragma once

#include "common.hpp"
#include "fft.hpp"
#include "jost.hpp"
#include "potential.hpp"
#include "scattering.hpp"

#include <limits>
#include <memory>

namespace nlsdist {

struct BasisOptions {
    // k grid has about oversample * n_x points (rounded to even); above 1 keeps the
    // reflected-wave kernels from aliasing across the grid ends
    double oversample = 1.25;
    double k_cut = std::numeric_limits<double>::infinity();
    // band never exceeds this fraction of pi / dx; modes near the grid Nyquist make
    // the split-step unstable in the distorted basis
    double max_band_fraction = 0.8;
    double fine_kh = 0.25;        // k_max * (window solve step) target
    double fine_step_max = 0.025; // resolution of V inside the window
    int romberg_levels = 3;
    double support_tol = 1e-16;
    double window_pad = 0.5;
};

struct DistortedSpectrum {
    KGrid grid;
    cvec values;
};

double chi_plus(double x);
inline double chi_minus(double x) { return 1.0 - chi_plus(x); }

// Generalized eigenfunctions on a uniform x grid with the FFT-compatible staggered
// k grid dk = 2 pi / (M dx), M = fft_size().  Outside a window around supp V the
// eigenfunctions are exact plane-wave combinations, so both transforms reduce to
// FFTs plus a dense product over the window nodes.
class DistortedBasis {
public:
    DistortedBasis(const UniformGrid& x, const JostField& window, const ScatteringData& sd,
                   const BasisOptions& opt);
    static DistortedBasis flat(const UniformGrid& x, const BasisOptions& opt = {});

    const UniformGrid& x_grid() const { return x_; }
    const KGrid& k_grid() const { return kg_; }
    std::size_t fft_size() const { return M_; }
    std::size_t band_half() const { return nb_; }
    bool in_band(std::size_t idx) const;
    double k_band_max() const { return nb_ ? kg_.positive(nb_ - 1) : 0.0; }
    bool has_window() const { return has_window_; }
    std::size_t window_begin() const { return w0_; }
    std::size_t window_end() const { return w1_; } // inclusive
    const ScatteringData& scattering() const { return sd_; }
    double x_weight() const { return x_.step(); }
    double k_weight() const { return kg_.dk; }
    const BasisOptions& options() const { return opt_; }

    // modifiers at grid node n and positive band index j (k = kgrid.positive(j))
    cplx m_plus(std::size_t n, std::size_t j) const;
    cplx m_minus(std::size_t n, std::size_t j) const;

    cplx psi(std::size_t n, std::size_t idx) const;
    // parts of sqrt(2 pi) psi
    cplx psi_S(std::size_t n, std::size_t idx) const;
    cplx psi_L(std::size_t n, std::size_t idx) const;
    cplx psi_R(std::size_t n, std::size_t idx) const;

    DistortedSpectrum forward(const cvec& f) const;
    cvec inverse(const DistortedSpectrum& s) const;
    void forward(const cplx* f, cplx* out) const;  // out has fft_size() entries
    void inverse(const cplx* in, cplx* out) const; // out has x_grid().n entries

private:
    DistortedBasis() = default;
    void init_grids(const UniformGrid& x, const BasisOptions& opt);
    std::size_t pos_index(std::size_t idx) const; // band index of |k|
    cplx region_S(const cplx* X, std::size_t idx) const;

    UniformGrid x_;
    KGrid kg_;
    BasisOptions opt_;
    std::size_t N_ = 0, M_ = 0, nb_ = 0;
    bool has_window_ = false;
    std::size_t w0_ = 0, w1_ = 0, nw_ = 0;
    ScatteringData sd_;
    cvec m_plus_, m_minus_;   // [j * nw + i]
    // conj(sqrt(2 pi) psi) on window nodes for +k_j and -k_j, split into re/im for the dense products
    rvec kp_re_, kp_im_, km_re_, km_im_;
    cvec twist_, phase_;
    std::shared_ptr<FftPlan> plan_;
};

DistortedBasis build_basis(const UniformGrid& x, const JostField& window, const ScatteringData& sd,
                           const BasisOptions& opt = {});

struct WindowPlan {
    std::size_t w0 = 0, w1 = 0;
    std::size_t refine = 1;
    UniformGrid solve_grid;
    rvec k;
};

// window placement and Jost solve grid for a potential on the propagation grid
WindowPlan plan_window(const PotentialSpec& spec, const UniformGrid& x, const BasisOptions& opt);
std::size_t fft_size_for(std::size_t n, double oversample);
// min(k_cut, max_band_fraction * pi / dx)
double effective_k_cut(const UniformGrid& x, const BasisOptions& opt);

DistortedBasis make_basis(const PotentialSpec& spec, const UniformGrid& x, const BasisOptions& opt = {});

// (-d^2/dx^2 + V) f with a 4th-order stencil, zero outside the grid
cvec apply_L(const cvec& f, const rvec& V, double h);
double diagonalization_residual(const cvec& f, const DistortedBasis& basis, const rvec& V);

DistortedSpectrum linear_propagate(const DistortedSpectrum& s, double t);

// dk * (2 t_max k_max + x_max) < pi / 4
bool propagation_resolved(const DistortedBasis& b, double t_max);

double l2_norm(const cvec& f, double w);

} // namespace nlsdist
