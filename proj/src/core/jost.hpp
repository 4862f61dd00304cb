#pragma once

#include "common.hpp"
#include "potential.hpp"

#include <functional>

namespace nlsdist {

enum class JostSide { plus, minus, both };
enum class JostMode { sweep, picard };

struct JostOptions {
    int derivative_order = 1; // 0..2
    int romberg_levels = 3;   // 1 = plain trapezoid on the given grid
    std::size_t store_stride = 1; // 0 keeps only the integrals
    JostMode mode = JostMode::sweep;
    int picard_max_iter = 400;
    double picard_tol = 1e-14;
};

// Jost modifiers on an (k, x) product grid, row-major over (k, x)
struct JostField {
    UniformGrid solve_grid;
    UniformGrid x_grid; // stored nodes (every store_stride-th node of solve_grid)
    rvec k;
    bool has_plus = false;
    bool has_minus = false;
    int derivative_order = 0;
    std::size_t store_stride = 1;
    int romberg_levels = 1;

    cvec m_plus, m_minus;
    cvec dk_m_plus, dk_m_minus;
    cvec d2k_m_plus, d2k_m_minus;

    // whole-line integrals per k:
    //   int V m_+,  int e^{2ikx} V m_+,  int V m_-,  int e^{-2ikx} V m_-
    cvec int_vm_plus, int_osc_plus, int_vm_minus, int_osc_minus;
    // their first k-derivatives (derivative_order >= 1)
    cvec dk_int_vm_plus, dk_int_osc_plus, dk_int_vm_minus, dk_int_osc_minus;

    std::size_t nx() const { return x_grid.n; }
    std::size_t nk() const { return k.size(); }
    std::size_t idx(std::size_t ik, std::size_t ix) const { return ik * x_grid.n + ix; }
};

using PotentialSampler = std::function<rvec(const UniformGrid&)>;

// Romberg levels refine the grid, so the sampler must evaluate V anywhere
JostField solve_m(const PotentialSampler& V, const UniformGrid& x_grid, const rvec& k, JostSide side,
                  const JostOptions& opt = {});
JostField solve_m(const PotentialSpec& spec, const UniformGrid& x_grid, const rvec& k, JostSide side,
                  const JostOptions& opt = {});
// samples only: no refinement possible, plain trapezoid
JostField solve_m(const rvec& V, const UniformGrid& x_grid, const rvec& k, JostSide side,
                  JostOptions opt = {});

// k-derivatives of D_k(x) = (e^{2ikx} - 1)/(2ik), p = 0..2
cplx kernel_d(double k, double x, int p);

// max over the grid of |m(x,k) - 1 - int_x^inf D(y-x) V m| with a fine trapezoid
double volterra_residual(const JostField& f, const rvec& V_solve_grid);

struct LemmaBoundReport {
    // C(s) for s = 0..derivative_order, plus side and minus side
    std::vector<double> good_plus, bad_plus, good_minus, bad_minus;
    bool finite = true;
};

LemmaBoundReport check_lemma_bounds(const JostField& f, const WeightFunctions& w);

} // namespace nlsdist
