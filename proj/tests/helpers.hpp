#pragma once

#include "common.hpp"
#include "potential.hpp"

namespace nlsdist {
inline const cplx I1(0.0, 1.0);
}

namespace testutil {

using namespace nlsdist;

inline PotentialSpec make(PotentialFamily f, double amplitude, double width, UniformGrid g)
{
    PotentialSpec p;
    p.family = f;
    p.amplitude = amplitude;
    p.width = width;
    p.grid = g;
    return p;
}

inline rvec staggered(double dk, double k_max)
{
    rvec k;
    for (std::size_t j = 0; (double(j) + 0.5) * dk <= k_max * (1.0 + 1e-12); ++j) k.push_back((double(j) + 0.5) * dk);
    return k;
}

inline double sup_diff(const cvec& a, const cvec& b)
{
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

} // namespace testutil
