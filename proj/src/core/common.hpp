#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlsdist {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt_2pi = 2.50662827463100050242;

enum class ErrorKind { invalid_argument, io, convergence, hypothesis, verification };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool cond, const std::string& msg)
{
    if (!cond) fail(ErrorKind::invalid_argument, msg);
}

// x_n = x_min + n*h, n = 0..n-1, both ends included
struct UniformGrid {
    double x_min = -1.0;
    double x_max = 1.0;
    std::size_t n = 2;

    double step() const { return (x_max - x_min) / double(n - 1); }
    double at(std::size_t i) const { return x_min + double(i) * step(); }
    rvec points() const
    {
        rvec p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = at(i);
        return p;
    }
};

// symmetric staggered grid, k = (idx - n_half + 1/2) dk for idx in [0, 2 n_half)
struct KGrid {
    double dk = 0.01;
    std::size_t n_half = 0;

    std::size_t size() const { return 2 * n_half; }
    double at(std::size_t idx) const { return (double(idx) - double(n_half) + 0.5) * dk; }
    double positive(std::size_t j) const { return (double(j) + 0.5) * dk; }
    std::size_t mirror(std::size_t idx) const { return size() - 1 - idx; }
    double k_max() const { return positive(n_half - 1); }
};

inline double japanese(double x) { return std::sqrt(1.0 + x * x); }

} // namespace nlsdist
