#include "fft.hpp"

#include <mutex>

namespace nlsdist {

namespace {
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace

FftPlan::FftPlan(std::size_t n) : n_(n)
{
    require(n >= 2, "FFT size must be at least 2");
    FftwBuffer a(n), b(n);
    std::lock_guard<std::mutex> lock(planner_mutex()); // the planner is not thread-safe
    auto* pa = reinterpret_cast<fftw_complex*>(a.ptr);
    auto* pb = reinterpret_cast<fftw_complex*>(b.ptr);
    fwd_ = fftw_plan_dft_1d(int(n), pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_1d(int(n), pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!fwd_ || !bwd_) fail(ErrorKind::invalid_argument, "FFTW planning failed");
}

FftPlan::~FftPlan()
{
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
}

void FftPlan::forward(const cplx* in, cplx* out) const
{
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void FftPlan::backward(const cplx* in, cplx* out) const
{
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace nlsdist
