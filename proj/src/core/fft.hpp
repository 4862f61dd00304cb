#pragma once

#include "common.hpp"

#include <fftw3.h>
#include <memory>

namespace nlsdist {

// Thin RAII wrapper; plans use FFTW_ESTIMATE so results do not depend on timing.
// execute() goes through the new-array interface and is safe to call concurrently.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const { return n_; }
    // unnormalized: forward sums e^{-2 pi i q n / N}, backward e^{+...}
    void forward(const cplx* in, cplx* out) const;
    void backward(const cplx* in, cplx* out) const;

private:
    std::size_t n_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : ptr(reinterpret_cast<cplx*>(fftw_malloc(sizeof(cplx) * n))), size(n)
    {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    cplx* ptr;
    std::size_t size;
    cplx& operator[](std::size_t i) { return ptr[i]; }
    const cplx& operator[](std::size_t i) const { return ptr[i]; }
};

} // namespace nlsdist
