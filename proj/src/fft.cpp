#include "ns2d/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace ns2d {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft2d::Fft2d(int M) : M_(M) {
    if (M <= 0) throw std::invalid_argument("Fft2d: size must be positive");
    std::vector<cplx> a(static_cast<std::size_t>(M) * M), b(a.size());
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd_ = fftw_plan_dft_2d(M, M, pa, pb, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_2d(M, M, pa, pb, FFTW_BACKWARD, flags);
    if (!fwd_ || !bwd_) throw std::runtime_error("Fft2d: plan creation failed");
}

void Fft2d::forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void Fft2d::backward(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

const Fft2d& fft_for(int M) {
    static std::map<int, std::unique_ptr<Fft2d>> cache;
    static std::mutex cache_mutex;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(M);
    if (it == cache.end()) it = cache.emplace(M, std::make_unique<Fft2d>(M)).first;
    return *it->second;
}

}  // namespace ns2d
