#pragma once

#include <complex>
#include <vector>

namespace ns2d {

using cplx = std::complex<double>;

// Thin wrapper around cached FFTW plans for M x M complex transforms.
// Plans are created once per size under a lock; execution is reentrant.
class Fft2d {
public:
    explicit Fft2d(int M);

    // out[k] = sum_j in[j] exp(-2 pi i jk/M)  (unnormalized)
    void forward(const cplx* in, cplx* out) const;
    // out[j] = sum_k in[k] exp(+2 pi i jk/M)  (unnormalized)
    void backward(const cplx* in, cplx* out) const;

    int size() const { return M_; }

private:
    int M_;
    void* fwd_;
    void* bwd_;
};

const Fft2d& fft_for(int M);

}  // namespace ns2d
