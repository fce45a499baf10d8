#pragma once

#include <memory>

namespace perieig {

/// In-place DCT-I of fixed length (FFTW REDFT00). The DCT-I basis
/// cos(pi j k / (N-1)) diagonalizes the mirror-Neumann second difference.
/// Plans are created once under a lock; execution is thread-safe.
class Dct1 {
public:
    explicit Dct1(int n);
    ~Dct1();
    Dct1(const Dct1&) = delete;
    Dct1& operator=(const Dct1&) = delete;

    int size() const { return n_; }
    /// Unnormalized transform; applying it twice multiplies by 2(N-1).
    void apply(double* data) const;

private:
    int n_;
    void* plan_;
};

/// Shared plan per length.
std::shared_ptr<const Dct1> dct1_for(int n);

}  // namespace perieig
