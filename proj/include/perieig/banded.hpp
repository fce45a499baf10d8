#pragma once

#include <span>
#include <vector>

namespace perieig {

/// Symmetric band matrix holding the lower triangle: entry (i, j) with
/// 0 <= i - j <= bandwidth.
class BandedSymmetric {
public:
    BandedSymmetric() = default;
    BandedSymmetric(int size, int bandwidth)
        : size_(size), bw_(bandwidth), data_(static_cast<size_t>(size) * (bandwidth + 1), 0.0) {}

    int size() const { return size_; }
    int bandwidth() const { return bw_; }

    double& lower(int i, int j) { return data_[static_cast<size_t>(i) * (bw_ + 1) + (i - j)]; }
    double lower(int i, int j) const { return data_[static_cast<size_t>(i) * (bw_ + 1) + (i - j)]; }

    void multiply(std::span<const double> x, std::span<double> y) const;
    double infinity_norm() const;
    void shift_diagonal(double s);

private:
    int size_ = 0;
    int bw_ = 0;
    std::vector<double> data_;
};

/// In-place band Cholesky (A = L L^T). Returns false when A is not positive definite.
bool cholesky_banded(BandedSymmetric& a);

/// Solves L L^T x = b in place using a factor from cholesky_banded.
void cholesky_solve(const BandedSymmetric& factor, std::span<double> b);

}  // namespace perieig
