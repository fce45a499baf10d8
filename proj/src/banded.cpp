#include "perieig/banded.hpp"

#include <algorithm>
#include <cmath>

namespace perieig {

void BandedSymmetric::multiply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < size_; ++i) {
        double s = 0.0;
        const int lo = std::max(0, i - bw_), hi = std::min(size_ - 1, i + bw_);
        for (int j = lo; j <= i; ++j) s += lower(i, j) * x[j];
        for (int j = i + 1; j <= hi; ++j) s += lower(j, i) * x[j];
        y[i] = s;
    }
}

double BandedSymmetric::infinity_norm() const {
    double best = 0.0;
    for (int i = 0; i < size_; ++i) {
        double s = 0.0;
        const int lo = std::max(0, i - bw_), hi = std::min(size_ - 1, i + bw_);
        for (int j = lo; j <= i; ++j) s += std::abs(lower(i, j));
        for (int j = i + 1; j <= hi; ++j) s += std::abs(lower(j, i));
        best = std::max(best, s);
    }
    return best;
}

void BandedSymmetric::shift_diagonal(double s) {
    for (int i = 0; i < size_; ++i) lower(i, i) += s;
}

bool cholesky_banded(BandedSymmetric& a) {
    const int n = a.size(), bw = a.bandwidth();
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - bw);
        for (int j = lo; j <= i; ++j) {
            double s = a.lower(i, j);
            for (int k = std::max(lo, j - bw); k < j; ++k) s -= a.lower(i, k) * a.lower(j, k);
            if (j == i) {
                if (!(s > 0.0)) return false;
                a.lower(i, i) = std::sqrt(s);
            } else {
                a.lower(i, j) = s / a.lower(j, j);
            }
        }
    }
    return true;
}

void cholesky_solve(const BandedSymmetric& f, std::span<double> b) {
    const int n = f.size(), bw = f.bandwidth();
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = std::max(0, i - bw); k < i; ++k) s -= f.lower(i, k) * b[k];
        b[i] = s / f.lower(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k <= std::min(n - 1, i + bw); ++k) s -= f.lower(k, i) * b[k];
        b[i] = s / f.lower(i, i);
    }
}

}  // namespace perieig
