#pragma once

#include <Eigen/Dense>

namespace perieig {

/// Upper bound on the number of species; keeps small matrices off the heap.
inline constexpr int kMaxComponents = 16;

using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                               kMaxComponents, kMaxComponents>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxComponents, 1>;

struct SymEigen {
    SmallVec values;   // ascending
    SmallMat vectors;  // columns
};

/// Cyclic Jacobi rotations for a symmetric matrix.
SymEigen jacobi_eigen(const SmallMat& s);

/// Largest eigenvalue of a symmetric matrix. Closed form for n <= 2.
double largest_eigenvalue(const SmallMat& s);

/// exp(scale * s) for symmetric s via its eigendecomposition.
SmallMat sym_exp(const SmallMat& s, double scale);

}  // namespace perieig
