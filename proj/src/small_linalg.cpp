#include "perieig/small_linalg.hpp"

#include <algorithm>

#include <cmath>
#include <numeric>
#include <vector>

namespace perieig {

SymEigen jacobi_eigen(const SmallMat& s_in) {
    const int n = static_cast<int>(s_in.rows());
    SmallMat a = s_in;
    SmallMat v = SmallMat::Identity(n, n);
    const double scale = std::max(a.norm(), 1e-300);

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-16 * scale) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    SymEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        out.values(k) = a(order[k], order[k]);
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

double largest_eigenvalue(const SmallMat& s) {
    const auto n = s.rows();
    if (n == 1) return s(0, 0);
    if (n == 2) {
        const double mean = 0.5 * (s(0, 0) + s(1, 1));
        const double half = 0.5 * (s(0, 0) - s(1, 1));
        return mean + std::hypot(half, 0.5 * (s(0, 1) + s(1, 0)));
    }
    return jacobi_eigen(s).values(n - 1);
}

SmallMat sym_exp(const SmallMat& s, double scale) {
    const int n = static_cast<int>(s.rows());
    if (n == 1) {
        SmallMat e(1, 1);
        e(0, 0) = std::exp(scale * s(0, 0));
        return e;
    }
    const SymEigen eig = jacobi_eigen(s);
    SmallVec ex(n);
    for (int k = 0; k < n; ++k) ex(k) = std::exp(scale * eig.values(k));
    return eig.vectors * ex.asDiagonal() * eig.vectors.transpose();
}

}  // namespace perieig
