#pragma once

// Shared helpers for the unit tests. The dense builders here are written
// independently of the library kernels and serve as oracles.

#include <string>

#include <Eigen/Dense>

#include "perieig/config.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(PERIEIG_FIXTURE_DIR) + "/" + name; }

inline perieig::Problem load_problem(const std::string& name) {
    return perieig::build_problem(perieig::load_config(fixture(name)));
}

inline perieig::ProblemConfig parse(const std::string& text) { return perieig::parse_config(text); }

/// Mirror-Neumann second difference on `nodes` points of spacing h, as a dense
/// (nonsymmetric) matrix: ghost values u_{-1} = u_1 and u_N = u_{N-2}.
inline Eigen::MatrixXd dense_laplacian(int nodes, double h) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nodes, nodes);
    for (int j = 0; j < nodes; ++j) {
        L(j, j) = -2.0;
        if (j > 0) L(j, j - 1) += 1.0;
        if (j < nodes - 1) L(j, j + 1) += 1.0;
    }
    L(0, 1) = 2.0;
    L(nodes - 1, nodes - 2) = 2.0;
    return L / (h * h);
}

}  // namespace testing
