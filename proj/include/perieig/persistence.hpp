#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perieig/levelset.hpp"

namespace perieig {

/// u_t = rho D u_xx + M(x,t) u + diag(c_i(x,t)) u, with M a mutation matrix:
/// essentially positive, fully coupled, and m_ii = -sum_{j != i} m_ij.
struct MutationModel {
    MatrixField M;
    std::vector<CoefficientEntry> rates;  // c_i
    DiffusionMatrix D;
    TimeGrid time{};
};

/// Throws a validation error naming the first row whose diagonal does not
/// balance its off-diagonal mass (largest violation over the sample grid).
void validate_mutation(const MutationModel& model, double tol = 1e-10);

/// A = M + diag(c_i). Fourier entries add term lists; tables are resampled.
Problem assemble_problem(const MutationModel& model);

/// Sum of two entries as a single entry on the given grids.
CoefficientEntry add_entries(const CoefficientEntry& a, const CoefficientEntry& b, const SpatialGrid& space,
                             const TimeGrid& time);

enum class RegionVerdict { empty, full, bounded };
const char* to_string(RegionVerdict v);

struct RegionReport {
    RegionVerdict verdict = RegionVerdict::empty;
    int case_index = 0;  // 1..5 for bounded regions
    LimitConstants constants;
    std::optional<LevelCurve> curve;  // the boundary omega_bar(rho), level 0
    std::string note;
};

/// Case of the persistence-region split from the position of 0 among the constants.
int region_case(const LimitConstants& c);

RegionReport persistence_region(const MutationModel& model, const TracePolicy& policy = {},
                                const SolveOptions& solve = {}, double sign_tol = 1e-9);

}  // namespace perieig
