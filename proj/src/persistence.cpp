#include "perieig/persistence.hpp"

#include <cmath>
#include <sstream>

#include "perieig/error.hpp"

namespace perieig {

void validate_mutation(const MutationModel& model, double tol) {
    const MatrixField& M = model.M;
    const int n = M.size();
    if (static_cast<int>(model.rates.size()) != n)
        fail(ErrorKind::dimension, "mutation model needs one rate per phenotype");
    model.D.validate(n);
    const ValidationReport report = validate(M, model.time);
    if (!report.ok) fail(ErrorKind::validation, "mutation matrix " + report.message);

    int worst_row = -1, worst_node = 0;
    double worst = 0.0, worst_t = 0.0;
    for (int j = 0; j < M.grid().nodes; ++j)
        for (int m = 0; m < model.time.steps; ++m) {
            const double t = model.time.t(m);
            const SmallMat a = M.eval(j, t);
            for (int i = 0; i < n; ++i) {
                const double row = a.row(i).sum();  // m_ii + sum_{j != i} m_ij
                const double scale = a.row(i).cwiseAbs().sum();
                const double v = std::abs(row);
                if (v > tol * std::max(1.0, scale) && v > worst) {
                    worst = v;
                    worst_row = i;
                    worst_node = j;
                    worst_t = t;
                }
            }
        }
    if (worst_row >= 0) {
        std::ostringstream msg;
        msg << "mutation structure violated: m_" << worst_row + 1 << worst_row + 1 << " != -sum_{j!=i} m_"
            << worst_row + 1 << "j (row sum " << worst << " at x = " << M.grid().x(worst_node) << ", t = " << worst_t
            << ")";
        fail(ErrorKind::validation, msg.str());
    }
}

CoefficientEntry add_entries(const CoefficientEntry& a, const CoefficientEntry& b, const SpatialGrid& space,
                             const TimeGrid& time) {
    if (!a.is_tabulated() && !b.is_tabulated()) {
        auto terms = a.terms();
        terms.insert(terms.end(), b.terms().begin(), b.terms().end());
        return CoefficientEntry::fourier(std::move(terms));
    }
    // Resample both on (space, time) through a scratch 1 x 1 field per entry.
    auto sample = [&](const CoefficientEntry& e) {
        MatrixField f(1, space);
        f.set(0, 0, e);
        return f;
    };
    const MatrixField fa = sample(a), fb = sample(b);
    Table table{space.nodes, time.steps, {}};
    table.values.resize(static_cast<size_t>(space.nodes) * (time.steps + 1));
    for (int j = 0; j < space.nodes; ++j)
        for (int m = 0; m <= time.steps; ++m) {
            const double t = m == time.steps ? 0.0 : time.t(m);
            table.values[static_cast<size_t>(j) * (time.steps + 1) + m] =
                fa.eval_entry(0, 0, j, t) + fb.eval_entry(0, 0, j, t);
        }
    return CoefficientEntry::tabulated(std::move(table));
}

Problem assemble_problem(const MutationModel& model) {
    validate_mutation(model);
    const int n = model.M.size();
    Problem p{MatrixField(n, model.M.grid()), model.D, model.time};
    for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k)
            p.A.set(i, k, i == k ? add_entries(model.M.entry(i, i), model.rates[i], model.M.grid(), model.time)
                                 : model.M.entry(i, k));
    return p;
}

const char* to_string(RegionVerdict v) {
    switch (v) {
        case RegionVerdict::empty: return "empty";
        case RegionVerdict::full: return "full";
        case RegionVerdict::bounded: return "bounded-by-curve";
    }
    return "unknown";
}

int region_case(const LimitConstants& c) {
    if (!(c.C_under < 0 && 0 < c.C_bar)) return 0;
    if (0 <= c.C_star) return 1;
    if (0 < std::min(c.C_star_plus, c.C_under_plus)) return 2;
    if (0 >= std::max(c.C_star_plus, c.C_under_plus)) return 5;
    return c.C_star_plus < c.C_under_plus ? 3 : 4;
}

RegionReport persistence_region(const MutationModel& model, const TracePolicy& policy, const SolveOptions& solve,
                                double sign_tol) {
    const Problem problem = assemble_problem(model);
    RegionReport rep;
    rep.constants = limit_constants(problem.A, problem.time);
    const auto& c = rep.constants;
    if (c.C_under >= -sign_tol) {
        rep.verdict = RegionVerdict::empty;
        rep.note = "C_under >= 0: lambda >= 0 everywhere";
        return rep;
    }
    if (c.C_bar <= sign_tol) {
        rep.verdict = RegionVerdict::full;
        rep.note = "C_bar <= 0: lambda < 0 everywhere";
        return rep;
    }
    rep.verdict = RegionVerdict::bounded;
    rep.case_index = region_case(c);
    SpectralOracle oracle(problem, solve);
    try {
        rep.curve = trace_level_set(oracle, 0.0, policy);
        rep.note = "boundary traced";
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::range) throw;
        rep.note = std::string("boundary not traced: ") + e.what();
    }
    return rep;
}

}  // namespace perieig
