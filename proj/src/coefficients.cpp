#include "perieig/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "perieig/error.hpp"

namespace perieig {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double time_factor(const FourierTerm& term, double t) {
    switch (term.mode) {
        case TimeMode::constant: return 1.0;
        case TimeMode::cosine: return std::cos(kTwoPi * term.m * t);
        case TimeMode::sine: return std::sin(kTwoPi * term.m * t);
    }
    return 1.0;
}

double wrap_unit(double t) {
    double s = t - std::floor(t);
    return s >= 1.0 ? 0.0 : s;
}

}  // namespace

// ---------------------------------------------------------------- entries

CoefficientEntry CoefficientEntry::constant(double c) {
    return fourier({FourierTerm{c, 0, 0, TimeMode::constant}});
}

CoefficientEntry CoefficientEntry::fourier(std::vector<FourierTerm> terms) {
    for (const auto& term : terms) {
        if (term.k < 0) fail(ErrorKind::validation, "Fourier x-mode k must be >= 0");
        if (term.mode != TimeMode::constant && term.m < 1)
            fail(ErrorKind::validation, "Fourier t-mode m must be >= 1");
        if (!std::isfinite(term.c)) fail(ErrorKind::validation, "non-finite Fourier coefficient");
    }
    CoefficientEntry e;
    e.terms_ = std::move(terms);
    return e;
}

CoefficientEntry CoefficientEntry::tabulated(Table table) {
    if (table.nodes < 1 || table.steps < 2 ||
        table.values.size() != static_cast<size_t>(table.nodes) * (table.steps + 1))
        fail(ErrorKind::dimension, "tabulated entry has inconsistent shape");
    for (int j = 0; j < table.nodes; ++j) {
        const double a = table.at(j, 0), b = table.at(j, table.steps);
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
            fail(ErrorKind::validation, "tabulated entry is not periodic at node " + std::to_string(j));
    }
    for (double v : table.values)
        if (!std::isfinite(v)) fail(ErrorKind::validation, "non-finite tabulated value");
    CoefficientEntry e;
    e.table_ = std::move(table);
    return e;
}

bool CoefficientEntry::structurally_zero() const {
    if (table_) return std::all_of(table_->values.begin(), table_->values.end(), [](double v) { return v == 0.0; });
    return std::all_of(terms_.begin(), terms_.end(), [](const FourierTerm& t) { return t.c == 0.0; });
}

bool CoefficientEntry::time_independent() const {
    if (table_) {
        for (int j = 0; j < table_->nodes; ++j)
            for (int m = 1; m <= table_->steps; ++m)
                if (table_->at(j, m) != table_->at(j, 0)) return false;
        return true;
    }
    return std::all_of(terms_.begin(), terms_.end(), [](const FourierTerm& t) {
        return t.c == 0.0 || t.mode == TimeMode::constant;
    });
}

bool CoefficientEntry::space_independent() const {
    if (table_) {
        for (int j = 1; j < table_->nodes; ++j)
            for (int m = 0; m <= table_->steps; ++m)
                if (table_->at(j, m) != table_->at(0, m)) return false;
        return true;
    }
    return std::all_of(terms_.begin(), terms_.end(), [](const FourierTerm& t) { return t.c == 0.0 || t.k == 0; });
}

double CoefficientEntry::eval_fourier(double x, double t, double length) const {
    double s = 0.0;
    for (const auto& term : terms_)
        s += term.c * std::cos(term.k * std::numbers::pi * x / length) * time_factor(term, t);
    return s;
}

// ---------------------------------------------------------------- field

MatrixField::MatrixField(int n, SpatialGrid grid) : n_(n), grid_(grid) {
    if (n < 1 || n > kMaxComponents)
        fail(ErrorKind::dimension, "species count must lie in 1.." + std::to_string(kMaxComponents));
    grid_.validate();
    entries_.assign(static_cast<size_t>(n) * (n + 1) / 2, CoefficientEntry{});
    cache_spatial_factors();
}

int MatrixField::index(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        fail(ErrorKind::dimension, "matrix index out of range");
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i - 1) / 2 + (j - i);
}

void MatrixField::set(int i, int j, CoefficientEntry entry) {
    if (entry.is_tabulated() && entry.table().nodes != grid_.nodes)
        fail(ErrorKind::dimension, "tabulated entry does not match the spatial grid");
    entries_[index(i, j)] = std::move(entry);
    cache_spatial_factors();
}

const CoefficientEntry& MatrixField::entry(int i, int j) const { return entries_[index(i, j)]; }

void MatrixField::cache_spatial_factors() {
    spatial_factors_.assign(entries_.size(), {});
    const int nodes = grid_.nodes;
    for (size_t e = 0; e < entries_.size(); ++e) {
        const auto& terms = entries_[e].terms();
        auto& f = spatial_factors_[e];
        f.resize(terms.size() * nodes);
        for (size_t q = 0; q < terms.size(); ++q)
            for (int j = 0; j < nodes; ++j)
                f[q * nodes + j] = std::cos(terms[q].k * std::numbers::pi * grid_.x(j) / grid_.length);
    }
}

double MatrixField::eval_entry(int i, int j, int node, double t) const {
    if (node < 0 || node >= grid_.nodes) fail(ErrorKind::dimension, "node index out of range");
    const int e = index(i, j);
    const auto& entry = entries_[e];
    const double tt = reversed_ ? -t : t;
    if (entry.is_tabulated()) {
        const Table& tab = entry.table();
        const double s = wrap_unit(tt) * tab.steps;
        int m = static_cast<int>(s);
        if (m >= tab.steps) m = tab.steps - 1;
        const double frac = s - m;
        if (frac == 0.0) return tab.at(node, m);
        return (1.0 - frac) * tab.at(node, m) + frac * tab.at(node, m + 1);
    }
    const auto& terms = entry.terms();
    const auto& f = spatial_factors_[e];
    double s = 0.0;
    for (size_t q = 0; q < terms.size(); ++q)
        s += terms[q].c * f[q * grid_.nodes + node] * time_factor(terms[q], tt);
    return s;
}

SmallMat MatrixField::eval(int node, double t) const {
    SmallMat a(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
            const double v = eval_entry(i, j, node, t);
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

MatrixField MatrixField::regrid(const SpatialGrid& grid) const {
    if (std::abs(grid.length - grid_.length) > 1e-12 * grid_.length)
        fail(ErrorKind::dimension, "regrid keeps the domain length");
    MatrixField out(n_, grid);
    out.reversed_ = reversed_;
    out.entries_ = entries_;
    for (auto& entry : out.entries_) {
        if (!entry.is_tabulated() || grid.nodes == grid_.nodes) continue;
        // Linear interpolation in x, column by column.
        const Table& src = entry.table();
        Table dst{grid.nodes, src.steps, std::vector<double>(static_cast<size_t>(grid.nodes) * (src.steps + 1))};
        for (int j = 0; j < grid.nodes; ++j) {
            const double s = grid.x(j) / grid_.h();
            const int k = std::min(static_cast<int>(s), grid_.nodes - 2);
            const double f = s - k;
            for (int m = 0; m <= src.steps; ++m)
                dst.values[static_cast<size_t>(j) * (src.steps + 1) + m] =
                    (1.0 - f) * src.at(k, m) + f * src.at(k + 1, m);
        }
        entry = CoefficientEntry::tabulated(std::move(dst));
    }
    out.cache_spatial_factors();
    return out;
}

MatrixField MatrixField::time_reversed() const {
    MatrixField out = *this;
    out.reversed_ = !reversed_;
    return out;
}

bool MatrixField::time_independent() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.time_independent(); });
}

bool MatrixField::space_independent() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.space_independent(); });
}

// ---------------------------------------------------------------- diffusion / problem

double DiffusionMatrix::min() const { return *std::min_element(d.begin(), d.end()); }
double DiffusionMatrix::max() const { return *std::max_element(d.begin(), d.end()); }

void DiffusionMatrix::validate(int n) const {
    if (size() != n)
        fail(ErrorKind::dimension, "diffusion has " + std::to_string(size()) + " rates, expected " + std::to_string(n));
    for (double v : d)
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::validation, "diffusion rates must be positive");
}

void Problem::validate() const {
    if (A.size() < 1) fail(ErrorKind::dimension, "empty coefficient field");
    D.validate(A.size());
    time.validate();
}

// ---------------------------------------------------------------- Perron

PerronPair perron(const SmallMat& s) {
    const int n = static_cast<int>(s.rows());
    if (n < 1 || s.cols() != n) fail(ErrorKind::dimension, "perron: matrix must be square");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(s(i, j) - s(j, i)) > 1e-12 * scale)
                fail(ErrorKind::validation, "perron: matrix is not symmetric");
            if (s(i, j) < -1e-13 * scale)
                fail(ErrorKind::validation, "perron: negative off-diagonal entry");
        }
    PerronPair out;
    const SymEigen eig = jacobi_eigen(s);
    out.value = eig.values(n - 1);
    SmallVec v = eig.vectors.col(n - 1);
    if (v.sum() < 0.0) v = -v;
    v = v.cwiseMax(0.0);
    v /= v.norm();
    out.vector = v;
    out.residual = (s * v - out.value * v).norm();
    return out;
}

double hamiltonian(double p, const SmallMat& a, const DiffusionMatrix& D) {
    SmallMat m = a;
    for (int i = 0; i < m.rows(); ++i) m(i, i) += D.d[i] * p * p;
    return largest_eigenvalue(m);
}

double hamiltonian(double p, int node, double t, const MatrixField& A, const DiffusionMatrix& D) {
    return hamiltonian(p, A.eval(node, t), D);
}

// ---------------------------------------------------------------- averages

StaticField temporal_average(const MatrixField& A, const TimeGrid& time) {
    time.validate();
    const int n = A.size(), nodes = A.grid().nodes, M = time.steps;
    StaticField out(nodes, SmallMat::Zero(n, n));
    std::vector<double> samples(M + 1);
    for (int j = 0; j < nodes; ++j)
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                for (int m = 0; m <= M; ++m) samples[m] = A.eval_entry(a, b, j, time.t(m));
                const double v = integrate_time(samples).value;
                out[j](a, b) = v;
                out[j](b, a) = v;
            }
    return out;
}

SmallMat spatial_average(const MatrixField& A, double t) {
    const auto& grid = A.grid();
    const auto w = trapezoid_weights(grid);
    const int n = A.size();
    SmallMat out = SmallMat::Zero(n, n);
    for (int j = 0; j < grid.nodes; ++j) out += w[j] * A.eval(j, t);
    return out / grid.length;
}

TimeMatrixFn spatial_average(const MatrixField& A) {
    return [A](double t) { return spatial_average(A, t); };
}

SmallMat full_average(const MatrixField& A, const TimeGrid& time) {
    const auto hat = temporal_average(A, time);
    const auto w = trapezoid_weights(A.grid());
    SmallMat out = SmallMat::Zero(A.size(), A.size());
    for (size_t j = 0; j < hat.size(); ++j) out += w[j] * hat[j];
    return out / A.grid().length;
}

TimeMatrixFn at_node(const MatrixField& A, int node) {
    return [&A, node](double t) { return A.eval(node, t); };
}

// ---------------------------------------------------------------- constants

double LimitConstants::ordering_violation() const {
    const double gaps[] = {C_under - C_star, C_star - C_under_plus, C_star - C_star_plus,
                           C_under_plus - C_bar, C_star_plus - C_bar};
    double worst = 0.0;
    for (double g : gaps) worst = std::max(worst, g);
    return worst;
}

LimitConstants limit_constants(const MatrixField& A, const TimeGrid& time) {
    time.validate();
    const int nodes = A.grid().nodes, M = time.steps;
    std::vector<double> mu(static_cast<size_t>(nodes) * (M + 1));
    for (int j = 0; j < nodes; ++j)
        for (int m = 0; m <= M; ++m)
            mu[static_cast<size_t>(j) * (M + 1) + m] = largest_eigenvalue(A.eval(j, time.t(m)));

    LimitConstants c;
    std::vector<double> column(M + 1), row(M + 1);
    for (int m = 0; m <= M; ++m) {
        double best = -INFINITY;
        for (int j = 0; j < nodes; ++j) best = std::max(best, mu[static_cast<size_t>(j) * (M + 1) + m]);
        column[m] = best;
    }
    c.C_under = -integrate_time(column).value;

    double best_int = -INFINITY;
    for (int j = 0; j < nodes; ++j) {
        std::copy_n(mu.begin() + static_cast<ptrdiff_t>(j) * (M + 1), M + 1, row.begin());
        const double v = integrate_time(row).value;
        if (v > best_int) {
            best_int = v;
            c.argmax_node_star = j;
        }
    }
    c.C_star = -best_int;

    const auto hat = temporal_average(A, time);
    double best_hat = -INFINITY;
    for (int j = 0; j < nodes; ++j) {
        const double v = largest_eigenvalue(hat[j]);
        if (v > best_hat) {
            best_hat = v;
            c.argmax_node_star_plus = j;
        }
    }
    c.C_star_plus = -best_hat;

    for (int m = 0; m <= M; ++m) column[m] = largest_eigenvalue(spatial_average(A, time.t(m)));
    c.C_under_plus = -integrate_time(column).value;

    c.C_bar = -largest_eigenvalue(full_average(A, time));
    return c;
}

// ---------------------------------------------------------------- validation

ValidationReport validate(const MatrixField& A, const TimeGrid& time) {
    ValidationReport r;
    const int n = A.size(), nodes = A.grid().nodes, M = time.steps;
    std::vector<std::vector<bool>> support(n, std::vector<bool>(n, false));

    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
            for (int j = 0; j < nodes; ++j)
                for (int m = 0; m < M; ++m) {
                    const double t = time.t(m);
                    const double v = A.eval_entry(i, k, j, t);
                    if (v != 0.0) support[i][k] = support[k][i] = true;
                    if (v < 0.0 && r.ok) {
                        r.ok = false;
                        r.witness = Witness{i, k, j, t, v};
                        std::ostringstream msg;
                        msg << "not essentially positive: a_" << i + 1 << k + 1 << " = " << v
                            << " at x = " << A.grid().x(j) << ", t = " << t;
                        r.message = msg.str();
                    }
                }

    std::vector<int> label(n, -1);
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        const int id = static_cast<int>(r.components.size());
        r.components.emplace_back();
        std::vector<int> stack{s};
        label[s] = id;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            r.components[id].push_back(u);
            for (int v = 0; v < n; ++v)
                if (support[u][v] && label[v] < 0) {
                    label[v] = id;
                    stack.push_back(v);
                }
        }
        std::sort(r.components[id].begin(), r.components[id].end());
    }

    if (r.ok && r.components.size() > 1) {
        r.ok = false;
        std::ostringstream msg;
        msg << "not fully coupled: species split into";
        for (const auto& comp : r.components) {
            msg << " {";
            for (size_t q = 0; q < comp.size(); ++q) msg << (q ? "," : "") << comp[q] + 1;
            msg << "}";
        }
        r.message = msg.str();
    }
    if (r.ok) r.message = "valid";
    return r;
}

}  // namespace perieig
