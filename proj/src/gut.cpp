#include "sass/gut.hpp"

#include <algorithm>
#include <cmath>

namespace sass {

namespace {

constexpr double kExploitTol = 1e-6;

double dot_row(const Matrix& m, const std::vector<double>& y, int i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m.at(i, j) * y[j];
    return s;
}

double dot_col(const Matrix& m, const std::vector<double>& x, int j) {
    double s = 0.0;
    for (int i = 0; i < m.rows; ++i) s += m.at(i, j) * x[i];
    return s;
}

// Solves A z = b in place by Gaussian elimination with partial pivoting.
// Returns false when the system is (numerically) singular.
bool solve_linear(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double>& out) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-12) return false;
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (int r = c + 1; r < n; ++r) {
            double f = A[r][c] / A[c][c];
            if (f == 0.0) continue;
            for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    out.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= A[r][k] * out[k];
        out[r] = s / A[r][r];
    }
    return true;
}

// Next k-combination of {0..n-1} in lexicographic order; false when done.
bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::vector<int> first_combination(int k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    return idx;
}

// Pure saddle point scan, exact arithmetic (comparisons + copy only).
std::optional<GameSolution> find_saddle(const Matrix& m) {
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
            double v = m.at(i, j);
            bool row_min = true, col_max = true;
            for (int jj = 0; jj < m.cols && row_min; ++jj)
                if (m.at(i, jj) < v) row_min = false;
            for (int ii = 0; ii < m.rows && col_max; ++ii)
                if (m.at(ii, j) > v) col_max = false;
            if (row_min && col_max) {
                GameSolution s;
                s.row.p.assign(m.rows, 0.0);
                s.col.p.assign(m.cols, 0.0);
                s.row.p[i] = 1.0;
                s.col.p[j] = 1.0;
                s.value = v;
                return s;
            }
        }
    }
    return std::nullopt;
}

// Tries the square support pair (R, C): both players indifferent across the
// opponent support, valid probabilities, no profitable pure deviation.
std::optional<GameSolution> try_support(const Matrix& m, const std::vector<int>& R, const std::vector<int>& C) {
    const int k = static_cast<int>(R.size());
    const double tol = 1e-9;

    // Unknowns (y_C, v): rows in R indifferent, y sums to 1.
    std::vector<std::vector<double>> A(k + 1, std::vector<double>(k + 1, 0.0));
    std::vector<double> b(k + 1, 0.0);
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) A[r][c] = m.at(R[r], C[c]);
        A[r][k] = -1.0;
    }
    for (int c = 0; c < k; ++c) A[k][c] = 1.0;
    b[k] = 1.0;
    std::vector<double> yv;
    if (!solve_linear(A, b, yv)) return std::nullopt;

    // Unknowns (x_R, v): cols in C indifferent, x sums to 1.
    std::vector<std::vector<double>> B(k + 1, std::vector<double>(k + 1, 0.0));
    std::vector<double> c2(k + 1, 0.0);
    for (int c = 0; c < k; ++c) {
        for (int r = 0; r < k; ++r) B[c][r] = m.at(R[r], C[c]);
        B[c][k] = -1.0;
    }
    for (int r = 0; r < k; ++r) B[k][r] = 1.0;
    c2[k] = 1.0;
    std::vector<double> xv;
    if (!solve_linear(B, c2, xv)) return std::nullopt;

    double v = yv[k];
    if (std::abs(v - xv[k]) > 1e-7) return std::nullopt;

    GameSolution s;
    s.row.p.assign(m.rows, 0.0);
    s.col.p.assign(m.cols, 0.0);
    for (int i = 0; i < k; ++i) {
        if (xv[i] < -tol || yv[i] < -tol) return std::nullopt;
        s.row.p[R[i]] = std::max(xv[i], 0.0);
        s.col.p[C[i]] = std::max(yv[i], 0.0);
    }
    double sx = 0.0, sy = 0.0;
    for (double p : s.row.p) sx += p;
    for (double p : s.col.p) sy += p;
    for (double& p : s.row.p) p /= sx;
    for (double& p : s.col.p) p /= sy;
    s.value = v;

    // Optimality outside the supports.
    for (int i = 0; i < m.rows; ++i)
        if (dot_row(m, s.col.p, i) > v + tol) return std::nullopt;
    for (int j = 0; j < m.cols; ++j)
        if (dot_col(m, s.row.p, j) < v - tol) return std::nullopt;
    return s;
}

std::optional<GameSolution> solve_by_enumeration(const Matrix& norm, double scale, const Matrix& original) {
    const int kmax = std::min(norm.rows, norm.cols);
    for (int k = 2; k <= kmax; ++k) {
        auto R = first_combination(k);
        do {
            auto C = first_combination(k);
            do {
                auto s = try_support(norm, R, C);
                if (s) {
                    s->value *= scale;
                    if (exploitability(original, s->row, s->col) <= kExploitTol) return s;
                }
            } while (next_combination(C, norm.cols));
        } while (next_combination(R, norm.rows));
    }
    return std::nullopt;  // numerically degenerate; caller falls back
}

// Regret matching+ with alternating updates and linearly weighted averaging.
GameSolution solve_by_regret_matching(const Matrix& m) {
    const int nr = m.rows, nc = m.cols;
    std::vector<double> reg_row(nr, 0.0), reg_col(nc, 0.0);
    std::vector<double> avg_row(nr, 0.0), avg_col(nc, 0.0);
    std::vector<double> x(nr, 1.0 / nr), y(nc, 1.0 / nc);

    auto normalize_positive = [](const std::vector<double>& reg, std::vector<double>& out) {
        double s = 0.0;
        for (double r : reg) s += std::max(r, 0.0);
        if (s <= 0.0) {
            out.assign(reg.size(), 1.0 / static_cast<double>(reg.size()));
        } else {
            for (size_t i = 0; i < reg.size(); ++i) out[i] = std::max(reg[i], 0.0) / s;
        }
    };

    GameSolution best;
    double best_exp = std::numeric_limits<double>::infinity();
    const long max_iters = 4000000;
    for (long t = 1; t <= max_iters; ++t) {
        normalize_positive(reg_row, x);
        double v_row = 0.0;
        std::vector<double> u_row(nr);
        for (int i = 0; i < nr; ++i) u_row[i] = dot_row(m, y, i);
        for (int i = 0; i < nr; ++i) v_row += x[i] * u_row[i];
        for (int i = 0; i < nr; ++i) reg_row[i] = std::max(reg_row[i] + u_row[i] - v_row, 0.0);

        normalize_positive(reg_col, y);
        double v_col = 0.0;
        std::vector<double> u_col(nc);
        for (int j = 0; j < nc; ++j) u_col[j] = dot_col(m, x, j);
        for (int j = 0; j < nc; ++j) v_col += y[j] * u_col[j];
        for (int j = 0; j < nc; ++j) reg_col[j] = std::max(reg_col[j] + (v_col - u_col[j]), 0.0);

        double w = static_cast<double>(t);
        for (int i = 0; i < nr; ++i) avg_row[i] += w * x[i];
        for (int j = 0; j < nc; ++j) avg_col[j] += w * y[j];

        if (t % 1000 == 0 || t == max_iters) {
            GameSolution cand;
            cand.row.p = avg_row;
            cand.col.p = avg_col;
            double sr = 0.0, sc = 0.0;
            for (double v : avg_row) sr += v;
            for (double v : avg_col) sc += v;
            for (double& v : cand.row.p) v /= sr;
            for (double& v : cand.col.p) v /= sc;
            double vv = 0.0;
            for (int i = 0; i < nr; ++i) vv += cand.row.p[i] * dot_row(m, cand.col.p, i);
            cand.value = vv;
            double e = exploitability(m, cand.row, cand.col);
            if (e < best_exp) {
                best_exp = e;
                best = cand;
            }
            if (best_exp <= kExploitTol) return best;
        }
    }
    return best;
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows = static_cast<int>(init.size());
    cols = rows > 0 ? static_cast<int>(init.begin()->size()) : 0;
    for (const auto& row : init) {
        if (static_cast<int>(row.size()) != cols) throw ValidationError("ragged matrix literal");
        a.insert(a.end(), row.begin(), row.end());
    }
}

double exploitability(const Matrix& payoff, const MixedStrategy& row, const MixedStrategy& col) {
    double v = 0.0;
    for (int i = 0; i < payoff.rows; ++i) v += row.p[i] * dot_row(payoff, col.p, i);
    double best_row = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < payoff.rows; ++i) best_row = std::max(best_row, dot_row(payoff, col.p, i));
    double best_col = std::numeric_limits<double>::infinity();
    for (int j = 0; j < payoff.cols; ++j) best_col = std::min(best_col, dot_col(payoff, row.p, j));
    return std::max(best_row - v, v - best_col);
}

GameSolution solve_matrix_game(const Matrix& payoff) {
    if (payoff.rows < 1 || payoff.cols < 1) throw ValidationError("solve_matrix_game: empty matrix");
    for (double v : payoff.a)
        if (!std::isfinite(v)) throw ValidationError("solve_matrix_game: non-finite payoff entry");

    // Pure saddle points first (k=1 supports), on the raw matrix: exact.
    if (auto s = find_saddle(payoff)) return *s;

    if (payoff.rows <= 4 && payoff.cols <= 4) {
        // Normalize by the largest magnitude so tolerances behave across scales.
        double scale = 0.0;
        for (double v : payoff.a) scale = std::max(scale, std::abs(v));
        if (scale == 0.0) scale = 1.0;
        Matrix norm = payoff;
        for (double& v : norm.a) v /= scale;
        if (auto s = solve_by_enumeration(norm, scale, payoff)) return *s;
    }
    return solve_by_regret_matching(payoff);
}

Matrix GutNode::payoff(const StateFeatures& s) const {
    Matrix m(rows(), cols());
    for (int i = 0; i < rows(); ++i)
        for (int j = 0; j < cols(); ++j) m.at(i, j) = coeff(i, j).eval(s);
    return m;
}

const GutNode* GutNode::child(int i, int j) const {
    auto it = children.find({i, j});
    return it == children.end() ? nullptr : &it->second;
}

void GutNode::validate() const {
    if (row_strategies.empty() || col_strategies.empty())
        throw ValidationError("gut node '" + id + "': empty strategy list");
    if (coeffs.size() != static_cast<size_t>(rows()) * cols())
        throw ValidationError("gut node '" + id + "': payoff size mismatch (" + format_int(coeffs.size()) +
                              " entries for " + format_int(rows()) + "x" + format_int(cols()) + ")");
    for (const auto& [key, node] : children) {
        if (key.first < 0 || key.first >= rows() || key.second < 0 || key.second >= cols())
            throw ValidationError("gut node '" + id + "': child index out of range");
        node.validate();
    }
}

int GutNode::node_count() const {
    int n = 1;
    for (const auto& [key, node] : children) n += node.node_count();
    return n;
}

namespace {

int pick_argmax(const std::vector<double>& p) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(p.size()); ++i)
        if (p[i] > p[best]) best = i;
    return best;
}

int pick_sample(const std::vector<double>& p, Rng& rng) {
    double u = rng.uniform01();
    double acc = 0.0;
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return static_cast<int>(p.size()) - 1;
}

void descend_impl(const GutNode& node, const StateFeatures& state, SelectorKind selector, Rng& rng,
                  const SolveObserver& on_solve, DescentResult& out, bool root) {
    GameSolution sol = solve_matrix_game(node.payoff(state));
    if (on_solve) on_solve(node, sol);
    if (root) out.root_value = sol.value;
    int i, j;
    if (selector == SelectorKind::Argmax) {
        i = pick_argmax(sol.row.p);
        j = pick_argmax(sol.col.p);
    } else {
        i = pick_sample(sol.row.p, rng);
        j = pick_sample(sol.col.p, rng);
    }
    out.combo.push_back({node.id, node.level, i, j, node.row_strategies[i], node.col_strategies[j]});
    if (const GutNode* c = node.child(i, j)) descend_impl(*c, state, selector, rng, on_solve, out, false);
}

}  // namespace

DescentResult descend(const GutNode& gut, const StateFeatures& state, SelectorKind selector, uint64_t seed,
                      const SolveObserver& on_solve) {
    DescentResult out;
    Rng rng(seed);
    descend_impl(gut, state, selector, rng, on_solve, out, true);
    return out;
}

double expected_payoff(const GutNode& gut, const StateFeatures& state, const StrategyCombination& combo,
                       double gamma) {
    if (combo.empty()) throw ValidationError("expected_payoff: empty combination");
    double total = 0.0;
    double weight = 1.0;
    const GutNode* node = &gut;
    for (size_t k = 0; k < combo.size(); ++k) {
        const auto& step = combo[k];
        if (!node || node->id != step.node_id) throw ValidationError("expected_payoff: combo does not match tree");
        if (step.row < 0 || step.row >= node->rows() || step.col < 0 || step.col >= node->cols())
            throw ValidationError("expected_payoff: strategy index out of range");
        total += weight * node->coeff(step.row, step.col).eval(state);
        weight *= gamma;
        node = node->child(step.row, step.col);
    }
    return total;
}

}  // namespace sass
