#include "actcluster/metrics/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace actc {

namespace {

// Minimum-cost perfect matching, potentials formulation (1-based internally).
std::vector<int> hungarian_minimize(const Eigen::MatrixXd& cost)
{
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

double assignment_value(const Eigen::MatrixXd& score, const std::vector<int>& assignment)
{
    double s = 0.0;
    for (std::size_t r = 0; r < assignment.size(); ++r) s += score(static_cast<Eigen::Index>(r), assignment[r]);
    return s;
}

double best_value(const Eigen::MatrixXd& score)
{
    if (score.rows() == 0) return 0.0;
    return assignment_value(score, hungarian_maximize(score));
}

}  // namespace

std::vector<int> hungarian_maximize(const Eigen::MatrixXd& score)
{
    if (score.rows() != score.cols()) throw std::invalid_argument("hungarian_maximize: matrix must be square");
    if (score.rows() == 0) return {};
    if (!score.allFinite()) throw std::invalid_argument("hungarian_maximize: non-finite score");
    return hungarian_minimize(-score);
}

std::vector<int> lexicographic_best_assignment(const Eigen::MatrixXd& input)
{
    const Eigen::Index n = std::max(input.rows(), input.cols());
    Eigen::MatrixXd score = Eigen::MatrixXd::Zero(n, n);
    score.topLeftCorner(input.rows(), input.cols()) = input;
    const double optimum = best_value(score);
    const double tol = 1e-9 * std::max(1.0, score.cwiseAbs().sum());

    std::vector<int> result(static_cast<std::size_t>(n), -1);
    std::vector<Eigen::Index> free_cols(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) free_cols[static_cast<std::size_t>(j)] = j;
    double fixed = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index rest = n - r - 1;
        bool placed = false;
        for (std::size_t ci = 0; ci < free_cols.size() && !placed; ++ci) {
            const Eigen::Index c = free_cols[ci];
            Eigen::MatrixXd sub(rest, rest);
            for (Eigen::Index rr = 0; rr < rest; ++rr) {
                Eigen::Index out_c = 0;
                for (std::size_t cj = 0; cj < free_cols.size(); ++cj) {
                    if (cj == ci) continue;
                    sub(rr, out_c++) = score(r + 1 + rr, free_cols[cj]);
                }
            }
            const double value = fixed + score(r, c) + best_value(sub);
            if (value >= optimum - tol) {
                result[static_cast<std::size_t>(r)] = static_cast<int>(c);
                fixed += score(r, c);
                free_cols.erase(free_cols.begin() + static_cast<std::ptrdiff_t>(ci));
                placed = true;
            }
        }
        if (!placed) throw std::logic_error("lexicographic_best_assignment: no feasible column");
    }
    return result;
}

}  // namespace actc
