#pragma once

#include <vector>

#include <Eigen/Core>

namespace actc {

/// Optimal assignment for a square score matrix: result[row] = column,
/// maximizing the summed score. O(n^3) shortest augmenting paths.
std::vector<int> hungarian_maximize(const Eigen::MatrixXd& score);

/// Among all maximizing assignments, the lexicographically smallest
/// (row 0 takes the smallest feasible column, then row 1, ...). Rectangular
/// inputs are zero-padded to square; the result has max(rows, cols) entries.
std::vector<int> lexicographic_best_assignment(const Eigen::MatrixXd& score);

}  // namespace actc
