// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace flocktrack {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

// Row-major |rows| x |cols| matrix; entries are finite >= 0 or kInfeasible.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  bool feasible(int r, int c) const { return (*this)(r, c) != kInfeasible; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct AssignmentResult {
  std::vector<std::pair<int, int>> matches;  // (row, col), sorted by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

// Optimal assignment over feasible pairs: the matching with the most
// feasible pairs, and among those the least total cost. Infeasible pairs are
// never matched. Ties go to lower indices in row order.
AssignmentResult solve_assignment(const CostMatrix& costs);

// Sum of matched costs, accumulated in row order.
double total_cost(const CostMatrix& costs, const AssignmentResult& result);

}  // namespace flocktrack
