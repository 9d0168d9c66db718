// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace flocktrack {

namespace {

// Shortest augmenting path solver for a dense rows <= cols problem with all
// entries finite. Returns col4row.
std::vector<int> solve_dense(const std::vector<double>& cost, int nr, int nc) {
  std::vector<double> u(nr, 0.0), v(nc, 0.0), shortest(nc);
  std::vector<int> path(nc, -1), col4row(nr, -1), row4col(nc, -1);
  std::vector<char> visited_row(nr), visited_col(nc);
  std::vector<int> remaining(nc);

  for (int cur = 0; cur < nr; ++cur) {
    std::fill(shortest.begin(), shortest.end(), INFINITY);
    std::fill(visited_row.begin(), visited_row.end(), 0);
    std::fill(visited_col.begin(), visited_col.end(), 0);
    for (int j = 0; j < nc; ++j) remaining[j] = j;
    int num_remaining = nc;

    double min_val = 0.0;
    int i = cur;
    int sink = -1;
    while (sink == -1) {
      visited_row[i] = 1;
      int index = -1;
      double lowest = INFINITY;
      for (int it = 0; it < num_remaining; ++it) {
        const int j = remaining[it];
        const double r = min_val + cost[static_cast<std::size_t>(i) * nc + j] - u[i] - v[j];
        if (r < shortest[j]) {
          path[j] = i;
          shortest[j] = r;
        }
        if (shortest[j] < lowest ||
            (shortest[j] == lowest && row4col[j] == -1 &&
             (index < 0 || row4col[remaining[index]] != -1))) {
          lowest = shortest[j];
          index = it;
        }
      }
      min_val = lowest;
      const int j = remaining[index];
      if (row4col[j] == -1) {
        sink = j;
      } else {
        i = row4col[j];
      }
      visited_col[j] = 1;
      // Keep `remaining` in ascending column order so ties favor low indices.
      std::copy(remaining.begin() + index + 1, remaining.begin() + num_remaining,
                remaining.begin() + index);
      --num_remaining;
    }

    u[cur] += min_val;
    for (int r = 0; r < nr; ++r) {
      if (visited_row[r] && r != cur) u[r] += min_val - shortest[col4row[r]];
    }
    for (int c = 0; c < nc; ++c) {
      if (visited_col[c]) v[c] -= min_val - shortest[c];
    }

    int j = sink;
    while (true) {
      const int r = path[j];
      row4col[j] = r;
      std::swap(col4row[r], j);
      if (r == cur) break;
    }
  }
  return col4row;
}

}  // namespace

AssignmentResult solve_assignment(const CostMatrix& costs) {
  AssignmentResult result;
  const int nr = costs.rows();
  const int nc = costs.cols();
  std::vector<char> row_used(nr, 0), col_used(nc, 0);

  if (nr > 0 && nc > 0) {
    double max_cost = 0.0;
    bool any_feasible = false;
    for (int r = 0; r < nr; ++r) {
      for (int c = 0; c < nc; ++c) {
        if (costs.feasible(r, c)) {
          any_feasible = true;
          max_cost = std::max(max_cost, costs(r, c));
        }
      }
    }
    if (any_feasible) {
      // Any infeasible pair costs more than every feasible matching, so the
      // optimum maximizes the feasible count first.
      const bool transpose = nr > nc;
      const int a = transpose ? nc : nr;
      const int b = transpose ? nr : nc;
      const double big = std::min(nr, nc) * max_cost + 1.0;
      std::vector<double> dense(static_cast<std::size_t>(a) * b);
      for (int i = 0; i < a; ++i) {
        for (int j = 0; j < b; ++j) {
          const double c = transpose ? costs(j, i) : costs(i, j);
          dense[static_cast<std::size_t>(i) * b + j] = c == kInfeasible ? big : c;
        }
      }
      const std::vector<int> col4row = solve_dense(dense, a, b);
      for (int i = 0; i < a; ++i) {
        const int r = transpose ? col4row[i] : i;
        const int c = transpose ? i : col4row[i];
        if (costs.feasible(r, c)) {
          result.matches.emplace_back(r, c);
          row_used[r] = 1;
          col_used[c] = 1;
        }
      }
      std::sort(result.matches.begin(), result.matches.end());
    }
  }
  for (int r = 0; r < nr; ++r) {
    if (!row_used[r]) result.unmatched_rows.push_back(r);
  }
  for (int c = 0; c < nc; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

double total_cost(const CostMatrix& costs, const AssignmentResult& result) {
  double sum = 0.0;
  for (const auto& [r, c] : result.matches) sum += costs(r, c);
  return sum;
}

}  // namespace flocktrack
