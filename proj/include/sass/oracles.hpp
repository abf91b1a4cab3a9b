#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sass/atomic_ops.hpp"
#include "sass/core.hpp"

namespace sass {

// Brute-force reference implementations, deliberately independent of the
// production code paths they check.
namespace oracle {

// Plain BFS shortest path length in moves; nullopt when unreachable.
std::optional<int> bfs_shortest_path(const Grid& grid, Cell start, Cell goal);

// Optimal one-to-one assignment value by exhaustive recursion. utilities[a][t]
// may be -inf (ineligible); agents may stay unassigned. Maximizes total.
double best_assignment_utility(const std::vector<std::vector<double>>& utilities);

// Minimum total cost over all full permutations (|agents| == |slots|).
long min_assignment_cost(const std::vector<Cell>& agents, const std::vector<Cell>& slots);

// Vertex and swap conflicts across paths, with agents parked on their final
// cell afterwards. Returns the number of conflicting (pair, tick) incidents.
int count_path_conflicts(const std::map<int, Path>& paths);

// Connected components by brute-force edge scan (edge iff m[i][j] >= tau).
std::vector<std::vector<int>> components_brute(const std::vector<std::vector<double>>& m, double tau);

// KL/JS closed-form sums, written independently of the rne module.
double kl_direct(const std::vector<double>& p, const std::vector<double>& q);
double js_direct(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace oracle

}  // namespace sass
