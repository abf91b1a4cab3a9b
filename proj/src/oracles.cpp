#include "sass/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace sass {
namespace oracle {

std::optional<int> bfs_shortest_path(const Grid& grid, Cell start, Cell goal) {
    if (!grid.is_free(start) || !grid.is_free(goal)) return std::nullopt;
    std::map<Cell, int> dist;
    std::deque<Cell> queue;
    dist[start] = 0;
    queue.push_back(start);
    while (!queue.empty()) {
        Cell cur = queue.front();
        queue.pop_front();
        if (cur == goal) return dist[cur];
        for (Cell n : neighbors4(cur)) {
            if (!grid.is_free(n) || dist.count(n)) continue;
            dist[n] = dist[cur] + 1;
            queue.push_back(n);
        }
    }
    return std::nullopt;
}

namespace {

double best_assignment_rec(const std::vector<std::vector<double>>& u, size_t agent, std::vector<bool>& used) {
    if (agent == u.size()) return 0.0;
    double best = best_assignment_rec(u, agent + 1, used);  // this agent idle
    for (size_t t = 0; t < u[agent].size(); ++t) {
        if (used[t] || !std::isfinite(u[agent][t])) continue;
        used[t] = true;
        best = std::max(best, u[agent][t] + best_assignment_rec(u, agent + 1, used));
        used[t] = false;
    }
    return best;
}

}  // namespace

double best_assignment_utility(const std::vector<std::vector<double>>& utilities) {
    if (utilities.empty()) return 0.0;
    std::vector<bool> used(utilities[0].size(), false);
    return best_assignment_rec(utilities, 0, used);
}

long min_assignment_cost(const std::vector<Cell>& agents, const std::vector<Cell>& slots) {
    const int n = static_cast<int>(agents.size());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    long best = -1;
    do {
        long cost = 0;
        for (int i = 0; i < n; ++i) cost += manhattan(agents[i], slots[perm[i]]);
        if (best < 0 || cost < best) best = cost;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

int count_path_conflicts(const std::map<int, Path>& paths) {
    int max_tick = 0;
    for (const auto& [id, p] : paths) {
        if (!p.empty()) max_tick = std::max(max_tick, p.back().tick);
    }
    auto pos_at = [](const Path& p, int t) -> Cell {
        // Before the path starts the agent sits on its first cell; after it
        // ends it parks on the last.
        if (p.empty()) return Cell{-1000000, -1000000};
        if (t <= p.front().tick) return p.front().cell;
        if (t >= p.back().tick) return p.back().cell;
        for (const auto& pp : p) {
            if (pp.tick == t) return pp.cell;
        }
        return p.back().cell;
    };
    int conflicts = 0;
    std::vector<int> ids;
    for (const auto& [id, p] : paths) ids.push_back(id);
    for (size_t i = 0; i < ids.size(); ++i) {
        for (size_t j = i + 1; j < ids.size(); ++j) {
            const Path& a = paths.at(ids[i]);
            const Path& b = paths.at(ids[j]);
            for (int t = 0; t <= max_tick; ++t) {
                if (pos_at(a, t) == pos_at(b, t)) ++conflicts;  // vertex
                if (t > 0 && pos_at(a, t) == pos_at(b, t - 1) && pos_at(b, t) == pos_at(a, t - 1) &&
                    pos_at(a, t) != pos_at(a, t - 1))
                    ++conflicts;  // swap
            }
        }
    }
    return conflicts;
}

std::vector<std::vector<int>> components_brute(const std::vector<std::vector<double>>& m, double tau) {
    const int n = static_cast<int>(m.size());
    std::vector<int> comp(n);
    for (int i = 0; i < n; ++i) comp[i] = i;
    // Repeated relabeling until a fixed point; O(n^3) and obviously right.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (m[i][j] >= tau && comp[j] > comp[i]) {
                    comp[j] = comp[i];
                    changed = true;
                } else if (m[i][j] >= tau && comp[i] > comp[j]) {
                    comp[i] = comp[j];
                    changed = true;
                }
            }
        }
    }
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[comp[i]].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [rep, members] : groups) out.push_back(members);
    return out;
}

double kl_direct(const std::vector<double>& p, const std::vector<double>& q) {
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        double qi = std::max(q[i], 1e-9);
        if (p[i] > 0.0) sum += p[i] * std::log(p[i] / qi);
    }
    return sum;
}

double js_direct(const std::vector<double>& p, const std::vector<double>& q) {
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) sum += 0.5 * p[i] * std::log(p[i] / m);
        if (q[i] > 0.0) sum += 0.5 * q[i] * std::log(q[i] / m);
    }
    return sum;
}

}  // namespace oracle
}  // namespace sass
