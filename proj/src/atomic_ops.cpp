#include "sass/atomic_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace sass {

// --- Formation -----------------------------------------------------------

std::vector<Cell> formation_slots(const Grid& grid, const FormationSpec& spec) {
    if (spec.n < 1) throw ValidationError("formation: n must be >= 1");
    if (spec.radius <= 0.0) throw ValidationError("formation: radius must be positive");

    const double reach = spec.radius + 2.0;
    const int box = static_cast<int>(std::ceil(reach));
    std::vector<Cell> candidates;
    for (int y = spec.center.y - box; y <= spec.center.y + box; ++y) {
        for (int x = spec.center.x - box; x <= spec.center.x + box; ++x) {
            Cell c{x, y};
            double dx = c.x - spec.center.x, dy = c.y - spec.center.y;
            if (dx * dx + dy * dy > reach * reach) continue;
            if (grid.is_free(c)) candidates.push_back(c);
        }
    }
    if (static_cast<int>(candidates.size()) < spec.n)
        throw ValidationError("formation infeasible: " + format_int(candidates.size()) + " free cells within radius+2, need " +
                              format_int(spec.n));

    std::vector<Cell> ideals;
    if (spec.shape == FormationSpec::Shape::Line) {
        for (int k = 1; k <= spec.n; ++k) ideals.push_back({spec.center.x + k, spec.center.y});
    } else if (spec.n == 1) {
        ideals.push_back(spec.center);  // degenerate polygon collapses to the center
    } else {
        for (int k = 0; k < spec.n; ++k) {
            double angle = 2.0 * std::numbers::pi * k / spec.n;
            ideals.push_back({spec.center.x + static_cast<int>(std::lround(spec.radius * std::cos(angle))),
                              spec.center.y + static_cast<int>(std::lround(spec.radius * std::sin(angle)))});
        }
    }

    std::vector<Cell> slots;
    std::set<Cell> taken;
    for (Cell ideal : ideals) {
        const Cell* best = nullptr;
        long best_d2 = 0;
        for (const Cell& c : candidates) {
            if (taken.count(c)) continue;
            long dx = c.x - ideal.x, dy = c.y - ideal.y;
            long d2 = dx * dx + dy * dy;
            if (!best || d2 < best_d2 || (d2 == best_d2 && c < *best)) {
                best = &c;
                best_d2 = d2;
            }
        }
        if (!best) throw ValidationError("formation infeasible: ran out of free cells");
        slots.push_back(*best);
        taken.insert(*best);
    }
    return slots;
}

namespace {

// Exact minimum-cost matching by lexicographic permutation scan; n <= 8.
std::vector<int> assign_exhaustive(const std::vector<Cell>& agents, const std::vector<Cell>& slots) {
    const int n = static_cast<int>(agents.size());
    std::vector<int> perm(n), best(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    best = perm;
    long best_cost = -1;
    do {
        long cost = 0;
        for (int i = 0; i < n; ++i) cost += manhattan(agents[i], slots[perm[i]]);
        if (best_cost < 0 || cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Bus-free auction rounds with utility = -distance; same resolve rule as the
// wire protocol.
std::vector<int> assign_by_auction(const std::vector<Cell>& agents, const std::vector<Cell>& slots) {
    const int n = static_cast<int>(agents.size());
    std::vector<int> result(n, -1);
    std::set<int> open_items;
    std::set<int> unassigned_agents;
    for (int i = 0; i < n; ++i) {
        open_items.insert(i);
        unassigned_agents.insert(i);
    }
    SessionId sid{0, 0, 0};
    while (!open_items.empty() && !unassigned_agents.empty()) {
        std::vector<BidMsg> bids;
        for (int a : unassigned_agents) {
            for (int s : open_items) {
                bids.push_back(BidMsg{sid, s, -static_cast<double>(manhattan(agents[a], slots[s])), a});
            }
        }
        auto awards = resolve_round(OpKind::Formation, bids, open_items);
        if (awards.empty()) break;
        for (const auto& aw : awards) {
            result[aw.winner] = aw.item;
            open_items.erase(aw.item);
            unassigned_agents.erase(aw.winner);
        }
    }
    return result;
}

}  // namespace

std::vector<int> assign_slots(const std::vector<Cell>& agents, const std::vector<Cell>& slots) {
    if (agents.size() != slots.size()) throw ValidationError("assign_slots: |agents| != |slots|");
    if (agents.empty()) return {};
    if (agents.size() <= 8) return assign_exhaustive(agents, slots);
    return assign_by_auction(agents, slots);
}

// --- Routing ---------------------------------------------------------------

bool RouteConstraints::blocks_vertex(Cell c, int t) const {
    if (vertex.count({c, t})) return true;
    auto it = parked.find(c);
    return it != parked.end() && t >= it->second;
}

bool RouteConstraints::blocks_edge(Cell from, Cell to, int arrival) const {
    return edge.count({from, to, arrival}) > 0;
}

bool RouteConstraints::blocks_goal(Cell goal, int arrival, int horizon) const {
    auto it = parked.find(goal);
    if (it != parked.end() && it->second >= arrival) return true;  // someone parks here later
    for (int t = arrival; t <= horizon; ++t) {
        if (vertex.count({goal, t})) return true;
    }
    return false;
}

void RouteConstraints::add_path(const Path& path, int horizon) {
    for (size_t i = 0; i < path.size(); ++i) {
        vertex.insert({path[i].cell, path[i].tick});
        if (i + 1 < path.size()) {
            // Swap conflict: someone moving a->b at t blocks b->a arriving at t.
            edge.insert({path[i + 1].cell, path[i].cell, path[i + 1].tick});
        }
    }
    if (!path.empty()) {
        auto it = parked.find(path.back().cell);
        if (it == parked.end() || path.back().tick < it->second) parked[path.back().cell] = path.back().tick;
    }
    (void)horizon;
}

namespace {

struct AStarNode {
    int f = 0;
    int tick = 0;
    Cell cell;
    bool operator>(const AStarNode& o) const {
        return std::tie(f, tick, cell.x, cell.y) > std::tie(o.f, o.tick, o.cell.x, o.cell.y);
    }
};

}  // namespace

std::optional<Path> route(const Grid& grid, Cell start, Cell goal, const RouteConstraints& constraints,
                          int start_tick, int horizon) {
    if (!grid.is_free(start) || !grid.is_free(goal)) throw ValidationError("route: start and goal must be free cells");
    if (horizon < 0) horizon = start_tick + 4 * grid.perimeter();
    if (constraints.blocks_vertex(start, start_tick)) return std::nullopt;

    std::priority_queue<AStarNode, std::vector<AStarNode>, std::greater<AStarNode>> open;
    std::map<std::pair<Cell, int>, std::pair<Cell, int>> parent;  // (cell,tick) -> predecessor
    std::set<std::pair<Cell, int>> closed;

    open.push({start_tick + manhattan(start, goal), start_tick, start});
    parent[{start, start_tick}] = {start, start_tick - 1};

    while (!open.empty()) {
        AStarNode cur = open.top();
        open.pop();
        if (closed.count({cur.cell, cur.tick})) continue;
        closed.insert({cur.cell, cur.tick});

        if (cur.cell == goal && !constraints.blocks_goal(goal, cur.tick, horizon)) {
            Path path;
            std::pair<Cell, int> at{cur.cell, cur.tick};
            while (at.second >= start_tick) {
                path.push_back({at.first, at.second});
                auto it = parent.find(at);
                if (it == parent.end() || it->second.second < start_tick) break;
                at = it->second;
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        if (cur.tick >= horizon) continue;

        std::vector<Cell> moves = neighbors4(cur.cell);
        moves.push_back(cur.cell);  // wait
        for (Cell next : moves) {
            if (!grid.is_free(next)) continue;
            int t = cur.tick + 1;
            if (constraints.blocks_vertex(next, t)) continue;
            if (constraints.blocks_edge(cur.cell, next, t)) continue;
            if (closed.count({next, t})) continue;
            if (parent.count({next, t})) continue;  // already queued via an equal-or-better tick
            parent[{next, t}] = {cur.cell, cur.tick};
            open.push({t + manhattan(next, goal), t, next});
        }
    }
    return std::nullopt;
}

MultiRouteResult multi_route(const Grid& grid, const std::vector<RouteRequest>& requests) {
    {
        std::set<Cell> starts;
        for (const auto& r : requests) {
            if (!starts.insert(r.start).second) throw ValidationError("multi_route: duplicate start cell");
        }
    }
    // Priority = the routing auction outcome with utility -manhattan:
    // shorter trips first, ties lowest id.
    std::vector<RouteRequest> order = requests;
    std::sort(order.begin(), order.end(), [](const RouteRequest& a, const RouteRequest& b) {
        int da = manhattan(a.start, a.goal), db = manhattan(b.start, b.goal);
        return std::tie(da, a.agent) < std::tie(db, b.agent);
    });

    const int horizon = 4 * grid.perimeter();
    MultiRouteResult result;
    RouteConstraints constraints;
    for (const auto& req : order) {
        auto path = route(grid, req.start, req.goal, constraints, 0, horizon);
        if (!path) {
            result.failed.push_back(req.agent);
            // The agent stays parked on its start; later agents must avoid it.
            Path stay{{req.start, 0}};
            constraints.add_path(stay, horizon);
            continue;
        }
        constraints.add_path(*path, horizon);
        result.paths[req.agent] = std::move(*path);
    }
    std::sort(result.failed.begin(), result.failed.end());
    return result;
}

// --- Selection --------------------------------------------------------------

Assignment select(World& w, Trace& trace, const std::vector<int>& agent_ids, const std::vector<int>& task_ids,
                  const NeedsConfig& needs_cfg, const NegotiationConfig& nego_cfg) {
    std::vector<int> open_tasks;
    for (int tid : task_ids) {
        auto it = w.tasks.find(tid);
        if (it == w.tasks.end()) throw ValidationError("select: unknown task " + format_int(tid));
        if (it->second.status == TaskStatus::Open) open_tasks.push_back(tid);
    }
    if (open_tasks.empty()) return Assignment{};
    if (agent_ids.empty()) throw ValidationError("select: no agents");

    std::set<int> eligible_agents(agent_ids.begin(), agent_ids.end());
    UtilityFn utility = [&eligible_agents, needs_cfg](World& world, int agent, const ProposeMsg& propose) {
        std::map<int, double> out;
        if (!eligible_agents.count(agent)) return out;
        const AgentState& a = world.agent(agent);
        Observation obs = observe(world, agent, std::max(world.grid.width(), world.grid.height()));
        NeedsVector nv = evaluate_needs(a, obs, needs_cfg);
        for (int item : propose.items) {
            auto it = world.tasks.find(item);
            if (it == world.tasks.end()) continue;
            out[item] = task_utility(a, it->second, nv, needs_cfg);
        }
        return out;
    };

    int initiator = *std::min_element(agent_ids.begin(), agent_ids.end());
    BindFn on_bind = [](World& world, Trace&, const SessionId&, OpKind, int item, int agent) {
        auto it = world.tasks.find(item);
        if (it != world.tasks.end() && it->second.status == TaskStatus::Open)
            set_task_status(world, item, TaskStatus::Assigned, agent);
    };
    return run_negotiation(w, trace, OpKind::Selection, initiator, open_tasks, utility, nego_cfg, on_bind);
}

}  // namespace sass
