#pragma once

#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "sass/core.hpp"
#include "sass/needs.hpp"
#include "sass/negotiation.hpp"

namespace sass {

// --- Formation -----------------------------------------------------------

struct FormationSpec {
    Cell center;
    int n = 1;
    double radius = 1.0;
    enum class Shape { RegularPolygon, Line } shape = Shape::RegularPolygon;
};

// RegularPolygon: slot k at angle 2*pi*k/n (counter-clockwise from east),
// rounded to the nearest cell; Line: n cells strictly east of center. Every
// slot snaps to the nearest untaken free cell (ties lowest (x,y)); throws
// when fewer than n free cells exist within radius + 2 of the center.
std::vector<Cell> formation_slots(const Grid& grid, const FormationSpec& spec);

// Minimum total Manhattan distance one-to-one matching, agent i -> slot
// result[i]. Exhaustive and exact for n <= 8; auction rounds beyond that.
std::vector<int> assign_slots(const std::vector<Cell>& agents, const std::vector<Cell>& slots);

// --- Routing ---------------------------------------------------------------

struct PathPoint {
    Cell cell;
    int tick = 0;
    auto operator<=>(const PathPoint&) const = default;
};
using Path = std::vector<PathPoint>;

// Space-time reservations a route must avoid: vertex (cell, tick), edge
// swaps, and cells parked on from a tick onward.
struct RouteConstraints {
    std::set<std::pair<Cell, int>> vertex;
    std::set<std::tuple<Cell, Cell, int>> edge;  // (from, to, arrival tick)
    std::map<Cell, int> parked;                  // cell -> occupied from tick on

    bool blocks_vertex(Cell c, int t) const;
    bool blocks_edge(Cell from, Cell to, int arrival) const;
    bool blocks_goal(Cell goal, int arrival, int horizon) const;
    void add_path(const Path& path, int horizon);
    bool empty() const { return vertex.empty() && edge.empty() && parked.empty(); }
};

// Space-time A* with Manhattan heuristic; wait moves allowed, expansion
// tie-break (f, tick, cell). nullopt when the goal is unreachable within the
// horizon (default 4x grid perimeter ticks).
std::optional<Path> route(const Grid& grid, Cell start, Cell goal, const RouteConstraints& constraints = {},
                          int start_tick = 0, int horizon = -1);

struct RouteRequest {
    int agent = 0;
    Cell start;
    Cell goal;
};

struct MultiRouteResult {
    std::map<int, Path> paths;
    std::vector<int> failed;  // agents with no conflict-free path
};

// Prioritized planning: shorter trips plan first (ties lowest id), later
// agents treat earlier paths as moving obstacles. Output is vertex- and
// swap-conflict free.
MultiRouteResult multi_route(const Grid& grid, const std::vector<RouteRequest>& requests);

// --- Selection --------------------------------------------------------------

// Auctions the given open tasks among the agents with needs-based utilities;
// bound tasks move to Assigned status. Initiator is the lowest agent id.
Assignment select(World& w, Trace& trace, const std::vector<int>& agent_ids, const std::vector<int>& task_ids,
                  const NeedsConfig& needs_cfg, const NegotiationConfig& nego_cfg = {});

}  // namespace sass
