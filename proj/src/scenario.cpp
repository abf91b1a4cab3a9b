#include "sass/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sass {

namespace {

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ValidationError("scenario line " + format_int(line) + ": " + msg);
}

double num(const Line& ln, size_t idx) {
    if (idx >= ln.tokens.size()) fail(ln.number, "missing value for '" + ln.tokens[0] + "'");
    try {
        return parse_double(ln.tokens[idx]);
    } catch (const ValidationError&) {
        fail(ln.number, "bad number '" + ln.tokens[idx] + "' for '" + ln.tokens[0] + "'");
    }
}

int inum(const Line& ln, size_t idx) {
    if (idx >= ln.tokens.size()) fail(ln.number, "missing value for '" + ln.tokens[0] + "'");
    try {
        return static_cast<int>(parse_int(ln.tokens[idx]));
    } catch (const ValidationError&) {
        fail(ln.number, "bad integer '" + ln.tokens[idx] + "' for '" + ln.tokens[0] + "'");
    }
}

const std::string& str(const Line& ln, size_t idx) {
    if (idx >= ln.tokens.size()) fail(ln.number, "missing value for '" + ln.tokens[0] + "'");
    return ln.tokens[idx];
}

// name:value,name:value
std::map<std::string, double> parse_cap_map(const Line& ln, const std::string& text) {
    std::map<std::string, double> out;
    std::istringstream ss(text);
    std::string entry;
    while (std::getline(ss, entry, ',')) {
        auto colon = entry.find(':');
        if (colon == std::string::npos) fail(ln.number, "bad capability entry '" + entry + "' (want name:value)");
        try {
            out[entry.substr(0, colon)] = parse_double(entry.substr(colon + 1));
        } catch (const ValidationError&) {
            fail(ln.number, "bad capability value in '" + entry + "'");
        }
    }
    return out;
}

Cell parse_cell_pair(const Line& ln, const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) fail(ln.number, "bad cell '" + text + "' (want x,y)");
    try {
        return Cell{static_cast<int>(parse_int(text.substr(0, comma))),
                    static_cast<int>(parse_int(text.substr(comma + 1)))};
    } catch (const ValidationError&) {
        fail(ln.number, "bad cell '" + text + "'");
    }
}

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string entry;
    while (std::getline(ss, entry, ',')) out.push_back(entry);
    return out;
}

struct RawGutNode {
    int line = 0;
    int level = 0;
    std::vector<std::string> rows, cols;
    std::map<std::pair<int, int>, PayoffCoeffs> payoffs;
    std::map<std::pair<int, int>, std::string> child_ids;
};

GutNode assemble_gut(const std::string& id, int depth, std::map<std::string, RawGutNode>& raw,
                     std::set<std::string>& in_progress) {
    auto it = raw.find(id);
    if (it == raw.end()) throw ValidationError("gut_child references undefined node '" + id + "'");
    if (!in_progress.insert(id).second) throw ValidationError("gut node '" + id + "' is part of a cycle");
    const RawGutNode& rn = it->second;
    if (rn.level != depth)
        fail(rn.line, "gut node '" + id + "' declared at level " + format_int(rn.level) + " but sits at depth " +
                          format_int(depth));
    GutNode node;
    node.id = id;
    node.level = depth;
    node.row_strategies = rn.rows;
    node.col_strategies = rn.cols;
    node.coeffs.assign(static_cast<size_t>(node.rows()) * node.cols(), PayoffCoeffs{});
    for (const auto& [key, coeffs] : rn.payoffs) {
        if (key.first >= node.rows() || key.second >= node.cols())
            fail(rn.line, "gut node '" + id + "' payoff index (" + format_int(key.first) + "," +
                              format_int(key.second) + ") outside " + format_int(node.rows()) + "x" +
                              format_int(node.cols()) + " strategy lists");
        node.coeff(key.first, key.second) = coeffs;
    }
    for (const auto& [key, child_id] : rn.child_ids) {
        if (key.first >= node.rows() || key.second >= node.cols())
            fail(rn.line, "gut node '" + id + "' child index out of range");
        node.children[key] = assemble_gut(child_id, depth + 1, raw, in_progress);
    }
    in_progress.erase(id);
    return node;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.raw = text;

    std::istringstream ss(text);
    std::string raw_line;
    std::vector<Line> lines;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(ss, raw_line)) {
        ++lineno;
        auto hash_pos = raw_line.find('#');
        if (hash_pos != std::string::npos) raw_line.erase(hash_pos);
        std::istringstream ls(raw_line);
        Line ln;
        ln.number = lineno;
        std::string tok;
        while (ls >> tok) ln.tokens.push_back(tok);
        if (ln.tokens.empty()) continue;
        if (!header_seen) {
            if (ln.tokens.size() != 2 || ln.tokens[0] != "sass-scenario" || ln.tokens[1] != "v1")
                fail(lineno, "first line must be 'sass-scenario v1'");
            header_seen = true;
            continue;
        }
        lines.push_back(std::move(ln));
    }
    if (!header_seen) throw ValidationError("scenario: empty file (missing 'sass-scenario v1' header)");

    bool grid_seen = false;
    std::map<std::string, RawGutNode> gut_raw;
    std::vector<std::pair<int, int>> agent_lines;      // (agent index, line)
    std::vector<std::pair<int, int>> task_lines;
    std::vector<std::pair<int, int>> adversary_lines;

    for (const Line& ln : lines) {
        const std::string& key = ln.tokens[0];
        if (key == "mode") {
            const std::string& m = str(ln, 1);
            if (m == "usar")
                sc.mode = Scenario::Mode::Usar;
            else if (m == "explore")
                sc.mode = Scenario::Mode::Explore;
            else
                fail(ln.number, "mode must be 'usar' or 'explore', got '" + m + "'");
        } else if (key == "horizon") {
            sc.horizon = inum(ln, 1);
        } else if (key == "grid") {
            int w = inum(ln, 1), h = inum(ln, 2);
            if (w < 1 || h < 1) fail(ln.number, "grid dimensions must be positive");
            sc.grid = Grid(w, h);
            grid_seen = true;
        } else if (key == "obstacle") {
            if (!grid_seen) fail(ln.number, "obstacle before grid declaration");
            Cell c{inum(ln, 1), inum(ln, 2)};
            if (!sc.grid.in_bounds(c)) fail(ln.number, "obstacle (" + format_int(c.x) + "," + format_int(c.y) + ") outside grid");
            sc.grid.set_obstacle(c);
        } else if (key == "move_cost") {
            sc.world_cfg.move_cost = num(ln, 1);
            sc.needs_cfg.move_cost = sc.world_cfg.move_cost;
        } else if (key == "execute_cost") {
            sc.world_cfg.execute_cost = num(ln, 1);
        } else if (key == "recharge_rate") {
            sc.world_cfg.recharge_rate = num(ln, 1);
        } else if (key == "energy_full") {
            sc.world_cfg.energy_full = num(ln, 1);
            sc.needs_cfg.energy_full = sc.world_cfg.energy_full;
        } else if (key == "sensing_radius") {
            sc.world_cfg.sensing_radius = inum(ln, 1);
        } else if (key == "safety_radius") {
            sc.needs_cfg.safety_radius = num(ln, 1);
        } else if (key == "alpha") {
            sc.needs_cfg.alpha = num(ln, 1);
        } else if (key == "thresholds") {
            for (int i = 0; i < 5; ++i) sc.needs_cfg.thresholds[i] = num(ln, 1 + i);
        } else if (key == "trust_interval") {
            sc.trust_interval = inum(ln, 1);
        } else if (key == "bus_delay") {
            sc.bus_delay = inum(ln, 1);
        } else if (key == "bus_loss") {
            sc.bus_loss = num(ln, 1);
        } else if (key == "retry_budget") {
            sc.nego_cfg.retry_budget = inum(ln, 1);
        } else if (key == "capability") {
            sc.capabilities.insert(str(ln, 1));
        } else if (key == "agent") {
            AgentState a;
            a.id = inum(ln, 1);
            a.pos = {inum(ln, 2), inum(ln, 3)};
            size_t i = 4;
            while (i < ln.tokens.size()) {
                if (ln.tokens[i] == "energy") {
                    a.energy = num(ln, i + 1);
                    i += 2;
                } else if (ln.tokens[i] == "caps") {
                    a.capabilities = parse_cap_map(ln, str(ln, i + 1));
                    i += 2;
                } else {
                    fail(ln.number, "unknown agent attribute '" + ln.tokens[i] + "'");
                }
            }
            agent_lines.emplace_back(static_cast<int>(sc.agents.size()), ln.number);
            sc.agents.push_back(std::move(a));
        } else if (key == "task") {
            Task t;
            t.id = inum(ln, 1);
            t.pos = {inum(ln, 2), inum(ln, 3)};
            size_t i = 4;
            while (i < ln.tokens.size()) {
                if (ln.tokens[i] == "reward") {
                    t.reward = num(ln, i + 1);
                    i += 2;
                } else if (ln.tokens[i] == "deadline") {
                    t.deadline = inum(ln, i + 1);
                    i += 2;
                } else if (ln.tokens[i] == "requires") {
                    t.required_capabilities = parse_cap_map(ln, str(ln, i + 1));
                    i += 2;
                } else {
                    fail(ln.number, "unknown task attribute '" + ln.tokens[i] + "'");
                }
            }
            if (t.reward <= 0.0) fail(ln.number, "task " + format_int(t.id) + " reward must be positive");
            task_lines.emplace_back(static_cast<int>(sc.tasks.size()), ln.number);
            sc.tasks.push_back(std::move(t));
        } else if (key == "adversary") {
            AdversaryState adv;
            adv.id = inum(ln, 1);
            adv.pos = {inum(ln, 2), inum(ln, 3)};
            size_t i = 4;
            if (i < ln.tokens.size()) {
                if (ln.tokens[i] != "patrol") fail(ln.number, "unknown adversary attribute '" + ln.tokens[i] + "'");
                for (size_t j = i + 1; j < ln.tokens.size(); ++j) adv.patrol.push_back(parse_cell_pair(ln, ln.tokens[j]));
            }
            adversary_lines.emplace_back(static_cast<int>(sc.adversaries.size()), ln.number);
            sc.adversaries.push_back(std::move(adv));
        } else if (key == "goal_x") {
            sc.goal_x = inum(ln, 1);
        } else if (key == "encounter_radius") {
            sc.encounter_radius = inum(ln, 1);
        } else if (key == "win_value") {
            sc.win_value = num(ln, 1);
        } else if (key == "loss_value") {
            sc.loss_value = num(ln, 1);
        } else if (key == "gamma") {
            sc.gamma = num(ln, 1);
            if (sc.gamma <= 0.0 || sc.gamma > 1.0) fail(ln.number, "gamma must be in (0,1]");
        } else if (key == "eps_reach") {
            sc.eps_reach = num(ln, 1);
            if (sc.eps_reach < 0.0 || sc.eps_reach >= 1.0) fail(ln.number, "eps_reach must be in [0,1)");
        } else if (key == "failure_penalty") {
            sc.failure_penalty = num(ln, 1);
        } else if (key == "gut_node") {
            RawGutNode rn;
            rn.line = ln.number;
            const std::string& id = str(ln, 1);
            rn.level = inum(ln, 2);
            if (str(ln, 3) != "rows") fail(ln.number, "expected 'rows' in gut_node");
            rn.rows = split_names(str(ln, 4));
            if (str(ln, 5) != "cols") fail(ln.number, "expected 'cols' in gut_node");
            rn.cols = split_names(str(ln, 6));
            if (rn.rows.empty() || rn.cols.empty()) fail(ln.number, "gut node '" + id + "' needs strategies");
            if (gut_raw.count(id)) fail(ln.number, "duplicate gut node '" + id + "'");
            gut_raw[id] = std::move(rn);
        } else if (key == "gut_payoff") {
            const std::string& id = str(ln, 1);
            auto it = gut_raw.find(id);
            if (it == gut_raw.end()) fail(ln.number, "gut_payoff for undefined node '" + id + "'");
            int r = inum(ln, 2), c = inum(ln, 3);
            it->second.payoffs[{r, c}] = PayoffCoeffs{num(ln, 4), num(ln, 5), num(ln, 6), num(ln, 7)};
        } else if (key == "gut_child") {
            const std::string& id = str(ln, 1);
            auto it = gut_raw.find(id);
            if (it == gut_raw.end()) fail(ln.number, "gut_child for undefined node '" + id + "'");
            it->second.child_ids[{inum(ln, 2), inum(ln, 3)}] = str(ln, 4);
        } else if (key == "gut_hidden") {
            double p = num(ln, 4);
            if (p < 0.0 || p > 1.0) fail(ln.number, "gut_hidden probability must be in [0,1]");
            sc.gut.hidden[PosteriorKey{str(ln, 1), inum(ln, 2), inum(ln, 3)}] = p;
        } else {
            fail(ln.number, "unknown key '" + key + "'");
        }
    }

    // --- cross-field validation ---
    if (!grid_seen) throw ValidationError("scenario: missing 'grid' declaration");
    if (sc.horizon < 1) throw ValidationError("scenario: horizon must be >= 1");

    auto check_pos = [&](Cell pos, int line, const std::string& what) {
        if (!sc.grid.in_bounds(pos))
            fail(line, what + " position (" + format_int(pos.x) + "," + format_int(pos.y) + ") outside " +
                           format_int(sc.grid.width()) + "x" + format_int(sc.grid.height()) + " grid");
        if (sc.grid.is_obstacle(pos))
            fail(line, what + " placed on an obstacle cell (" + format_int(pos.x) + "," + format_int(pos.y) + ")");
    };

    std::set<int> agent_ids;
    std::set<Cell> agent_cells;
    for (auto [idx, line] : agent_lines) {
        const AgentState& a = sc.agents[idx];
        check_pos(a.pos, line, "agent " + format_int(a.id));
        if (!agent_ids.insert(a.id).second) fail(line, "duplicate agent id " + format_int(a.id));
        if (!agent_cells.insert(a.pos).second) fail(line, "agent " + format_int(a.id) + " shares a start cell");
        if (a.energy < 0.0) fail(line, "agent " + format_int(a.id) + " energy must be non-negative");
        for (const auto& [cap, v] : a.capabilities) {
            if (!sc.capabilities.count(cap))
                fail(line, "agent " + format_int(a.id) + " uses undeclared capability '" + cap + "'");
            if (v < 0.0 || v > 1.0) fail(line, "capability '" + cap + "' skill must be in [0,1]");
        }
    }
    std::set<int> task_ids;
    for (auto [idx, line] : task_lines) {
        const Task& t = sc.tasks[idx];
        check_pos(t.pos, line, "task " + format_int(t.id));
        if (!task_ids.insert(t.id).second) fail(line, "duplicate task id " + format_int(t.id));
        for (const auto& [cap, v] : t.required_capabilities) {
            if (!sc.capabilities.count(cap))
                fail(line, "task " + format_int(t.id) + " requires undeclared capability '" + cap + "'");
            if (v < 0.0 || v > 1.0) fail(line, "required capability '" + cap + "' must be in [0,1]");
        }
        if (t.deadline && *t.deadline < 0) fail(line, "task " + format_int(t.id) + " deadline must be non-negative");
    }
    std::set<int> adversary_ids;
    for (auto [idx, line] : adversary_lines) {
        const AdversaryState& adv = sc.adversaries[idx];
        check_pos(adv.pos, line, "adversary " + format_int(adv.id));
        if (!adversary_ids.insert(adv.id).second) fail(line, "duplicate adversary id " + format_int(adv.id));
        for (Cell c : adv.patrol) check_pos(c, line, "adversary " + format_int(adv.id) + " patrol waypoint");
    }
    if (sc.bus_loss < 0.0 || sc.bus_loss >= 1.0) throw ValidationError("scenario: bus_loss must be in [0,1)");
    if (sc.bus_delay < 0) throw ValidationError("scenario: bus_delay must be non-negative");

    if (!gut_raw.empty()) {
        if (!gut_raw.count("root")) throw ValidationError("scenario: gut section must define node 'root'");
        std::set<std::string> in_progress;
        sc.gut.root = assemble_gut("root", 0, gut_raw, in_progress);
        sc.gut.root.validate();
        sc.gut.present = true;
        for (const auto& [key, p] : sc.gut.hidden) {
            (void)p;
            if (!gut_raw.count(key.node))
                throw ValidationError("scenario: gut_hidden references undefined node '" + key.node + "'");
        }
    }

    if (sc.mode == Scenario::Mode::Explore) {
        if (!sc.gut.present) throw ValidationError("scenario: explore mode requires a gut section");
        if (sc.goal_x < 0 || sc.goal_x >= sc.grid.width())
            throw ValidationError("scenario: explore mode requires goal_x inside the grid");
        if (sc.agents.empty()) throw ValidationError("scenario: explore mode requires at least one agent");
    }

    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot read scenario file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_scenario(buf.str(), path);
}

World build_world(const Scenario& sc, uint64_t seed) {
    World w;
    w.grid = sc.grid;
    w.cfg = sc.world_cfg;
    w.bus.delay = sc.bus_delay;
    w.bus.loss_prob = sc.bus_loss;
    w.rng = Rng(seed);
    for (const auto& a : sc.agents) w.agents[a.id] = a;
    for (const auto& t : sc.tasks) w.tasks[t.id] = t;
    for (const auto& adv : sc.adversaries) w.adversaries[adv.id] = adv;
    w.validate();
    return w;
}

}  // namespace sass
