#include "sass/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "sass/atomic_ops.hpp"
#include "sass/behavior_tree.hpp"
#include "sass/negotiation.hpp"
#include "sass/rne.hpp"
#include "sass/version.hpp"

namespace sass {

namespace {

// --- USAR ------------------------------------------------------------------

struct UsarBrain {
    int id = 0;
    std::unique_ptr<NegotiationEngine> engine;
    Blackboard bb;
    Observation obs;
    NeedsVector nv;
    std::map<int, double> utilities;
    std::vector<int> auction_items;
    std::optional<int> my_task;
    std::vector<Envelope> backlog;
};

struct UsarContext {
    World* world = nullptr;
    Trace* trace = nullptr;
    const Scenario* sc = nullptr;
    UsarBrain* brain = nullptr;
    Policy policy = Policy::Sass;
};

UsarContext& ctx_of(Blackboard& bb) {
    auto* p = bb.get<UsarContext>("ctx");
    if (!p) throw ValidationError("behavior tree blackboard missing runner context");
    return *p;
}

void clear_locomotion(AgentState& a) {
    if (std::holds_alternative<Moving>(a.activity) || std::holds_alternative<Executing>(a.activity))
        a.activity = Idle{};
}

// Plans a static-obstacle path to the goal, treating other agents' current
// cells (except the goal itself) as blocked; falls back to agent-blind
// planning when that fails.
bool plan_to(World& w, AgentState& a, Cell goal) {
    Grid g = w.grid;
    for (const auto& [oid, other] : w.agents) {
        if (oid == a.id || other.pos == goal) continue;
        g.set_obstacle(other.pos);
    }
    auto p = route(g, a.pos, goal);
    if (!p) p = route(w.grid, a.pos, goal);
    if (!p) return false;
    std::vector<Cell> waypoints;
    for (size_t i = 1; i < p->size(); ++i) waypoints.push_back((*p)[i].cell);
    a.activity = Moving{std::move(waypoints), 0, 0};
    return true;
}

LeafRegistry build_usar_registry() {
    LeafRegistry reg;
    using namespace bt_leaf;

    reg.actions[kPerceive] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        World& w = *ctx.world;
        const AgentState& a = w.agent(ctx.brain->id);
        ctx.brain->obs = observe(w, a.id, w.cfg.sensing_radius);
        ctx.brain->nv = evaluate_needs(a, ctx.brain->obs, ctx.sc->needs_cfg, 0.0);
        return TickResult::Success;
    };

    reg.predicates[kSafetyOk] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        return ctx.brain->nv.safety >= ctx.sc->needs_cfg.thresholds[0];
    };

    reg.actions[kEvade] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        ctx.world->agent(ctx.brain->id).activity = Avoiding{};
        return TickResult::Running;
    };

    reg.predicates[kBasicOk] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        return ctx.brain->nv.basic >= ctx.sc->needs_cfg.thresholds[1];
    };

    reg.actions[kRecharge] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        ctx.world->agent(ctx.brain->id).activity = Recharging{};
        return TickResult::Running;
    };

    reg.predicates[kTaskCandidate] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        World& w = *ctx.world;
        UsarBrain& brain = *ctx.brain;
        if (brain.my_task) {
            auto it = w.tasks.find(*brain.my_task);
            if (it != w.tasks.end() && it->second.status == TaskStatus::Assigned &&
                it->second.assigned_to == brain.id)
                return true;
            brain.my_task.reset();
            clear_locomotion(w.agent(brain.id));
        }
        const AgentState& a = w.agent(brain.id);
        for (const auto& t : brain.obs.visible_tasks) {
            if (t.status != TaskStatus::Open) continue;
            if (task_utility(a, t, brain.nv, ctx.sc->needs_cfg) > kIneligible) return true;
        }
        return false;
    };

    reg.actions[kComputeUtilities] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        UsarBrain& brain = *ctx.brain;
        if (ctx.policy != Policy::Sass) return TickResult::Success;
        const AgentState& a = ctx.world->agent(brain.id);
        brain.utilities.clear();
        for (const auto& t : brain.obs.visible_tasks) {
            if (t.status != TaskStatus::Open) continue;
            brain.utilities[t.id] = task_utility(a, t, brain.nv, ctx.sc->needs_cfg);
        }
        return TickResult::Success;
    };

    reg.actions[kPlan] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        UsarBrain& brain = *ctx.brain;
        brain.auction_items.clear();
        if (ctx.policy != Policy::Sass) return TickResult::Success;
        for (const auto& t : brain.obs.visible_tasks) {
            if (t.status == TaskStatus::Open) brain.auction_items.push_back(t.id);
        }
        std::sort(brain.auction_items.begin(), brain.auction_items.end());
        return TickResult::Success;
    };

    reg.actions[kNegotiate] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        UsarBrain& brain = *ctx.brain;
        if (ctx.policy != Policy::Sass) return TickResult::Success;
        World& w = *ctx.world;
        Trace& tr = *ctx.trace;
        for (const auto& env : brain.backlog) brain.engine->handle(w, tr, env);
        brain.backlog.clear();
        brain.engine->advance(w, tr);

        bool lowest_observer = true;
        for (const auto& other : brain.obs.visible_agents) {
            if (other.id < brain.id) {
                lowest_observer = false;
                break;
            }
        }
        if (lowest_observer && !brain.engine->has_open_session() && !brain.auction_items.empty()) {
            brain.engine->open_session(w, tr, OpKind::Selection, brain.auction_items);
        }
        return TickResult::Success;
    };

    reg.actions[kExecuteAgreement] = [](Blackboard& bb) {
        UsarContext& ctx = ctx_of(bb);
        UsarBrain& brain = *ctx.brain;
        World& w = *ctx.world;
        if (!brain.my_task) return TickResult::Success;
        auto it = w.tasks.find(*brain.my_task);
        if (it == w.tasks.end() || it->second.status != TaskStatus::Assigned || it->second.assigned_to != brain.id) {
            brain.my_task.reset();
            clear_locomotion(w.agent(brain.id));
            return TickResult::Success;
        }
        AgentState& a = w.agent(brain.id);
        const Task& t = it->second;
        if (a.pos == t.pos) {
            if (!std::holds_alternative<Executing>(a.activity)) a.activity = Executing{t.id};
            return TickResult::Running;
        }
        bool need_plan = true;
        if (auto* mv = std::get_if<Moving>(&a.activity)) {
            if (mv->blocked_ticks < 3 && !mv->waypoints.empty() && mv->next < mv->waypoints.size() &&
                mv->waypoints.back() == t.pos)
                need_plan = false;
        }
        if (need_plan) plan_to(w, a, t.pos);
        return TickResult::Running;
    };

    return reg;
}

void baseline_assign(World& w, Trace& trace, std::map<int, UsarBrain>& brains) {
    for (auto& [id, brain] : brains) {
        if (brain.my_task) {
            auto it = w.tasks.find(*brain.my_task);
            if (it != w.tasks.end() && it->second.status == TaskStatus::Assigned && it->second.assigned_to == id)
                continue;
            brain.my_task.reset();
        }
        std::vector<int> open;
        for (const auto& [tid, t] : w.tasks)
            if (t.status == TaskStatus::Open) open.push_back(tid);
        if (open.empty()) continue;
        int pick = open[w.rng.uniform_int(0, static_cast<int>(open.size()) - 1)];
        set_task_status(w, pick, TaskStatus::Assigned, id);
        brain.my_task = pick;
        trace.add(w.tick, EventKind::Assign,
                  {f_str("session", "baseline"), f_int("item", pick), f_int("agent", id)});
    }
}

void emit_trust_snapshot(World& w, Trace& trace, const std::map<int, UsarBrain>& brains) {
    if (brains.empty()) return;
    std::vector<int> ids;
    std::vector<NeedsDistribution> dists;
    for (const auto& [id, brain] : brains) {
        ids.push_back(id);
        dists.push_back(needs_distribution(brain.nv));
    }
    TrustMatrix tm = trust_matrix(ids, dists);
    std::string ids_str, vals;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) ids_str += ",";
        ids_str += format_int(ids[i]);
    }
    for (int i = 0; i < tm.size(); ++i) {
        for (int j = 0; j < tm.size(); ++j) {
            if (i || j) vals += ",";
            vals += format_double(tm.m[i][j]);
        }
    }
    trace.add(w.tick, EventKind::TrustSnapshot,
              {f_int("n", tm.size()), f_str("ids", ids_str), f_str("vals", vals)});
}

bool all_tasks_settled(const World& w) {
    for (const auto& [id, t] : w.tasks)
        if (t.active()) return false;
    return true;
}

RunResult run_usar(const Scenario& sc, uint64_t seed, const RunOptions& options) {
    World w = build_world(sc, seed);
    Trace trace({sc.hash(), seed, kVersion, w.grid.width(), w.grid.height()});
    trace_spawns(w, trace);

    std::map<int, UsarBrain> brains;
    for (const auto& [id, a] : w.agents) {
        UsarBrain& brain = brains[id];
        brain.id = id;
    }

    UtilityFn utility = [&brains](World&, int agent, const ProposeMsg& propose) {
        std::map<int, double> out;
        auto it = brains.find(agent);
        if (it == brains.end()) return out;
        for (int item : propose.items) {
            auto uit = it->second.utilities.find(item);
            if (uit != it->second.utilities.end()) out[item] = uit->second;
        }
        return out;
    };
    for (auto& [id, brain] : brains) {
        brain.engine = std::make_unique<NegotiationEngine>(id, utility, sc.nego_cfg);
        UsarBrain* bp = &brain;
        brain.engine->set_on_award([bp](World& world, Trace&, const SessionId&, OpKind kind, int item, int winner) {
            if (kind != OpKind::Selection) return;
            auto it = world.tasks.find(item);
            if (it == world.tasks.end()) return;
            if (it->second.status == TaskStatus::Open) set_task_status(world, item, TaskStatus::Assigned, winner);
            if (it->second.status == TaskStatus::Assigned && it->second.assigned_to == winner) bp->my_task = item;
        });
        brain.engine->set_on_bind([](World& world, Trace&, const SessionId&, OpKind kind, int item, int agent) {
            if (kind != OpKind::Selection) return;
            auto it = world.tasks.find(item);
            if (it != world.tasks.end() && it->second.status == TaskStatus::Open)
                set_task_status(world, item, TaskStatus::Assigned, agent);
        });
    }

    LeafRegistry registry = build_usar_registry();
    BTNode tree = build_sass_tree();

    for (auto& [id, brain] : brains) {
        brain.bb.set("ctx", UsarContext{&w, &trace, &sc, &brain, options.policy});
    }

    StepHooks hooks;
    hooks.on_agent = [&](World&, Trace&, int id, const std::vector<Envelope>& inbox) {
        UsarBrain& brain = brains.at(id);
        brain.backlog.insert(brain.backlog.end(), inbox.begin(), inbox.end());
        tick(tree, brain.bb, registry);
    };
    hooks.on_tick_end = [&](World& world, Trace& tr) {
        if (options.policy == Policy::RandomBaseline) baseline_assign(world, tr, brains);
        if (sc.trust_interval > 0 && world.tick % sc.trust_interval == 0) emit_trust_snapshot(world, tr, brains);
    };

    while (!all_tasks_settled(w) && w.tick < sc.horizon) {
        step(w, trace, hooks);
    }

    RunResult result{metrics_from_trace(trace, Scenario::Mode::Usar), std::move(trace)};
    return result;
}

// --- Explore -----------------------------------------------------------------

StateFeatures explore_features(const World& w, const Scenario& sc) {
    StateFeatures f;
    int alive_adv = 0;
    for (const auto& [id, adv] : w.adversaries)
        if (adv.alive) ++alive_adv;
    double n_agents = static_cast<double>(w.agents.size());
    f.team_size_ratio = n_agents / std::max(1.0, n_agents + alive_adv);
    double energy = 0.0, dist = 0.0;
    for (const auto& [id, a] : w.agents) {
        energy += a.energy;
        dist += std::max(0, sc.goal_x - a.pos.x);
    }
    if (!w.agents.empty()) {
        f.energy_ratio = std::clamp(energy / w.agents.size() / sc.world_cfg.energy_full, 0.0, 1.0);
        f.distance_to_goal = std::clamp(dist / w.agents.size() / w.grid.width(), 0.0, 1.0);
    }
    return f;
}

std::string combo_str(const StrategyCombination& combo) {
    std::string out;
    for (size_t i = 0; i < combo.size(); ++i) {
        if (i) out += ";";
        out += combo[i].node_id + ":" + combo[i].row_name + "/" + combo[i].col_name;
    }
    return out;
}

bool in_goal_region(const World& w, const Scenario& sc) {
    for (const auto& [id, a] : w.agents)
        if (a.pos.x < sc.goal_x) return false;
    return true;
}

}  // namespace

ExploreEpisodeResult run_explore_episode(const Scenario& sc, uint64_t seed, Trace& trace,
                                         OutcomePosterior* posterior, int episode_index) {
    if (sc.mode != Scenario::Mode::Explore)
        throw ValidationError("run_explore_episode: scenario is not in explore mode");
    World w = build_world(sc, seed);
    Rng ep_rng(seed ^ 0x5a5a5a5a5a5a5a5aull);

    GutNode tree = posterior ? rebuild(sc.gut.root, *posterior, sc.win_value, sc.loss_value, sc.eps_reach)
                             : sc.gut.root;
    double root_value = solve_matrix_game(tree.payoff(explore_features(w, sc))).value;

    // Route everyone to the goal region with conflict-free paths.
    std::vector<RouteRequest> requests;
    std::set<Cell> claimed;
    for (const auto& [id, a] : w.agents) {
        if (a.pos.x >= sc.goal_x) continue;
        Cell best{-1, -1};
        long best_key = 0;
        bool found = false;
        for (int x = sc.goal_x; x < w.grid.width(); ++x) {
            for (int y = 0; y < w.grid.height(); ++y) {
                Cell c{x, y};
                if (!w.grid.is_free(c) || claimed.count(c)) continue;
                long key = static_cast<long>(manhattan(a.pos, c)) * 10000 + x * 100 + y;
                if (!found || key < best_key) {
                    best = c;
                    best_key = key;
                    found = true;
                }
            }
        }
        if (found) {
            claimed.insert(best);
            requests.push_back(RouteRequest{id, a.pos, best});
        }
    }
    auto mr = multi_route(w.grid, requests);
    for (auto& [id, path] : mr.paths) {
        std::vector<Cell> waypoints;
        for (size_t i = 1; i < path.size(); ++i) waypoints.push_back(path[i].cell);
        w.agent(id).activity = Moving{std::move(waypoints), 0, 0};
    }

    double initial_energy = 0.0;
    for (const auto& [id, a] : w.agents) initial_energy += a.energy;

    bool failed = false;
    while (w.tick < sc.horizon) {
        // Encounters at current positions, agents then adversaries ascending.
        for (auto& [aid, agent] : w.agents) {
            for (auto& [xid, adv] : w.adversaries) {
                if (!adv.alive || chebyshev(agent.pos, adv.pos) > sc.encounter_radius) continue;
                StateFeatures feats = explore_features(w, sc);
                GutNode decision = posterior
                                       ? thompson_sample(tree, *posterior, ep_rng, sc.win_value, sc.loss_value)
                                       : tree;
                SolveObserver observer = [&](const GutNode& node, const GameSolution& sol) {
                    trace.add(w.tick, EventKind::Solve,
                              {f_str("node", node.id), f_dbl("value", sol.value)});
                };
                DescentResult descent_result = descend(decision, feats, SelectorKind::Argmax, 0, observer);
                bool all_ok = true;
                for (const auto& step_info : descent_result.combo) {
                    PosteriorKey key{step_info.node_id, step_info.row, step_info.col};
                    bool ok = ep_rng.uniform01() < sc.gut.hidden_p(key);
                    if (posterior) posterior->update(key, ok);
                    all_ok = all_ok && ok;
                }
                trace.add(w.tick, EventKind::Encounter,
                          {f_int("agent", aid), f_int("adversary", xid),
                           f_str("combo", combo_str(descent_result.combo)), f_int("outcome", all_ok ? 1 : 0)});
                if (all_ok) {
                    adv.alive = false;
                } else {
                    failed = true;
                    break;
                }
            }
            if (failed) break;
        }
        if (failed || in_goal_region(w, sc)) break;
        step(w, trace, {});
    }

    double spent = initial_energy;
    for (const auto& [id, a] : w.agents) spent -= a.energy;
    bool success = !failed && in_goal_region(w, sc);
    double cost = spent + (failed ? sc.failure_penalty : 0.0);

    trace.add(w.tick, EventKind::EpisodeEnd,
              {f_int("episode", episode_index), f_int("success", success ? 1 : 0), f_dbl("cost", cost),
               f_dbl("value", root_value)});
    return ExploreEpisodeResult{success, cost, root_value};
}

LearningCurve adapt_loop(const Scenario& sc, int episodes, uint64_t seed, OutcomePosterior* posterior_io) {
    if (sc.mode != Scenario::Mode::Explore || !sc.gut.present)
        throw ValidationError("adapt_loop: scenario must be explore mode with a gut section");
    if (episodes < 0) throw ValidationError("adapt_loop: episodes must be non-negative");

    OutcomePosterior local;
    OutcomePosterior* post = posterior_io ? posterior_io : &local;
    Rng master(seed);
    LearningCurve curve;
    for (int e = 0; e < episodes; ++e) {
        uint64_t ep_seed = master.next_u64();
        Trace scratch({sc.hash(), seed, kVersion, sc.grid.width(), sc.grid.height()});
        auto r = run_explore_episode(sc, ep_seed, scratch, post, e);
        EpisodeRecord rec;
        rec.episode = e;
        rec.success = r.success;
        rec.cost = r.cost;
        rec.root_value = r.root_value;
        rec.mean_variance = mean_posterior_variance(sc.gut.root, *post);
        rec.posterior_means = posterior_means_snapshot(sc.gut.root, *post);
        curve.episodes.push_back(std::move(rec));
    }
    return curve;
}

RunResult run(const Scenario& sc, uint64_t seed, const RunOptions& options) {
    if (sc.mode == Scenario::Mode::Usar) return run_usar(sc, seed, options);

    Trace trace({sc.hash(), seed, kVersion, sc.grid.width(), sc.grid.height()});
    {
        World w = build_world(sc, seed);
        trace_spawns(w, trace);
    }
    OutcomePosterior post;
    OutcomePosterior* post_ptr = nullptr;
    if (options.posterior) {
        post = *options.posterior;  // episode updates stay local to the run
        post_ptr = &post;
    }
    run_explore_episode(sc, seed, trace, post_ptr, 0);
    RunResult result{metrics_from_trace(trace, Scenario::Mode::Explore), std::move(trace)};
    return result;
}

Metrics metrics_from_trace(const Trace& trace, Scenario::Mode mode) {
    Metrics m;
    m.mode = mode;
    if (mode == Scenario::Mode::Usar) {
        int total_tasks = 0, resolved = 0, last_resolution = 0;
        for (const auto& e : trace.events()) {
            switch (e.kind) {
                case EventKind::Spawn:
                    if (e.get_str("entity") == "task") ++total_tasks;
                    break;
                case EventKind::Rescue:
                    ++m.victims_rescued;
                    ++resolved;
                    last_resolution = std::max(last_resolution, e.tick);
                    break;
                case EventKind::Expire:
                    ++resolved;
                    last_resolution = std::max(last_resolution, e.tick);
                    break;
                default:
                    break;
            }
            if (e.kind == EventKind::Move || e.kind == EventKind::Rescue) {
                if (const std::string* cost = e.find("cost")) {
                    double c = parse_double(*cost);
                    if (c > 0.0) m.total_energy += c;
                }
            }
        }
        if (resolved >= total_tasks) m.completion_tick = total_tasks == 0 ? 0 : last_resolution;
    } else {
        int runs = 0, successes = 0;
        double cost = 0.0;
        for (const auto& e : trace.events()) {
            if (e.kind != EventKind::EpisodeEnd) continue;
            ++runs;
            successes += static_cast<int>(e.get_int("success"));
            cost += e.get_double("cost");
        }
        if (runs > 0) {
            m.success_rate = static_cast<double>(successes) / runs;
            m.mean_cost = cost / runs;
        }
    }
    return m;
}

SweepResult sweep(const Scenario& sc, const std::vector<uint64_t>& seeds, const RunOptions& options) {
    if (seeds.empty()) throw ValidationError("sweep: empty seed list");
    SweepResult out;
    std::vector<int> victims;
    double mean_victims = 0.0, successes = 0.0, cost = 0.0;
    for (uint64_t seed : seeds) {
        RunResult r = run(sc, seed, options);
        out.per_seed.emplace_back(seed, r.metrics);
        if (sc.mode == Scenario::Mode::Usar) {
            victims.push_back(r.metrics.victims_rescued);
            mean_victims += r.metrics.victims_rescued;
        } else {
            successes += r.metrics.success_rate;
            cost += r.metrics.mean_cost;
        }
    }
    const double n = static_cast<double>(seeds.size());
    if (sc.mode == Scenario::Mode::Usar) {
        out.usar_mean_victims = mean_victims / n;
        std::sort(victims.begin(), victims.end());
        size_t mid = victims.size() / 2;
        out.usar_median_victims = victims.size() % 2 ? victims[mid]
                                                     : 0.5 * (victims[mid - 1] + victims[mid]);
    } else {
        out.explore_success_rate = successes / n;
        out.explore_mean_cost = cost / n;
    }
    return out;
}

void SweepResult::write_csv(std::ostream& out) const {
    bool usar = !per_seed.empty() && per_seed.front().second.mode == Scenario::Mode::Usar;
    if (usar) {
        out << "seed,victims_rescued,completion_tick,total_energy\n";
        for (const auto& [seed, m] : per_seed) {
            out << seed << "," << m.victims_rescued << ","
                << (m.completion_tick ? format_int(*m.completion_tick) : std::string("none")) << ","
                << format_double(m.total_energy) << "\n";
        }
    } else {
        out << "seed,success,cost\n";
        for (const auto& [seed, m] : per_seed) {
            out << seed << "," << format_double(m.success_rate) << "," << format_double(m.mean_cost) << "\n";
        }
    }
}

// --- Replay ------------------------------------------------------------------

namespace {

int replay_parsed(const Trace& t, std::ostream& out, std::ostream& err) {
    (void)err;
    const int w = t.header().grid_width;
    const int h = t.header().grid_height;
    if (w < 1 || h < 1) {
        err << "trace has no grid header\n";
        return 3;
    }
    std::set<Cell> obstacles;
    std::map<int, Cell> agents;
    std::map<int, Cell> adversaries;
    std::set<int> dead_adversaries;
    std::map<int, std::pair<Cell, bool>> tasks;  // id -> (pos, open)

    auto render = [&](int tick) {
        out << "tick " << tick << "\n";
        for (int y = h - 1; y >= 0; --y) {
            std::string row(static_cast<size_t>(w), '.');
            for (const Cell& c : obstacles)
                if (c.y == y) row[c.x] = '#';
            for (const auto& [id, tp] : tasks)
                if (tp.first.y == y) row[tp.first.x] = tp.second ? 'T' : 't';
            for (const auto& [id, c] : adversaries)
                if (c.y == y && !dead_adversaries.count(id)) row[c.x] = 'X';
            for (const auto& [id, c] : agents)
                if (c.y == y) row[c.x] = static_cast<char>('0' + (id % 10));
            out << row << "\n";
        }
    };

    int max_tick = 0;
    for (const auto& e : t.events()) max_tick = std::max(max_tick, e.tick);

    size_t idx = 0;
    const auto& events = t.events();
    for (int tick = 0; tick <= max_tick; ++tick) {
        std::vector<std::string> digest;
        while (idx < events.size() && events[idx].tick == tick) {
            const TraceEvent& e = events[idx];
            switch (e.kind) {
                case EventKind::Spawn: {
                    std::string entity = e.get_str("entity");
                    Cell c{static_cast<int>(e.get_int("x")), static_cast<int>(e.get_int("y"))};
                    if (entity == "obstacle")
                        obstacles.insert(c);
                    else if (entity == "agent")
                        agents[static_cast<int>(e.get_int("id"))] = c;
                    else if (entity == "adversary")
                        adversaries[static_cast<int>(e.get_int("id"))] = c;
                    else if (entity == "task")
                        tasks[static_cast<int>(e.get_int("id"))] = {c, true};
                    break;
                }
                case EventKind::Move: {
                    Cell c{static_cast<int>(e.get_int("x")), static_cast<int>(e.get_int("y"))};
                    if (const std::string* a = e.find("agent"))
                        agents[static_cast<int>(parse_int(*a))] = c;
                    else if (const std::string* adv = e.find("adversary"))
                        adversaries[static_cast<int>(parse_int(*adv))] = c;
                    break;
                }
                case EventKind::Rescue:
                case EventKind::Expire: {
                    auto it = tasks.find(static_cast<int>(e.get_int("task")));
                    if (it != tasks.end()) it->second.second = false;
                    break;
                }
                case EventKind::Encounter: {
                    if (e.get_int("outcome") == 1) dead_adversaries.insert(static_cast<int>(e.get_int("adversary")));
                    break;
                }
                default:
                    break;
            }
            std::string line = std::string("  ") + event_kind_name(e.kind);
            for (const auto& [k, v] : e.fields) line += " " + k + "=" + v;
            digest.push_back(std::move(line));
            ++idx;
        }
        render(tick);
        for (const auto& d : digest) out << d << "\n";
    }
    return 0;
}

}  // namespace

int replay_text(const std::string& trace_text, std::ostream& out, std::ostream& err) {
    try {
        Trace t = Trace::parse(trace_text);
        return replay_parsed(t, out, err);
    } catch (const IntegrityError& e) {
        err << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return 3;
    }
}

int replay(const std::string& trace_path, std::ostream& out, std::ostream& err) {
    try {
        Trace t = Trace::load(trace_path);
        return replay_parsed(t, out, err);
    } catch (const IntegrityError& e) {
        err << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return 3;
    }
}

}  // namespace sass
