#include "sass/world.hpp"

#include <algorithm>
#include <climits>
#include <tuple>

namespace sass {

namespace {

std::string session_field(const SessionId& sid) { return sid.str(); }

std::string items_field(const std::vector<int>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += format_int(items[i]);
    }
    return out;
}

void payload_fields(const NegotiationMessage& msg, TraceEvent& e) {
    if (const auto* p = std::get_if<ProposeMsg>(&msg)) {
        e.fields.push_back(f_str("session", session_field(p->sid)));
        e.fields.push_back(f_str("op", op_kind_name(p->kind)));
        e.fields.push_back(f_str("items", items_field(p->items)));
    } else if (const auto* b = std::get_if<BidMsg>(&msg)) {
        e.fields.push_back(f_str("session", session_field(b->sid)));
        e.fields.push_back(f_int("item", b->item));
        e.fields.push_back(f_dbl("util", b->utility));
        e.fields.push_back(f_int("bidder", b->bidder));
    } else if (const auto* a = std::get_if<AwardMsg>(&msg)) {
        e.fields.push_back(f_str("session", session_field(a->sid)));
        e.fields.push_back(f_int("item", a->item));
        e.fields.push_back(f_int("winner", a->winner));
    } else if (const auto* k = std::get_if<AckMsg>(&msg)) {
        e.fields.push_back(f_str("session", session_field(k->sid)));
        e.fields.push_back(f_int("item", k->item));
        e.fields.push_back(f_int("agent", k->agent));
    }
}

bool capable_of(const AgentState& agent, const Task& task) {
    for (const auto& [cap, need] : task.required_capabilities) {
        if (agent.skill(cap) < need) return false;
    }
    return true;
}

void advance_agent(World& w, Trace& trace, AgentState& a) {
    if (auto* mv = std::get_if<Moving>(&a.activity)) {
        if (mv->next >= mv->waypoints.size()) {
            a.activity = Idle{};
            return;
        }
        Cell target = mv->waypoints[mv->next];
        if (target == a.pos) {  // planned wait
            ++mv->next;
            return;
        }
        if (manhattan(a.pos, target) != 1) {
            a.activity = Idle{};  // stale plan
            return;
        }
        if (a.energy <= 0.0 || a.energy < w.cfg.move_cost) return;
        if (!w.grid.is_free(target) || w.cell_occupied(target, a.id)) {
            ++mv->blocked_ticks;
            return;
        }
        a.pos = target;
        a.energy -= w.cfg.move_cost;
        ++mv->next;
        mv->blocked_ticks = 0;
        trace.add(w.tick, EventKind::Move,
                  {f_int("agent", a.id), f_int("x", a.pos.x), f_int("y", a.pos.y), f_dbl("cost", w.cfg.move_cost)});
        return;
    }
    if (auto* ex = std::get_if<Executing>(&a.activity)) {
        auto it = w.tasks.find(ex->task_id);
        if (it == w.tasks.end()) {
            a.activity = Idle{};
            return;
        }
        Task& t = it->second;
        if (!t.active() || t.status != TaskStatus::Assigned || t.assigned_to != a.id || !capable_of(a, t) ||
            a.pos != t.pos) {
            a.activity = Idle{};
            return;
        }
        if (t.deadline && w.tick > *t.deadline) return;  // expiry pass will close it
        if (a.energy <= 0.0 || a.energy < w.cfg.execute_cost) return;
        a.energy -= w.cfg.execute_cost;
        t.status = TaskStatus::Done;
        trace.add(w.tick, EventKind::Rescue,
                  {f_int("task", t.id), f_int("agent", a.id), f_dbl("cost", w.cfg.execute_cost)});
        a.activity = Idle{};
        return;
    }
    if (std::holds_alternative<Recharging>(a.activity)) {
        double gain = std::min(w.cfg.recharge_rate, w.cfg.energy_full - a.energy);
        if (gain > 0.0) {
            a.energy += gain;
            // Energy gains stay in the fixed event schema: a Move with
            // unchanged position and negative cost.
            trace.add(w.tick, EventKind::Move,
                      {f_int("agent", a.id), f_int("x", a.pos.x), f_int("y", a.pos.y), f_dbl("cost", -gain)});
        }
        return;
    }
    if (std::holds_alternative<Avoiding>(a.activity)) {
        std::vector<const AdversaryState*> threats;
        for (const auto& [id, adv] : w.adversaries)
            if (adv.alive) threats.push_back(&adv);
        if (threats.empty()) {
            a.activity = Idle{};
            return;
        }
        auto danger = [&](Cell c) {
            int best = INT_MAX;
            for (const auto* adv : threats) best = std::min(best, chebyshev(c, adv->pos));
            return best;
        };
        Cell best = a.pos;
        int best_score = danger(a.pos);
        if (a.energy > 0.0 && a.energy >= w.cfg.move_cost) {
            for (Cell n : neighbors4(a.pos)) {
                if (!w.grid.is_free(n) || w.cell_occupied(n, a.id)) continue;
                int s = danger(n);
                if (s > best_score) {
                    best_score = s;
                    best = n;
                }
            }
        }
        if (best != a.pos) {
            a.pos = best;
            a.energy -= w.cfg.move_cost;
            trace.add(w.tick, EventKind::Move,
                      {f_int("agent", a.id), f_int("x", a.pos.x), f_int("y", a.pos.y), f_dbl("cost", w.cfg.move_cost)});
        }
        return;
    }
}

void advance_adversary(World& w, Trace& trace, AdversaryState& adv) {
    if (!adv.alive || adv.patrol.empty()) return;
    Cell target = adv.patrol[adv.patrol_idx];
    if (target == adv.pos) {
        adv.patrol_idx = (adv.patrol_idx + 1) % adv.patrol.size();
        target = adv.patrol[adv.patrol_idx];
    }
    if (target == adv.pos) return;
    // One greedy 4-neighborhood step toward the waypoint.
    Cell best = adv.pos;
    int best_d = manhattan(adv.pos, target);
    for (Cell n : neighbors4(adv.pos)) {
        if (!w.grid.is_free(n)) continue;
        int d = manhattan(n, target);
        if (d < best_d) {
            best_d = d;
            best = n;
        }
    }
    if (best != adv.pos) {
        adv.pos = best;
        trace.add(w.tick, EventKind::Move,
                  {f_int("adversary", adv.id), f_int("x", adv.pos.x), f_int("y", adv.pos.y)});
    }
}

}  // namespace

bool World::cell_occupied(Cell c, int ignore_agent) const {
    for (const auto& [id, a] : agents) {
        if (id != ignore_agent && a.pos == c) return true;
    }
    return false;
}

const AgentState& World::agent(int id) const {
    auto it = agents.find(id);
    if (it == agents.end()) throw ValidationError("unknown agent id " + format_int(id));
    return it->second;
}

AgentState& World::agent(int id) {
    auto it = agents.find(id);
    if (it == agents.end()) throw ValidationError("unknown agent id " + format_int(id));
    return it->second;
}

void World::validate() const {
    std::set<Cell> seen;
    for (const auto& [id, a] : agents) {
        if (!grid.is_free(a.pos)) throw ValidationError("agent " + format_int(id) + " on blocked/out-of-bounds cell");
        if (!seen.insert(a.pos).second) throw ValidationError("two agents share a cell");
        if (a.energy < 0.0) throw ValidationError("agent " + format_int(id) + " has negative energy");
        for (const auto& [cap, v] : a.capabilities)
            if (v < 0.0 || v > 1.0) throw ValidationError("agent " + format_int(id) + " capability out of [0,1]");
    }
    for (const auto& [id, t] : tasks) {
        if (!grid.is_free(t.pos)) throw ValidationError("task " + format_int(id) + " on blocked/out-of-bounds cell");
        if (t.status == TaskStatus::Assigned && !t.assigned_to)
            throw ValidationError("assigned task " + format_int(id) + " lacks an agent");
    }
    for (const auto& [id, adv] : adversaries) {
        if (!grid.is_free(adv.pos))
            throw ValidationError("adversary " + format_int(id) + " on blocked/out-of-bounds cell");
    }
    if (bus.loss_prob < 0.0 || bus.loss_prob >= 1.0) throw ValidationError("loss_prob must be in [0,1)");
    if (bus.delay < 0) throw ValidationError("bus delay must be non-negative");
}

std::vector<uint64_t> send(World& w, Trace& trace, int sender, int recipient, const NegotiationMessage& msg) {
    if (!w.agents.count(sender)) throw ValidationError("send: unknown sender " + format_int(sender));
    std::vector<int> recipients;
    if (recipient == kBroadcast) {
        for (const auto& [id, a] : w.agents)
            if (id != sender) recipients.push_back(id);
    } else {
        if (!w.agents.count(recipient)) throw ValidationError("send: unknown recipient " + format_int(recipient));
        recipients.push_back(recipient);
    }
    std::vector<uint64_t> seqs;
    for (int to : recipients) {
        Envelope env;
        env.seq = w.next_seq++;
        env.sender = sender;
        env.recipient = to;
        env.sent_tick = w.tick;
        env.deliver_at = w.tick + w.bus.delay;
        env.msg = msg;
        bool lost = w.bus.loss_prob > 0.0 && w.rng.uniform01() < w.bus.loss_prob;
        if (lost) {
            auto& e = trace.add(w.tick, EventKind::Drop,
                                {f_int("seq", static_cast<long long>(env.seq)), f_int("from", sender),
                                 f_int("to", to), f_str("kind", message_kind_name(msg))});
            payload_fields(msg, e);
        } else {
            auto& e = trace.add(w.tick, EventKind::Send,
                                {f_int("seq", static_cast<long long>(env.seq)), f_int("from", sender),
                                 f_int("to", to), f_int("deliver_at", env.deliver_at),
                                 f_str("kind", message_kind_name(msg))});
            payload_fields(msg, e);
            w.bus.in_flight.push_back(std::move(env));
            seqs.push_back(w.next_seq - 1);
        }
    }
    return seqs;
}

Observation observe(World& w, int agent_id, int radius) {
    if (radius < 0) throw ValidationError("observe: negative radius");
    const AgentState& self = w.agent(agent_id);
    const double omit = w.cfg.observe_omission_prob;
    auto keep = [&](void) {
        if (omit <= 0.0) return true;
        return w.rng.uniform01() >= omit;
    };
    Observation obs;
    obs.observer = agent_id;
    obs.tick = w.tick;
    for (const auto& [id, a] : w.agents) {
        if (id == agent_id) continue;
        if (chebyshev(a.pos, self.pos) <= radius && keep()) obs.visible_agents.push_back(a);
    }
    for (const auto& [id, t] : w.tasks) {
        if (chebyshev(t.pos, self.pos) <= radius && keep()) obs.visible_tasks.push_back(t);
    }
    for (const auto& [id, adv] : w.adversaries) {
        if (!adv.alive) continue;
        if (chebyshev(adv.pos, self.pos) <= radius && keep()) obs.visible_adversaries.push_back(adv);
    }
    return obs;
}

Observation observe(const World& w, int agent_id, int radius) {
    if (w.cfg.observe_omission_prob > 0.0)
        throw ValidationError("observe: omission sampling needs a mutable world");
    return observe(const_cast<World&>(w), agent_id, radius);
}

void step(World& w, Trace& trace, const StepHooks& hooks) {
    w.tick += 1;

    // Deliver everything due, in (deliver_at, sender, seq) order.
    std::vector<Envelope> due;
    auto& fleet = w.bus.in_flight;
    for (auto it = fleet.begin(); it != fleet.end();) {
        if (it->deliver_at <= w.tick) {
            due.push_back(std::move(*it));
            it = fleet.erase(it);
        } else {
            ++it;
        }
    }
    std::sort(due.begin(), due.end(), [](const Envelope& a, const Envelope& b) {
        return std::tie(a.deliver_at, a.sender, a.seq) < std::tie(b.deliver_at, b.sender, b.seq);
    });
    for (auto& env : due) {
        trace.add(w.tick, EventKind::Deliver,
                  {f_int("seq", static_cast<long long>(env.seq)), f_int("from", env.sender),
                   f_int("to", env.recipient), f_str("kind", message_kind_name(env.msg))});
        w.inboxes[env.recipient].push_back(std::move(env));
    }

    // Agent brains, ascending id. Without a brain the inbox accumulates so
    // tests can inspect deliveries.
    if (hooks.on_agent) {
        for (auto& [id, a] : w.agents) {
            std::vector<Envelope> inbox = std::move(w.inboxes[id]);
            w.inboxes[id].clear();
            hooks.on_agent(w, trace, id, inbox);
        }
    }

    // Activities, ascending id.
    for (auto& [id, a] : w.agents) advance_agent(w, trace, a);

    for (auto& [id, adv] : w.adversaries) advance_adversary(w, trace, adv);

    // Deadlines: a task still pending after its deadline tick expires.
    for (auto& [id, t] : w.tasks) {
        if (t.active() && t.deadline && *t.deadline < w.tick) {
            t.status = TaskStatus::Expired;
            trace.add(w.tick, EventKind::Expire, {f_int("task", id)});
        }
    }

    if (hooks.on_tick_end) hooks.on_tick_end(w, trace);
}

void set_task_status(World& w, int task_id, TaskStatus status, std::optional<int> assigned_to) {
    auto it = w.tasks.find(task_id);
    if (it == w.tasks.end()) throw ValidationError("unknown task id " + format_int(task_id));
    Task& t = it->second;
    if (t.status == TaskStatus::Done || t.status == TaskStatus::Expired)
        throw ValidationError("task " + format_int(task_id) + " is terminal");
    if (status == TaskStatus::Assigned && !assigned_to)
        throw ValidationError("Assigned requires an agent id");
    t.status = status;
    t.assigned_to = (status == TaskStatus::Assigned) ? assigned_to : std::nullopt;
}

void trace_spawns(const World& w, Trace& trace) {
    for (const auto& [id, a] : w.agents) {
        trace.add(w.tick, EventKind::Spawn,
                  {f_str("entity", "agent"), f_int("id", id), f_int("x", a.pos.x), f_int("y", a.pos.y),
                   f_dbl("energy", a.energy)});
    }
    for (const auto& [id, t] : w.tasks) {
        trace.add(w.tick, EventKind::Spawn,
                  {f_str("entity", "task"), f_int("id", id), f_int("x", t.pos.x), f_int("y", t.pos.y),
                   f_dbl("reward", t.reward), f_int("deadline", t.deadline ? *t.deadline : -1)});
    }
    for (const auto& [id, adv] : w.adversaries) {
        trace.add(w.tick, EventKind::Spawn,
                  {f_str("entity", "adversary"), f_int("id", id), f_int("x", adv.pos.x), f_int("y", adv.pos.y)});
    }
    for (int y = 0; y < w.grid.height(); ++y) {
        for (int x = 0; x < w.grid.width(); ++x) {
            Cell c{x, y};
            if (w.grid.is_obstacle(c)) {
                trace.add(w.tick, EventKind::Spawn, {f_str("entity", "obstacle"), f_int("x", x), f_int("y", y)});
            }
        }
    }
}

}  // namespace sass
