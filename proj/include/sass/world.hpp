#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sass/core.hpp"
#include "sass/messages.hpp"
#include "sass/trace.hpp"

namespace sass {

// --- Agent activities ---------------------------------------------------

struct Idle {};
struct Moving {
    std::vector<Cell> waypoints;  // remaining cells, front next
    size_t next = 0;
    int blocked_ticks = 0;
};
struct Executing {
    int task_id = 0;
};
struct Recharging {};
struct Avoiding {};

using Activity = std::variant<Idle, Moving, Executing, Recharging, Avoiding>;

struct AgentState {
    int id = 0;
    Cell pos;
    double energy = 0.0;
    std::map<std::string, double> capabilities;  // name -> skill in [0,1]
    Activity activity = Idle{};

    double skill(const std::string& cap) const {
        auto it = capabilities.find(cap);
        return it == capabilities.end() ? 0.0 : it->second;
    }
    bool is_moving() const { return std::holds_alternative<Moving>(activity); }
};

enum class TaskStatus { Open, Assigned, Done, Expired };

struct Task {
    int id = 0;
    Cell pos;
    std::map<std::string, double> required_capabilities;
    double reward = 1.0;
    std::optional<int> deadline;
    TaskStatus status = TaskStatus::Open;
    std::optional<int> assigned_to;

    bool active() const { return status == TaskStatus::Open || status == TaskStatus::Assigned; }
};

struct AdversaryState {
    int id = 0;
    Cell pos;
    std::vector<Cell> patrol;  // waypoint cycle; empty = stationary
    size_t patrol_idx = 0;
    bool alive = true;
};

struct Observation {
    int observer = 0;
    int tick = 0;
    std::vector<AgentState> visible_agents;      // self excluded
    std::vector<Task> visible_tasks;
    std::vector<AdversaryState> visible_adversaries;
};

struct MessageBus {
    std::vector<Envelope> in_flight;
    int delay = 0;
    double loss_prob = 0.0;
};

struct WorldConfig {
    double move_cost = 1.0;
    double execute_cost = 1.0;
    double recharge_rate = 1.0;
    double energy_full = 10.0;
    int sensing_radius = 6;
    double observe_omission_prob = 0.0;  // optional noisy-perception stub
};

// Discrete-time grid world. One step advances the tick by exactly one:
// deliveries, then agent brains, then activities, adversaries, deadlines,
// all in fixed id order.
struct World {
    int tick = 0;
    Grid grid;
    WorldConfig cfg;
    std::map<int, AgentState> agents;
    std::map<int, Task> tasks;
    std::map<int, AdversaryState> adversaries;
    MessageBus bus;
    Rng rng{0};
    uint64_t next_seq = 0;
    std::map<int, std::vector<Envelope>> inboxes;

    bool cell_occupied(Cell c, int ignore_agent = -1) const;
    const AgentState& agent(int id) const;
    AgentState& agent(int id);

    void validate() const;
};

struct StepHooks {
    // Called once per agent in ascending id order with that tick's inbox.
    std::function<void(World&, Trace&, int agent_id, const std::vector<Envelope>& inbox)> on_agent;
    // Called after activities/adversaries/deadlines, before the step returns.
    std::function<void(World&, Trace&)> on_tick_end;
};

// Enqueues (or drops, per loss_prob) one envelope per recipient; recipient
// kBroadcast fans out to every other agent in id order. Returns sequence
// numbers of the enqueued (not dropped) envelopes.
std::vector<uint64_t> send(World& w, Trace& trace, int sender, int recipient, const NegotiationMessage& msg);

// Snapshot of everything within Chebyshev distance `radius` of the agent.
Observation observe(World& w, int agent_id, int radius);
Observation observe(const World& w, int agent_id, int radius);

void step(World& w, Trace& trace, const StepHooks& hooks = {});

// Status transition guard: Done/Expired are terminal.
void set_task_status(World& w, int task_id, TaskStatus status, std::optional<int> assigned_to = std::nullopt);

// Emits Spawn events for every entity currently in the world (tick 0 setup).
void trace_spawns(const World& w, Trace& trace);

}  // namespace sass
