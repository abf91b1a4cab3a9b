#include "sass/needs.hpp"

#include <algorithm>
#include <cmath>

#include "sass/world.hpp"

namespace sass {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

NeedsVector evaluate_needs(const AgentState& agent, const Observation& obs, const NeedsConfig& cfg,
                           double self_upgrade_score) {
    if (cfg.safety_radius <= 0.0 || cfg.energy_full <= 0.0)
        throw ValidationError("needs config: safety_radius and energy_full must be positive");

    NeedsVector nv;

    // Safety: distance to the nearest threat (adversary or moving agent),
    // scaled by the safety radius. Nothing visible means fully safe.
    int min_threat = -1;
    for (const auto& adv : obs.visible_adversaries) {
        int d = chebyshev(agent.pos, adv.pos);
        if (min_threat < 0 || d < min_threat) min_threat = d;
    }
    for (const auto& other : obs.visible_agents) {
        if (!other.is_moving()) continue;
        int d = chebyshev(agent.pos, other.pos);
        if (min_threat < 0 || d < min_threat) min_threat = d;
    }
    nv.safety = min_threat < 0 ? 1.0 : clamp01(static_cast<double>(min_threat) / cfg.safety_radius);

    nv.basic = clamp01(agent.energy / cfg.energy_full);

    // Capability: best single-task match among visible open tasks.
    bool any_open = false;
    double best_match = 0.0;
    for (const auto& t : obs.visible_tasks) {
        if (t.status != TaskStatus::Open) continue;
        any_open = true;
        best_match = std::max(best_match, capability_match(agent, t));
    }
    nv.capability = any_open ? clamp01(best_match) : 1.0;

    // Teaming: fraction of visible outstanding tasks the team already claimed.
    int assigned = 0, outstanding = 0;
    for (const auto& t : obs.visible_tasks) {
        if (t.status == TaskStatus::Assigned) {
            ++assigned;
            ++outstanding;
        } else if (t.status == TaskStatus::Open) {
            ++outstanding;
        }
    }
    nv.teaming = outstanding == 0 ? 1.0 : clamp01(static_cast<double>(assigned) / outstanding);

    nv.self_upgrade = clamp01(self_upgrade_score);
    return nv;
}

NeedsDistribution needs_distribution(const NeedsVector& nv) {
    constexpr double kEps = 1e-9;
    NeedsDistribution d;
    auto scores = nv.as_array();
    double total = 0.0;
    for (int i = 0; i < 5; ++i) {
        d.p[i] = std::max(1.0 - scores[i], kEps);
        total += d.p[i];
    }
    for (auto& v : d.p) v /= total;
    return d;
}

NeedLevel priority_gate(const NeedsVector& nv, const std::array<double, 5>& thresholds) {
    auto scores = nv.as_array();
    for (int i = 0; i < 5; ++i) {
        if (scores[i] < thresholds[i]) return static_cast<NeedLevel>(i);
    }
    return NeedLevel::SelfUpgrade;
}

double capability_match(const AgentState& agent, const Task& task) {
    if (task.required_capabilities.empty()) return 1.0;
    double sum = 0.0;
    for (const auto& [cap, need] : task.required_capabilities) sum += agent.skill(cap);
    return sum / static_cast<double>(task.required_capabilities.size());
}

double task_utility(const AgentState& agent, const Task& task, const NeedsVector& nv, const NeedsConfig& cfg) {
    if (task.status != TaskStatus::Open) return kIneligible;
    for (const auto& [cap, need] : task.required_capabilities) {
        if (agent.skill(cap) < need) return kIneligible;
    }
    if (priority_gate(nv, cfg.thresholds) < NeedLevel::Capability) return kIneligible;
    double dist = static_cast<double>(manhattan(agent.pos, task.pos));
    return capability_match(agent, task) * task.reward - cfg.alpha * dist * cfg.move_cost;
}

}  // namespace sass
