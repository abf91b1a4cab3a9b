#pragma once

#include <array>
#include <limits>
#include <string>

#include "sass/core.hpp"

namespace sass {

struct AgentState;
struct Observation;
struct Task;

// Five ordered need levels, lowest first. Lower levels gate the higher ones.
enum class NeedLevel { Safety = 0, Basic = 1, Capability = 2, Teaming = 3, SelfUpgrade = 4 };

inline const char* need_level_name(NeedLevel l) {
    constexpr const char* names[] = {"safety", "basic", "capability", "teaming", "self_upgrade"};
    return names[static_cast<int>(l)];
}

// Satisfaction scores, 1 = fully satisfied.
struct NeedsVector {
    double safety = 1.0;
    double basic = 1.0;
    double capability = 1.0;
    double teaming = 1.0;
    double self_upgrade = 1.0;

    std::array<double, 5> as_array() const { return {safety, basic, capability, teaming, self_upgrade}; }
    bool valid() const {
        for (double v : as_array())
            if (!(v >= 0.0 && v <= 1.0)) return false;
        return true;
    }
};

// Distribution over *unmet* need (deficits), sums to 1.
struct NeedsDistribution {
    std::array<double, 5> p{};
};

struct NeedsConfig {
    double safety_radius = 4.0;
    double energy_full = 10.0;
    double alpha = 1.0;      // distance penalty weight in task utility
    double move_cost = 1.0;  // per-step energy cost, mirrors the world config
    std::array<double, 5> thresholds = {0.3, 0.2, 0.0, 0.0, 0.0};
};

// Scores the five levels from the agent's state and what it currently sees.
// self_upgrade is supplied by the learning layer (0 when absent).
NeedsVector evaluate_needs(const AgentState& agent, const Observation& obs, const NeedsConfig& cfg,
                           double self_upgrade_score = 0.0);

// Deficits 1-v floored at 1e-9 and normalized; RNE compares what agents lack.
NeedsDistribution needs_distribution(const NeedsVector& nv);

// Lowest level whose score is below its threshold; SelfUpgrade when all are met.
NeedLevel priority_gate(const NeedsVector& nv, const std::array<double, 5>& thresholds);

// Mean skill over the task's required capabilities; 1 for an unconstrained task.
double capability_match(const AgentState& agent, const Task& task);

// -inf when the agent is ineligible (missing capability, or gated below
// Capability); otherwise match * reward - alpha * manhattan * move_cost.
double task_utility(const AgentState& agent, const Task& task, const NeedsVector& nv, const NeedsConfig& cfg);

inline constexpr double kIneligible = -std::numeric_limits<double>::infinity();

}  // namespace sass
