#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sass/gut.hpp"
#include "sass/learning.hpp"
#include "sass/needs.hpp"
#include "sass/negotiation.hpp"
#include "sass/world.hpp"

namespace sass {

struct GutSpec {
    bool present = false;
    GutNode root;
    std::map<PosteriorKey, double> hidden;  // true outcome probabilities per cell

    double hidden_p(const PosteriorKey& key) const {
        auto it = hidden.find(key);
        return it == hidden.end() ? 0.5 : it->second;
    }
};

// Parsed sass-scenario v1 file: world layout, rosters, configs, and the
// GUT section for adversarial runs.
struct Scenario {
    enum class Mode { Usar, Explore };

    std::string name = "inline";
    std::string raw;  // exact bytes, hashed into trace headers
    Mode mode = Mode::Usar;
    int horizon = 100;

    Grid grid;
    WorldConfig world_cfg;
    NeedsConfig needs_cfg;
    NegotiationConfig nego_cfg;
    int bus_delay = 0;
    double bus_loss = 0.0;
    int trust_interval = 10;

    std::set<std::string> capabilities;
    std::vector<AgentState> agents;
    std::vector<Task> tasks;
    std::vector<AdversaryState> adversaries;

    // Explore-mode settings.
    int goal_x = -1;
    int encounter_radius = 1;
    double win_value = 1.0;
    double loss_value = -1.0;
    double gamma = 1.0;
    double eps_reach = 0.0;
    double failure_penalty = 5.0;

    GutSpec gut;

    uint64_t hash() const { return Fnv1a64::of(raw); }
};

Scenario parse_scenario(const std::string& text, const std::string& name = "inline");
Scenario load_scenario(const std::string& path);

World build_world(const Scenario& sc, uint64_t seed);

}  // namespace sass
