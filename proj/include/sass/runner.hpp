#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sass/learning.hpp"
#include "sass/scenario.hpp"
#include "sass/trace.hpp"

namespace sass {

enum class Policy { Sass, RandomBaseline };

struct Metrics {
    Scenario::Mode mode = Scenario::Mode::Usar;
    // usar
    int victims_rescued = 0;
    std::optional<int> completion_tick;
    double total_energy = 0.0;
    // explore (single run: success_rate is 0 or 1)
    double success_rate = 0.0;
    double mean_cost = 0.0;
};

struct RunOptions {
    Policy policy = Policy::Sass;
    const OutcomePosterior* posterior = nullptr;  // explore: overrides affine payoffs
};

struct RunResult {
    Metrics metrics;
    Trace trace;
};

RunResult run(const Scenario& sc, uint64_t seed, const RunOptions& options = {});

// Metrics are a pure function of the trace.
Metrics metrics_from_trace(const Trace& trace, Scenario::Mode mode);

struct SweepResult {
    std::vector<std::pair<uint64_t, Metrics>> per_seed;  // in input order
    double usar_mean_victims = 0.0;
    double usar_median_victims = 0.0;
    double explore_success_rate = 0.0;
    double explore_mean_cost = 0.0;

    void write_csv(std::ostream& out) const;
};

SweepResult sweep(const Scenario& sc, const std::vector<uint64_t>& seeds, const RunOptions& options = {});

// Renders per-tick ASCII frames plus an event digest. Returns a process exit
// code: 0 ok, 3 malformed, 4 integrity failure.
int replay(const std::string& trace_path, std::ostream& out, std::ostream& err);
int replay_text(const std::string& trace_text, std::ostream& out, std::ostream& err);

// One explore episode, shared by run() and adapt_loop().
struct ExploreEpisodeResult {
    bool success = false;
    double cost = 0.0;
    double root_value = 0.0;
};
ExploreEpisodeResult run_explore_episode(const Scenario& sc, uint64_t seed, Trace& trace,
                                         OutcomePosterior* posterior, int episode_index);

}  // namespace sass
