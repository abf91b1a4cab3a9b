#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sass/gut.hpp"

namespace sass {

struct Scenario;

struct PosteriorKey {
    std::string node;
    int row = 0;
    int col = 0;
    auto operator<=>(const PosteriorKey&) const = default;
};

struct BetaCounts {
    double alpha = 1.0;  // successes + 1
    double beta = 1.0;   // failures + 1

    double mean() const { return alpha / (alpha + beta); }
    double variance() const {
        double n = alpha + beta;
        return alpha * beta / (n * n * (n + 1.0));
    }
};

// Beta-Bernoulli outcome posteriors, one per (node, row, col) payoff cell.
// Missing keys read as the Beta(1,1) prior.
class OutcomePosterior {
public:
    BetaCounts get(const PosteriorKey& key) const {
        auto it = counts_.find(key);
        return it == counts_.end() ? BetaCounts{} : it->second;
    }
    void update(const PosteriorKey& key, bool success) {
        auto& c = counts_[key];
        if (success)
            c.alpha += 1.0;
        else
            c.beta += 1.0;
    }
    const std::map<PosteriorKey, BetaCounts>& counts() const { return counts_; }

private:
    std::map<PosteriorKey, BetaCounts> counts_;
};

// Rewrites every payoff entry to mean*win + (1-mean)*loss; structure unchanged.
GutNode posterior_payoff(const GutNode& gut, const OutcomePosterior& post, double win_value, double loss_value);

// Removes children whose equilibrium reach probability falls below eps_reach.
// Expects payoffs already substituted (state-independent).
GutNode prune(const GutNode& gut, double eps_reach);

// posterior_payoff followed by prune.
GutNode rebuild(const GutNode& gut, const OutcomePosterior& post, double win_value, double loss_value,
                double eps_reach);

// 1 - mean posterior variance over the tree's cells, normalized by the
// Beta(1,1) variance (1/12): 0 before any evidence, grows toward 1.
double self_upgrade_score(const GutNode& structure, const OutcomePosterior& post);

double mean_posterior_variance(const GutNode& structure, const OutcomePosterior& post);
std::map<PosteriorKey, double> posterior_means_snapshot(const GutNode& structure, const OutcomePosterior& post);

// Per-cell draws theta ~ Beta(alpha, beta) turned into constant payoffs
// theta*win + (1-theta)*loss; cells visited pre-order, row-major.
GutNode thompson_sample(const GutNode& structure, const OutcomePosterior& post, Rng& rng, double win_value,
                        double loss_value);

struct EpisodeRecord {
    int episode = 0;
    bool success = false;
    double cost = 0.0;
    double root_value = 0.0;
    double mean_variance = 0.0;
    std::map<PosteriorKey, double> posterior_means;
};

struct LearningCurve {
    std::vector<EpisodeRecord> episodes;
    void write_csv(std::ostream& out) const;
};

// Episodic adaptation: run the explore scenario with the current posteriors,
// feed every encounter outcome back, rebuild the tree, repeat.
LearningCurve adapt_loop(const Scenario& scenario, int episodes, uint64_t seed,
                         OutcomePosterior* posterior_io = nullptr);

}  // namespace sass
