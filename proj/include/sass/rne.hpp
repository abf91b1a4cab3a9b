#pragma once

#include <vector>

#include "sass/needs.hpp"

namespace sass {

// Pairwise trust scores in [0,1]; symmetric with unit diagonal.
struct TrustMatrix {
    std::vector<int> agent_ids;            // index -> agent id, ascending
    std::vector<std::vector<double>> m;    // n x n

    int size() const { return static_cast<int>(agent_ids.size()); }
    double at(int i, int j) const { return m[i][j]; }
};

// KL divergence in nats; q is floored at 1e-9 and renormalized before the division.
double kl_divergence(const NeedsDistribution& p, const NeedsDistribution& q);

// Jensen-Shannon divergence in nats, symmetric, bounded by ln 2. No flooring:
// the mixture dominates both arguments and 0*ln(0) is taken as 0.
double js_divergence(const NeedsDistribution& p, const NeedsDistribution& q);

// trust = 1 - js/ln2.
double trust(const NeedsDistribution& p, const NeedsDistribution& q);

TrustMatrix trust_matrix(const std::vector<int>& agent_ids, const std::vector<NeedsDistribution>& dists);
TrustMatrix trust_matrix(const std::vector<NeedsDistribution>& dists);

// Connected components of the graph with an edge wherever trust >= tau.
// Components are sorted by smallest member id, members ascending.
std::vector<std::vector<int>> group_by_trust(const TrustMatrix& tm, double tau);

}  // namespace sass
