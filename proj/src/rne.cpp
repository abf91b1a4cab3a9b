#include "sass/rne.hpp"

#include <algorithm>
#include <cmath>

namespace sass {

namespace {

constexpr double kEps = 1e-9;

// Assumes support(p) is covered by support(q); 0*ln(0) = 0.
double raw_kl(const std::array<double, 5>& p, const std::array<double, 5>& q) {
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        if (p[i] > 0.0) sum += p[i] * std::log(p[i] / q[i]);
    }
    return sum;
}

}  // namespace

double kl_divergence(const NeedsDistribution& p, const NeedsDistribution& q) {
    std::array<double, 5> qf;
    double total = 0.0;
    for (int i = 0; i < 5; ++i) {
        qf[i] = std::max(q.p[i], kEps);
        total += qf[i];
    }
    for (auto& v : qf) v /= total;
    double d = raw_kl(p.p, qf);
    return std::max(d, 0.0);
}

double js_divergence(const NeedsDistribution& p, const NeedsDistribution& q) {
    // Canonical argument order makes js(p,q) and js(q,p) run the exact same
    // float operations.
    const std::array<double, 5>* a = &p.p;
    const std::array<double, 5>* b = &q.p;
    if (std::lexicographical_compare(b->begin(), b->end(), a->begin(), a->end())) std::swap(a, b);
    std::array<double, 5> m;
    for (int i = 0; i < 5; ++i) m[i] = 0.5 * ((*a)[i] + (*b)[i]);
    double d = 0.5 * raw_kl(*a, m) + 0.5 * raw_kl(*b, m);
    return std::clamp(d, 0.0, std::log(2.0));
}

double trust(const NeedsDistribution& p, const NeedsDistribution& q) {
    return 1.0 - js_divergence(p, q) / std::log(2.0);
}

TrustMatrix trust_matrix(const std::vector<int>& agent_ids, const std::vector<NeedsDistribution>& dists) {
    if (agent_ids.size() != dists.size() || dists.empty())
        throw ValidationError("trust_matrix: ids and distributions must match and be non-empty");
    const int n = static_cast<int>(dists.size());
    TrustMatrix tm;
    tm.agent_ids = agent_ids;
    tm.m.assign(n, std::vector<double>(n, 1.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double t = std::clamp(trust(dists[i], dists[j]), 0.0, 1.0);
            tm.m[i][j] = t;
            tm.m[j][i] = t;  // computed once, mirrored: symmetry is exact
        }
    }
    return tm;
}

TrustMatrix trust_matrix(const std::vector<NeedsDistribution>& dists) {
    std::vector<int> ids(dists.size());
    for (size_t i = 0; i < dists.size(); ++i) ids[i] = static_cast<int>(i);
    return trust_matrix(ids, dists);
}

std::vector<std::vector<int>> group_by_trust(const TrustMatrix& tm, double tau) {
    const int n = tm.size();
    std::vector<int> comp(n, -1);
    int next = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] != -1) continue;
        // BFS flood fill over the >= tau edge set.
        std::vector<int> stack{s};
        comp[s] = next;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (comp[v] == -1 && tm.m[u][v] >= tau) {
                    comp[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    std::vector<std::vector<int>> groups(next);
    for (int i = 0; i < n; ++i) groups[comp[i]].push_back(tm.agent_ids[i]);
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return groups;
}

}  // namespace sass
