#include "sass/learning.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace sass {

GutNode posterior_payoff(const GutNode& gut, const OutcomePosterior& post, double win_value, double loss_value) {
    GutNode out = gut;
    for (int i = 0; i < out.rows(); ++i) {
        for (int j = 0; j < out.cols(); ++j) {
            double mean = post.get({gut.id, i, j}).mean();
            out.coeff(i, j) = PayoffCoeffs::constant(mean * win_value + (1.0 - mean) * loss_value);
        }
    }
    for (auto& [key, child] : out.children) child = posterior_payoff(child, post, win_value, loss_value);
    return out;
}

namespace {

void prune_impl(GutNode& node, double reach, double eps_reach) {
    if (node.children.empty()) return;
    GameSolution sol = solve_matrix_game(node.payoff(StateFeatures{}));
    for (auto it = node.children.begin(); it != node.children.end();) {
        double child_reach = reach * sol.row.p[it->first.first] * sol.col.p[it->first.second];
        if (child_reach < eps_reach) {
            it = node.children.erase(it);
        } else {
            prune_impl(it->second, child_reach, eps_reach);
            ++it;
        }
    }
}

}  // namespace

GutNode prune(const GutNode& gut, double eps_reach) {
    if (eps_reach < 0.0 || eps_reach >= 1.0) throw ValidationError("prune: eps_reach must be in [0,1)");
    GutNode out = gut;
    prune_impl(out, 1.0, eps_reach);
    return out;
}

GutNode rebuild(const GutNode& gut, const OutcomePosterior& post, double win_value, double loss_value,
                double eps_reach) {
    return prune(posterior_payoff(gut, post, win_value, loss_value), eps_reach);
}

namespace {

void collect_variances(const GutNode& node, const OutcomePosterior& post, double& sum, int& count) {
    for (int i = 0; i < node.rows(); ++i) {
        for (int j = 0; j < node.cols(); ++j) {
            sum += post.get({node.id, i, j}).variance();
            ++count;
        }
    }
    for (const auto& [key, child] : node.children) collect_variances(child, post, sum, count);
}

}  // namespace

double mean_posterior_variance(const GutNode& structure, const OutcomePosterior& post) {
    double sum = 0.0;
    int count = 0;
    collect_variances(structure, post, sum, count);
    return count == 0 ? 0.0 : sum / count;
}

double self_upgrade_score(const GutNode& structure, const OutcomePosterior& post) {
    double score = 1.0 - mean_posterior_variance(structure, post) / BetaCounts{}.variance();
    return std::clamp(score, 0.0, 1.0);
}

namespace {

void collect_means(const GutNode& node, const OutcomePosterior& post, std::map<PosteriorKey, double>& out) {
    for (int i = 0; i < node.rows(); ++i)
        for (int j = 0; j < node.cols(); ++j) out[{node.id, i, j}] = post.get({node.id, i, j}).mean();
    for (const auto& [key, child] : node.children) collect_means(child, post, out);
}

}  // namespace

std::map<PosteriorKey, double> posterior_means_snapshot(const GutNode& structure, const OutcomePosterior& post) {
    std::map<PosteriorKey, double> out;
    collect_means(structure, post, out);
    return out;
}

GutNode thompson_sample(const GutNode& structure, const OutcomePosterior& post, Rng& rng, double win_value,
                        double loss_value) {
    GutNode out = structure;
    for (int i = 0; i < out.rows(); ++i) {
        for (int j = 0; j < out.cols(); ++j) {
            BetaCounts c = post.get({structure.id, i, j});
            double theta = rng.beta(c.alpha, c.beta);
            out.coeff(i, j) = PayoffCoeffs::constant(theta * win_value + (1.0 - theta) * loss_value);
        }
    }
    for (auto& [key, child] : out.children) child = thompson_sample(child, post, rng, win_value, loss_value);
    return out;
}

void LearningCurve::write_csv(std::ostream& out) const {
    out << "episode,success,cost,value,mean_variance\n";
    for (const auto& e : episodes) {
        out << e.episode << "," << (e.success ? 1 : 0) << "," << format_double(e.cost) << ","
            << format_double(e.root_value) << "," << format_double(e.mean_variance) << "\n";
    }
}

}  // namespace sass
