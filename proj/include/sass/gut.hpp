#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sass/core.hpp"

namespace sass {

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> init);

    double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

struct MixedStrategy {
    std::vector<double> p;  // non-negative, sums to 1
};

struct GameSolution {
    MixedStrategy row;
    MixedStrategy col;
    double value = 0.0;
};

// Max gain either player gets by deviating to a pure best response.
double exploitability(const Matrix& payoff, const MixedStrategy& row, const MixedStrategy& col);

// Zero-sum mixed Nash equilibrium (row maximizes, col minimizes), exploitability
// <= 1e-6. Square-support enumeration up to 4x4, lexicographically first valid
// support wins; larger games fall back to regret-matching+ self-play.
GameSolution solve_matrix_game(const Matrix& payoff);

// State features the scenario payoff formulas are affine in.
struct StateFeatures {
    double team_size_ratio = 0.0;   // team / (team + adversaries)
    double energy_ratio = 0.0;      // mean team energy / energy_full
    double distance_to_goal = 0.0;  // normalized remaining distance in [0,1]
};

struct PayoffCoeffs {
    double c0 = 0.0;
    double c_team = 0.0;
    double c_energy = 0.0;
    double c_dist = 0.0;

    double eval(const StateFeatures& s) const {
        return c0 + c_team * s.team_size_ratio + c_energy * s.energy_ratio + c_dist * s.distance_to_goal;
    }
    static PayoffCoeffs constant(double v) { return {v, 0.0, 0.0, 0.0}; }
};

// One level of the utility tree: a two-player zero-sum game whose joint
// strategies may index child games.
struct GutNode {
    std::string id;
    int level = 0;
    std::vector<std::string> row_strategies;
    std::vector<std::string> col_strategies;
    std::vector<PayoffCoeffs> coeffs;  // row-major, rows*cols entries
    std::map<std::pair<int, int>, GutNode> children;

    int rows() const { return static_cast<int>(row_strategies.size()); }
    int cols() const { return static_cast<int>(col_strategies.size()); }
    const PayoffCoeffs& coeff(int i, int j) const { return coeffs[static_cast<size_t>(i) * cols() + j]; }
    PayoffCoeffs& coeff(int i, int j) { return coeffs[static_cast<size_t>(i) * cols() + j]; }

    Matrix payoff(const StateFeatures& s) const;
    const GutNode* child(int i, int j) const;

    // Checks dimensions and child indices, recursively.
    void validate() const;
    int node_count() const;
};

enum class SelectorKind { Argmax, Sample };

struct DescentStep {
    std::string node_id;
    int level = 0;
    int row = 0;
    int col = 0;
    std::string row_name;
    std::string col_name;
};

using StrategyCombination = std::vector<DescentStep>;

struct DescentResult {
    StrategyCombination combo;
    double root_value = 0.0;
};

using SolveObserver = std::function<void(const GutNode&, const GameSolution&)>;

// Solves the game at each visited node, picks the joint strategy per the
// selector (Argmax: highest-probability row/col, ties lowest index; Sample:
// seeded draws from the mixed strategies) and recurses into the matching child.
DescentResult descend(const GutNode& gut, const StateFeatures& state, SelectorKind selector, uint64_t seed = 0,
                      const SolveObserver& on_solve = nullptr);

// Discounted sum of the combo's payoff entries across levels, weight gamma^level.
double expected_payoff(const GutNode& gut, const StateFeatures& state, const StrategyCombination& combo,
                       double gamma = 1.0);

}  // namespace sass
