#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "maopac/errors.hpp"

namespace maopac {

constexpr double kRewardMax = 1.0;  // exact-hit reward, so |r| <= 1

/// Static description of the radar/target grid instance. States and actions
/// are both the cells of an h x h grid, indexed row-major.
struct GridConfig {
    int grid_side = 4;
    std::vector<int> agent_positions;  // fixed radar cells, one per agent
    double sigma = 1.0;                // observation noise std, grid-cell units
    std::uint64_t seed = 0;

    int state_count() const { return grid_side * grid_side; }
    int agent_count() const { return static_cast<int>(agent_positions.size()); }
};

/// Noisy distance measurement.
struct Observation {
    double value = 0.0;
};

inline int manhattan(int cell_a, int cell_b, int h) {
    int ra = cell_a / h, ca = cell_a % h;
    int rb = cell_b / h, cb = cell_b % h;
    return std::abs(ra - rb) + std::abs(ca - cb);
}

/// The dec-POMDP grid environment: one hidden target moving over the grid,
/// K fixed radars observing noisy Manhattan distances.
class GridEnv {
public:
    explicit GridEnv(const GridConfig& cfg) : cfg_(cfg) {
        const int cells = cfg_.state_count();
        if (cfg_.grid_side < 2) throw ConfigError("grid_side must be at least 2");
        if (cfg_.agent_count() < 1) throw ConfigError("at least one agent is required");
        if (cfg_.agent_count() > cells)
            throw ConfigError("more agents (" + std::to_string(cfg_.agent_count()) +
                              ") than grid cells (" + std::to_string(cells) + ")");
        for (int p : cfg_.agent_positions)
            if (p < 0 || p >= cells)
                throw ConfigError("agent position " + std::to_string(p) + " outside grid");
        for (std::size_t i = 0; i < cfg_.agent_positions.size(); ++i)
            for (std::size_t j = i + 1; j < cfg_.agent_positions.size(); ++j)
                if (cfg_.agent_positions[i] == cfg_.agent_positions[j])
                    throw ConfigError("agent positions must be distinct cells");
        reset(cfg_.seed);
    }

    void reset(std::uint64_t seed) {
        rng_.seed(seed);
        std::uniform_int_distribution<int> cell(0, cfg_.state_count() - 1);
        target_cell_ = cell(rng_);
        last_hits_ = cfg_.agent_positions;
    }

    int target_cell() const { return target_cell_; }
    const GridConfig& config() const { return cfg_; }

    /// Applies the joint action (one hit cell per agent). Rewards the exact
    /// hits, then moves the target within its Moore neighborhood to the cell
    /// maximizing the minimum Manhattan distance to the joint hits.
    std::vector<double> step(const std::vector<int>& joint_action) {
        const int cells = cfg_.state_count();
        if (static_cast<int>(joint_action.size()) != cfg_.agent_count())
            throw ConfigError("joint action has wrong arity");
        for (int k = 0; k < cfg_.agent_count(); ++k)
            if (joint_action[k] < 0 || joint_action[k] >= cells)
                throw ConfigError("agent " + std::to_string(k) + " chose out-of-range action " +
                                  std::to_string(joint_action[k]));
        std::vector<double> rewards(cfg_.agent_count(), 0.0);
        for (int k = 0; k < cfg_.agent_count(); ++k)
            rewards[k] = (joint_action[k] == target_cell_) ? 1.0 : 0.0;

        last_hits_ = joint_action;
        auto candidates = moore_neighborhood(target_cell_);
        int best_score = -1;
        std::vector<int> best;
        for (int c : candidates) {
            int score = cfg_.state_count() * 2;
            for (int hit : last_hits_) score = std::min(score, manhattan(c, hit, cfg_.grid_side));
            if (score > best_score) {
                best_score = score;
                best = {c};
            } else if (score == best_score) {
                best.push_back(c);
            }
        }
        std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
        target_cell_ = best[pick(rng_)];
        return rewards;
    }

    /// Noisy Manhattan distance from agent k's radar to the target.
    Observation observe(int agent) {
        if (agent < 0 || agent >= cfg_.agent_count())
            throw ConfigError("invalid agent index " + std::to_string(agent));
        double d = manhattan(cfg_.agent_positions[agent], target_cell_, cfg_.grid_side);
        if (cfg_.sigma == 0.0) return Observation{d};
        std::normal_distribution<double> noise(0.0, cfg_.sigma);
        return Observation{d + noise(rng_)};
    }

    /// Gaussian density of observation xi under hypothesis state s for agent k.
    /// Strictly positive for all finite xi, so KL divergences stay finite.
    /// With sigma == 0 the density degenerates to the exact-distance indicator.
    double likelihood(int agent, const Observation& xi, int state) const {
        if (cfg_.sigma < 0.0) throw ConfigError("likelihood requires sigma >= 0");
        double mean = manhattan(cfg_.agent_positions[agent], state, cfg_.grid_side);
        if (cfg_.sigma == 0.0) return xi.value == mean ? 1.0 : 0.0;
        double z = (xi.value - mean) / cfg_.sigma;
        return std::exp(-0.5 * z * z) / (cfg_.sigma * std::sqrt(2.0 * M_PI));
    }

    double log_likelihood(int agent, const Observation& xi, int state) const {
        if (cfg_.sigma < 0.0) throw ConfigError("likelihood requires sigma >= 0");
        double mean = manhattan(cfg_.agent_positions[agent], state, cfg_.grid_side);
        if (cfg_.sigma == 0.0)
            return xi.value == mean ? 0.0 : -std::numeric_limits<double>::infinity();
        double z = (xi.value - mean) / cfg_.sigma;
        return -0.5 * z * z - std::log(cfg_.sigma * std::sqrt(2.0 * M_PI));
    }

    /// Cells within Chebyshev distance 1, including the cell itself.
    std::vector<int> moore_neighborhood(int cell) const {
        const int h = cfg_.grid_side;
        int r = cell / h, c = cell % h;
        std::vector<int> out;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                int nr = r + dr, nc = c + dc;
                if (nr >= 0 && nr < h && nc >= 0 && nc < h) out.push_back(nr * h + nc);
            }
        return out;
    }

private:
    GridConfig cfg_;
    int target_cell_ = 0;
    std::vector<int> last_hits_;
    std::mt19937_64 rng_;
};

}  // namespace maopac
