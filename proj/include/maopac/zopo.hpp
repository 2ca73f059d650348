#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "maopac/actor_critic.hpp"
#include "maopac/errors.hpp"
#include "maopac/policy.hpp"
#include "maopac/social_learning.hpp"

namespace maopac {

struct ZopoConfig {
    double radius = 0.5;      // smoothing radius u_r
    int episodes = 2;         // Monte-Carlo episodes per objective sample
    int horizon = 10;         // steps per episode
    double alpha0 = 0.5;      // ascent step-size scale
    double alpha_exponent = 0.65;

    double alpha(int update) const { return alpha0 / std::pow(1.0 + update, alpha_exponent); }

    void validate() const {
        if (!(radius > 0.0)) throw ConfigError("zopo: radius must be positive");
        if (episodes < 1) throw ConfigError("zopo: episodes must be positive");
        if (horizon < 1) throw ConfigError("zopo: horizon must be positive");
    }
};

/// Uniformly random direction on the unit sphere of the given dimension.
inline std::vector<double> random_unit_direction(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> u(dim);
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (double& x : u) {
            x = g(rng);
            norm_sq += x * x;
        }
    } while (norm_sq == 0.0);
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : u) x *= inv;
    return u;
}

/// Two-point spherical gradient estimator:
/// g = d/(2 u_r) * (J(theta + u_r u) - J(theta - u_r u)) * u.
/// The objective is sampled once per perturbation.
inline std::vector<double> zopo_gradient_estimate(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& theta, double radius, std::mt19937_64& rng) {
    const int dim = static_cast<int>(theta.size());
    std::vector<double> u = random_unit_direction(dim, rng);
    std::vector<double> plus = theta, minus = theta;
    for (int i = 0; i < dim; ++i) {
        plus[i] += radius * u[i];
        minus[i] -= radius * u[i];
    }
    double diff = objective(plus) - objective(minus);
    double scale = dim / (2.0 * radius) * diff;
    std::vector<double> g(dim);
    for (int i = 0; i < dim; ++i) g[i] = scale * u[i];
    return g;
}

struct ZopoTrace {
    // One entry per environment interaction, in the order they happened.
    std::vector<std::vector<double>> rewards;  // [step][agent]
    int updates = 0;
};

/// Decentralized zeroth-order policy search on the shared environment.
/// Each agent holds a local Boltzmann table over (local belief, action),
/// acts on a memoryless private-likelihood belief (no network diffusion),
/// and follows simultaneous two-point perturbations of its own parameters.
/// Consumes 2 * episodes * horizon environment steps per update.
inline ZopoTrace run_zopo(DecPomdp& env, const ZopoConfig& zcfg, int interaction_budget,
                          std::uint64_t seed) {
    zcfg.validate();
    const int agents = env.agent_count();
    const int states = env.state_count();
    const int actions = env.action_count();
    const int dim = actions * states;

    std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc909ull);
    std::vector<std::vector<double>> theta(agents, std::vector<double>(dim, 0.0));

    ZopoTrace trace;

    auto unflatten = [&](const std::vector<double>& flat) {
        PolicyTable t = PolicyTable::zeros(actions, states);
        for (int a = 0; a < actions; ++a)
            for (int s = 0; s < states; ++s) t.theta[a][s] = flat[a * states + s];
        return t;
    };

    // Runs one episode under the given per-agent tables, appending every
    // interaction to the trace; returns the mean per-step global reward.
    auto episode_return = [&](const std::vector<PolicyTable>& tables) {
        double total = 0.0;
        for (int h = 0; h < zcfg.horizon; ++h) {
            std::vector<int> joint(agents);
            for (int k = 0; k < agents; ++k) {
                BeliefVector local = adapt_belief(uniform_belief(states),
                                                  env.observe_log_likelihoods(k));
                std::vector<double> probs = boltzmann_distribution(local, tables[k]);
                std::discrete_distribution<int> dist(probs.begin(), probs.end());
                joint[k] = dist(rng);
            }
            std::vector<double> r = env.step(joint);
            for (double rk : r) total += rk;
            trace.rewards.push_back(std::move(r));
        }
        return total / (zcfg.horizon * agents);
    };

    const int steps_per_update = 2 * zcfg.episodes * zcfg.horizon;
    int update = 0;
    while (static_cast<int>(trace.rewards.size()) + steps_per_update <= interaction_budget) {
        std::vector<std::vector<double>> dirs(agents);
        for (int k = 0; k < agents; ++k) dirs[k] = random_unit_direction(dim, rng);

        auto perturbed = [&](double sign) {
            std::vector<PolicyTable> tables(agents);
            for (int k = 0; k < agents; ++k) {
                std::vector<double> t = theta[k];
                for (int i = 0; i < dim; ++i) t[i] += sign * zcfg.radius * dirs[k][i];
                tables[k] = unflatten(t);
            }
            return tables;
        };

        double j_plus = 0.0, j_minus = 0.0;
        auto tables_plus = perturbed(+1.0);
        for (int e = 0; e < zcfg.episodes; ++e) j_plus += episode_return(tables_plus);
        j_plus /= zcfg.episodes;
        auto tables_minus = perturbed(-1.0);
        for (int e = 0; e < zcfg.episodes; ++e) j_minus += episode_return(tables_minus);
        j_minus /= zcfg.episodes;

        double scale = dim / (2.0 * zcfg.radius) * (j_plus - j_minus) * zcfg.alpha(update);
        for (int k = 0; k < agents; ++k)
            for (int i = 0; i < dim; ++i) theta[k][i] += scale * dirs[k][i];
        ++update;
    }
    trace.updates = update;
    return trace;
}

}  // namespace maopac
