#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "maopac/errors.hpp"
#include "maopac/social_learning.hpp"

namespace maopac {

/// Per-action parameter vectors (theta_a, each of length S) of a Boltzmann
/// policy over beliefs: pi(a|mu) = exp(mu'theta_a) / sum_c exp(mu'theta_c).
struct PolicyTable {
    std::vector<std::vector<double>> theta;  // [action][state]

    int action_count() const { return static_cast<int>(theta.size()); }
    int state_dim() const { return theta.empty() ? 0 : static_cast<int>(theta[0].size()); }

    static PolicyTable zeros(int actions, int states) {
        return PolicyTable{std::vector<std::vector<double>>(actions, std::vector<double>(states, 0.0))};
    }

    /// Table preferring action a in state a: theta_a = temperature * e_a.
    /// Used as the fixed behavioral parameters; hitting the believed cell.
    static PolicyTable hit_preference(int actions, int states, double temperature) {
        PolicyTable t = zeros(actions, states);
        for (int a = 0; a < actions && a < states; ++a) t.theta[a][a] = temperature;
        return t;
    }
};

/// Full Boltzmann distribution over actions given a belief, log-sum-exp
/// stabilized.
inline std::vector<double> boltzmann_distribution(const BeliefVector& mu,
                                                  const PolicyTable& table) {
    const int actions = table.action_count();
    std::vector<double> logits(actions);
    for (int a = 0; a < actions; ++a)
        logits[a] = std::inner_product(mu.begin(), mu.end(), table.theta[a].begin(), 0.0);
    double max_logit = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double l : logits) denom += std::exp(l - max_logit);
    std::vector<double> probs(actions);
    for (int a = 0; a < actions; ++a) probs[a] = std::exp(logits[a] - max_logit) / denom;
    return probs;
}

inline double boltzmann_prob(const BeliefVector& mu, const PolicyTable& table, int action) {
    return boltzmann_distribution(mu, table)[action];
}

/// Gradient of ln pi(a|mu) with respect to the chosen action's own parameter
/// block theta_a: Psi(a) = mu * (1 - pi(a|mu)). Euclidean norm <= 1 always.
inline std::vector<double> log_policy_gradient(const BeliefVector& mu, const PolicyTable& table,
                                               int action) {
    double pi_a = boltzmann_prob(mu, table, action);
    std::vector<double> grad(mu.size());
    for (std::size_t s = 0; s < mu.size(); ++s) grad[s] = mu[s] * (1.0 - pi_a);
    return grad;
}

/// Fixed behavioral policy: Boltzmann with a uniform floor mixture,
/// b = (1 - floor_weight) * softmax + floor_weight / |A|. Parameters are
/// time-invariant across a run; the floor keeps every action probability
/// at least floor_weight / |A|.
struct BehavioralPolicy {
    PolicyTable table;
    double floor_weight = 0.1;

    std::vector<double> distribution(const BeliefVector& mu) const {
        std::vector<double> probs = boltzmann_distribution(mu, table);
        const double u = floor_weight / probs.size();
        for (double& p : probs) p = (1.0 - floor_weight) * p + u;
        return probs;
    }

    double prob(const BeliefVector& mu, int action) const { return distribution(mu)[action]; }

    double min_prob() const { return floor_weight / table.action_count(); }

    int sample(const BeliefVector& mu, std::mt19937_64& rng) const {
        std::vector<double> probs = distribution(mu);
        std::discrete_distribution<int> dist(probs.begin(), probs.end());
        return dist(rng);
    }
};

}  // namespace maopac
