#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "maopac/errors.hpp"
#include "maopac/topology.hpp"

namespace maopac {

/// Probability distribution over the S global states held by one agent.
using BeliefVector = std::vector<double>;

constexpr double kBeliefSumTol = 1e-10;
// Log-space floor for entries whose likelihood is strictly positive; true
// structural zeros (-inf) propagate.
constexpr double kLogFloor = -690.0;  // ~ log(1e-300)

inline bool is_valid_belief(const BeliefVector& b) {
    double sum = 0.0;
    for (double p : b) {
        if (!(p >= 0.0)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= kBeliefSumTol;
}

inline BeliefVector uniform_belief(int states) {
    return BeliefVector(states, 1.0 / states);
}

inline BeliefVector one_hot_belief(int states, int s) {
    BeliefVector b(states, 0.0);
    b[s] = 1.0;
    return b;
}

/// Normalizes a vector of log-masses into a belief. All-(-inf) input means
/// every state was ruled out.
inline BeliefVector normalize_log(const std::vector<double>& log_mass) {
    double max_log = -std::numeric_limits<double>::infinity();
    for (double lm : log_mass) max_log = std::max(max_log, lm);
    if (!std::isfinite(max_log))
        throw DegenerateBeliefError("belief update left zero mass on every state");
    double denom = 0.0;
    for (double lm : log_mass) denom += std::exp(lm - max_log);
    BeliefVector out(log_mass.size());
    for (std::size_t s = 0; s < log_mass.size(); ++s)
        out[s] = std::exp(log_mass[s] - max_log) / denom;
    return out;
}

/// Bayes adapt step: psi(s) proportional to L(xi|s) * prior(s). Likelihoods
/// are passed in log form, one entry per state; -inf marks a structural zero.
inline BeliefVector adapt_belief(const BeliefVector& prior,
                                 const std::vector<double>& log_likelihoods) {
    if (prior.size() != log_likelihoods.size())
        throw ConfigError("adapt_belief: dimension mismatch");
    std::vector<double> log_mass(prior.size());
    for (std::size_t s = 0; s < prior.size(); ++s) {
        double lp = prior[s] > 0.0 ? std::log(prior[s]) : -std::numeric_limits<double>::infinity();
        log_mass[s] = lp + log_likelihoods[s];
    }
    return normalize_log(log_mass);
}

/// Geometric combine step: out(s) proportional to prod_l psi_l(s)^{w_l}.
/// Computed in log space; positive entries are floored at kLogFloor so a
/// deep-but-nonzero neighbor cannot underflow the product.
inline BeliefVector combine_beliefs(const std::vector<BeliefVector>& psis,
                                    const std::vector<double>& weights) {
    if (psis.size() != weights.size() || psis.empty())
        throw ConfigError("combine_beliefs: dimension mismatch");
    const std::size_t states = psis[0].size();
    std::vector<double> log_mass(states, 0.0);
    for (std::size_t l = 0; l < psis.size(); ++l) {
        if (psis[l].size() != states) throw ConfigError("combine_beliefs: ragged beliefs");
        if (weights[l] == 0.0) continue;
        for (std::size_t s = 0; s < states; ++s) {
            double lp = psis[l][s] > 0.0 ? std::max(std::log(psis[l][s]), kLogFloor)
                                         : -std::numeric_limits<double>::infinity();
            log_mass[s] += weights[l] * lp;
        }
    }
    return normalize_log(log_mass);
}

/// Supplies the log-likelihood vector of agent k's fresh observation at inner
/// iteration t (one new observation per agent per iteration).
using ObservationModel = std::function<std::vector<double>(int agent, int t)>;

/// Runs T adapt-then-combine rounds across the network and returns the final
/// per-agent beliefs. Every round is barrier-synchronized: all adapts finish
/// before any combine reads neighbor values.
inline std::vector<BeliefVector> estimate_belief(std::vector<BeliefVector> beliefs,
                                                 const ObservationModel& model,
                                                 const CombinationMatrix& c, int rounds) {
    const int agents = static_cast<int>(beliefs.size());
    if (c.size() != agents) throw ConfigError("estimate_belief: matrix/agent mismatch");
    if (rounds < 1) throw ConfigError("estimate_belief: rounds must be >= 1");
    std::vector<BeliefVector> psis(agents);
    for (int t = 0; t < rounds; ++t) {
        for (int k = 0; k < agents; ++k) psis[k] = adapt_belief(beliefs[k], model(k, t));
        for (int k = 0; k < agents; ++k) {
            std::vector<BeliefVector> neigh;
            std::vector<double> w;
            for (int l = 0; l < agents; ++l) {
                if (c(l, k) > 0.0) {
                    neigh.push_back(psis[l]);
                    w.push_back(c(l, k));
                }
            }
            beliefs[k] = combine_beliefs(neigh, w);
        }
    }
    return beliefs;
}

}  // namespace maopac
