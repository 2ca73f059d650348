#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "maopac/errors.hpp"
#include "maopac/topology.hpp"

namespace maopac {

/// Log importance ratio ln(pi/b) for one agent's chosen action. The
/// behavioral probability must stay above its configured floor
/// (time-invariant and nonzero behavioral policy).
inline double local_log_ratio(double target_prob, double behavioral_prob, double floor) {
    if (!(behavioral_prob >= floor) || floor <= 0.0)
        throw AssumptionViolation("behavioral probability " + std::to_string(behavioral_prob) +
                                  " below floor " + std::to_string(floor) +
                                  "; behavioral policy must be time-invariant and nonzero");
    if (!(target_prob > 0.0))
        throw AssumptionViolation("target probability must be positive");
    return std::log(target_prob / behavioral_prob);
}

/// T_rho rounds of C-weighted averaging of the per-agent log ratios. Double
/// stochasticity keeps the network average invariant across rounds.
inline std::vector<double> diffuse_log_ratios(std::vector<double> p, const CombinationMatrix& c,
                                              int t_rho) {
    const int agents = static_cast<int>(p.size());
    if (c.size() != agents) throw ConfigError("diffuse_log_ratios: dimension mismatch");
    if (t_rho < 0) throw ConfigError("diffuse_log_ratios: negative iteration count");
    std::vector<double> next(agents);
    for (int t = 0; t < t_rho; ++t) {
        for (int k = 0; k < agents; ++k) {
            double acc = 0.0;
            for (int l = 0; l < agents; ++l) acc += c(l, k) * p[l];
            next[k] = acc;
        }
        p.swap(next);
    }
    return p;
}

struct RecoveredRatio {
    double value = 1.0;
    bool clamped = false;
};

/// Recovers the joint importance ratio exp(K * p_tilde); at exact consensus
/// this equals the product of the individual ratios. Clamped to 1/b_eps,
/// which every downstream bound presumes.
inline RecoveredRatio recover_ratio(double p_tilde, int agent_count, double b_eps) {
    if (agent_count < 1) throw ConfigError("recover_ratio: agent_count must be >= 1");
    double rho = std::exp(agent_count * p_tilde);
    if (b_eps > 0.0 && rho > 1.0 / b_eps) return {1.0 / b_eps, true};
    return {rho, false};
}

/// Smallest T_rho bringing the consensus residual under tol, given the
/// second-eigenvalue magnitude of C.
inline int auto_t_rho(double lambda2, double tol = 1e-8) {
    if (lambda2 <= 0.0) return 1;
    if (lambda2 >= 1.0) throw ConfigError("auto_t_rho: |lambda2| must be < 1");
    return static_cast<int>(std::ceil(std::log(tol) / std::log(lambda2)));
}

}  // namespace maopac
